#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fzb/chern.hpp"
#include "test_util.hpp"

using fzb::Branch;
using fzb::ChargeReport;
using fzb::Complex;
using fzb::EquivariantProjector;
using fzb::FuzzyContext;
using fzb::kImag;
using fzb::Matrix;
using fzb::TwoJ;
using fzb::Vector;
using fzb::max_abs;

namespace {

const double kSqrt2 = std::sqrt(2.0);

double closed_c1(int two_n, int two_nu, Branch branch) {
  return -fzb::charge_q(TwoJ(two_n),
                        fzb::f_closed_form(TwoJ(two_n), TwoJ(two_nu), branch));
}

}  // namespace

TEST_CASE("curvature is proportional to the invariant generators") {
  FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(2));
  for (Branch branch : {Branch::Plus, Branch::Minus}) {
    EquivariantProjector proj =
        fzb::projector_spectral(TwoJ(2), TwoJ(1), branch);
    fzb::PairTraces traces = fzb::chern_pair_traces(ctx, proj);
    const Complex f = branch == Branch::Plus ? Complex(0.0, -5.0 / 27.0)
                                             : Complex(0.0, 2.0 / 27.0);
    // Only the antisymmetric part of T_ab is f eps_abc X_c; the pair traces
    // themselves also carry a symmetric equivariant piece.
    REQUIRE(max_abs(0.5 * (traces.t[0][1] - traces.t[1][0]) - f * ctx.X[2]) <
            1e-13);
    REQUIRE(max_abs(0.5 * (traces.t[1][2] - traces.t[2][1]) - f * ctx.X[0]) <
            1e-13);

    fzb::FiberForm curv = fzb::curvature_two_form(ctx, traces);
    REQUIRE(max_abs(curv.at(1, 2) - 2.0 * f * ctx.X[2]) < 1e-13);
    fzb::FiberForm scaled_basis = fzb::invariant_basis_two_form(ctx);
    scaled_basis *= f;
    for (int i = 0; i < 3; ++i)
      REQUIRE(max_abs(curv.component(i) - scaled_basis.component(i)) < 1e-13);

    const Complex f_num = fzb::extract_f(ctx, traces);
    REQUIRE(std::abs(f_num - f) < 1e-13);
  }
}

TEST_CASE("closed-form charges at the smallest bundle") {
  ChargeReport plus = fzb::chern_number(TwoJ(2), TwoJ(1), Branch::Plus);
  REQUIRE(std::abs(plus.f_closed - Complex(0.0, -5.0 / 27.0)) < 1e-15);
  REQUIRE(std::abs(plus.f_numeric - plus.f_closed) < 1e-12);
  REQUIRE(plus.q == Catch::Approx(80.0 * kSqrt2 / 81.0).epsilon(1e-10));
  REQUIRE(plus.c1 == -plus.q);
  REQUIRE(plus.k_limit == -1);
  REQUIRE(plus.max_residual() < 1e-9);
  for (const char* key :
       {"hermiticity", "idempotence", "trace", "equivariance",
        "spectral_orbit_gap", "proportionality", "cocycle", "oracle_f",
        "q_imaginary", "c1_route_gap", "trace_reduction"})
    REQUIRE(plus.residuals.count(key) == 1);

  ChargeReport minus = fzb::chern_number(TwoJ(2), TwoJ(1), Branch::Minus);
  REQUIRE(std::abs(minus.f_closed - Complex(0.0, 2.0 / 27.0)) < 1e-15);
  REQUIRE(std::abs(minus.f_numeric - minus.f_closed) < 1e-12);
  REQUIRE(minus.q == Catch::Approx(-32.0 * kSqrt2 / 81.0).epsilon(1e-10));
  REQUIRE(minus.c1 == -minus.q);
  REQUIRE(minus.k_limit == 1);
  REQUIRE(minus.max_residual() < 1e-9);
}

TEST_CASE("charge extraction matches the oracle across the grid") {
  for (int two_n = 1; two_n <= 30; ++two_n)
    for (int two_nu = 0; two_nu <= 4; ++two_nu)
      for (Branch branch : {Branch::Plus, Branch::Minus}) {
        if (branch == Branch::Minus && two_n <= two_nu) continue;
        CAPTURE(two_n, two_nu, branch == Branch::Plus);
        ChargeReport rep = fzb::chern_number(TwoJ(two_n), TwoJ(two_nu), branch);
        REQUIRE(std::abs(rep.f_numeric - rep.f_closed) <=
                1e-9 * std::max(1.0, std::abs(rep.f_closed)));
        REQUIRE(rep.max_residual() < 1e-9);
      }
}

TEST_CASE("trace reduction collapses to the highest weight") {
  fzb::TraceReductionReport plus =
      fzb::charge_trace_reduction(TwoJ(2), TwoJ(1), Branch::Plus);
  REQUIRE(std::abs(plus.b - Complex(0.0, -5.0 / 9.0)) < 1e-13);
  REQUIRE(std::abs(plus.lhs - Complex(0.0, -20.0 / 9.0)) < 1e-13);
  REQUIRE(std::abs(plus.rhs - 4.0 * plus.b) < 1e-15);
  REQUIRE(plus.gap < 1e-12);

  fzb::TraceReductionReport minus =
      fzb::charge_trace_reduction(TwoJ(2), TwoJ(1), Branch::Minus);
  REQUIRE(std::abs(minus.b - Complex(0.0, 4.0 / 9.0)) < 1e-13);
  REQUIRE(std::abs(minus.lhs - Complex(0.0, 8.0 / 9.0)) < 1e-13);
  REQUIRE(std::abs(minus.rhs - 2.0 * minus.b) < 1e-15);
  REQUIRE(minus.gap < 1e-12);

  // Independent route to b: the raw commutator expectation at the top weight.
  FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(2));
  EquivariantProjector proj =
      fzb::projector_spectral(TwoJ(2), TwoJ(1), Branch::Plus);
  fzb::FiberForm dp = fzb::d_projector(ctx, proj);
  Vector h = fzb::highest_weight(TwoJ(2), TwoJ(1), Branch::Plus).coefficients;
  Complex direct(0.0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = fzb::epsilon(a, b, c);
        if (eps == 0) continue;
        const Vector xch = fzb::kron_left_mul(ctx.X[c - 1], h, 2);
        direct += double(eps) *
                  h.dot(dp.component(a - 1) * (dp.component(b - 1) * xch));
      }
  REQUIRE(std::abs(direct - plus.b) < 1e-13);

  for (int two_n = 1; two_n <= 12; ++two_n)
    for (int two_nu = 0; two_nu <= 4; ++two_nu)
      for (Branch branch : {Branch::Plus, Branch::Minus}) {
        if (branch == Branch::Minus && two_n <= two_nu) continue;
        CAPTURE(two_n, two_nu, branch == Branch::Plus);
        fzb::TraceReductionReport rep =
            fzb::charge_trace_reduction(TwoJ(two_n), TwoJ(two_nu), branch);
        REQUIRE(rep.gap < 1e-9);
        REQUIRE(std::abs(rep.c.real()) < 1e-11);
        REQUIRE(rep.d <= 1e-12);
      }
}

TEST_CASE("lambda and mu intertwiners match closed forms") {
  fzb::LambdaMuReport plus =
      fzb::lambda_mu_check(TwoJ(2), TwoJ(1), Branch::Plus);
  REQUIRE(plus.lambda_numeric == Catch::Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(plus.vv_numeric == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(*plus.wpw_numeric == Catch::Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(*plus.wpx3pw_numeric == Catch::Approx(1.0 / 9.0).margin(1e-12));
  REQUIRE(std::abs(plus.b_assembled - Complex(0.0, -5.0 / 9.0)) < 1e-12);

  fzb::LambdaMuReport minus =
      fzb::lambda_mu_check(TwoJ(2), TwoJ(1), Branch::Minus);
  REQUIRE(minus.lambda_numeric == Catch::Approx(2.0 / 3.0).margin(1e-12));
  REQUIRE(*minus.mu_numeric == Catch::Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(minus.vv_numeric == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(*minus.vx3v_numeric == Catch::Approx(-2.0 / 3.0).margin(1e-12));
  REQUIRE(std::abs(minus.b_assembled - Complex(0.0, 4.0 / 9.0)) < 1e-12);

  fzb::LambdaMuReport wide =
      fzb::lambda_mu_check(TwoJ(4), TwoJ(1), Branch::Minus);
  REQUIRE(*wide.vx3v_numeric == Catch::Approx(9.0 / 5.0).margin(1e-12));

  for (int two_n = 1; two_n <= 10; ++two_n)
    for (int two_nu = 0; two_nu <= 3; ++two_nu)
      for (Branch branch : {Branch::Plus, Branch::Minus}) {
        if (branch == Branch::Minus && two_n <= two_nu) continue;
        CAPTURE(two_n, two_nu, branch == Branch::Plus);
        fzb::LambdaMuReport rep =
            fzb::lambda_mu_check(TwoJ(two_n), TwoJ(two_nu), branch);
        REQUIRE(rep.lambda_numeric ==
                Catch::Approx(rep.lambda_closed).margin(1e-10));
        REQUIRE(rep.vv_numeric == Catch::Approx(rep.vv_closed).margin(1e-10));
        if (branch == Branch::Plus) {
          REQUIRE(*rep.wpw_numeric ==
                  Catch::Approx(*rep.wpw_closed).margin(1e-10));
          REQUIRE(*rep.wpx3pw_numeric ==
                  Catch::Approx(*rep.wpx3pw_closed).margin(1e-10));
        } else {
          REQUIRE(*rep.mu_numeric ==
                  Catch::Approx(*rep.mu_closed).margin(1e-10));
          REQUIRE(*rep.vx3v_numeric ==
                  Catch::Approx(*rep.vx3v_closed).margin(1e-10));
        }
        REQUIRE(std::abs(rep.b_assembled - rep.b_direct) < 1e-10);
      }
}

TEST_CASE("connection squares to the curvature action") {
  auto gen = fzbtest::rng(131);
  struct Point {
    int two_n, two_nu;
    Branch branch;
  };
  for (const Point& pt : {Point{3, 2, Branch::Plus}, Point{4, 1, Branch::Minus}}) {
    FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(pt.two_n));
    EquivariantProjector proj =
        fzb::projector_spectral(TwoJ(pt.two_n), TwoJ(pt.two_nu), pt.branch);
    const int n = ctx.dim();
    const int big = n * (pt.two_nu + 1);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix psi = fzbtest::random_matrix(gen, n, big) * proj.p;
      REQUIRE(fzb::connection_consistency(ctx, proj, psi) < 1e-10);
    }
    REQUIRE_THROWS_AS(
        fzb::connection_consistency(ctx, proj,
                                    fzbtest::random_matrix(gen, n, big)),
        fzb::ModuleMembershipError);
    REQUIRE_THROWS_AS(
        fzb::connection_consistency(ctx, proj,
                                    Matrix::Zero(big, big) * proj.p),
        fzb::DimensionMismatch);
  }
}

TEST_CASE("partial trace composes with the full trace") {
  struct Point {
    int two_n, two_nu;
    Branch branch;
  };
  for (const Point& pt : {Point{2, 1, Branch::Plus}, Point{3, 2, Branch::Minus}}) {
    FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(pt.two_n));
    EquivariantProjector proj =
        fzb::projector_spectral(TwoJ(pt.two_n), TwoJ(pt.two_nu), pt.branch);
    fzb::FiberForm dp = fzb::d_projector(ctx, proj);
    fzb::PairTraces traces = fzb::chern_pair_traces(ctx, proj);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Complex full =
            (proj.p * dp.component(a) * dp.component(b)).trace();
        REQUIRE(std::abs(traces.t[a][b].trace() - full) < 1e-12);
      }
  }
}

TEST_CASE("trivial fiber carries no charge") {
  for (Branch branch : {Branch::Plus, Branch::Minus}) {
    ChargeReport rep = fzb::chern_number(TwoJ(4), TwoJ(0), branch);
    REQUIRE(std::abs(rep.f_numeric) < 1e-13);
    REQUIRE(rep.f_closed == Complex(0.0));
    REQUIRE(std::abs(rep.q) < 1e-12);
    REQUIRE(rep.k_limit == 0);
    REQUIRE(rep.max_residual() < 1e-10);
    FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(4));
    EquivariantProjector proj = fzb::projector_spectral(TwoJ(4), TwoJ(0), branch);
    REQUIRE(fzb::curvature_two_form(ctx, proj).max_abs_coeff() < 1e-13);
  }
}

TEST_CASE("finite size charge approaches its integer limit") {
  ChargeReport rep = fzb::chern_number(TwoJ(20), TwoJ(1), Branch::Plus);
  REQUIRE(std::abs(rep.c1 + 1.0) > 0.02);
  REQUIRE(std::abs(rep.c1 + 1.0) < 0.2);

  // Closed-form deviation obeys |c1 - k| <= 2|k|/N and halves when N doubles.
  for (int two_nu = 1; two_nu <= 4; ++two_nu)
    for (Branch branch : {Branch::Plus, Branch::Minus}) {
      const int k = fzb::k_limit(TwoJ(two_nu), branch);
      for (int two_n : {10, 20, 40, 80}) {
        CAPTURE(two_n, two_nu, branch == Branch::Plus);
        const double err = std::abs(closed_c1(two_n, two_nu, branch) - k);
        REQUIRE(err <= 2.0 * std::abs(k) / (two_n / 2.0));
      }
      for (int two_n : {20, 40}) {
        const double err_n = std::abs(closed_c1(two_n, two_nu, branch) - k);
        const double err_2n =
            std::abs(closed_c1(2 * two_n, two_nu, branch) - k);
        CAPTURE(two_n, two_nu, branch == Branch::Plus);
        // First-order convergence: the ratio tends to 1/2 from above. The
        // worst point in this range is 0.65344 (N = 10, nu = 2, plus series).
        REQUIRE(err_2n / err_n > 0.35);
        REQUIRE(err_2n / err_n < 0.66);
      }
    }
}

TEST_CASE("chern character components") {
  FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(2));
  EquivariantProjector proj =
      fzb::projector_spectral(TwoJ(2), TwoJ(1), Branch::Plus);
  fzb::FiberForm rank = fzb::chern_component(ctx, proj, 0);
  REQUIRE(rank.degree() == 0);
  REQUIRE(std::abs(rank.value().trace() - Complex(4.0)) < 1e-12);
  REQUIRE(max_abs(rank.value() - rank.value().adjoint()) < 1e-13);

  fzb::FiberForm first = fzb::chern_component(ctx, proj, 1);
  fzb::FiberForm curv = fzb::curvature_two_form(ctx, proj);
  for (int i = 0; i < 3; ++i)
    REQUIRE(max_abs(first.component(i) - curv.component(i)) == 0.0);

  REQUIRE(fzb::chern_component(ctx, proj, 2).degree() == 4);
  REQUIRE(fzb::chern_component(ctx, proj, 2).component_count() == 0);
  REQUIRE(fzb::chern_component(ctx, proj, 5).degree() == 4);
}

TEST_CASE("invalid charge inputs are rejected") {
  REQUIRE_THROWS_AS(fzb::chern_number(TwoJ(2), TwoJ(4), Branch::Minus),
                    fzb::BranchDomainError);
  REQUIRE_THROWS_AS(fzb::f_closed_form(TwoJ(3), TwoJ(5), Branch::Minus),
                    fzb::BranchDomainError);
  REQUIRE_THROWS_AS(fzb::charge_q(TwoJ(4), Complex(0.25, 0.0)),
                    fzb::NonRealResult);
  FuzzyContext ctx = fzb::make_fuzzy_context(TwoJ(2));
  EquivariantProjector proj =
      fzb::projector_spectral(TwoJ(4), TwoJ(1), Branch::Plus);
  REQUIRE_THROWS_AS(fzb::d_projector(ctx, proj), fzb::DimensionMismatch);
  EquivariantProjector small =
      fzb::projector_spectral(TwoJ(2), TwoJ(1), Branch::Plus);
  REQUIRE_THROWS_AS(fzb::chern_component(ctx, small, -1), fzb::DomainError);
}
