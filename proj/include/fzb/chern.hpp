#ifndef FZB_CHERN_HPP
#define FZB_CHERN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "fzb/calculus.hpp"
#include "fzb/exact.hpp"
#include "fzb/projectors.hpp"

namespace fzb {

/// dp as a fiber-valued one-form: components [X_a (x) 1, p].
inline FiberForm d_projector(const FuzzyContext& ctx,
                             const EquivariantProjector& proj) {
  if (proj.two_N != ctx.two_N)
    throw DimensionMismatch("d_projector: projector and context disagree on 2N");
  const int m = proj.two_nu.dimension();
  FiberForm dp(1, ctx.dim(), m);
  for (int a = 1; a <= 3; ++a)
    dp.component(a - 1) = derive(ctx, DerivationIndex(a), proj.p);
  return dp;
}

/// Fiber traces T_ab = Tr_2(p dp_a dp_b), each an algebra element. Only the
/// part antisymmetric in (a, b) equals f eps_abc X_c; the symmetric remainder
/// drops out of the curvature and of every epsilon contraction.
struct PairTraces {
  std::array<std::array<Matrix, 3>, 3> t;
};

namespace detail {

inline PairTraces pair_traces_from(const EquivariantProjector& proj,
                                   const FiberForm& dp) {
  const int m = proj.two_nu.dimension();
  std::array<Matrix, 3> pdp;
  for (int a = 0; a < 3; ++a) pdp[a] = proj.p * dp.component(a);
  PairTraces out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.t[a][b] =
          partial_trace_second_of_product(pdp[a], dp.component(b), m);
  return out;
}

/// Tr(a b) without the product matrix.
inline Complex trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace detail

inline PairTraces chern_pair_traces(const FuzzyContext& ctx,
                                    const EquivariantProjector& proj) {
  return detail::pair_traces_from(proj, d_projector(ctx, proj));
}

/// Chern character two-form of the bundle: components T_ab - T_ba, scalar
/// fiber. Proportional to the invariant basis two-form with coefficient f.
inline FiberForm curvature_two_form(const FuzzyContext& ctx,
                                    const PairTraces& traces) {
  FiberForm f(2, ctx.dim(), 1);
  f.component(0) = traces.t[0][1] - traces.t[1][0];
  f.component(1) = traces.t[0][2] - traces.t[2][0];
  f.component(2) = traces.t[1][2] - traces.t[2][1];
  return f;
}

inline FiberForm curvature_two_form(const FuzzyContext& ctx,
                                    const EquivariantProjector& proj) {
  return curvature_two_form(ctx, chern_pair_traces(ctx, proj));
}

/// Proportionality coefficient of the curvature against eps_abc X_c, read off
/// through the epsilon-contracted trace. Purely imaginary up to rounding.
inline Complex extract_f(const FuzzyContext& ctx, const PairTraces& traces) {
  Complex acc(0.0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps != 0)
          acc += double(eps) * detail::trace_of_product(traces.t[a - 1][b - 1],
                                                        ctx.X[c - 1]);
      }
  return acc / (2.0 * ctx.casimir * ctx.dim());
}

/// Exact rational curvature coefficient in the doubled variables n = 2N,
/// l = 2nu, multiplied by i.
inline Complex f_closed_form(TwoJ two_N, TwoJ two_nu, Branch branch) {
  target_two_j(two_N, two_nu, branch);  // validates the branch domain
  const long long n = two_N.value();
  const long long l = two_nu.value();
  if (n == 0 || l == 0) return Complex(0.0);
  Rational g;
  if (branch == Branch::Plus) {
    g = -Rational(BigInt(n) * l * (n + l + 1) * (n + l + 2),
                  BigInt(2) * (n + l) * (n + l) * (n + 1) * (n + 2));
  } else {
    g = Rational(BigInt(l) * (n + 2) * (n - l) * (n - l + 1),
                 BigInt(2) * n * (n + 1) * (n - l + 2) * (n - l + 2));
  }
  return kImag * to_double(g);
}

namespace detail {

inline Complex charge_q_raw(TwoJ two_N, Complex f) {
  const double s2 = double(two_N.value()) * double(two_N.value() + 2) / 4.0;
  return -4.0 * kImag * f * s2 * std::sqrt(s2) / (0.5 - s2);
}

}  // namespace detail

/// Topological charge q = 4 g s^3 / (1/2 - s^2) for f = i g, s^2 = N(N+1).
/// The input must be imaginary up to 1e-10 or the result is rejected.
inline double charge_q(TwoJ two_N, Complex f) {
  const Complex raw = detail::charge_q_raw(two_N, f);
  if (std::abs(raw.imag()) > 1e-10)
    throw NonRealResult("charge_q: nonreal charge, imaginary part " +
                        std::to_string(raw.imag()));
  return raw.real() + 0.0;  // folds -0 (trivial fiber) onto +0
}

/// Integer the first Chern number approaches as N grows: -2nu for the plus
/// branch, +2nu for the minus branch.
inline int k_limit(TwoJ two_nu, Branch branch) {
  return branch == Branch::Plus ? -two_nu.value() : two_nu.value();
}

/// Degree-2r piece of the Chern character: the fiber rank function at r = 0,
/// the curvature two-form at r = 1, zero beyond (no four-forms survive on
/// three derivations).
inline FiberForm chern_component(const FuzzyContext& ctx,
                                 const EquivariantProjector& proj, int r) {
  if (r < 0) throw DomainError("chern_component: negative degree index");
  if (r == 0) {
    FiberForm out(0, ctx.dim(), 1);
    out.value() = partial_trace_second(proj.p, proj.two_nu.dimension());
    return out;
  }
  if (r == 1) return curvature_two_form(ctx, proj);
  return FiberForm::zero(std::min(2 * r, 4), ctx.dim(), 1);
}

/// Collapse of the charge trace to a single highest-weight expectation:
/// lhs = eps_abc Tr(p dp_a dp_b X_c (x) 1) against rhs = dim_target * b with
/// b = eps_abc <h| [X_a (x) 1, p][X_b (x) 1, p] (X_c (x) 1) |h>. Expanding b
/// gives b = c + i d with c the bare five-factor expectation (imaginary) and
/// d = -sum_a <h| X_a p X_a |h> (real).
struct TraceReductionReport {
  Complex lhs;
  Complex rhs;
  Complex b;
  Complex c;
  double d;
  double gap;  // |lhs - rhs| / max(1, |rhs|)
};

namespace detail {

inline TraceReductionReport trace_reduction_from(const FuzzyContext& ctx,
                                                 const EquivariantProjector& proj,
                                                 const PairTraces& traces) {
  Complex lhs(0.0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps != 0)
          lhs += double(eps) *
                 trace_of_product(traces.t[a - 1][b - 1], ctx.X[c - 1]);
      }

  const WeightVector top =
      highest_weight(proj.two_N, proj.two_nu, proj.branch);
  const int m = proj.two_nu.dimension();
  Vector h = top.coefficients;
  h /= h.norm();
  std::array<Vector, 3> xh, pxh;
  for (int a = 0; a < 3; ++a) {
    xh[a] = kron_left_mul(ctx.X[a], h, m);
    pxh[a] = proj.p * xh[a];
  }
  Complex c_term(0.0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps == 0) continue;
        const Vector mid = kron_left_mul(ctx.X[b - 1], pxh[c - 1], m);
        c_term += double(eps) * xh[a - 1].dot(proj.p * mid);
      }
  double d_term = 0.0;
  for (int a = 0; a < 3; ++a) d_term -= xh[a].dot(pxh[a]).real();

  const Complex b_val = c_term + kImag * d_term;
  const Complex rhs = double(proj.dim_target()) * b_val;
  const double gap = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  return {lhs, rhs, b_val, c_term, d_term, gap};
}

}  // namespace detail

inline TraceReductionReport charge_trace_reduction(TwoJ two_N, TwoJ two_nu,
                                                   Branch branch) {
  const FuzzyContext ctx = make_fuzzy_context(two_N);
  const EquivariantProjector proj = projector_spectral(two_N, two_nu, branch);
  return detail::trace_reduction_from(ctx, proj,
                                      chern_pair_traces(ctx, proj));
}

/// Scalar intertwiner data behind the closed charge formulas, all in doubled
/// variables. |h> is the branch highest weight, |v> = J_- |h> unnormalized,
/// |w> = (X_1 (x) 1) |h>, and every X_3 below means X_3 (x) 1.
struct LambdaMuReport {
  TwoJ two_N;
  TwoJ two_nu;
  Branch branch;
  double lambda_numeric;
  double lambda_closed;
  double vv_numeric;  // <v|v>
  double vv_closed;
  std::optional<double> mu_numeric;  // minus branch: n/2 - <h|X_3|h>
  std::optional<double> mu_closed;
  std::optional<double> wpw_numeric;  // plus branch: <w|p|w>
  std::optional<double> wpw_closed;
  std::optional<double> wpx3pw_numeric;  // plus branch: <w|p X_3 p|w>
  std::optional<double> wpx3pw_closed;
  std::optional<double> vx3v_numeric;  // minus branch: <v|X_3|v>
  std::optional<double> vx3v_closed;
  Complex b_assembled;  // branch assembly from the pieces above
  Complex b_direct;     // b from the trace reduction
};

inline LambdaMuReport lambda_mu_check(TwoJ two_N, TwoJ two_nu, Branch branch) {
  const FuzzyContext ctx = make_fuzzy_context(two_N);
  const EquivariantProjector proj = projector_spectral(two_N, two_nu, branch);
  const TotalGenerators gen = total_generators(two_N, two_nu);
  const int m = two_nu.dimension();
  const double n = two_N.value();
  const double l = two_nu.value();

  const WeightVector top = highest_weight(two_N, two_nu, branch);
  Vector h = top.coefficients;
  h /= h.norm();
  const Vector v = (gen.J[0] - kImag * gen.J[1]) * h;
  const Vector w = kron_left_mul(ctx.X[0], h, m);
  const Vector x3h = kron_left_mul(ctx.X[2], h, m);

  LambdaMuReport rep{two_N,  two_nu, branch, 0.0, 0.0, 0.0, 0.0,
                     {},     {},     {},     {},  {},  {},  {},
                     {},     Complex(0.0),   Complex(0.0)};
  rep.vv_numeric = v.squaredNorm();
  rep.vv_closed = double(target_two_j(two_N, two_nu, branch).value());
  rep.lambda_numeric = (v.dot(w) / rep.vv_numeric).real();

  if (branch == Branch::Plus) {
    rep.lambda_closed = n / (2.0 * (n + l));
    const Vector pw = proj.p * w;
    rep.wpw_numeric = w.dot(pw).real();
    rep.wpw_closed = n * n / (4.0 * (n + l));
    const Vector x3pw = kron_left_mul(ctx.X[2], pw, m);
    rep.wpx3pw_numeric = pw.dot(x3pw).real();
    rep.wpx3pw_closed =
        (n * n / ((n + l) * (n + l))) * (n * (n - 2.0) + n * l) / 8.0;
    rep.b_assembled = 2.0 * kImag * (n - 1.0) * *rep.wpw_numeric -
                      2.0 * kImag * *rep.wpx3pw_numeric -
                      kImag * n * n / 4.0;
  } else {
    rep.lambda_closed = (n + 2.0) / (2.0 * (n - l + 2.0));
    rep.mu_numeric = n / 2.0 - h.dot(x3h).real();
    rep.mu_closed = l / (n + 2.0 - l);
    const Vector x3v = kron_left_mul(ctx.X[2], v, m);
    rep.vx3v_numeric = v.dot(x3v).real();
    rep.vx3v_closed =
        (n + 2.0) * (n - l - 2.0) * (n - l) / (2.0 * (n - l + 2.0));
    const double mu = *rep.mu_numeric;
    const double lam = rep.lambda_numeric;
    rep.b_assembled =
        2.0 * kImag * lam * lam *
            ((n - 2.0 * mu - 1.0) * rep.vv_numeric - *rep.vx3v_numeric) -
        kImag * (n / 2.0 - mu) * (n / 2.0 - mu);
  }

  rep.b_direct =
      detail::trace_reduction_from(ctx, proj, chern_pair_traces(ctx, proj)).b;
  return rep;
}

/// Curvature consistency of the Grassmann connection on the row module
/// {psi : psi p = psi}: nabla psi = (d psi) p, and nabla^2 psi must equal
/// -psi (dp wedge dp) p. Returns the largest component residual.
inline double connection_consistency(const FuzzyContext& ctx,
                                     const EquivariantProjector& proj,
                                     const Matrix& psi) {
  if (proj.two_N != ctx.two_N)
    throw DimensionMismatch(
        "connection_consistency: projector and context disagree on 2N");
  const int n = ctx.dim();
  const int m = proj.two_nu.dimension();
  if (psi.rows() != n || psi.cols() != Eigen::Index(n) * m)
    throw DimensionMismatch(
        "connection_consistency: module element must be n x (n m)");
  const Matrix& p = proj.p;
  if (max_abs(psi * p - psi) > 1e-9 * std::max(1.0, max_abs(psi)))
    throw ModuleMembershipError(
        "connection_consistency: psi does not satisfy psi p = psi");

  auto e_rect = [&](int a, const Matrix& f) {
    return (ctx.X[a - 1] * f - kron_right_mul(f, ctx.X[a - 1], m)).eval();
  };
  std::array<Matrix, 3> nabla;
  for (int a = 1; a <= 3; ++a) nabla[a - 1] = e_rect(a, psi) * p;
  const FiberForm dp = d_projector(ctx, proj);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a)
    for (int b = a + 1; b <= 3; ++b) {
      Matrix second = e_rect(a, nabla[b - 1]) - e_rect(b, nabla[a - 1]);
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps != 0) second -= kImag * double(eps) * nabla[c - 1];
      }
      second = second * p;
      const Matrix curv = dp.component(a - 1) * dp.component(b - 1) -
                          dp.component(b - 1) * dp.component(a - 1);
      worst = std::max(worst, max_abs(second + psi * curv * p));
    }
  return worst;
}

/// Full diagnostic record for one bundle: charge values against the closed
/// forms plus every internal consistency residual, keyed by name.
struct ChargeReport {
  TwoJ two_N;
  TwoJ two_nu;
  Branch branch;
  Complex f_numeric;
  Complex f_closed;
  double q;
  double c1;
  int k_limit;
  std::map<std::string, double> residuals;

  double max_residual() const {
    double worst = 0.0;
    for (const auto& [key, value] : residuals)
      worst = std::max(worst, value);
    return worst;
  }
};

inline ChargeReport chern_number(TwoJ two_N, TwoJ two_nu, Branch branch) {
  const FuzzyContext ctx = make_fuzzy_context(two_N);
  const EquivariantProjector sp = projector_spectral(two_N, two_nu, branch);
  const EquivariantProjector orb = projector_orbit(two_N, two_nu, branch);
  const SpinRep fiber = make_spin_rep(two_nu);
  const Matrix& p = sp.p;
  const int m = two_nu.dimension();

  std::map<std::string, double> res;
  res["hermiticity"] = max_abs(p - p.adjoint());
  res["idempotence"] = max_abs(p * p - p);
  res["trace"] = std::abs(p.trace() - Complex(sp.dim_target()));
  res["spectral_orbit_gap"] = max_abs(p - orb.p);

  const FiberForm dp = d_projector(ctx, sp);
  const std::array<const Matrix*, 3> fx{&fiber.x1, &fiber.x2, &fiber.x3};
  double equivariance = 0.0;
  for (int a = 0; a < 3; ++a) {
    // [J_a, p] = dp_a + [1 (x) x_a, p], assembled without large products.
    const Matrix fiber_comm =
        fiber_left_mul(*fx[a], p) - fiber_right_mul(p, *fx[a]);
    equivariance = std::max(equivariance, max_abs(dp.component(a) + fiber_comm));
  }
  res["equivariance"] = equivariance;

  const PairTraces traces = detail::pair_traces_from(sp, dp);
  const FiberForm curv = curvature_two_form(ctx, traces);
  const Complex f_num = extract_f(ctx, traces);
  const Complex f_cl = f_closed_form(two_N, two_nu, branch);
  res["oracle_f"] = std::abs(f_num - f_cl) / std::max(1.0, std::abs(f_cl));

  const TwoFormCoefficient fit_basis =
      two_form_coefficient(ctx, curv, invariant_basis_two_form(ctx));
  res["proportionality"] = fit_basis.residual;
  res["cocycle"] = exterior_d(ctx, curv).max_abs_coeff();

  const Complex raw_q = detail::charge_q_raw(two_N, f_num);
  res["q_imaginary"] = std::abs(raw_q.imag());
  if (res["q_imaginary"] > 1e-10)
    throw NonRealResult("chern_number: nonreal charge, imaginary part " +
                        std::to_string(raw_q.imag()));
  const double q = raw_q.real();

  const TwoFormCoefficient fit_volume =
      two_form_coefficient(ctx, curv, volume_form(ctx));
  const Complex c1_integral = kImag * fit_volume.lambda /
                              (2.0 * std::numbers::pi);
  res["c1_route_gap"] = std::abs(Complex(-q, 0.0) - c1_integral);

  res["trace_reduction"] = detail::trace_reduction_from(ctx, sp, traces).gap;

  return ChargeReport{two_N, two_nu, branch,
                      f_num, f_cl,   q,
                      -q,    fzb::k_limit(two_nu, branch), std::move(res)};
}

}  // namespace fzb

#endif  // FZB_CHERN_HPP
