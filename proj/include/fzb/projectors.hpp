#ifndef FZB_PROJECTORS_HPP
#define FZB_PROJECTORS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "fzb/su2.hpp"
#include "fzb/types.hpp"

namespace fzb {

/// Generators J_a = X_a (x) 1 + 1 (x) x_a of the diagonal action on
/// C^(2N+1) (x) C^(2nu+1), plus the total casimir J^2 assembled exactly from
/// the identity J^2 = (c_N + c_nu) 1 + 2 sum_a X_a (x) x_a.
struct TotalGenerators {
  TwoJ two_N;
  TwoJ two_nu;
  std::array<Matrix, 3> J;
  Matrix casimir;

  int dim() const { return two_N.dimension() * two_nu.dimension(); }
};

inline TotalGenerators total_generators(TwoJ two_N, TwoJ two_nu) {
  const SpinRep base = make_spin_rep(two_N);
  const SpinRep fiber = make_spin_rep(two_nu);
  const int d = two_N.dimension();
  const int m = two_nu.dimension();
  const Matrix id_d = Matrix::Identity(d, d);
  const Matrix id_m = Matrix::Identity(m, m);
  const std::array<const Matrix*, 3> xs{&base.x1, &base.x2, &base.x3};
  const std::array<const Matrix*, 3> ys{&fiber.x1, &fiber.x2, &fiber.x3};
  TotalGenerators out{two_N, two_nu, {}, Matrix()};
  Matrix cross = Matrix::Zero(d * m, d * m);
  for (int a = 0; a < 3; ++a) {
    out.J[a] = kron(*xs[a], id_m) + kron(id_d, *ys[a]);
    cross += kron(*xs[a], *ys[a]);
  }
  out.casimir = (two_N.casimir() + two_nu.casimir()) *
                    Matrix::Identity(d * m, d * m) +
                2.0 * cross;
  return out;
}

/// Spin of the extreme Clebsch-Gordan component the branch selects.
inline TwoJ target_two_j(TwoJ two_N, TwoJ two_nu, Branch branch) {
  if (branch == Branch::Plus) return TwoJ(two_N.value() + two_nu.value());
  if (two_N.value() <= two_nu.value())
    throw BranchDomainError(
        "minus branch needs 2N > 2nu, got 2N = " +
        std::to_string(two_N.value()) +
        ", 2nu = " + std::to_string(two_nu.value()));
  return TwoJ(two_N.value() - two_nu.value());
}

enum class ProjectorMethod { Spectral, Orbit, HaarMC };

/// Orthogonal projector onto one extreme Clebsch-Gordan component, i.e. one
/// equivariant line bundle over the fuzzy sphere. p commutes with every J_a.
struct EquivariantProjector {
  TwoJ two_N;
  TwoJ two_nu;
  Branch branch;
  ProjectorMethod method;
  Matrix p;

  int dim() const { return int(p.rows()); }
  int dim_target() const {
    return target_two_j(two_N, two_nu, branch).dimension();
  }
};

/// Lagrange interpolation of the casimir spectrum: the product of
/// (J^2 - c_s) / (c_target - c_s) over the non-target components.
inline EquivariantProjector projector_spectral(TwoJ two_N, TwoJ two_nu,
                                               Branch branch) {
  const TwoJ target = target_two_j(two_N, two_nu, branch);
  const TotalGenerators gen = total_generators(two_N, two_nu);
  const int D = gen.dim();
  const Matrix id = Matrix::Identity(D, D);
  const double c_target = target.casimir();
  Matrix p;
  bool started = false;
  const int lo = std::abs(two_N.value() - two_nu.value());
  const int hi = two_N.value() + two_nu.value();
  for (int two_s = lo; two_s <= hi; two_s += 2) {
    if (two_s == target.value()) continue;
    const double c_s = TwoJ(two_s).casimir();
    const Matrix factor = (gen.casimir - c_s * id) / (c_target - c_s);
    if (started) {
      p = (p * factor).eval();
    } else {
      p = factor;
      started = true;
    }
  }
  if (!started) p = id;  // single component, trivial bundle
  return {two_N, two_nu, branch, ProjectorMethod::Spectral, std::move(p)};
}

/// Orthonormal weight basis of the target component: repeated lowering of the
/// branch highest-weight vector, normalized at each step. Columns span the
/// bundle fiberwise; distinct weights keep them orthogonal.
inline Matrix orbit_basis(TwoJ two_N, TwoJ two_nu, Branch branch) {
  const WeightVector top = highest_weight(two_N, two_nu, branch);
  const TotalGenerators gen = total_generators(two_N, two_nu);
  const Matrix lower = gen.J[0] - kImag * gen.J[1];
  const int width = target_two_j(two_N, two_nu, branch).dimension();
  Matrix basis(gen.dim(), width);
  Vector v = top.coefficients;
  v /= v.norm();
  basis.col(0) = v;
  for (int col = 1; col < width; ++col) {
    v = lower * v;
    const double norm = v.norm();
    if (norm < 1e-8)
      throw NumericalBreakdown("orbit lowering annihilated at step " +
                               std::to_string(col) + " of " +
                               std::to_string(width - 1));
    v /= norm;
    basis.col(col) = v;
  }
  return basis;
}

inline EquivariantProjector projector_orbit(TwoJ two_N, TwoJ two_nu,
                                            Branch branch) {
  const Matrix basis = orbit_basis(two_N, two_nu, branch);
  Matrix p = basis * basis.adjoint();
  return {two_N, two_nu, branch, ProjectorMethod::Orbit, std::move(p)};
}

namespace detail {

/// Deterministic standard normals: Box-Muller over (0,1) uniforms built from
/// the top 53 bits of the raw engine output, so results match across
/// platforms and standard library implementations.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  std::pair<double, double> normal_pair() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  double uniform_open() {
    return (double(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 gen_;
};

/// exp(-i angle (n . x)) for a unit axis n in one irreducible block.
inline Matrix axis_angle_rotation(const SpinRep& rep, double nx, double ny,
                                  double nz, double angle) {
  const Matrix h = nx * rep.x1 + ny * rep.x2 + nz * rep.x3;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const int d = int(h.rows());
  Matrix phases = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    phases(i, i) = std::exp(-kImag * angle * es.eigenvalues()(i));
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Monte Carlo group average of the rotated highest-weight state:
/// p ~ (dim_target / samples) * sum_i U_i |h><h| U_i^dag over Haar-distributed
/// SU(2) elements U_i acting diagonally. Converges to the exact projector at
/// the usual 1/sqrt(samples) rate; useful as an independent cross-check only.
inline EquivariantProjector projector_haar_mc(TwoJ two_N, TwoJ two_nu,
                                              Branch branch, int samples,
                                              std::uint64_t seed) {
  if (samples < 1)
    throw DomainError("projector_haar_mc: samples must be positive");
  const WeightVector top = highest_weight(two_N, two_nu, branch);
  const SpinRep base = make_spin_rep(two_N);
  const SpinRep fiber = make_spin_rep(two_nu);
  const int d = two_N.dimension();
  const int m = two_nu.dimension();
  using RowMat =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> h_block(top.coefficients.data(), d, m);
  detail::NormalSampler sampler(seed);
  Matrix p = Matrix::Zero(d * m, d * m);
  Vector rotated(d * m);
  for (int i = 0; i < samples; ++i) {
    const auto [g0, g1] = sampler.normal_pair();
    const auto [g2, g3] = sampler.normal_pair();
    double vx = g1, vy = g2, vz = g3;
    const double vnorm = std::sqrt(vx * vx + vy * vy + vz * vz);
    double angle;
    if (vnorm < 1e-300) {
      vx = 0.0, vy = 0.0, vz = 1.0;
      angle = 0.0;
    } else {
      angle = 2.0 * std::atan2(vnorm, g0);
      vx /= vnorm, vy /= vnorm, vz /= vnorm;
    }
    const Matrix u_base = detail::axis_angle_rotation(base, vx, vy, vz, angle);
    const RowMat block = u_base * h_block;
    if (m == 1) {
      Eigen::Map<RowMat>(rotated.data(), d, m) = block;
    } else {
      const Matrix u_fiber =
          detail::axis_angle_rotation(fiber, vx, vy, vz, angle);
      Eigen::Map<RowMat>(rotated.data(), d, m) = block * u_fiber.transpose();
    }
    p.noalias() += rotated * rotated.adjoint();
  }
  p *= double(target_two_j(two_N, two_nu, branch).dimension()) /
       double(samples);
  return {two_N, two_nu, branch, ProjectorMethod::HaarMC, std::move(p)};
}

}  // namespace fzb

#endif  // FZB_PROJECTORS_HPP
