#ifndef FZB_CALCULUS_HPP
#define FZB_CALCULUS_HPP

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fzb/su2.hpp"
#include "fzb/types.hpp"

namespace fzb {

/// Fuzzy sphere data at cutoff 2N: ladder generators X_a of spin N and the
/// normalized coordinates Y_a = X_a / sqrt(N(N+1)), which square-sum to one.
struct FuzzyContext {
  TwoJ two_N;
  std::array<Matrix, 3> X;
  std::array<Matrix, 3> Y;
  double casimir;  // N(N+1)

  int dim() const { return two_N.dimension(); }
};

inline FuzzyContext make_fuzzy_context(TwoJ two_N) {
  if (two_N.value() < 1)
    throw DomainError("fuzzy context needs 2N >= 1, got " +
                      std::to_string(two_N.value()));
  SpinRep r = make_spin_rep(two_N);
  const double c = two_N.casimir();
  const double s = std::sqrt(c);
  std::array<Matrix, 3> x{r.x1, r.x2, r.x3};
  std::array<Matrix, 3> y{r.x1 / s, r.x2 / s, r.x3 / s};
  return {two_N, std::move(x), std::move(y), c};
}

/// Index of the rotational derivation e_a(f) = [X_a, f], restricted to {1,2,3}.
class DerivationIndex {
 public:
  explicit DerivationIndex(int a) : a_(a) {
    if (a < 1 || a > 3)
      throw DomainError("derivation index must lie in 1..3, got " +
                        std::to_string(a));
  }
  int value() const { return a_; }

 private:
  int a_;
};

/// e_a acting on phi in A_N (x) End(V): commutator with X_a (x) I. phi must be
/// square with side a multiple of 2N+1; the fiber size is inferred.
inline Matrix derive(const FuzzyContext& ctx, DerivationIndex a,
                     const Matrix& phi) {
  const int d = ctx.dim();
  if (phi.rows() != phi.cols() || phi.rows() % d != 0)
    throw DimensionMismatch(
        "derive: operand must be square with side a multiple of " +
        std::to_string(d));
  const int m = int(phi.rows()) / d;
  const Matrix& x = ctx.X[a.value() - 1];
  return kron_left_mul(x, phi, m) - kron_right_mul(phi, x, m);
}

/// Exterior form over the three rotational derivations with coefficients in
/// A_N (x) End(V). Components are stored on strictly increasing index tuples;
/// every degree above three is identically zero and is represented with
/// degree 4 and no components.
class FiberForm {
 public:
  FiberForm(int degree, int dim, int fiber_dim)
      : degree_(std::min(degree, 4)), dim_(dim), fiber_dim_(fiber_dim) {
    if (degree < 0 || dim < 1 || fiber_dim < 1)
      throw DomainError("FiberForm: degree >= 0 and positive dimensions required");
    comps_.assign(component_count_for(degree_),
                  Matrix::Zero(matrix_size(), matrix_size()));
  }

  static FiberForm zero(int degree, int dim, int fiber_dim) {
    return FiberForm(degree, dim, fiber_dim);
  }

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int fiber_dim() const { return fiber_dim_; }
  int matrix_size() const { return dim_ * fiber_dim_; }
  int component_count() const { return int(comps_.size()); }

  Matrix& component(int idx) { return comps_.at(idx); }
  const Matrix& component(int idx) const { return comps_.at(idx); }

  /// Storage slot of an increasing index tuple.
  static int tuple_index(const std::vector<int>& t) {
    switch (t.size()) {
      case 0: return 0;
      case 1: return t[0] - 1;
      case 2: return t[0] + t[1] - 3;  // (1,2)->0 (1,3)->1 (2,3)->2
      case 3: return 0;
      default: throw DomainError("FiberForm: tuple longer than top degree");
    }
  }

  const Matrix& component_at(const std::vector<int>& increasing) const {
    return comps_.at(tuple_index(increasing));
  }

  /// Evaluation on one derivation index (degree-1 forms).
  Matrix at(int a) const {
    require_degree(1);
    return comps_[a - 1];
  }

  /// Evaluation on an ordered index pair, antisymmetry included.
  Matrix at(int a, int b) const {
    require_degree(2);
    if (a == b) return Matrix::Zero(matrix_size(), matrix_size());
    if (a < b) return comps_[a + b - 3];
    return -comps_[b + a - 3];
  }

  /// Evaluation on an ordered index triple, antisymmetry included.
  Matrix at(int a, int b, int c) const {
    require_degree(3);
    const int sign = epsilon(a, b, c);
    if (sign == 0) return Matrix::Zero(matrix_size(), matrix_size());
    return double(sign) * comps_[0];
  }

  /// Value of a degree-0 form.
  const Matrix& value() const {
    require_degree(0);
    return comps_[0];
  }
  Matrix& value() {
    require_degree(0);
    return comps_[0];
  }

  double max_abs_coeff() const {
    double worst = 0.0;
    for (const Matrix& c : comps_) worst = std::max(worst, max_abs(c));
    return worst;
  }

  FiberForm& operator+=(const FiberForm& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }

  FiberForm& operator-=(const FiberForm& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }

  FiberForm& operator*=(Complex s) {
    for (Matrix& c : comps_) c *= s;
    return *this;
  }

 private:
  static int component_count_for(int degree) {
    switch (degree) {
      case 0: case 3: return 1;
      case 1: case 2: return 3;
      default: return 0;
    }
  }

  void require_degree(int d) const {
    if (degree_ != d)
      throw DimensionMismatch("FiberForm: expected degree " + std::to_string(d) +
                              ", have " + std::to_string(degree_));
  }

  void require_same_shape(const FiberForm& o) const {
    if (degree_ != o.degree_ || dim_ != o.dim_ || fiber_dim_ != o.fiber_dim_)
      throw DimensionMismatch("FiberForm: shape mismatch in arithmetic");
  }

  int degree_, dim_, fiber_dim_;
  std::vector<Matrix> comps_;
};

inline FiberForm operator*(Complex s, FiberForm f) {
  f *= s;
  return f;
}

/// Componentwise left multiplication by a fixed matrix of matching size.
inline FiberForm left_mul(const Matrix& m, FiberForm f) {
  if (m.rows() != m.cols() || m.rows() != f.matrix_size())
    throw DimensionMismatch("left_mul: matrix side must match form coefficients");
  for (int i = 0; i < f.component_count(); ++i)
    f.component(i) = m * f.component(i);
  return f;
}

/// Componentwise right multiplication by a fixed matrix of matching size.
inline FiberForm right_mul(FiberForm f, const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() != f.matrix_size())
    throw DimensionMismatch("right_mul: matrix side must match form coefficients");
  for (int i = 0; i < f.component_count(); ++i)
    f.component(i) = f.component(i) * m;
  return f;
}

namespace detail {

/// Increasing index tuples of the given size drawn from {1,2,3}.
inline const std::vector<std::vector<int>>& increasing_tuples(int size) {
  static const std::vector<std::vector<int>> by_size[4] = {
      {{}},
      {{1}, {2}, {3}},
      {{1, 2}, {1, 3}, {2, 3}},
      {{1, 2, 3}},
  };
  return by_size[size];
}

}  // namespace detail

/// Shuffle-sum wedge with unit weight: no 1/p!q! normalization, coefficients
/// multiply as matrices in shuffle order. Degrees beyond three collapse to the
/// canonical zero form.
inline FiberForm wedge(const FiberForm& alpha, const FiberForm& beta) {
  if (alpha.dim() != beta.dim() || alpha.fiber_dim() != beta.fiber_dim())
    throw DimensionMismatch("wedge: operand shapes differ");
  const int p = alpha.degree();
  const int q = beta.degree();
  if (p + q > 3) return FiberForm::zero(4, alpha.dim(), alpha.fiber_dim());
  FiberForm out(p + q, alpha.dim(), alpha.fiber_dim());
  for (const auto& t : detail::increasing_tuples(p + q)) {
    Matrix acc = Matrix::Zero(out.matrix_size(), out.matrix_size());
    const int total = int(t.size());
    for (unsigned mask = 0; mask < (1u << total); ++mask) {
      if (std::popcount(mask) != p) continue;
      std::vector<int> s, rest;
      int inversions = 0;
      for (int pos = 0; pos < total; ++pos) {
        if (mask & (1u << pos)) {
          s.push_back(t[pos]);
        } else {
          for (int pos2 = pos + 1; pos2 < total; ++pos2)
            if (mask & (1u << pos2)) ++inversions;
          rest.push_back(t[pos]);
        }
      }
      const double sign = (inversions % 2) ? -1.0 : 1.0;
      acc.noalias() +=
          sign * (alpha.component_at(s) * beta.component_at(rest));
    }
    out.component(FiberForm::tuple_index(t)) = std::move(acc);
  }
  return out;
}

/// Chevalley-Eilenberg differential for the three rotational derivations,
/// whose bracket is [e_a, e_b] = i eps_abc e_c. Satisfies d(d(w)) = 0; the top
/// degree maps to the canonical zero form.
inline FiberForm exterior_d(const FuzzyContext& ctx, const FiberForm& w) {
  if (w.dim() != ctx.dim())
    throw DimensionMismatch("exterior_d: form does not live on this context");
  const int d = w.dim();
  const int m = w.fiber_dim();
  auto e = [&](int a, const Matrix& phi) {
    return derive(ctx, DerivationIndex(a), phi);
  };
  switch (w.degree()) {
    case 0: {
      FiberForm out(1, d, m);
      for (int a = 1; a <= 3; ++a) out.component(a - 1) = e(a, w.value());
      return out;
    }
    case 1: {
      FiberForm out(2, d, m);
      for (const auto& t : detail::increasing_tuples(2)) {
        const int a = t[0], b = t[1];
        Matrix v = e(a, w.at(b)) - e(b, w.at(a));
        for (int c = 1; c <= 3; ++c) {
          const int eps = epsilon(a, b, c);
          if (eps != 0) v -= kImag * double(eps) * w.at(c);
        }
        out.component(FiberForm::tuple_index(t)) = std::move(v);
      }
      return out;
    }
    case 2: {
      FiberForm out(3, d, m);
      const int t[3] = {1, 2, 3};
      Matrix v = Matrix::Zero(w.matrix_size(), w.matrix_size());
      for (int i = 0; i < 3; ++i) {
        const double sign = (i % 2) ? -1.0 : 1.0;
        const int u = std::min(t[(i + 1) % 3], t[(i + 2) % 3]);
        const int s = std::max(t[(i + 1) % 3], t[(i + 2) % 3]);
        v += sign * e(t[i], w.at(u, s));
      }
      // Bracket contributions: [e_{t_i}, e_{t_j}] always reproduces the one
      // remaining index, so each term evaluates the form on a repeated pair.
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const double sign = ((i + j) % 2) ? -1.0 : 1.0;
          const int r = t[3 - i - j];  // the index not in {t_i, t_j}
          for (int c = 1; c <= 3; ++c) {
            const int eps = epsilon(t[i], t[j], c);
            if (eps != 0) v += sign * kImag * double(eps) * w.at(c, r);
          }
        }
      out.component(0) = std::move(v);
      return out;
    }
    default:
      return FiberForm::zero(4, d, m);
  }
}

/// Invariant connection one-form: Theta(e_a) = -X_a, scalar fiber.
inline FiberForm theta(const FuzzyContext& ctx) {
  FiberForm out(1, ctx.dim(), 1);
  for (int a = 1; a <= 3; ++a) out.component(a - 1) = -ctx.X[a - 1];
  return out;
}

/// Frame one-form dual to e_a: Theta_a(e_b) = delta_ab * identity.
inline FiberForm theta_basis(const FuzzyContext& ctx, DerivationIndex a) {
  FiberForm out(1, ctx.dim(), 1);
  out.component(a.value() - 1) = Matrix::Identity(ctx.dim(), ctx.dim());
  return out;
}

/// Rotation-invariant volume two-form eps_abc Y_a dY_b wedge dY_c / (8 pi),
/// normalized so the total integral of the constant function is one.
inline FiberForm volume_form(const FuzzyContext& ctx) {
  const int d = ctx.dim();
  std::array<FiberForm, 3> dy{FiberForm(1, d, 1), FiberForm(1, d, 1),
                              FiberForm(1, d, 1)};
  for (int b = 1; b <= 3; ++b) {
    FiberForm yb(0, d, 1);
    yb.value() = ctx.Y[b - 1];
    dy[b - 1] = exterior_d(ctx, yb);
  }
  FiberForm omega(2, d, 1);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps == 0) continue;
        FiberForm term = left_mul(ctx.Y[a - 1], wedge(dy[b - 1], dy[c - 1]));
        term *= double(eps);
        omega += term;
      }
  omega *= 1.0 / (8.0 * std::numbers::pi);
  return omega;
}

/// Every rotation-invariant scalar-fiber two-form is a multiple of this one:
/// eps_abc X_c Theta_a wedge Theta_b, with components 2 eps_abc X_c.
inline FiberForm invariant_basis_two_form(const FuzzyContext& ctx) {
  FiberForm out(2, ctx.dim(), 1);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        const int eps = epsilon(a, b, c);
        if (eps == 0) continue;
        FiberForm term = left_mul(
            ctx.X[c - 1], wedge(theta_basis(ctx, DerivationIndex(a)),
                                theta_basis(ctx, DerivationIndex(b))));
        term *= double(eps);
        out += term;
      }
  return out;
}

/// Normalized trace integral on the algebra: the constant function integrates
/// to one. Only scalar-fiber elements are integrable.
inline Complex nc_integral(const FuzzyContext& ctx, const Matrix& phi) {
  if (phi.rows() != ctx.dim() || phi.cols() != ctx.dim())
    throw DimensionMismatch("nc_integral: operand must be a plain algebra element");
  return phi.trace() / double(ctx.dim());
}

struct TwoFormCoefficient {
  Complex lambda;
  double residual;  // relative Hilbert-Schmidt distance of g from lambda*basis
};

/// Least-squares coefficient of g against a reference two-form under the
/// Hilbert-Schmidt inner product summed over components.
inline TwoFormCoefficient two_form_coefficient(const FuzzyContext& ctx,
                                               const FiberForm& g,
                                               const FiberForm& basis) {
  if (g.degree() != 2 || basis.degree() != 2 || g.fiber_dim() != 1 ||
      basis.fiber_dim() != 1 || g.dim() != basis.dim() || g.dim() != ctx.dim())
    throw DimensionMismatch(
        "two_form_coefficient: operands must be scalar-fiber two-forms on the "
        "context");
  Complex inner(0.0);
  double nb2 = 0.0, ng2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    inner += (basis.component(i).adjoint() * g.component(i)).trace();
    nb2 += basis.component(i).squaredNorm();
    ng2 += g.component(i).squaredNorm();
  }
  if (nb2 == 0.0) throw ZeroBasis("two_form_coefficient: reference form is zero");
  const Complex lambda = inner / nb2;
  double dist2 = 0.0;
  for (int i = 0; i < 3; ++i)
    dist2 += (g.component(i) - lambda * basis.component(i)).squaredNorm();
  const double residual = ng2 == 0.0 ? 0.0 : std::sqrt(dist2 / ng2);
  return {lambda, residual};
}

struct IntegralResult {
  Complex value;
  double residual;  // distance of the operand from the invariant line
};

/// Integral of an invariant two-form: its coefficient against the volume form
/// times the unit total volume.
inline IntegralResult integrate_two_form(const FuzzyContext& ctx,
                                         const FiberForm& g) {
  const TwoFormCoefficient c = two_form_coefficient(ctx, g, volume_form(ctx));
  return {c.lambda, c.residual};
}

}  // namespace fzb

#endif  // FZB_CALCULUS_HPP
