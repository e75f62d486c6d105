#ifndef FZB_TYPES_HPP
#define FZB_TYPES_HPP

#include <compare>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "fzb/errors.hpp"

namespace fzb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};

/// Spin quantum number stored as the doubled integer 2j so half-integer spins
/// stay exact. two_j >= 0 always.
class TwoJ {
 public:
  explicit TwoJ(int two_j) : value_(two_j) {
    if (two_j < 0)
      throw DomainError("TwoJ: doubled spin must be nonnegative, got " +
                        std::to_string(two_j));
  }

  int value() const { return value_; }
  int dimension() const { return value_ + 1; }          // 2j + 1
  double spin() const { return value_ / 2.0; }          // j
  double casimir() const { return spin() * (spin() + 1.0); }  // j(j + 1)

  friend auto operator<=>(TwoJ, TwoJ) = default;

 private:
  int value_;
};

/// Which summand of [2N] (x) [2nu] the bundle projector selects:
/// Plus -> [2N + 2nu], Minus -> [2N - 2nu].
enum class Branch { Plus, Minus };

inline std::string to_string(Branch b) {
  return b == Branch::Plus ? "plus" : "minus";
}

inline Branch branch_from_string(const std::string& s) {
  if (s == "plus") return Branch::Plus;
  if (s == "minus") return Branch::Minus;
  throw DomainError("unknown branch '" + s + "' (expected plus or minus)");
}

/// Totally antisymmetric epsilon_{abc} on indices 1..3.
inline int epsilon(int a, int b, int c) {
  return (a - b) * (b - c) * (c - a) / 2;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) {
  return a * b - b * a;
}

/// Largest entry magnitude; zero for an empty matrix.
inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Kronecker product, first factor major: index (i, alpha) -> i * b.rows() + alpha.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

/// (x kron I_m) * a without forming the Kronecker factor. Skips zero entries
/// of x, so ladder-shaped generators cost O(nnz(x) * m * cols).
inline Matrix kron_left_mul(const Matrix& x, const Matrix& a, int m) {
  const Eigen::Index n = x.rows();
  if (x.cols() != n || a.rows() != n * m)
    throw DimensionMismatch("kron_left_mul: incompatible shapes");
  Matrix r = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex c = x(i, k);
      if (c != 0.0) r.middleRows(i * m, m).noalias() += c * a.middleRows(k * m, m);
    }
  return r;
}

/// a * (x kron I_m) without forming the Kronecker factor.
inline Matrix kron_right_mul(const Matrix& a, const Matrix& x, int m) {
  const Eigen::Index n = x.rows();
  if (x.cols() != n || a.cols() != n * m)
    throw DimensionMismatch("kron_right_mul: incompatible shapes");
  Matrix r = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex c = x(k, j);
      if (c != 0.0) r.middleCols(j * m, m).noalias() += c * a.middleCols(k * m, m);
    }
  return r;
}

/// (I_? kron x) * a without forming the Kronecker factor; the fiber size is
/// x.rows() and the base size follows from a.
inline Matrix fiber_left_mul(const Matrix& x, const Matrix& a) {
  const Eigen::Index m = x.rows();
  if (x.cols() != m || a.rows() % m != 0)
    throw DimensionMismatch("fiber_left_mul: incompatible shapes");
  Matrix r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows() / m; ++i)
    r.middleRows(i * m, m).noalias() = x * a.middleRows(i * m, m);
  return r;
}

/// a * (I_? kron x) without forming the Kronecker factor.
inline Matrix fiber_right_mul(const Matrix& a, const Matrix& x) {
  const Eigen::Index m = x.rows();
  if (x.cols() != m || a.cols() % m != 0)
    throw DimensionMismatch("fiber_right_mul: incompatible shapes");
  Matrix r(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols() / m; ++j)
    r.middleCols(j * m, m).noalias() = a.middleCols(j * m, m) * x;
  return r;
}

/// Trace over the second tensor factor of End(C^n (x) C^m), first factor major.
inline Matrix partial_trace_second(const Matrix& a, int m) {
  if (a.rows() != a.cols() || a.rows() % m != 0)
    throw DimensionMismatch("partial_trace_second: side not a multiple of fiber");
  const Eigen::Index n = a.rows() / m;
  Matrix t = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (int al = 0; al < m; ++al) t(i, j) += a(i * m + al, j * m + al);
  return t;
}

/// Tr_2(a * b) assembled block by block, never forming the full product.
/// Both factors live in End(C^n (x) C^m); cost is m^2 products of n x n blocks.
inline Matrix partial_trace_second_of_product(const Matrix& a, const Matrix& b,
                                              int m) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() ||
      a.rows() % m != 0)
    throw DimensionMismatch("partial_trace_second_of_product: bad shapes");
  const Eigen::Index d = a.rows();
  const Eigen::Index n = d / m;
  using StrideD = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
  using BlockMap = Eigen::Map<const Matrix, 0, StrideD>;
  Matrix t = Matrix::Zero(n, n);
  Matrix ablk(n, n), bblk(n, n);
  for (int al = 0; al < m; ++al)
    for (int be = 0; be < m; ++be) {
      // Fiber block (al, be) of a: entries a(i*m + al, k*m + be).
      ablk = BlockMap(a.data() + al + be * d, n, n, StrideD(m * d, m));
      bblk = BlockMap(b.data() + be + al * d, n, n, StrideD(m * d, m));
      t.noalias() += ablk * bblk;
    }
  return t;
}

}  // namespace fzb

#endif  // FZB_TYPES_HPP
