#ifndef FZB_SU2_HPP
#define FZB_SU2_HPP

#include <cmath>
#include <string>

#include "fzb/exact.hpp"
#include "fzb/types.hpp"

namespace fzb {

/// Irreducible su(2) generators in the ladder basis. Basis vectors are ordered
/// by descending magnetic quantum number, so x3 = diag(j, j-1, ..., -j) and
/// x_plus sits on the superdiagonal.
struct SpinRep {
  TwoJ two_j;
  Matrix x1, x2, x3, x_plus, x_minus;
};

inline SpinRep make_spin_rep(TwoJ two_j) {
  const int d = two_j.dimension();
  const double j = two_j.spin();
  Matrix x3 = Matrix::Zero(d, d);
  Matrix xp = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) x3(i, i) = j - i;
  for (int i = 0; i + 1 < d; ++i) {
    const double m = j - (i + 1);  // raising maps row i+1 into row i
    xp(i, i + 1) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Matrix xm = xp.adjoint();
  return {two_j, (xp + xm) / 2.0, (xp - xm) / (2.0 * kImag), x3, xp, xm};
}

/// Spin-n/2 generators realized on homogeneous polynomials of degree n in
/// (z1, z2), expressed in the orthonormal monomial basis
/// psi_k = sqrt(C(n,k)) z1^k z2^(n-k) with k ascending. to_ladder is the
/// unitary with to_ladder * x * to_ladder^adjoint equal to make_spin_rep's
/// generators (it reverses the basis order).
struct SchwingerRealization {
  SpinRep rep;
  Matrix to_ladder;
};

inline SchwingerRealization schwinger_rep(TwoJ two_n) {
  const int n = two_n.value();
  const int d = n + 1;
  // Creation/annihilation action on monomials z1^k z2^(n-k):
  //   a1+ a2 : k -> k+1 with factor n-k,   a2+ a1 : k -> k-1 with factor k,
  //   a1+ a1 : factor k,                   a2+ a2 : factor n-k.
  Matrix xp_mono = Matrix::Zero(d, d);
  Matrix xm_mono = Matrix::Zero(d, d);
  Matrix x3 = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    if (k + 1 < d) xp_mono(k + 1, k) = n - k;
    if (k - 1 >= 0) xm_mono(k - 1, k) = k;
    x3(k, k) = (k - (n - k)) / 2.0;
  }
  // Rescale onto the orthonormal basis: O_psi = S^-1 O_mono S with
  // S = diag(sqrt(C(n,k))); the monomial z1^k z2^(n-k) has squared norm 1/C(n,k).
  Vector s(d);
  for (int k = 0; k < d; ++k) s(k) = std::sqrt(binomial_double(n, k));
  Matrix xp = s.cwiseInverse().asDiagonal() * xp_mono * s.asDiagonal();
  Matrix xm = s.cwiseInverse().asDiagonal() * xm_mono * s.asDiagonal();
  Matrix x1 = (xp + xm) / 2.0;
  Matrix x2 = (xp - xm) / (2.0 * kImag);
  Matrix u = Matrix::Zero(d, d);  // psi_k carries m = k - n/2: reverse order
  for (int k = 0; k < d; ++k) u(n - k, k) = 1.0;
  return {{two_n, std::move(x1), std::move(x2), std::move(x3), std::move(xp),
           std::move(xm)},
          std::move(u)};
}

/// Top-weight vector of one Clebsch-Gordan summand of [2n] (x) [2l], written
/// over the descending-m ladder tensor basis, first factor major.
struct WeightVector {
  Vector coefficients;
  TwoJ two_n, two_l;
  Branch branch;
};

/// Plus branch: the product of the two top-weight vectors. Minus branch: the
/// alternating-binomial combination
///   sum_k a_k z2^k z1^(n-k) (x) z1^k z2^(l-k),  a_k = (-1)^k a0 C(l,k),
/// with the phase fixed by a0 = +sqrt((n-l+1)/(n+1)); monomials convert to the
/// orthonormal basis through the sqrt(C) norms. Minus requires n > l.
inline WeightVector highest_weight(TwoJ two_n, TwoJ two_l, Branch branch) {
  const int n = two_n.value();
  const int l = two_l.value();
  const int dim = (n + 1) * (l + 1);
  Vector c = Vector::Zero(dim);
  if (branch == Branch::Plus) {
    c(0) = 1.0;  // descending order puts m = j first in both factors
  } else {
    if (n <= l)
      throw BranchDomainError("minus branch needs N > nu, got 2N=" +
                              std::to_string(n) + ", 2nu=" + std::to_string(l));
    const double a0 = std::sqrt(double(n - l + 1) / double(n + 1));
    for (int k = 0; k <= l; ++k) {
      const double ak = (k % 2 ? -a0 : a0) * binomial_double(l, k);
      const double norm = std::sqrt(binomial_double(n, k) * binomial_double(l, k));
      // z1^(n-k) z2^k sits at descending index k; z1^k z2^(l-k) at index l-k.
      c(k * (l + 1) + (l - k)) = ak / norm;
    }
  }
  return {std::move(c), two_n, two_l, branch};
}

/// The three exact binomial sums behind the closed-form charge coefficients,
/// evaluated term by term in exact rational arithmetic:
///   A: sum_{k=0}^{l} C(l,k)/C(n,k)         = (n+1)/(n-l+1),              0 <= l <= n
///   B: sum_{k=0}^{l} C(l,k)/C(n,k+1)       = (n+1)/((n-l)(n+1-l)),       0 <= l <  n
///   C: sum_{k=0}^{l} (n-k) C(l,k)/C(n,k+1) = (n+1)(n+2)/((l-n-1)(l-n-2)), 0 <= l < n
enum class BinomialVariant { A, B, C };

struct RationalPair {
  Rational lhs, rhs;
};

inline RationalPair binomial_identity(BinomialVariant v, int n, int l) {
  if (l < 0 || n < 0)
    throw DomainError("binomial_identity: need n, l >= 0");
  if (v == BinomialVariant::A ? l > n : l >= n)
    throw DomainError("binomial_identity: need l <= n (variant A) or l < n, got n=" +
                      std::to_string(n) + ", l=" + std::to_string(l));
  Rational lhs(0);
  for (int k = 0; k <= l; ++k) {
    const BigInt num = binomial_exact(l, k);
    switch (v) {
      case BinomialVariant::A:
        lhs += Rational(num, binomial_exact(n, k));
        break;
      case BinomialVariant::B:
        lhs += Rational(num, binomial_exact(n, k + 1));
        break;
      case BinomialVariant::C:
        lhs += Rational(num * (n - k), binomial_exact(n, k + 1));
        break;
    }
  }
  Rational rhs;
  switch (v) {
    case BinomialVariant::A:
      rhs = Rational(n + 1, n - l + 1);
      break;
    case BinomialVariant::B:
      rhs = Rational(n + 1, BigInt(n - l) * (n + 1 - l));
      break;
    case BinomialVariant::C:
      rhs = Rational(BigInt(n + 1) * (n + 2), BigInt(l - n - 1) * (l - n - 2));
      break;
  }
  return {lhs, rhs};
}

}  // namespace fzb

#endif  // FZB_SU2_HPP
