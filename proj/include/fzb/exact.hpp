#ifndef FZB_EXACT_HPP
#define FZB_EXACT_HPP

#include <algorithm>

#include <boost/multiprecision/cpp_int.hpp>

namespace fzb {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact binomial coefficient C(n, k); zero outside 0 <= k <= n.
inline BigInt binomial_exact(int n, int k) {
  if (k < 0 || k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt r(1);
  // r stays integral after each division: it always holds C(n, i+1)'s partial product.
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

inline double binomial_double(int n, int k) {
  return binomial_exact(n, k).convert_to<double>();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace fzb

#endif  // FZB_EXACT_HPP
