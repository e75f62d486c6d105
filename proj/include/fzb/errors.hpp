#ifndef FZB_ERRORS_HPP
#define FZB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fzb {

/// Numeric input outside an operation's stated domain.
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Matrix or vector shapes incompatible with the requested operation.
struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Minus-branch construction requested where that summand does not exist
/// (it needs N > nu).
struct BranchDomainError : DomainError {
  explicit BranchDomainError(const std::string& msg) : DomainError(msg) {}
};

/// A branch-specific computation was handed data built for the other branch.
struct BranchMismatch : std::invalid_argument {
  explicit BranchMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

/// An iterative construction produced a vanishing vector before reaching the
/// expected count.
struct NumericalBreakdown : std::runtime_error {
  explicit NumericalBreakdown(const std::string& msg) : std::runtime_error(msg) {}
};

/// The reference form of a coefficient extraction is identically zero.
struct ZeroBasis : std::invalid_argument {
  explicit ZeroBasis(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A quantity that must be real carried a significant imaginary part.
struct NonRealResult : std::runtime_error {
  explicit NonRealResult(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input claimed to lie in the projective module but fails psi * p == psi.
struct ModuleMembershipError : std::invalid_argument {
  explicit ModuleMembershipError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace fzb

#endif  // FZB_ERRORS_HPP
