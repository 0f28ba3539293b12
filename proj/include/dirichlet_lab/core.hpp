#ifndef DIRICHLET_LAB_CORE_HPP
#define DIRICHLET_LAB_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = std::vector<std::int64_t>;

// Global comparison tolerance. A value v counts as strictly inside an open
// ball of radius r only when v < r - kEps; boundary cases go to admissibility.
inline constexpr double kEps = 1e-9;

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

inline bool strictly_inside(double value, double radius) { return value < radius - kEps; }

/// Malformed input: non-finite entries, dimension mismatch, bad weights.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition of a mathematical operation does not hold.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Basis columns are (numerically) linearly dependent.
class NumericalRankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The enumeration (or box search) would exceed its node budget. When the
/// search had already found a lattice vector, its value is attached.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t budget,
                 std::optional<double> best_upper_bound = std::nullopt)
      : std::runtime_error(what), budget_(budget), best_upper_bound_(best_upper_bound) {}

  std::uint64_t budget() const noexcept { return budget_; }
  std::optional<double> best_upper_bound() const noexcept { return best_upper_bound_; }

 private:
  std::uint64_t budget_;
  std::optional<double> best_upper_bound_;
};

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

inline std::int64_t round_to_int(double x) { return static_cast<std::int64_t>(std::llround(x)); }

}  // namespace detail
}  // namespace dlab

#endif  // DIRICHLET_LAB_CORE_HPP
