#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bubblewalk {

/// Scaling sequence alpha_1 <= alpha_2 <= ... for the bubble graph, with
/// partial sums s_k = alpha_1 + ... + alpha_k + k.
///
/// All values are computed once at construction, so a rule is immutable and
/// can be shared freely between threads. Levels are capped at kMaxLevel, and
/// earlier for rules whose values would overflow 64 bits.
class ScalingRule {
 public:
  enum class Kind { canonical, geometric, constant, explicit_list };

  static constexpr int kMaxLevel = 62;

  /// Running maximum of ceil(2^k / k^2).
  static ScalingRule canonical();
  /// alpha_k = round(ratio^k), ratio > 1.
  static ScalingRule geometric(double ratio);
  static ScalingRule constant(std::int64_t c);
  /// Finite list, level 1 first. Must be >= 1 and nondecreasing.
  static ScalingRule explicit_list(std::vector<std::int64_t> values);

  /// Parses `canonical`, `geometric:<r>`, `constant:<c>` or `file:<path>`
  /// (one integer per line).
  static ScalingRule parse(const std::string& spec);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  std::string describe() const;

  /// Deepest level available. For explicit lists this is the list length
  /// and the graph is the finite truncation at that level.
  int max_level() const noexcept { return static_cast<int>(alpha_.size()); }
  bool is_finite() const noexcept { return kind_ == Kind::explicit_list; }

  /// Deepest level whose alpha and s values are defined. Equals max_level()
  /// except for constant rules, whose values extend past the graph's cap.
  int value_levels() const noexcept;

  /// alpha_k for k >= 1. Throws std::out_of_range past value_levels().
  std::int64_t alpha(int k) const;
  /// s_k for k >= 0, s_0 = 0.
  std::int64_t s(int k) const;

  /// Unchecked access for hot loops; 1 <= k <= max_level().
  std::int64_t alpha_unchecked(int k) const noexcept { return alpha_[k - 1]; }
  std::int64_t s_unchecked(int k) const noexcept { return s_[k]; }

  /// Level n with s_{n-1} <= r < s_n; max_level() + 1 if r >= s_{max_level}.
  int level_containing_distance(std::int64_t r) const;

 private:
  ScalingRule(Kind kind, double parameter, std::vector<std::int64_t> alpha);
  [[noreturn]] void throw_range(int k) const;

  Kind kind_;
  double parameter_;
  std::vector<std::int64_t> alpha_;
  std::vector<std::int64_t> s_;
};

std::int64_t alpha_at(const ScalingRule& rule, int k);
std::int64_t s_at(const ScalingRule& rule, int k);

struct AssumptionReport {
  double max_feasible_d = 0.0;
  std::optional<int> first_violation_k;
  int checked_up_to = 0;
  int argmin_k = 0;
};

/// Scans k = 2..k_max (clipped to the rule's deepest level) for the growth
/// condition d * s_{k-1} <= alpha_k.
AssumptionReport check_assumption(const ScalingRule& rule, double d, int k_max);

}  // namespace bubblewalk
