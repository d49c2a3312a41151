#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bubblewalk/common.hpp"
#include "bubblewalk/word.hpp"

namespace bubblewalk {

/// The event A_{n,m}: the lazy walk on Z (hold 1/2, +-1 with 1/4 each)
/// keeps its whole range inside [-m, m] for n steps.
struct ConfineQuery {
  std::int64_t n = 0;
  std::int64_t m = 1;
};

/// a -> +1, a^-1 -> -1, b and b^-1 -> 0.
constexpr int project_letter(Letter l) noexcept {
  switch (l) {
    case Letter::a: return 1;
    case Letter::a_inv: return -1;
    default: return 0;
  }
}

inline constexpr std::int64_t kMaxConfineStates = 1'000'000;

/// log P(A_{n,m}) by n applications of the (2m+1)-state killed transition
/// operator, renormalized each step so the result never underflows.
double confine_log_prob_exact(const ConfineQuery& q);

/// exp(confine_log_prob_exact(q)); underflows to 0 once n * rate > ~700, use
/// the log form there.
double confine_prob_exact(const ConfineQuery& q);

/// The same probability from the eigen-decomposition of the killed chain,
/// O(m^2) independent of n. Used where n is too large to iterate.
double confine_log_prob_spectral(const ConfineQuery& q);

/// Largest eigenvalue of the killed chain, 1/2 + cos(pi / (2m + 2)) / 2.
double confine_lambda_max(std::int64_t m);

/// -log lambda_max: the asymptotic per-step decay rate of P(A_{n,m}).
double confine_rate(std::int64_t m);

/// Extremes (min, max) of one simulated lazy-walk trajectory of n steps.
std::pair<std::int64_t, std::int64_t> sample_lazy_range(std::int64_t n, Rng& rng);

/// Samples n-step lazy-walk increments conditioned exactly on A_{n,m}, by
/// stepping with weights proportional to the survival probability of the
/// remaining steps.
class ConfinedStepSampler {
 public:
  ConfinedStepSampler(std::int64_t n, std::int64_t m);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t m() const noexcept { return m_; }

  /// Increments in {-1, 0, +1}.
  std::vector<int> sample(Rng& rng) const;

 private:
  std::int64_t n_, m_;
  // survival_[t][i]: P(survive t more steps from state i - m), each row
  // scaled by its maximum.
  std::vector<std::vector<double>> survival_;
};

}  // namespace bubblewalk
