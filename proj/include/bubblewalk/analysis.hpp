#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bubblewalk/common.hpp"
#include "bubblewalk/scaling.hpp"

namespace bubblewalk {

/// Margin over p = 1 so that 1/K-like tails with lower-order corrections are
/// not read as summable.
inline constexpr double kConvergentTailExponent = 1.05;

/// Energy of the explicit unit flow on S: 1/2^k on every a-edge of a level-k
/// cycle and on the two b-edges leaving its midpoint.
struct EnergyTrace {
  int k_max = 0;
  std::vector<double> level_terms;             // (alpha_K + 1) / 2^K, K = 1..k_max
  std::vector<double> partial_sums;            // E_K
  std::vector<double> displayed_partial_sums;  // 1/2 sum_{k<=K} alpha_k / 2^k
  /// p in term_K ~ K^-p, fitted on the levels in [k_max/2, k_max].
  double tail_exponent = 0.0;
  /// p > kConvergentTailExponent.
  bool converges = false;

  /// E_K, 1 <= K <= k_max.
  double energy(int k) const { return partial_sums.at(static_cast<std::size_t>(k - 1)); }
};

/// Throws LevelCapError if k_max exceeds the levels the rule defines.
EnergyTrace flow_energy(const ScalingRule& rule, int k_max);

struct KirchhoffReport {
  bool balanced = false;
  std::uint64_t vertices_checked = 0;
  double root_outflow = 0.0;
  double max_imbalance = 0.0;  // over vertices other than o
};

inline constexpr std::uint64_t kMaxKirchhoffVertices = 20'000'000;

/// Net outflow of the explicit flow at every vertex of levels 1..k_max,
/// summed over the generator edges (so parallel a-edges on 2-cycles count
/// twice). `perturbation` is added to the a-edge leaving o. Levels up to
/// k_max + 1 must exist.
KirchhoffReport kirchhoff_report(const ScalingRule& rule, int k_max, double perturbation = 0.0);

/// Unit outflow at o and zero net flow elsewhere, to 1e-12.
bool kirchhoff_check(const ScalingRule& rule, int k_max, double perturbation = 0.0);

struct GreenEstimate {
  std::vector<std::int64_t> times;  // n/4, n/2, n
  std::vector<double> g;            // mean visits to o in [0, T]
  std::vector<double> std_error;
  std::int64_t reps = 0;

  /// (G_n - G_{n/2}) / G_{n/2}
  double saturation() const { return (g[2] - g[1]) / g[1]; }
  /// G_n / G_{n/2}
  double growth_ratio() const { return g[2] / g[1]; }
};

/// Lazy walk on S from o (uniform letter each step; b fixes non-branching
/// vertices). Replica r uses Rng(seed, r).
GreenEstimate green_function_estimate(const ScalingRule& rule, std::int64_t n, std::int64_t reps,
                                      std::uint64_t seed, unsigned threads = 1);

struct VolumeFit {
  std::vector<std::int64_t> radii;
  std::vector<double> ball_sizes;  // |B_r(o)|
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares slope of log |B_r(o)| against log r.
VolumeFit volume_exponent_fit(const ScalingRule& rule, const std::vector<std::int64_t>& radii);

/// `count` radii spaced evenly in log between lo and hi, rounded, distinct.
std::vector<std::int64_t> log_spaced(std::int64_t lo, std::int64_t hi, int count);

struct CountingConstants {
  double K = 16.0;
  /// 6 K when unset.
  std::optional<double> c_path;
  double c_deep = 1.0;

  double path() const { return c_path.value_or(6.0 * K); }
};

struct BoundRow {
  std::int64_t n = 0;
  std::int64_t m_opt = 0;
  double log_pA_lower = 0.0;
  double log_A_upper = 0.0;
  double log_bound = 0.0;
};

struct BoundTable {
  std::vector<BoundRow> rows;
  /// Slope of log(-log_bound) against log n.
  double fitted_exponent = 0.0;
  /// Slope of log m_opt against log n.
  double m_opt_exponent = 0.0;
};

/// log P(A_{n,m}); iterates the killed chain when n (2m + 1) is small and
/// uses the spectral form otherwise.
double log_confine_probability(std::int64_t n, std::int64_t m);

/// log|A| <= |B_{ceil(Km)}| log 2 + log(2 K m) + c_path m log(8m)
///           + |B_{ceil(c_deep m)}| log |B_{ceil((c_deep + K) m)}|.
double log_A_upper(const ScalingRule& rule, std::int64_t m, const CountingConstants& c);

/// Powers of two 1, 2, 4, ... up to n^{1/3}.
std::vector<std::int64_t> default_m_grid(std::int64_t n);

/// For each n, maximizes 2 log P(A_{n,m}) - log_A_upper(m) over m_grid (the
/// default grid for that n when m_grid is empty). Fits need >= 2 rows.
BoundTable bound_pipeline(const ScalingRule& rule, const std::vector<std::int64_t>& n_list,
                          const std::vector<std::int64_t>& m_grid, const CountingConstants& c,
                          unsigned threads = 1);

struct SetHitEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  double p_confine = 0.0;  // P(A_{n,m})
  std::int64_t reps = 0;
};

/// Monte Carlo of P(X_n in A) for the SWS walk: lamps inside B_{ceil(Km)}(o)
/// and d(x, x.Z_n) <= ceil(Km) on the test set T(m).
SetHitEstimate sws_set_probability(const ScalingRule& rule, std::int64_t n, std::int64_t m, double K,
                                   std::int64_t reps, std::uint64_t seed, unsigned threads = 1);

/// Unweighted least squares slope and intercept of y against x.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bubblewalk
