#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bubblewalk/common.hpp"
#include "bubblewalk/graph.hpp"
#include "bubblewalk/word.hpp"

namespace bubblewalk {

/// n i.i.d. uniform letters.
Word sample_word(std::int64_t n, Rng& rng);

/// Inverted orbit u_0..u_n with u_k = o.g_k^-1 ... g_1^-1.
struct InvertedOrbitTrace {
  std::vector<VertexAddress> points;
  std::int64_t radius = 0;          // max_k d(o, u_k)
  std::int64_t distinct_count = 0;
  std::int64_t expansions = 0;      // tracking-ball growths (tracked algorithm only)
};

/// Reference implementation: each u_k evaluated from scratch, Theta(n^2).
InvertedOrbitTrace inverted_orbit_oracle(const ScalingRule& rule, const Word& w);

/// Ordinary orbit o, o.g_1, o.g_1 g_2, ...
std::vector<VertexAddress> forward_orbit(const ScalingRule& rule, const Word& w);

inline constexpr std::uint64_t kDefaultTrackLimit = 4'000'000;

/// Incremental inverted orbit. Keeps the forward images x.(g_1...g_k) of
/// every x in a ball B_R(o); u_k is the tracked x whose image is o. When no
/// tracked point maps to o the ball grows and the prefix is replayed on the
/// new points.
class InvertedOrbitTracker {
 public:
  InvertedOrbitTracker(const ScalingRule& rule, std::int64_t r0,
                       std::uint64_t limit = kDefaultTrackLimit);

  /// Appends g to the word; throws ResourceGuardError("tracking-size") if
  /// the ball needed to find u_k exceeds the limit.
  void push(Letter g);

  const VertexAddress& current() const { return cache_.vertex(points_[found_]); }
  std::int64_t steps() const noexcept { return static_cast<std::int64_t>(prefix_.size()); }
  std::int64_t radius() const noexcept { return radius_; }
  std::int64_t expansions() const noexcept { return expansions_; }
  std::size_t tracked() const noexcept { return points_.size(); }

 private:
  void grow();

  const ScalingRule* rule_;
  VertexCache cache_;
  std::uint64_t limit_;
  std::int64_t radius_;
  std::int64_t expansions_ = 0;
  std::uint32_t root_;
  Word prefix_;
  std::vector<std::uint32_t> points_;
  std::vector<std::uint32_t> images_;
  std::size_t found_ = 0;
};

InvertedOrbitTrace inverted_orbit_tracked(const ScalingRule& rule, const Word& w,
                                          std::int64_t r0,
                                          std::uint64_t limit = kDefaultTrackLimit);

/// Representative test set T(r) = B_{s_j + 4r}(o), j the smallest level with
/// alpha_j > 4r (the deepest level if none).
std::int64_t test_set_radius(const ScalingRule& rule, std::int64_t test_radius);

/// max over x in T(test_radius) of d(x, x.w), exact. Vertices are grouped by
/// (level, pos); within a group only the path bits the trajectory actually
/// reads are enumerated.
std::int64_t max_displacement(const ScalingRule& rule, const Word& w, std::int64_t test_radius);

/// d(x, x.w) for one vertex.
std::int64_t displacement(const ScalingRule& rule, const VertexAddress& x, const Word& w);

/// max - min of the prefix sums of the projected word.
std::int64_t projected_range(const Word& w);

enum class ConditionMode {
  rejection,  // sample unconditioned words, keep those in A_{n,m}
  exact,      // sample directly from the conditional law given A_{n,m}
};

struct ConfinementSample {
  std::int64_t replica = 0;
  bool accepted = false;
  std::int64_t orbit_radius = 0;
  std::int64_t max_displacement = 0;
  std::int64_t distinct_count = 0;
};

struct ConfinementReport {
  std::int64_t n = 0, m = 0;
  std::int64_t reps = 0;
  std::int64_t accepted = 0;
  ConditionMode mode = ConditionMode::rejection;
  double acceptance_prob_exact = 0.0;
  double max_orbit_radius_over_m = 0.0;
  double max_displacement_over_m = 0.0;
  /// max of the two ratios; empty when nothing was accepted.
  std::optional<double> empirical_K;
  std::int64_t subword_violations = 0;
  std::int64_t deep_spot_violations = 0;
  std::vector<ConfinementSample> samples;
};

struct ConditionOptions {
  ConditionMode mode = ConditionMode::rejection;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int deep_spot_checks = 100;
};

/// Orbit radius and displacement statistics of words conditioned on A_{n,m}.
/// Replica r draws from Rng(seed, r).
ConfinementReport conditioned_orbit_stats(const ScalingRule& rule, std::int64_t n, std::int64_t m,
                                          std::int64_t reps, const ConditionOptions& options);

}  // namespace bubblewalk
