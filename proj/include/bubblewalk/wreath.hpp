#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bubblewalk/common.hpp"
#include "bubblewalk/graph.hpp"
#include "bubblewalk/word.hpp"

namespace bubblewalk {

/// Lit lamps (Z_2 coordinates equal to 1).
using LampConfig = std::set<VertexAddress>;

/// (f, g) in Z_2 wr_S Gamma; g is kept as a word.
struct WreathElement {
  LampConfig lamps;
  Word base;
};

/// (f, g)(f', g') = (f + f' pulled back through g, g g').
WreathElement wreath_multiply(const ScalingRule& rule, const WreathElement& e1, const WreathElement& e2);
WreathElement wreath_inverse(const ScalingRule& rule, const WreathElement& e);

/// Lamps equal as sets and bases equal as group elements.
bool wreath_equal(const ScalingRule& rule, const WreathElement& e1, const WreathElement& e2);

/// state (l, e)(0, g)(l', e) where l, l' light o iff s1, s2.
WreathElement sws_step(const ScalingRule& rule, const WreathElement& state, Letter g, bool s1, bool s2);

/// `lamps=<addr>,<addr>;base=<word>`; either part may be omitted.
WreathElement parse_wreath_element(const ScalingRule& rule, std::string_view text);
std::string format_wreath_element(const WreathElement& e);

/// (a^{alpha_k} b) for k = 1..levels: a word taking o to the start of level
/// levels + 1.
Word deep_word(const ScalingRule& rule, int levels);

struct SwsOptions {
  /// Record |supp X_k| every this many steps (and at k = n).
  std::int64_t trace_every = 1;
  /// Compute toggle sites and the final lamp set in the original frame.
  bool record_sites = true;
  /// Tracking-ball budget for the inverted orbit before falling back to
  /// direct evaluation of each u_k.
  std::uint64_t track_limit = 20'000;
};

struct SwsSummary {
  std::int64_t n = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> support_size_trace;  // (k, |supp X_k|)
  LampConfig toggle_sites;       // empty unless record_sites
  LampConfig final_lamps;        // empty unless record_sites
  std::int64_t final_support = 0;
  std::int64_t toggles = 0;      // switch bits equal to 1
  bool returned_to_identity = false;
  bool tracker_fell_back = false;
  Word walk;                     // g_1 ... g_n
  std::vector<std::pair<bool, bool>> switches;
};

/// n switch-walk-switch steps from `start` with uniform letters and bits.
SwsSummary simulate_sws(const ScalingRule& rule, std::int64_t n, Rng& rng,
                        const WreathElement& start = {}, const SwsOptions& options = {});

struct HarmonicEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  /// Fraction of runs whose last toggle of the lamp at o fell in the final
  /// 10% of the horizon.
  double late_toggle_fraction = 0.0;
  std::int64_t reps = 0;
};

/// P(lamp at o is off at time `horizon` | start), by following the walker
/// from o.start.base: the lamp at o is switched exactly when the walker
/// stands on o. Replica r uses Rng(seed, r).
HarmonicEstimate harmonic_estimate(const ScalingRule& rule, const WreathElement& start,
                                   std::int64_t horizon, std::int64_t reps, std::uint64_t seed,
                                   unsigned threads = 1);

}  // namespace bubblewalk
