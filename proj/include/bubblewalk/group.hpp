#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bubblewalk/graph.hpp"
#include "bubblewalk/word.hpp"

namespace bubblewalk {

/// Cancels adjacent inverse pairs until none remain.
Word free_reduce(const Word& w);

/// Vertices on which two words of length <= L are compared: T_eq(L) =
/// B_{s_j + 2L}(o), j the smallest level with alpha_j > 2L, plus the start,
/// quarter point and midpoint of levels j+1 and j+2. Ball vertices are taken
/// one per (level, pos, branch bits of ancestor cycles starting within
/// distance L), other bits zero.
struct EqualityTestSet {
  std::string id;
  std::int64_t length = 0;
  std::int64_t ball_radius = 0;
  std::vector<VertexAddress> vertices;
};

inline constexpr std::uint64_t kMaxTestSetSize = 20'000'000;

EqualityTestSet equality_test_set(const ScalingRule& rule, std::int64_t length);

struct ActionFingerprint {
  std::string test_set_id;
  std::vector<VertexAddress> images;

  friend bool operator==(const ActionFingerprint&, const ActionFingerprint&) = default;
};

ActionFingerprint fingerprint(const ScalingRule& rule, const Word& w, const EqualityTestSet& set);

/// True iff w1 and w2 act identically on equality_test_set(max length).
bool elements_equal(const ScalingRule& rule, const Word& w1, const Word& w2);

struct SmallOrbitCount {
  std::int64_t n = 0, m = 0;
  double k_emp = 0.0;
  std::int64_t radius_limit = 0;       // ceil(k_emp * m)
  std::int64_t distinct_elements = 0;
  std::uint64_t words_examined = 0;    // 4^n
  std::uint64_t reduced_words_visited = 0;
  std::uint64_t hash_collisions = 0;   // equal hashes, different fingerprints
};

inline constexpr std::int64_t kMaxCountLength = 12;

/// Distinct group elements represented by words of length exactly n with
/// O(w) in B_{ceil(K m)}(o) and displacement <= ceil(K m) on the test set.
/// Walks freely reduced words of length n, n-2, ...; padding a reduced word
/// with (b b^-1)^i keeps its element and its inverted orbit.
SmallOrbitCount count_small_orbit_elements(const ScalingRule& rule, std::int64_t n, std::int64_t m,
                                           double k_emp, unsigned threads = 1);

}  // namespace bubblewalk
