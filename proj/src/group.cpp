#include "bubblewalk/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "bubblewalk/common.hpp"

namespace bubblewalk {

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == inverse(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

namespace {

std::int64_t cycle_offset(std::int64_t p, std::int64_t alpha) { return std::min(p, 2 * alpha - p); }

// Number of trailing path bits of a (level n, pos p) vertex whose cycle
// starts lie within distance `length`.
int reachable_bits(const ScalingRule& rule, int n, std::int64_t h, std::int64_t length) {
  int bits = 0;
  for (int l = n; l >= 2; --l) {
    if (h + rule.s_unchecked(n - 1) - rule.s_unchecked(l - 1) > length) break;
    ++bits;
  }
  return bits;
}

template <typename Fn>
void for_each_ball_class(const ScalingRule& rule, std::int64_t radius, std::int64_t length, Fn&& fn) {
  const int top = std::min(rule.level_containing_distance(radius), rule.max_level());
  for (int n = 1; n <= top; ++n) {
    const std::int64_t alpha = rule.alpha_unchecked(n);
    const std::int64_t reach = radius - rule.s_unchecked(n - 1);
    if (reach < 0) break;
    for (std::int64_t p = 0; p < 2 * alpha; ++p) {
      const std::int64_t h = cycle_offset(p, alpha);
      if (h > reach) {
        p = 2 * alpha - reach - 1;  // skip to the far side of the cycle
        continue;
      }
      fn(n, p, reachable_bits(rule, n, h, length));
    }
  }
}

}  // namespace

EqualityTestSet equality_test_set(const ScalingRule& rule, std::int64_t length) {
  if (length < 0) throw std::invalid_argument("test set length must be >= 0");
  int j = rule.max_level();
  for (int k = 1; k <= rule.max_level(); ++k)
    if (rule.alpha_unchecked(k) > 2 * length) {
      j = k;
      break;
    }
  EqualityTestSet set;
  set.length = length;
  set.ball_radius = rule.s(j) + 2 * length;
  set.id = rule.describe() + ";L=" + std::to_string(length);

  std::uint64_t total = 0;
  for_each_ball_class(rule, set.ball_radius, length, [&](int, std::int64_t, int bits) {
    total += std::uint64_t{1} << bits;
  });
  if (total > kMaxTestSetSize)
    throw ResourceGuardError("ball-size", "equality test set for length " + std::to_string(length) +
                                              " has " + std::to_string(total) + " vertices");
  set.vertices.reserve(total + 6);
  for_each_ball_class(rule, set.ball_radius, length, [&](int n, std::int64_t p, int bits) {
    const int shift = n - 1 - bits;
    for (std::uint64_t suffix = 0; suffix < (std::uint64_t{1} << bits); ++suffix)
      set.vertices.push_back(VertexAddress::unchecked(suffix << shift, n - 1, p));
  });
  for (int level : {j + 1, j + 2}) {
    if (level > rule.max_level()) break;
    const std::int64_t alpha = rule.alpha_unchecked(level);
    std::set<std::int64_t> positions{0, alpha / 2, alpha};
    for (auto p : positions) {
      auto x = VertexAddress::unchecked(0, level - 1, p);
      if (dist_to_root(rule, x) > set.ball_radius) set.vertices.push_back(x);  // else already present
    }
  }
  return set;
}

ActionFingerprint fingerprint(const ScalingRule& rule, const Word& w, const EqualityTestSet& set) {
  ActionFingerprint fp;
  fp.test_set_id = set.id;
  fp.images.reserve(set.vertices.size());
  for (const auto& x : set.vertices) fp.images.push_back(apply_word(rule, x, w));
  return fp;
}

bool elements_equal(const ScalingRule& rule, const Word& w1, const Word& w2) {
  if (w1 == w2) return true;
  if (free_reduce(w1) == free_reduce(w2)) return true;
  auto set = equality_test_set(rule, static_cast<std::int64_t>(std::max(w1.size(), w2.size())));
  for (const auto& x : set.vertices)
    if (apply_word(rule, x, w1) != apply_word(rule, x, w2)) return false;
  return true;
}

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 31;
  h *= 0x7fb5d329728ea185ull;
  h ^= h >> 27;
  h *= 0x81dadef4bc2dd44dull;
  h ^= h >> 33;
  return h;
}

std::uint64_t hash_images(const std::vector<VertexAddress>& images) {
  std::uint64_t h = 0x243f6a8885a308d3ull;
  VertexHash vh;
  for (const auto& v : images) h = mix(h ^ vh(v)) + 0x9e3779b97f4a7c15ull;
  return h;
}

// Distinct elements keyed by fingerprint hash; each bucket keeps one word per
// distinct fingerprint and equal hashes are confirmed by recomputing the
// stored word's images.
class ElementSet {
 public:
  ElementSet(const ScalingRule& rule, const EqualityTestSet& set) : rule_(&rule), set_(&set) {}

  void insert(std::uint64_t h, const Word& w, const std::vector<VertexAddress>& images) {
    auto& bucket = buckets_[h];
    for (const auto& stored : bucket)
      if (same_images(stored, images)) return;
    if (!bucket.empty()) ++collisions_;
    bucket.push_back(w);
    ++size_;
  }

  void merge(const ElementSet& other) {
    std::vector<std::uint64_t> keys;
    for (const auto& [h, bucket] : other.buckets_) keys.push_back(h);
    std::sort(keys.begin(), keys.end());
    for (auto h : keys)
      for (const auto& w : other.buckets_.at(h)) insert(h, w, images_of(w));
    collisions_ += other.collisions_;
  }

  std::int64_t size() const noexcept { return size_; }
  std::uint64_t collisions() const noexcept { return collisions_; }

 private:
  std::vector<VertexAddress> images_of(const Word& w) const {
    std::vector<VertexAddress> out;
    out.reserve(set_->vertices.size());
    for (const auto& x : set_->vertices) out.push_back(apply_word(*rule_, x, w));
    return out;
  }
  bool same_images(const Word& stored, const std::vector<VertexAddress>& images) const {
    for (std::size_t i = 0; i < images.size(); ++i)
      if (apply_word(*rule_, set_->vertices[i], stored) != images[i]) return false;
    return true;
  }

  const ScalingRule* rule_;
  const EqualityTestSet* set_;
  std::unordered_map<std::uint64_t, std::vector<Word>> buckets_;
  std::int64_t size_ = 0;
  std::uint64_t collisions_ = 0;
};

struct CountWalk {
  const ScalingRule& rule;
  const EqualityTestSet& set;
  std::int64_t n;
  std::int64_t limit;
  ElementSet elements;
  std::vector<std::vector<VertexAddress>> images;  // per depth
  Word word;
  std::uint64_t visited = 0;

  CountWalk(const ScalingRule& r, const EqualityTestSet& s, std::int64_t length, std::int64_t lim)
      : rule(r), set(s), n(length), limit(lim), elements(r, s),
        images(static_cast<std::size_t>(length + 1)) {}

  void leaf(std::size_t depth) {
    const auto& img = images[depth];
    for (std::size_t i = 0; i < img.size(); ++i)
      if (tree_distance(rule, set.vertices[i], img[i]) > limit) return;
    elements.insert(hash_images(img), word, img);
  }

  // Extends the reduced word by l; false if the new inverted orbit point
  // leaves the radius limit.
  bool extend(std::size_t depth, Letter l) {
    word.push_back(l);
    VertexAddress u;
    for (std::size_t i = word.size(); i-- > 0;) u = apply_letter(rule, u, inverse(word[i]));
    if (dist_to_root(rule, u) > limit) {
      word.pop_back();
      return false;
    }
    const auto& from = images[depth];
    auto& to = images[depth + 1];
    to.resize(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) to[i] = apply_letter(rule, from[i], l);
    ++visited;
    return true;
  }

  void walk(std::size_t depth) {
    if ((static_cast<std::int64_t>(depth) - n) % 2 == 0) leaf(depth);
    if (static_cast<std::int64_t>(depth) == n) return;
    for (unsigned li = 0; li < 4; ++li) {
      Letter l = letter_from_index(li);
      if (!word.empty() && word.back() == inverse(l)) continue;
      if (!extend(depth, l)) continue;
      walk(depth + 1);
      word.pop_back();
    }
  }
};

}  // namespace

SmallOrbitCount count_small_orbit_elements(const ScalingRule& rule, std::int64_t n, std::int64_t m,
                                           double k_emp, unsigned threads) {
  if (n < 0) throw std::invalid_argument("word length must be >= 0");
  if (n > kMaxCountLength)
    throw std::invalid_argument("word length " + std::to_string(n) + " too large for enumeration (max " +
                                std::to_string(kMaxCountLength) + ")");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(k_emp >= 0.0)) throw std::invalid_argument("K must be >= 0");

  SmallOrbitCount out;
  out.n = n;
  out.m = m;
  out.k_emp = k_emp;
  out.radius_limit = static_cast<std::int64_t>(std::ceil(k_emp * static_cast<double>(m)));
  out.words_examined = std::uint64_t{1} << (2 * n);

  const auto set = equality_test_set(rule, std::max<std::int64_t>(n, 1));
  // the empty word, then one subtree per first letter
  std::vector<CountWalk> walks;
  for (int i = 0; i < 5; ++i) walks.emplace_back(rule, set, n, out.radius_limit);
  parallel_for(5, threads, [&](std::size_t t) {
    CountWalk& cw = walks[t];
    cw.images[0] = set.vertices;
    if (t == 0) {
      if (n % 2 == 0) cw.leaf(0);
      return;
    }
    if (n == 0) return;
    if (cw.extend(0, letter_from_index(static_cast<unsigned>(t - 1)))) cw.walk(1);
  });
  for (std::size_t t = 1; t < walks.size(); ++t) walks[0].elements.merge(walks[t].elements);
  out.distinct_elements = walks[0].elements.size();
  out.hash_collisions = walks[0].elements.collisions();
  for (const auto& cw : walks) out.reduced_words_visited += cw.visited;
  return out;
}

}  // namespace bubblewalk
