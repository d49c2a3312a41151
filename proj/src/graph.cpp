#include "bubblewalk/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "bubblewalk/common.hpp"

namespace bubblewalk {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturate(unsigned __int128 v) {
  return v > kSaturated ? kSaturated : static_cast<std::uint64_t>(v);
}

std::int64_t cycle_offset(std::int64_t pos, std::int64_t alpha) {
  return std::min(pos, 2 * alpha - pos);
}

VertexAddress child(const ScalingRule& rule, const VertexAddress& x, unsigned bit) {
  int child_level = x.level() + 1;
  if (child_level > rule.max_level()) {
    if (rule.is_finite()) return x;  // truncated graph: no children
    throw LevelCapError("vertex " + format_address(x) + " would step past level " +
                        std::to_string(rule.max_level()) + " for " + rule.describe());
  }
  return VertexAddress::unchecked(x.path_bits() | (std::uint64_t{bit} << x.path_len()),
                                  x.path_len() + 1, 0);
}

VertexAddress parent_midpoint(const ScalingRule& rule, const VertexAddress& x) {
  int len = x.path_len() - 1;
  std::uint64_t mask = len == 0 ? 0 : ((std::uint64_t{1} << len) - 1);
  return VertexAddress::unchecked(x.path_bits() & mask, len, rule.alpha_unchecked(len + 1));
}

VertexAddress sibling(const VertexAddress& x) {
  return VertexAddress::unchecked(x.path_bits() ^ (std::uint64_t{1} << (x.path_len() - 1)),
                                  x.path_len(), 0);
}

}  // namespace

VertexAddress VertexAddress::make(const ScalingRule& rule, std::uint64_t bits, int len,
                                  std::int64_t pos) {
  if (len < 0 || len + 1 > rule.max_level())
    throw std::out_of_range("vertex level " + std::to_string(len + 1) + " not available for " +
                            rule.describe());
  if (len < 64 && (bits >> len) != 0)
    throw std::invalid_argument("path bits beyond path length");
  auto alpha = rule.alpha_unchecked(len + 1);
  if (pos < 0 || pos >= 2 * alpha)
    throw std::invalid_argument("pos " + std::to_string(pos) + " outside cycle of length " +
                                std::to_string(2 * alpha));
  return unchecked(bits, len, pos);
}

VertexAddress VertexAddress::make(const ScalingRule& rule, std::string_view path,
                                  std::int64_t pos) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] == '1') bits |= std::uint64_t{1} << i;
    else if (path[i] != '0') throw std::invalid_argument("path must be a 0/1 string");
  }
  return make(rule, bits, static_cast<int>(path.size()), pos);
}

std::string VertexAddress::path_string() const {
  std::string out(len_, '0');
  for (int i = 0; i < len_; ++i)
    if (path_bit(i)) out[i] = '1';
  return out;
}

VertexAddress parse_address(const ScalingRule& rule, std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("address must look like path:pos");
  std::string_view pos_text = text.substr(colon + 1);
  long long pos = 0;
  auto [ptr, ec] = std::from_chars(pos_text.data(), pos_text.data() + pos_text.size(), pos);
  if (ec != std::errc() || ptr != pos_text.data() + pos_text.size() || pos_text.empty())
    throw std::invalid_argument("bad position in address '" + std::string(text) + "'");
  return VertexAddress::make(rule, text.substr(0, colon), pos);
}

std::string format_address(const VertexAddress& v) {
  return v.path_string() + ":" + std::to_string(v.pos());
}

VertexAddress apply_letter(const ScalingRule& rule, const VertexAddress& x, Letter l) {
  const std::int64_t alpha = rule.alpha_unchecked(x.level());
  const std::int64_t len = 2 * alpha;
  switch (l) {
    case Letter::a:
      return VertexAddress::unchecked(x.path_bits(), x.path_len(),
                                      x.pos() + 1 == len ? 0 : x.pos() + 1);
    case Letter::a_inv:
      return VertexAddress::unchecked(x.path_bits(), x.path_len(),
                                      x.pos() == 0 ? len - 1 : x.pos() - 1);
    case Letter::b:
    case Letter::b_inv: {
      const bool forward = l == Letter::b;
      if (x.pos() == alpha) return child(rule, x, forward ? 0u : 1u);
      if (x.pos() == 0 && x.path_len() > 0) {
        bool last = x.path_bit(x.path_len() - 1);
        // b: child 0 -> child 1 -> midpoint; b^-1 reverses.
        if (forward) return last ? parent_midpoint(rule, x) : sibling(x);
        return last ? sibling(x) : parent_midpoint(rule, x);
      }
      return x;
    }
  }
  return x;
}

VertexAddress apply_word(const ScalingRule& rule, VertexAddress x, const Word& w) {
  for (Letter l : w) x = apply_letter(rule, x, l);
  return x;
}

std::vector<VertexAddress> neighbors(const ScalingRule& rule, const VertexAddress& x) {
  std::vector<VertexAddress> out;
  out.reserve(4);
  for (unsigned i = 0; i < 4; ++i) {
    auto y = apply_letter(rule, x, letter_from_index(i));
    if (y != x) out.push_back(y);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t dist_to_root(const ScalingRule& rule, const VertexAddress& x) {
  int n = x.level();
  return rule.s_unchecked(n - 1) + cycle_offset(x.pos(), rule.alpha_unchecked(n));
}

std::int64_t tree_distance(const ScalingRule& rule, const VertexAddress& x,
                           const VertexAddress& y) {
  int common = 0;
  int shorter = std::min(x.path_len(), y.path_len());
  std::uint64_t diff = x.path_bits() ^ y.path_bits();
  if (diff == 0) common = shorter;
  else common = std::min(shorter, static_cast<int>(__builtin_ctzll(diff)));

  auto depth_in_subtree = [&](const VertexAddress& v) {
    // distance from the start of v's ancestor cycle at level common + 2
    return rule.s_unchecked(v.level() - 1) - rule.s_unchecked(common + 1) +
           cycle_offset(v.pos(), rule.alpha_unchecked(v.level()));
  };

  if (common == x.path_len() && common == y.path_len()) {
    std::int64_t d = std::abs(x.pos() - y.pos());
    return std::min(d, 2 * rule.alpha_unchecked(x.level()) - d);
  }
  if (common == x.path_len()) {
    return std::abs(x.pos() - rule.alpha_unchecked(x.level())) + 1 + depth_in_subtree(y);
  }
  if (common == y.path_len()) {
    return std::abs(y.pos() - rule.alpha_unchecked(y.level())) + 1 + depth_in_subtree(x);
  }
  return depth_in_subtree(x) + 1 + depth_in_subtree(y);
}

std::optional<std::int64_t> dist(const ScalingRule& rule, const VertexAddress& x,
                                 const VertexAddress& y, std::int64_t cap) {
  if (cap < 0) throw std::invalid_argument("dist cap must be >= 0");
  if (x == y) return 0;
  if (x.path_len() == y.path_len() && x.path_bits() == y.path_bits()) {
    auto d = tree_distance(rule, x, y);
    if (d <= cap) return d;
    return std::nullopt;
  }
  using Map = std::unordered_map<VertexAddress, std::int64_t, VertexHash>;
  Map seen_x{{x, 0}}, seen_y{{y, 0}};
  std::vector<VertexAddress> front_x{x}, front_y{y};
  std::int64_t depth_x = 0, depth_y = 0;
  while (depth_x + depth_y < cap && !front_x.empty() && !front_y.empty()) {
    bool grow_x = front_x.size() <= front_y.size();
    auto& front = grow_x ? front_x : front_y;
    auto& seen = grow_x ? seen_x : seen_y;
    auto& other = grow_x ? seen_y : seen_x;
    auto& depth = grow_x ? depth_x : depth_y;
    ++depth;
    std::vector<VertexAddress> next;
    std::optional<std::int64_t> best;
    for (const auto& v : front) {
      for (const auto& u : neighbors(rule, v)) {
        if (seen.count(u)) continue;
        seen.emplace(u, depth);
        if (auto it = other.find(u); it != other.end()) {
          auto total = depth + it->second;
          if (!best || total < *best) best = total;
        }
        next.push_back(u);
      }
    }
    if (best) {
      if (*best <= cap) return best;
      return std::nullopt;
    }
    front = std::move(next);
  }
  return std::nullopt;
}

std::uint64_t ball_size_bound(const ScalingRule& rule, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("ball_size_bound needs n >= 0");
  int k = rule.level_containing_distance(n);
  if (k > rule.max_level()) {
    if (!rule.is_finite())
      throw LevelCapError("radius " + std::to_string(n) + " reaches past the level cap of " +
                          rule.describe());
    k = rule.max_level();
  }
  unsigned __int128 sum = 0;
  for (int j = 1; j <= k; ++j) {
    unsigned __int128 term = static_cast<unsigned __int128>(rule.alpha_unchecked(j) + 1);
    if (j - 1 >= 64) return kSaturated;
    term <<= (j - 1);
    sum += term;
    if (sum > kSaturated) return kSaturated;
  }
  return saturate(2 * sum);
}

std::uint64_t ball_count(const ScalingRule& rule, std::int64_t r) {
  if (r < 0) return 0;
  unsigned __int128 total = 0;
  for (int n = 1; n <= rule.max_level(); ++n) {
    std::int64_t t = r - rule.s_unchecked(n - 1);
    if (t < 0) return saturate(total);
    std::int64_t alpha = rule.alpha_unchecked(n);
    std::int64_t per_cycle = t >= alpha ? 2 * alpha : 1 + 2 * t;
    if (n - 1 >= 64) return kSaturated;
    total += static_cast<unsigned __int128>(per_cycle) << (n - 1);
    if (total > kSaturated) return kSaturated;
  }
  if (!rule.is_finite())
    throw LevelCapError("radius " + std::to_string(r) + " reaches past the level cap of " +
                        rule.describe());
  return saturate(total);
}

std::vector<VertexAddress> ball(const ScalingRule& rule, const VertexAddress& center,
                                std::int64_t r, std::uint64_t limit) {
  if (r < 0) throw std::invalid_argument("ball radius must be >= 0");
  auto bound = ball_size_bound(rule, dist_to_root(rule, center) + r);
  if (bound > limit)
    throw ResourceGuardError("ball-size", "growth bound " + std::to_string(bound) +
                                              " exceeds limit " + std::to_string(limit));
  std::vector<VertexAddress> out{center};
  std::unordered_map<VertexAddress, std::int64_t, VertexHash> seen{{center, 0}};
  for (std::size_t head = 0; head < out.size(); ++head) {
    auto v = out[head];
    auto d = seen[v];
    if (d == r) continue;
    for (const auto& u : neighbors(rule, v)) {
      if (seen.emplace(u, d + 1).second) out.push_back(u);
    }
  }
  return out;
}

std::uint32_t VertexCache::id(const VertexAddress& v) {
  auto [it, inserted] = ids_.try_emplace(v, static_cast<std::uint32_t>(vertices_.size()));
  if (inserted) {
    if (vertices_.size() >= kUnset)
      throw ResourceGuardError("vertex-cache", "more than 2^32 - 1 vertices");
    vertices_.push_back(v);
    next_.push_back({kUnset, kUnset, kUnset, kUnset});
  }
  return it->second;
}

std::uint32_t VertexCache::id_of_image(std::uint32_t id, Letter l) {
  VertexAddress image = apply_letter(*rule_, vertices_[id], l);
  std::uint32_t out = this->id(image);
  // the inverse image is free to record
  next_[out][static_cast<unsigned>(inverse(l))] = id;
  return out;
}

}  // namespace bubblewalk
