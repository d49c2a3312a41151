#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bubblewalk/scaling.hpp"
#include "bubblewalk/word.hpp"

namespace bubblewalk {

/// Canonical coordinate of a vertex of S(alpha): the branch choices taken
/// from the root (bit i = choice made leaving level i+1) and the offset on the
/// vertex's cycle. Level = path length + 1, 0 <= pos < 2 * alpha_level.
///
/// A child cycle's start is always written with the child's path and pos 0,
/// never as a third vertex of the parent's branching cycle.
class VertexAddress {
 public:
  /// The root o.
  constexpr VertexAddress() = default;

  static VertexAddress make(const ScalingRule& rule, std::uint64_t bits, int len,
                            std::int64_t pos);
  /// `path` is a string over {0, 1}, first branch choice first.
  static VertexAddress make(const ScalingRule& rule, std::string_view path,
                            std::int64_t pos);
  static constexpr VertexAddress unchecked(std::uint64_t bits, int len,
                                           std::int64_t pos) noexcept {
    VertexAddress v;
    v.bits_ = bits;
    v.len_ = static_cast<std::uint8_t>(len);
    v.pos_ = pos;
    return v;
  }

  constexpr int level() const noexcept { return len_ + 1; }
  constexpr int path_len() const noexcept { return len_; }
  constexpr std::uint64_t path_bits() const noexcept { return bits_; }
  constexpr std::int64_t pos() const noexcept { return pos_; }
  constexpr bool path_bit(int i) const noexcept { return (bits_ >> i) & 1u; }
  constexpr bool is_root() const noexcept { return len_ == 0 && pos_ == 0; }

  std::string path_string() const;

  friend constexpr bool operator==(const VertexAddress&, const VertexAddress&) = default;
  friend constexpr auto operator<=>(const VertexAddress& x, const VertexAddress& y) {
    if (auto c = x.len_ <=> y.len_; c != 0) return c;
    if (auto c = x.bits_ <=> y.bits_; c != 0) return c;
    return x.pos_ <=> y.pos_;
  }

 private:
  std::uint64_t bits_ = 0;
  std::int64_t pos_ = 0;
  std::uint8_t len_ = 0;
};

struct VertexHash {
  std::size_t operator()(const VertexAddress& v) const noexcept {
    std::uint64_t h = v.path_bits() * 0x9e3779b97f4a7c15ull;
    h ^= static_cast<std::uint64_t>(v.pos()) + 0x632be59bd9b4e019ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(v.path_len()) * 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

/// Text form `path:pos`, e.g. `:0` for the root or `01:4`.
VertexAddress parse_address(const ScalingRule& rule, std::string_view text);
std::string format_address(const VertexAddress& v);

/// Image x.l. Orientation of each branching 3-cycle under b:
/// midpoint -> child 0 -> child 1 -> midpoint. For explicit (finite) rules the
/// graph is truncated at the last level and b fixes its midpoints; infinite
/// rules throw LevelCapError when the level cap would be crossed.
VertexAddress apply_letter(const ScalingRule& rule, const VertexAddress& x, Letter l);

/// Right action: leftmost letter first.
VertexAddress apply_word(const ScalingRule& rule, VertexAddress x, const Word& w);

/// Distinct graph neighbours (self-loops of b excluded), sorted.
std::vector<VertexAddress> neighbors(const ScalingRule& rule, const VertexAddress& x);

/// d(o, x) = s_{n-1} + min(pos, 2 alpha_n - pos).
std::int64_t dist_to_root(const ScalingRule& rule, const VertexAddress& x);

/// Exact distance via bidirectional BFS; nullopt if it exceeds cap.
std::optional<std::int64_t> dist(const ScalingRule& rule, const VertexAddress& x,
                                 const VertexAddress& y, std::int64_t cap);

/// Closed-form distance on the tree of cycles. Agrees with dist().
std::int64_t tree_distance(const ScalingRule& rule, const VertexAddress& x,
                           const VertexAddress& y);

inline constexpr std::uint64_t kDefaultBallLimit = 50'000'000;

/// Closed ball in BFS order. Throws ResourceGuardError when the growth bound
/// for B_{d(o,center)+r}(o) exceeds `limit`.
std::vector<VertexAddress> ball(const ScalingRule& rule, const VertexAddress& center,
                                std::int64_t r, std::uint64_t limit = kDefaultBallLimit);

/// 2(alpha_1 + 1 + 2(alpha_2 + 1) + ... + 2^{k-1}(alpha_k + 1)) with
/// s_{k-1} <= n < s_k. Saturates at UINT64_MAX.
std::uint64_t ball_size_bound(const ScalingRule& rule, std::int64_t n);

/// Exact |B_r(o)| by counting per level. Saturates at UINT64_MAX.
std::uint64_t ball_count(const ScalingRule& rule, std::int64_t r);

/// Interns vertices as dense ids and memoizes letter images, for loops that
/// push many points through long words.
class VertexCache {
 public:
  explicit VertexCache(const ScalingRule& rule) : rule_(&rule) {}

  std::uint32_t id(const VertexAddress& v);
  const VertexAddress& vertex(std::uint32_t id) const { return vertices_[id]; }
  std::uint32_t step(std::uint32_t id, Letter l) {
    std::uint32_t slot = next_[id][static_cast<unsigned>(l)];
    if (slot != kUnset) return slot;
    slot = id_of_image(id, l);
    next_[id][static_cast<unsigned>(l)] = slot;
    return slot;
  }
  std::size_t size() const noexcept { return vertices_.size(); }
  const ScalingRule& rule() const noexcept { return *rule_; }

 private:
  static constexpr std::uint32_t kUnset = 0xffffffffu;
  std::uint32_t id_of_image(std::uint32_t id, Letter l);

  const ScalingRule* rule_;
  std::vector<VertexAddress> vertices_;
  std::vector<std::array<std::uint32_t, 4>> next_;
  std::unordered_map<VertexAddress, std::uint32_t, VertexHash> ids_;
};

}  // namespace bubblewalk
