#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bubblewalk {

/// Generator letters. The encoding pairs each letter with its inverse in the
/// low bit, so inverse() is a single xor.
enum class Letter : std::uint8_t { a = 0, a_inv = 1, b = 2, b_inv = 3 };

constexpr Letter inverse(Letter l) noexcept {
  return static_cast<Letter>(static_cast<std::uint8_t>(l) ^ 1u);
}

constexpr Letter letter_from_index(unsigned i) noexcept {
  return static_cast<Letter>(i & 3u);
}

constexpr bool is_b(Letter l) noexcept { return static_cast<std::uint8_t>(l) >= 2; }

/// a, A, b, B for a, a^-1, b, b^-1.
char letter_char(Letter l) noexcept;

using Word = std::vector<Letter>;

/// Parses a word over {a, A, b, B}. Whitespace is ignored.
Word parse_word(std::string_view text);
std::string format_word(const Word& w);

/// The word g_n^-1 ... g_1^-1.
Word inverse(const Word& w);

Word concat(const Word& lhs, const Word& rhs);

}  // namespace bubblewalk
