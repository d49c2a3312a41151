#include "bubblewalk/word.hpp"

#include <cctype>
#include <stdexcept>

namespace bubblewalk {

char letter_char(Letter l) noexcept {
  switch (l) {
    case Letter::a: return 'a';
    case Letter::a_inv: return 'A';
    case Letter::b: return 'b';
    case Letter::b_inv: return 'B';
  }
  return '?';
}

Word parse_word(std::string_view text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case 'a': w.push_back(Letter::a); break;
      case 'A': w.push_back(Letter::a_inv); break;
      case 'b': w.push_back(Letter::b); break;
      case 'B': w.push_back(Letter::b_inv); break;
      default:
        if (std::isspace(static_cast<unsigned char>(c))) break;
        throw std::invalid_argument(std::string("invalid letter '") + c + "' in word");
    }
  }
  return w;
}

std::string format_word(const Word& w) {
  std::string out;
  out.reserve(w.size());
  for (Letter l : w) out.push_back(letter_char(l));
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Letter& l : out) l = inverse(l);
  return out;
}

Word concat(const Word& lhs, const Word& rhs) {
  Word out;
  out.reserve(lhs.size() + rhs.size());
  out.insert(out.end(), lhs.begin(), lhs.end());
  out.insert(out.end(), rhs.begin(), rhs.end());
  return out;
}

}  // namespace bubblewalk
