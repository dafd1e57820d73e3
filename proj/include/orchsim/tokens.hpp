#pragma once

// Token counting used for every context-budget decision. A token is a maximal
// run of non-whitespace characters, with ASCII punctuation split off as
// separate tokens: "update plan." -> ["update", "plan", "."].

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace orchsim {

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_punct_byte(unsigned char c) { return std::ispunct(c) != 0; }

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (is_space_byte(c)) {
      ++i;
    } else if (is_punct_byte(c)) {
      tokens.emplace_back(1, char(c));
      ++i;
    } else {
      std::size_t start = i;
      while (i < text.size() && !is_space_byte(text[i]) && !is_punct_byte(text[i])) ++i;
      tokens.emplace_back(text.substr(start, i - start));
    }
  }
  return tokens;
}

inline long token_count(std::string_view text) {
  long n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (is_space_byte(c)) {
      ++i;
    } else if (is_punct_byte(c)) {
      ++n;
      ++i;
    } else {
      ++n;
      while (i < text.size() && !is_space_byte(text[i]) && !is_punct_byte(text[i])) ++i;
    }
  }
  return n;
}

}  // namespace orchsim
