#include "pairlens/text.hpp"

#include <cctype>

namespace pairlens {

namespace {

inline bool word_char(unsigned char c) { return std::isalnum(c) != 0; }

inline char lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

bool equals_icase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (lower(static_cast<unsigned char>(a[i])) != lower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Finds the next whole-word, case-insensitive occurrence of phrase at or after
// `from`; npos if none.
std::size_t find_phrase(std::string_view text, std::string_view phrase, std::size_t from) {
  if (phrase.empty()) return std::string_view::npos;
  for (std::size_t i = from; i + phrase.size() <= text.size(); ++i) {
    if (!equals_icase(text.substr(i, phrase.size()), phrase)) continue;
    const bool left_ok = i == 0 || !word_char(static_cast<unsigned char>(text[i - 1]));
    const std::size_t end = i + phrase.size();
    const bool right_ok =
        end == text.size() || !word_char(static_cast<unsigned char>(text[end]));
    if (left_ok && right_ok) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(static_cast<unsigned char>(c));
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      const unsigned char c = static_cast<unsigned char>(text[j]);
      if (word_char(c)) {
        ++j;
      } else if (c == '\'' && j + 1 < n &&
                 word_char(static_cast<unsigned char>(text[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    tokens.push_back(to_lower(text.substr(i, j - i)));
    i = j;
  }
  return tokens;
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
  return find_phrase(text, phrase, 0) != std::string_view::npos;
}

std::string strip_phrases(std::string_view text, const std::vector<std::string>& phrases) {
  std::string current(text);
  for (const std::string& phrase : phrases) {
    std::string out;
    out.reserve(current.size());
    std::size_t pos = 0;
    while (pos < current.size()) {
      const std::size_t hit = find_phrase(current, phrase, pos);
      if (hit == std::string_view::npos) {
        out.append(current, pos, std::string::npos);
        break;
      }
      out.append(current, pos, hit - pos);
      pos = hit + phrase.size();
    }
    current = std::move(out);
  }
  return collapse_spaces(current);
}

std::string collapse_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool last_space = false;
  for (char c : text) {
    const bool is_space = c == ' ';
    if (is_space && last_space) continue;
    out.push_back(c);
    last_space = is_space;
  }
  return out;
}

}  // namespace pairlens
