#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pairlens {

std::string to_lower(std::string_view s);

// Word tokens: runs of alphanumerics, keeping apostrophes that sit between
// alphanumerics ("don't" stays one token). Lowercased.
std::vector<std::string> tokenize(std::string_view text);

// Case-insensitive whole-word search for a word or phrase.
bool contains_phrase(std::string_view text, std::string_view phrase);

// Removes every whole-word occurrence of each phrase (case-insensitive) and
// collapses the doubled spaces left behind.
std::string strip_phrases(std::string_view text, const std::vector<std::string>& phrases);

std::string collapse_spaces(std::string_view text);

}  // namespace pairlens
