#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fracproj {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

/// Parses "0120" (single-digit symbols) or "0,12,3" (comma separated).
Word parse_word(const std::string& text);

/// Inverse of parse_word; uses commas once any symbol exceeds 9.
std::string format_word(WordView word, std::size_t alphabet_size);

}  // namespace fracproj
