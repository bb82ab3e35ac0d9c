#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace consentscan::text {

/// Collapses runs of ASCII/Unicode whitespace into single spaces and trims both ends.
std::string normalize_whitespace(std::string_view s);

/// Lowercases ASCII plus the Latin-1 and Latin Extended-A letters used by the
/// supported European languages. Other code points pass through unchanged.
std::string to_lower_utf8(std::string_view s);

/// Case-folded word tokens: maximal runs of letters/digits (any non-ASCII
/// code point counts as a letter), split on everything else.
std::vector<std::string> word_tokens(std::string_view s);

/// Whitespace-delimited word count.
std::size_t word_count(std::string_view s);

/// Case-insensitive substring test (both sides folded with to_lower_utf8).
bool contains_folded(std::string_view haystack, std::string_view lowered_needle);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Decodes standard (padded) base64. Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view encoded);

/// Levenshtein distance over bytes divided by the longer length; 1.0 means identical.
double normalized_levenshtein_similarity(std::string_view a, std::string_view b);

} // namespace consentscan::text
