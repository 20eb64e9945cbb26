#pragma once

#include <cstdint>
#include <regex>
#include <string>
#include <vector>

namespace itsforge::util {

// Splits on sep; no trimming, empty pieces kept. split("", sep) == {}.
std::vector<std::string> split(const std::string& s, char sep);

// Splits on sep and drops pieces that trim to empty.
std::vector<std::string> split_nonempty(const std::string& s, char sep);

std::string trim(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Compiled-regex cache. Patterns come from catalog files and are reused
// thousands of times per generation; construction dominates otherwise.
const std::regex& compiled(const std::string& pattern);

// Whole-string match of text against pattern (ECMAScript).
bool full_match(const std::string& text, const std::string& pattern);

// True if any tag in tags full-matches pattern.
bool matches_any(const std::vector<std::string>& tags, const std::string& pattern);

}  // namespace itsforge::util
