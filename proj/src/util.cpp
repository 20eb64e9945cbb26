#include "util.hpp"

#include <map>

#include "errors.hpp"

namespace itsforge::util {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_nonempty(const std::string& s, char sep) {
  std::vector<std::string> out;
  for (const auto& piece : split(s, sep)) {
    std::string t = trim(piece);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const std::regex& compiled(const std::string& pattern) {
  static std::map<std::string, std::regex> cache;
  auto it = cache.find(pattern);
  if (it != cache.end()) return it->second;
  try {
    auto [pos, inserted] = cache.emplace(pattern, std::regex(pattern));
    (void)inserted;
    return pos->second;
  } catch (const std::regex_error& e) {
    throw InputError("invalid regex '" + pattern + "': " + e.what());
  }
}

bool full_match(const std::string& text, const std::string& pattern) {
  return std::regex_match(text, compiled(pattern));
}

bool matches_any(const std::vector<std::string>& tags, const std::string& pattern) {
  for (const auto& t : tags)
    if (full_match(t, pattern)) return true;
  return false;
}

}  // namespace itsforge::util
