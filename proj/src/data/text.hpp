// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace massah::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) { return lower(a) == lower(b); }

// Whole-token decimal parse. Overflowing literals come back as +-inf so the
// caller can reject them as non-finite.
inline std::optional<double> parse_number(std::string_view tok) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ptr != tok.data() + tok.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) {
    const bool neg = tok.front() == '-';
    // Underflow to zero is harmless; only overflow is non-finite.
    const auto e = tok.find_first_of("eE");
    if (e != std::string_view::npos && e + 1 < tok.size() && tok[e + 1] == '-') return 0.0;
    return neg ? -std::numeric_limits<double>::infinity()
               : std::numeric_limits<double>::infinity();
  }
  if (ec != std::errc()) return std::nullopt;
  return v;
}

// "data/car-train.arff" -> "car".
inline std::string dataset_name_from(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  for (std::string_view suffix : {"-train", "_train", ".train"}) {
    if (stem.size() > suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return stem.substr(0, stem.size() - suffix.size());
    }
  }
  return stem;
}

}  // namespace massah::detail
