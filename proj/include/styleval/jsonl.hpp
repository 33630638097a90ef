#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace styleval {

using json = nlohmann::json;

namespace detail {

template <typename... Parts>
std::string concat(Parts&&... parts) {
  std::ostringstream oss;
  (oss << ... << parts);
  return oss.str();
}

}  // namespace detail

// Parse a line-delimited JSON file, invoking fn(line_number, record) per
// line. Line numbers are 1-based and reported in every error.
inline void for_each_jsonl(
    const std::string& path,
    const std::function<void(std::size_t, const json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(detail::concat("cannot open ", path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": empty line"));
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": malformed record: ", e.what()));
    }
    if (!record.is_object()) {
      throw std::runtime_error(
          detail::concat(path, ":", line_no, ": record is not an object"));
    }
    fn(line_no, record);
  }
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(detail::concat("cannot write ", path));
  return out;
}

inline void write_json_file(const std::string& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(detail::concat("cannot open ", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(detail::concat(path, ": ", e.what()));
  }
}

}  // namespace styleval
