#include "cdtw/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cdtw/error.hpp"

namespace cdtw {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + why);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

void check_distinct(const SeriesFile& s, std::size_t last_line) {
  for (std::size_t k = 1; k < s.values.size(); ++k)
    if (s.values[k] != s.values[k - 1]) return;
  fail(s.path, last_line, "need at least two distinct consecutive values");
}

}  // namespace

SeriesFormat guess_format(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return SeriesFormat::Csv;
  std::string ext(path.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == "json" ? SeriesFormat::Json : SeriesFormat::Csv;
}

SeriesFile parse_series(std::string_view text, const std::string& path, SeriesFormat format,
                        std::ostream* warn) {
  SeriesFile out;
  out.path = path;
  out.format = format;
  if (format == SeriesFormat::Json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(path, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
    }
    if (!doc.is_array()) fail(path, 1, "expected a flat array of numbers");
    for (std::size_t k = 0; k < doc.size(); ++k) {
      if (!doc[k].is_number()) fail(path, 1, "element " + std::to_string(k) + " is not a number");
      out.values.push_back(doc[k].get<double>());
    }
    check_distinct(out, line_of_offset(text, text.size()));
    return out;
  }

  bool warned = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    double v = 0.0;
    if (!parse_double(line.substr(0, comma), v)) {
      fail(path, line_no, "not a number: '" + std::string(line.substr(0, comma)) + "'");
    }
    if (comma != std::string_view::npos && !warned && warn) {
      *warn << "warning: " << path << ": ignoring second column\n";
      warned = true;
    }
    out.values.push_back(v);
  }
  check_distinct(out, line_no);
  return out;
}

SeriesFile read_series(const std::string& path, std::ostream* warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path + ":0: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series(buf.str(), path, guess_format(path), warn);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double rounded(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

nlohmann::json to_json(const Pwq& f) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& q : f.pieces()) {
    const auto g = q.global();
    pieces.push_back({{"lo", q.lo}, {"hi", q.hi}, {"a", g.a}, {"b", g.b}, {"c", g.c}});
  }
  return pieces;
}

nlohmann::json to_json(const SolveStats& s) {
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [k, v] : s.pieces_per_level) levels[std::to_string(k)] = v;
  nlohmann::json distinct = nlohmann::json::object();
  for (const auto& [k, v] : s.max_distinct_ab_per_level) distinct[std::to_string(k)] = v;
  return {{"total_pieces", s.total_pieces},
          {"pieces_per_level", levels},
          {"max_distinct_ab_per_level", distinct},
          {"max_distinct_ab_per_edge", s.max_distinct_ab_per_edge},
          {"wall_time", rounded(s.wall_time)},
          {"cells_solved", s.cells_solved},
          {"fragments", s.fragments},
          {"max_pieces_per_source", s.max_pieces_per_source},
          {"cummin_bound_violations", s.cummin_bound_violations},
          {"bound_flags", s.bound_flags}};
}

nlohmann::json to_json(const WarpPath& p) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : p.points) points.push_back({rounded(pt.x), rounded(pt.y)});
  nlohmann::json legs = nlohmann::json::array();
  for (auto leg : p.legs) legs.push_back(to_string(leg));
  return {{"points", points}, {"legs", legs}};
}

nlohmann::json to_json(const CdtwResult& r) {
  nlohmann::json j = {{"value", rounded(r.value)}, {"stats", to_json(r.stats)}};
  if (r.path) j["path"] = to_json(*r.path);
  return j;
}

}  // namespace cdtw
