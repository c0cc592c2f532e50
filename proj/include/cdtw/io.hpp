#pragma once

// Series files and JSON views of results.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cdtw/engine.hpp"
#include "cdtw/pwq.hpp"

namespace cdtw {

enum class SeriesFormat { Csv, Json };

struct SeriesFile {
  std::string path;
  SeriesFormat format = SeriesFormat::Csv;
  std::vector<double> values;
};

/// Format from the extension: ".json" is JSON, anything else CSV.
SeriesFormat guess_format(std::string_view path);

/// CSV: one value per line, an optional second column (a timestamp) is
/// ignored with a single warning on `warn`. Blank lines and lines starting
/// with '#' are skipped. JSON: a flat array of numbers. Errors are
/// ParseError with "path:line: reason".
SeriesFile parse_series(std::string_view text, const std::string& path, SeriesFormat format,
                        std::ostream* warn = nullptr);
SeriesFile read_series(const std::string& path, std::ostream* warn = nullptr);

/// "%.12g".
std::string format_number(double v);
/// The double that format_number(v) denotes, for JSON output.
double rounded(double v);

nlohmann::json to_json(const Pwq& f);
nlohmann::json to_json(const SolveStats& s);
nlohmann::json to_json(const WarpPath& p);
nlohmann::json to_json(const CdtwResult& r);

}  // namespace cdtw
