#include "aqtc/script.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/error.hpp"

namespace aqtc {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

double require_number(const json& rec, const char* key, std::size_t index) {
  if (!rec.contains(key) || !rec[key].is_number()) {
    fail(ErrorCode::MalformedScript, "line " + std::to_string(index) +
                                         ": missing numeric field '" + key + "'");
  }
  const double v = rec[key].get<double>();
  if (!std::isfinite(v)) {
    fail(ErrorCode::MalformedScript,
         "line " + std::to_string(index) + ": non-finite '" + key + "'");
  }
  return v;
}

}  // namespace

Script parse_script(std::string_view raw) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedScript, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("video_id") || !doc["video_id"].is_string()) {
    fail(ErrorCode::MalformedScript, "missing string field 'video_id'");
  }
  if (!doc.contains("lines") || !doc["lines"].is_array()) {
    fail(ErrorCode::MalformedScript, "missing array field 'lines'");
  }

  Script script;
  script.video_id = doc["video_id"].get<std::string>();
  const auto& lines = doc["lines"];
  if (lines.empty()) fail(ErrorCode::EmptyScript, "script has no lines");

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& rec = lines[i];
    if (!rec.is_object()) {
      fail(ErrorCode::MalformedScript, "line " + std::to_string(i) + " is not an object");
    }
    ScriptLine line;
    line.start_s = require_number(rec, "start_s", i);
    line.end_s = require_number(rec, "end_s", i);
    if (!rec.contains("text") || !rec["text"].is_string()) {
      fail(ErrorCode::MalformedScript,
           "line " + std::to_string(i) + ": missing string field 'text'");
    }
    if (line.start_s < 0.0) {
      fail(ErrorCode::MalformedScript, "line " + std::to_string(i) + ": negative start_s");
    }
    if (line.start_s > line.end_s) {
      fail(ErrorCode::MalformedScript, "line " + std::to_string(i) + ": start_s > end_s");
    }
    const auto text = trim(rec["text"].get_ref<const std::string&>());
    if (text.empty()) {
      fail(ErrorCode::MalformedScript, "line " + std::to_string(i) + ": empty text");
    }
    line.text = std::string(text);
    script.lines.push_back(std::move(line));
  }

  std::stable_sort(script.lines.begin(), script.lines.end(),
                   [](const ScriptLine& a, const ScriptLine& b) { return a.start_s < b.start_s; });

  for (std::size_t i = 1; i < script.lines.size(); ++i) {
    const double overlap = script.lines[i - 1].end_s - script.lines[i].start_s;
    if (overlap > kTimestampJitterS) {
      fail(ErrorCode::MalformedScript, "lines " + std::to_string(i - 1) + " and " +
                                           std::to_string(i) + " overlap by " +
                                           std::to_string(overlap) + " s");
    }
  }
  return script;
}

Script load_script(const std::string& path) { return parse_script(read_text_file(path)); }

bool is_function_header(std::string_view text) {
  static const std::regex header(R"(^\s*how to .*\?)", std::regex::icase | std::regex::ECMAScript);
  return std::regex_search(text.begin(), text.end(), header);
}

std::pair<double, double> align_clip(std::span<const ScriptLine> lines) {
  if (lines.empty()) fail(ErrorCode::EmptySublist, "cannot align an empty line list");
  double lo = lines.front().start_s;
  double hi = lines.front().end_s;
  for (const auto& l : lines) {
    lo = std::min(lo, l.start_s);
    hi = std::max(hi, l.end_s);
  }
  return {lo, hi};
}

std::vector<FunctionUnit> segment(const Script& script, SegmentationMode mode) {
  const auto& lines = script.lines;
  if (lines.empty()) fail(ErrorCode::EmptyScript, "script has no lines");

  // Start index of every unit; the first unit always starts at line 0 so that
  // lines preceding the first header are kept.
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (mode == SegmentationMode::SentenceCentric || is_function_header(lines[i].text)) {
      starts.push_back(i);
    }
  }
  if (mode == SegmentationMode::FunctionCentric && starts.size() > 1 &&
      !is_function_header(lines[0].text)) {
    // Headerless preamble joins the first headed unit.
    starts.erase(starts.begin() + 1);
  }

  const char* prefix = mode == SegmentationMode::FunctionCentric ? "fn" : "sent";
  std::vector<FunctionUnit> units;
  units.reserve(starts.size());
  for (std::size_t u = 0; u < starts.size(); ++u) {
    const std::size_t begin = starts[u];
    const std::size_t end = u + 1 < starts.size() ? starts[u + 1] : lines.size();
    FunctionUnit unit;
    unit.function_id = prefix + std::to_string(u);
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) unit.para_text += ' ';
      unit.para_text += lines[i].text;
      unit.source_line_indices.push_back(i);
    }
    std::tie(unit.clip_start_s, unit.clip_end_s) =
        align_clip(std::span(lines).subspan(begin, end - begin));
    units.push_back(std::move(unit));
  }
  return units;
}

SegmentationMode parse_segmentation_mode(std::string_view name) {
  if (name == "function") return SegmentationMode::FunctionCentric;
  if (name == "sentence") return SegmentationMode::SentenceCentric;
  fail(ErrorCode::ConfigError, "unknown segmentation mode '" + std::string(name) +
                                   "' (expected function|sentence)");
}

std::string_view to_string(SegmentationMode mode) {
  return mode == SegmentationMode::FunctionCentric ? "function" : "sentence";
}

std::string functions_to_json(const FunctionSet& set) {
  json out;
  out["video_id"] = set.video_id;
  out["functions"] = json::array();
  for (const auto& f : set.functions) {
    out["functions"].push_back({{"function_id", f.function_id},
                                {"para_text", f.para_text},
                                {"clip_start_s", f.clip_start_s},
                                {"clip_end_s", f.clip_end_s},
                                {"source_line_indices", f.source_line_indices}});
  }
  return out.dump(2) + "\n";
}

FunctionSet functions_from_json(std::string_view raw) {
  FunctionSet set;
  try {
    const json doc = json::parse(raw);
    set.video_id = doc.at("video_id").get<std::string>();
    for (const auto& rec : doc.at("functions")) {
      FunctionUnit f;
      f.function_id = rec.at("function_id").get<std::string>();
      f.para_text = rec.at("para_text").get<std::string>();
      f.clip_start_s = rec.at("clip_start_s").get<double>();
      f.clip_end_s = rec.at("clip_end_s").get<double>();
      f.source_line_indices = rec.at("source_line_indices").get<std::vector<std::size_t>>();
      set.functions.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("malformed functions file: ") + e.what());
  }
  if (set.functions.empty()) {
    fail(ErrorCode::EmptyFunctionSet, "no functions for video '" + set.video_id + "'");
  }
  return set;
}

FunctionSet load_functions(const std::string& path) {
  return functions_from_json(read_text_file(path));
}

}  // namespace aqtc
