#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqtc {

struct ScriptLine {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

struct Script {
  std::string video_id;
  std::vector<ScriptLine> lines;  // ascending start_s
};

// One function of a video: the paragraph f^t and the clip range f^v it spans.
struct FunctionUnit {
  std::string function_id;
  std::string para_text;
  double clip_start_s = 0.0;
  double clip_end_s = 0.0;
  std::vector<std::size_t> source_line_indices;
};

enum class SegmentationMode { FunctionCentric, SentenceCentric };

struct FunctionSet {
  std::string video_id;
  std::vector<FunctionUnit> functions;
};

// Overlap between consecutive lines tolerated before a script is rejected.
inline constexpr double kTimestampJitterS = 0.5;

Script parse_script(std::string_view raw);
Script load_script(const std::string& path);

// True when the line opens a new function ("How to ...?", case-insensitive).
bool is_function_header(std::string_view text);

std::vector<FunctionUnit> segment(const Script& script, SegmentationMode mode);

std::pair<double, double> align_clip(std::span<const ScriptLine> lines);

SegmentationMode parse_segmentation_mode(std::string_view name);
std::string_view to_string(SegmentationMode mode);

// functions.json read/write.
std::string functions_to_json(const FunctionSet& set);
FunctionSet functions_from_json(std::string_view raw);
FunctionSet load_functions(const std::string& path);

}  // namespace aqtc
