#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "aqtc/binary_io.hpp"
#include "aqtc/error.hpp"
#include "aqtc/script.hpp"
#include "test_util.hpp"

using namespace aqtc;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an aqtc::Error");
  return ErrorCode::IoError;
}

Script make_script(const std::vector<std::string>& texts) {
  Script s{"v", {}};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    s.lines.push_back({static_cast<double>(i), static_cast<double>(i) + 1.0, texts[i]});
  }
  return s;
}

std::string join_all(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

TEST_CASE("parse_script accepts a minimal file") {
  const auto s = parse_script(
      R"({"video_id":"v1","lines":[{"start_s":0.0,"end_s":3.2,"text":"Press the start button."}]})");
  CHECK(s.video_id == "v1");
  REQUIRE(s.lines.size() == 1);
  CHECK(s.lines[0].text == "Press the start button.");
  CHECK(s.lines[0].end_s == 3.2);
}

TEST_CASE("parse_script sorts lines by start time") {
  const auto s = parse_script(R"({"video_id":"v","lines":[
      {"start_s":5.0,"end_s":6.0,"text":"c"},
      {"start_s":0.0,"end_s":1.0,"text":"a"},
      {"start_s":2.0,"end_s":3.0,"text":"b"}]})");
  REQUIRE(s.lines.size() == 3);
  CHECK(s.lines[0].text == "a");
  CHECK(s.lines[1].text == "b");
  CHECK(s.lines[2].text == "c");
}

TEST_CASE("parse_script rejects malformed input") {
  CHECK(code_of([] {
          parse_script(R"({"video_id":"v","lines":[{"start_s":5.0,"end_s":2.0,"text":"x"}]})");
        }) == ErrorCode::MalformedScript);
  CHECK(code_of([] { parse_script("{not json"); }) == ErrorCode::MalformedScript);
  CHECK(code_of([] { parse_script(R"({"lines":[]})"); }) == ErrorCode::MalformedScript);
  CHECK(code_of([] {
          parse_script(R"({"video_id":"v","lines":[{"start_s":0.0,"text":"x"}]})");
        }) == ErrorCode::MalformedScript);
  CHECK(code_of([] {
          parse_script(R"({"video_id":"v","lines":[{"start_s":0.0,"end_s":1.0,"text":"   "}]})");
        }) == ErrorCode::MalformedScript);
  CHECK(code_of([] { parse_script(R"({"video_id":"v","lines":[]})"); }) == ErrorCode::EmptyScript);
}

TEST_CASE("parse_script tolerates up to half a second of overlap") {
  CHECK_NOTHROW(parse_script(R"({"video_id":"v","lines":[
      {"start_s":0.0,"end_s":2.4,"text":"a"},{"start_s":2.0,"end_s":3.0,"text":"b"}]})"));
  CHECK(code_of([] {
          parse_script(R"({"video_id":"v","lines":[
              {"start_s":0.0,"end_s":2.6,"text":"a"},{"start_s":2.0,"end_s":3.0,"text":"b"}]})");
        }) == ErrorCode::MalformedScript);
}

TEST_CASE("function header schema") {
  CHECK(is_function_header("How to defrost 1kg of fish?"));
  CHECK(is_function_header("  how TO set the timer?"));
  CHECK_FALSE(is_function_header("To stop, press the stop button."));
  CHECK_FALSE(is_function_header("How to reset the clock"));
  CHECK_FALSE(is_function_header("Press: how to? no"));
}

TEST_CASE("function-centric segmentation groups lines under headers") {
  const auto s = make_script({"How to defrost 1kg of fish?", "Press turbo defrost button.",
                              "How to set microwave to 1 minute timer?", "Turn time knob clockwise."});
  const auto units = segment(s, SegmentationMode::FunctionCentric);
  REQUIRE(units.size() == 2);
  CHECK(units[0].source_line_indices == std::vector<std::size_t>{0, 1});
  CHECK(units[1].source_line_indices == std::vector<std::size_t>{2, 3});
  CHECK(units[0].para_text == "How to defrost 1kg of fish? Press turbo defrost button.");
  CHECK(units[1].clip_start_s == 2.0);
  CHECK(units[1].clip_end_s == 4.0);
  CHECK(units[0].function_id == "fn0");
}

TEST_CASE("lines before the first header join the first unit") {
  const auto s = make_script({"Welcome.", "How to a?", "x", "How to b?"});
  const auto units = segment(s, SegmentationMode::FunctionCentric);
  REQUIRE(units.size() == 2);
  CHECK(units[0].source_line_indices == std::vector<std::size_t>{0, 1, 2});
  CHECK(units[0].para_text == "Welcome. How to a? x");
}

TEST_CASE("a script without headers is one unit") {
  const auto units = segment(make_script({"a", "b", "c"}), SegmentationMode::FunctionCentric);
  REQUIRE(units.size() == 1);
  CHECK(units[0].para_text == "a b c");
}

TEST_CASE("sentence-centric segmentation yields one unit per line") {
  const auto s = make_script({"How to a?", "x", "y", "How to b?", "z"});
  const auto units = segment(s, SegmentationMode::SentenceCentric);
  REQUIRE(units.size() == 5);
  for (std::size_t i = 0; i < units.size(); ++i) {
    CHECK(units[i].source_line_indices == std::vector<std::size_t>{i});
    CHECK(units[i].para_text == s.lines[i].text);
    CHECK(units[i].function_id == "sent" + std::to_string(i));
  }
}

TEST_CASE("segment rejects an empty script") {
  CHECK(code_of([] { segment(Script{"v", {}}, SegmentationMode::FunctionCentric); }) ==
        ErrorCode::EmptyScript);
}

TEST_CASE("segmenting the microwave script reproduces the first function-para") {
  const auto script = load_script(std::string(AQTC_DATA_DIR) + "/fig2/script.json");
  const auto units = segment(script, SegmentationMode::FunctionCentric);
  CHECK(units.front().para_text ==
        "How to defrost 1kg of fish? Press turbo defrost button. Turn the time knob clockwise to "
        "1 kg. Press the start button.");
  // Paras #3 and #4 of the figure each straddle a "How to" header, so the
  // header schema yields five units rather than four.
  CHECK(units.size() == 5);
  CHECK(units[1].para_text.starts_with("How to microwave eggplant"));
  CHECK(units[3].para_text.starts_with("How to stop microwave in the middle of use?"));
}

TEST_CASE("align_clip") {
  const std::vector<ScriptLine> two{{0.0, 3.2, "a"}, {3.2, 7.9, "b"}};
  CHECK(align_clip(two) == std::pair{0.0, 7.9});
  const std::vector<ScriptLine> one{{12.0, 15.5, "a"}};
  CHECK(align_clip(one) == std::pair{12.0, 15.5});
  const std::vector<ScriptLine> unordered{{10.0, 12.0, "a"}, {5.0, 8.0, "b"}};
  CHECK(align_clip(unordered) == std::pair{5.0, 12.0});
  CHECK(code_of([] { align_clip(std::span<const ScriptLine>{}); }) == ErrorCode::EmptySublist);
}

TEST_CASE("segmentation invariants hold on random scripts") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [texts, headers] = aqtc::testing::random_script_texts(rng);
    const std::size_t n = texts.size();
    const auto script = make_script(texts);
    for (const auto mode : {SegmentationMode::FunctionCentric, SegmentationMode::SentenceCentric}) {
      const auto units = segment(script, mode);
      std::vector<std::string> paras;
      std::vector<std::size_t> seen;
      for (std::size_t u = 0; u < units.size(); ++u) {
        paras.push_back(units[u].para_text);
        REQUIRE_FALSE(units[u].source_line_indices.empty());
        seen.insert(seen.end(), units[u].source_line_indices.begin(),
                    units[u].source_line_indices.end());
        CHECK(units[u].clip_start_s <= units[u].clip_end_s);
        if (u > 0) CHECK(units[u - 1].clip_start_s <= units[u].clip_start_s);
      }
      CHECK(join_all(paras) == join_all(texts));
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      CHECK(seen == all);
      if (mode == SegmentationMode::SentenceCentric) {
        CHECK(units.size() == n);
      } else {
        CHECK(units.size() == std::max<std::size_t>(headers, 1));
      }
    }
  }
}

TEST_CASE("functions.json round-trips") {
  const auto s = make_script({"How to a?", "x", "How to b?", "y"});
  const FunctionSet set{"v", segment(s, SegmentationMode::FunctionCentric)};
  const auto back = functions_from_json(functions_to_json(set));
  CHECK(back.video_id == "v");
  REQUIRE(back.functions.size() == 2);
  CHECK(back.functions[1].para_text == "How to b? y");
  CHECK(back.functions[1].source_line_indices == std::vector<std::size_t>{2, 3});
}
