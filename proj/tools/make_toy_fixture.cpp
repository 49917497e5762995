// Writes the bundled synthetic fixture: two short device scripts, their
// function-centric segmentation, a QA set of 8 two-step questions with three
// candidates each, and an EMB1 table of dimension 8.
//
// Every ground-truth answer embedding has +2 in a marker component (0 for
// answer text, 1 for button image) and every distractor has -2 there, so a
// linear scorer along that component ranks the ground truth first.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/dataset.hpp"
#include "aqtc/embedding.hpp"
#include "aqtc/rng.hpp"
#include "aqtc/script.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint32_t kDim = 8;
constexpr std::size_t kCandidates = 3;
constexpr std::size_t kSteps = 2;
constexpr double kMarker = 2.0;

struct VideoSpec {
  std::string id;
  std::vector<std::string> lines;
  std::vector<std::string> questions;
};

std::vector<VideoSpec> videos() {
  return {
      {"toy_a",
       {"How to defrost fish?", "Press turbo defrost button.", "How to set a timer?",
        "Turn the time knob clockwise.", "How to stop the microwave?", "Press the stop button."},
       {"How to defrost 2kg of fish?", "How to set a 3 minute timer?",
        "How to stop the microwave in the middle of use?", "How to defrost fish quickly?"}},
      {"toy_b",
       {"How to brew espresso?", "Press the espresso button.", "How to steam milk?",
        "Open the steam valve.", "How to clean the machine?", "Press the rinse button."},
       {"How to brew a double espresso?", "How to steam milk for a latte?",
        "How to clean the coffee machine?", "How to brew espresso with milk?"}},
  };
}

std::vector<double> random_vector(aqtc::Rng& rng) {
  std::vector<double> v(kDim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_toy_fixture <out_dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  fs::create_directories(root / "scripts");
  fs::create_directories(root / "functions");

  aqtc::Rng rng = aqtc::Rng::stream(2022, "toy-fixture");
  aqtc::EmbeddingTable table(kDim);
  aqtc::QADataset data;

  for (const auto& video : videos()) {
    json script = {{"video_id", video.id}, {"lines", json::array()}};
    for (std::size_t i = 0; i < video.lines.size(); ++i) {
      script["lines"].push_back(
          {{"start_s", 2.0 * static_cast<double>(i)}, {"end_s", 2.0 * static_cast<double>(i + 1)},
           {"text", video.lines[i]}});
    }
    const std::string script_text = script.dump(2) + "\n";
    aqtc::write_text_file((root / "scripts" / (video.id + ".json")).string(), script_text);

    const auto parsed = aqtc::parse_script(script_text);
    for (const auto mode :
         {aqtc::SegmentationMode::FunctionCentric, aqtc::SegmentationMode::SentenceCentric}) {
      const auto units = aqtc::segment(parsed, mode);
      for (const auto& u : units) {
        table.insert(aqtc::make_embedding_id(aqtc::EmbeddingKind::FunctionText, video.id, u.function_id),
                     random_vector(rng));
        table.insert(aqtc::make_embedding_id(aqtc::EmbeddingKind::FunctionVisual, video.id, u.function_id),
                     random_vector(rng));
      }
      if (mode == aqtc::SegmentationMode::FunctionCentric) {
        aqtc::write_text_file((root / "functions" / (video.id + ".json")).string(),
                              aqtc::functions_to_json({video.id, units}));
      }
    }

    for (std::size_t qi = 0; qi < video.questions.size(); ++qi) {
      aqtc::QASample sample;
      sample.video_id = video.id;
      sample.question_text = video.questions[qi];
      sample.question_emb_id =
          aqtc::make_embedding_id(aqtc::EmbeddingKind::Question, video.id, "q" + std::to_string(qi));
      table.insert(sample.question_emb_id, random_vector(rng));

      for (std::size_t si = 0; si < kSteps; ++si) {
        aqtc::Step step;
        step.gt_index = rng.below(kCandidates);
        for (std::size_t c = 0; c < kCandidates; ++c) {
          const std::string local =
              "q" + std::to_string(qi) + "_s" + std::to_string(si) + "_c" + std::to_string(c);
          const double sign = c == step.gt_index ? 1.0 : -1.0;
          auto text = random_vector(rng);
          text[0] = sign * kMarker;
          auto button = random_vector(rng);
          button[1] = sign * kMarker;
          aqtc::CandidateAnswer a;
          a.text_emb_id = aqtc::make_embedding_id(aqtc::EmbeddingKind::AnswerText, video.id, local);
          a.button_emb_id = aqtc::make_embedding_id(aqtc::EmbeddingKind::AnswerVisual, video.id, local);
          table.insert(a.text_emb_id, text);
          table.insert(*a.button_emb_id, button);
          step.candidates.push_back(std::move(a));
        }
        sample.steps.push_back(std::move(step));
      }
      data.samples.push_back(std::move(sample));
    }
  }

  aqtc::write_text_file((root / "qa.json").string(), aqtc::qa_dataset_to_json(data));
  aqtc::save_embeddings(table, (root / "toy.emb1").string());
  std::cout << "wrote " << data.samples.size() << " samples and " << table.size()
            << " embeddings to " << root.string() << "\n";
  return 0;
}
