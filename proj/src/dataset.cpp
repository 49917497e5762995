#include "aqtc/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/error.hpp"
#include "aqtc/kernels.hpp"
#include "aqtc/tfidf.hpp"

namespace aqtc {

namespace fs = std::filesystem;
using nlohmann::json;

QADataset parse_qa_dataset(std::string_view raw) {
  QADataset data;
  try {
    const json doc = json::parse(raw);
    for (const auto& rec : doc.at("samples")) {
      QASample s;
      s.video_id = rec.at("video_id").get<std::string>();
      s.question_text = rec.at("question_text").get<std::string>();
      s.question_emb_id = rec.at("question_emb_id").get<std::string>();
      for (const auto& st : rec.at("steps")) {
        Step step;
        for (const auto& c : st.at("candidates")) {
          CandidateAnswer a;
          a.text_emb_id = c.at("text_emb_id").get<std::string>();
          if (c.contains("button_emb_id") && !c["button_emb_id"].is_null()) {
            a.button_emb_id = c["button_emb_id"].get<std::string>();
          }
          step.candidates.push_back(std::move(a));
        }
        const auto gt = st.at("gt_index").get<long long>();
        if (step.candidates.empty()) {
          fail(ErrorCode::ConfigError, "step without candidates in sample '" + s.question_emb_id + "'");
        }
        if (gt < 0 || static_cast<std::size_t>(gt) >= step.candidates.size()) {
          fail(ErrorCode::IndexOutOfRange, "gt_index " + std::to_string(gt) + " out of range in sample '" +
                                               s.question_emb_id + "'");
        }
        step.gt_index = static_cast<std::size_t>(gt);
        s.steps.push_back(std::move(step));
      }
      if (s.steps.empty()) {
        fail(ErrorCode::ConfigError, "sample '" + s.question_emb_id + "' has no steps");
      }
      data.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("malformed QA dataset: ") + e.what());
  }
  if (data.samples.empty()) fail(ErrorCode::EmptyDataset, "QA dataset has no samples");
  return data;
}

QADataset load_qa_dataset(const std::string& path) { return parse_qa_dataset(read_text_file(path)); }

std::string qa_dataset_to_json(const QADataset& data) {
  json samples = json::array();
  for (const auto& s : data.samples) {
    json steps = json::array();
    for (const auto& st : s.steps) {
      json cands = json::array();
      for (const auto& c : st.candidates) {
        json cj = {{"text_emb_id", c.text_emb_id}};
        if (c.button_emb_id) cj["button_emb_id"] = *c.button_emb_id;
        cands.push_back(std::move(cj));
      }
      steps.push_back({{"candidates", std::move(cands)}, {"gt_index", st.gt_index}});
    }
    samples.push_back({{"video_id", s.video_id},
                       {"question_text", s.question_text},
                       {"question_emb_id", s.question_emb_id},
                       {"steps", std::move(steps)}});
  }
  return json{{"samples", std::move(samples)}}.dump(2) + "\n";
}

std::vector<std::vector<std::size_t>> ground_truth(const QADataset& data) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    std::vector<std::size_t> gt;
    for (const auto& st : s.steps) gt.push_back(st.gt_index);
    out.push_back(std::move(gt));
  }
  return out;
}

FunctionLibrary load_function_library(const std::string& dir, const QADataset& data) {
  FunctionLibrary lib;
  for (const auto& s : data.samples) {
    if (lib.find(s.video_id) != lib.end()) continue;
    const auto path = (fs::path(dir) / (s.video_id + ".json")).string();
    auto set = load_functions(path);
    if (set.video_id != s.video_id) {
      fail(ErrorCode::ConfigError, path + " holds functions for '" + set.video_id + "'");
    }
    lib.emplace(s.video_id, std::move(set.functions));
  }
  return lib;
}

FunctionLibrary segment_script_dir(const std::string& dir, SegmentationMode mode) {
  std::vector<fs::path> paths;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::IoError, "cannot list " + dir + ": " + ec.message());
  std::sort(paths.begin(), paths.end());

  FunctionLibrary lib;
  for (const auto& p : paths) {
    const Script script = load_script(p.string());
    if (lib.find(script.video_id) != lib.end()) {
      fail(ErrorCode::ConfigError, "two scripts for video '" + script.video_id + "'");
    }
    lib.emplace(script.video_id, segment(script, mode));
  }
  return lib;
}

const std::vector<FunctionUnit>& functions_for(const FunctionLibrary& lib,
                                               std::string_view video_id) {
  const auto it = lib.find(video_id);
  if (it == lib.end()) {
    fail(ErrorCode::MissingId, "no function set for video '" + std::string(video_id) + "'");
  }
  return it->second;
}

std::vector<double> tfidf_weights(const QASample& sample, const FunctionLibrary& lib,
                                  std::optional<std::size_t> top_k) {
  const auto& functions = functions_for(lib, sample.video_id);
  std::vector<std::string> paras;
  paras.reserve(functions.size());
  for (const auto& f : functions) paras.push_back(f.para_text);
  return ground_text(sample.question_text, paras, top_k).weights;
}

SampleFeatures resolve_sample(const QASample& sample, const FunctionLibrary& lib,
                              const EmbeddingTable& table, const ModelConfig& cfg,
                              std::optional<std::size_t> top_k) {
  if (table.dim() != cfg.dim_t || table.dim() != cfg.dim_v) {
    fail(ErrorCode::DimensionMismatch, "embedding table dim " + std::to_string(table.dim()) +
                                           " does not match model dims " + std::to_string(cfg.dim_t) +
                                           "/" + std::to_string(cfg.dim_v));
  }
  const auto& functions = functions_for(lib, sample.video_id);

  SampleFeatures out;
  out.functions = function_features(table, sample.video_id, functions, cfg);
  if (cfg.grounding == GroundingMode::CrossAttention) {
    out.function_text = function_text_features(table, sample.video_id, functions);
  } else {
    out.tfidf_weights = tfidf_weights(sample, lib, top_k);
  }
  out.question = table.get_widened(sample.question_emb_id);

  for (const auto& st : sample.steps) {
    StepFeatures sf;
    sf.gt_index = st.gt_index;
    sf.answers = Matrix(st.candidates.size(), cfg.answer_dim());
    for (std::size_t j = 0; j < st.candidates.size(); ++j) {
      const auto& c = st.candidates[j];
      auto row = sf.answers.row(j);
      std::size_t off = 0;
      if (cfg.features.answer_t) {
        const auto v = table.get(c.text_emb_id);
        std::copy(v.begin(), v.end(), row.begin());
        off += cfg.dim_t;
      }
      if (cfg.features.answer_v) {
        if (!c.button_emb_id) {
          fail(ErrorCode::MissingId, "candidate '" + c.text_emb_id +
                                         "' has no button_emb_id but aV is enabled");
        }
        const auto v = table.get(*c.button_emb_id);
        std::copy(v.begin(), v.end(), row.begin() + static_cast<std::ptrdiff_t>(off));
      }
    }
    out.steps.push_back(std::move(sf));
  }
  return out;
}

std::vector<SampleFeatures> resolve_dataset(const QADataset& data, const FunctionLibrary& lib,
                                            const EmbeddingTable& table, const ModelConfig& cfg,
                                            std::optional<std::size_t> top_k) {
  std::vector<SampleFeatures> out(data.samples.size());
  kernels::parallel_for(data.samples.size(), [&](std::size_t i) {
    out[i] = resolve_sample(data.samples[i], lib, table, cfg, top_k);
  });
  return out;
}

}  // namespace aqtc
