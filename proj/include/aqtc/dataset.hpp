#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqtc/embedding.hpp"
#include "aqtc/model.hpp"
#include "aqtc/script.hpp"

namespace aqtc {

struct CandidateAnswer {
  std::string text_emb_id;
  std::optional<std::string> button_emb_id;
};

struct Step {
  std::vector<CandidateAnswer> candidates;
  std::size_t gt_index = 0;
};

struct QASample {
  std::string video_id;
  std::string question_text;
  std::string question_emb_id;
  std::vector<Step> steps;
};

struct QADataset {
  std::vector<QASample> samples;
};

QADataset parse_qa_dataset(std::string_view raw);
QADataset load_qa_dataset(const std::string& path);
std::string qa_dataset_to_json(const QADataset& data);

std::vector<std::vector<std::size_t>> ground_truth(const QADataset& data);

// video_id -> its function units.
using FunctionLibrary = std::map<std::string, std::vector<FunctionUnit>, std::less<>>;

// Reads `<dir>/<video_id>.json` for every video the dataset mentions.
FunctionLibrary load_function_library(const std::string& dir, const QADataset& data);
// Segments every `*.json` script in `dir`.
FunctionLibrary segment_script_dir(const std::string& dir, SegmentationMode mode);

const std::vector<FunctionUnit>& functions_for(const FunctionLibrary& lib,
                                               std::string_view video_id);

// TF-IDF weights over the video's own function paragraphs.
std::vector<double> tfidf_weights(const QASample& sample, const FunctionLibrary& lib,
                                  std::optional<std::size_t> top_k);

SampleFeatures resolve_sample(const QASample& sample, const FunctionLibrary& lib,
                              const EmbeddingTable& table, const ModelConfig& cfg,
                              std::optional<std::size_t> top_k);

std::vector<SampleFeatures> resolve_dataset(const QADataset& data, const FunctionLibrary& lib,
                                            const EmbeddingTable& table, const ModelConfig& cfg,
                                            std::optional<std::size_t> top_k);

}  // namespace aqtc
