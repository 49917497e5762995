#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqtc/dataset.hpp"
#include "aqtc/metrics.hpp"
#include "aqtc/model.hpp"
#include "aqtc/optimizer.hpp"
#include "aqtc/script.hpp"
#include "aqtc/trainer.hpp"

namespace aqtc {

// Everything a subcommand may need. Populated from a flat `key = value` file
// and then from command-line flags, which use the same keys.
struct RunConfig {
  std::string scripts;    // directory of script JSON files
  std::string functions;  // directory of <video_id>.json function files
  std::string data;       // QA dataset (training for `train`, evaluation for `eval`)
  std::string eval_data;  // optional held-out set for `train`
  std::string emb;
  std::string ckpt;
  std::string out;
  std::string log;
  SegmentationMode mode = SegmentationMode::FunctionCentric;
  GroundingMode grounding = GroundingMode::Tfidf;
  FeatureToggles features;
  std::optional<std::size_t> top_k;
  std::uint64_t seed = 0;
  std::uint32_t hidden = 128;
  std::uint32_t mlp_hidden = 512;
  TrainConfig train;
};

// Recognized keys: scripts functions data eval_data emb ckpt out log mode
// grounding feat top_k seed hidden mlp_hidden lr epochs batch_size beta1
// beta2 eps teacher_forcing.
void set_config_value(RunConfig& rc, std::string_view key, std::string_view value);
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// Functions from `functions` when set, otherwise by segmenting `scripts`.
FunctionLibrary load_library(const RunConfig& rc, const QADataset& data);

ModelConfig model_config_for(const RunConfig& rc, std::uint32_t emb_dim);

void run_segment(const std::string& script_path, SegmentationMode mode, const std::string& out_path);
void run_ground(const std::string& functions_path, std::string_view question,
                std::optional<std::size_t> top_k, const std::string& out_path);

struct TrainOutcome {
  ModelConfig config;
  TrainResult result;
};

// Trains, writes rc.ckpt and (when set) rc.log.
TrainOutcome run_train(const RunConfig& rc);

// Evaluates rc.ckpt on rc.data and writes rc.out.
MetricReport run_eval(const RunConfig& rc);

// Prints ranked answers for every step of the matching sample; after each step
// reads the chosen candidate index from `in` (blank line or EOF keeps top-1).
void run_infer(const RunConfig& rc, std::string_view question, std::string_view video_id,
               std::istream& in, std::ostream& out);

enum class AblationAxis { Segmentation, Grounding, Features };
std::vector<AblationAxis> parse_axes(std::string_view list);

struct AblationRow {
  SegmentationMode mode;
  GroundingMode grounding;
  FeatureToggles features;
  MetricReport report;
  std::size_t best_epoch = 0;
};

// Cross product of the requested axes, every cell trained with the same seed.
// Cells run concurrently; each writes to <rc.out>/cell_<i>/ when rc.out is set.
std::vector<AblationRow> ablation_matrix(const RunConfig& rc, std::span<const AblationAxis> axes);

std::string ablation_markdown(std::span<const AblationRow> rows);
std::string ablation_json(std::span<const AblationRow> rows);

std::string train_log_json(const TrainResult& result);

}  // namespace aqtc
