#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aqtc/metrics.hpp"
#include "aqtc/model.hpp"
#include "aqtc/optimizer.hpp"

namespace aqtc {

struct BatchInstance {
  std::size_t sample = 0;
  std::size_t step = 0;
};

// Mean cross-entropy over the batch's step-instances and its gradient,
// written into `grads` (overwritten). Instances of the same sample share one
// unrolled forward pass; per-sample gradients are computed in parallel and
// summed in ascending sample order, so the result does not depend on the
// thread count.
double batch_gradients(const ModelParams& params, const ModelConfig& cfg,
                       std::span<const SampleFeatures> samples,
                       std::span<const BatchInstance> batch, bool teacher_forcing,
                       Gradients& grads);

std::vector<SampleRankings> predict_all(const ModelParams& params, const ModelConfig& cfg,
                                        std::span<const SampleFeatures> samples);

MetricReport evaluate_model(const ModelParams& params, const ModelConfig& cfg,
                            std::span<const SampleFeatures> samples);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  MetricReport eval;
};

struct TrainResult {
  ModelParams params;       // parameters of the best evaluation epoch
  ModelParams final_params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

// Trains from ModelParams::initialize(cfg). Each epoch shuffles all
// step-instances with the seeded generator, then evaluates on `eval`
// (or on `train` when `eval` is empty). The best epoch is the highest R@1,
// then the highest MRR, then the earliest.
TrainResult train(std::span<const SampleFeatures> train_set,
                  std::span<const SampleFeatures> eval_set, const ModelConfig& cfg,
                  const TrainConfig& tcfg);

TrainResult train_from(ModelParams initial, std::span<const SampleFeatures> train_set,
                       std::span<const SampleFeatures> eval_set, const ModelConfig& cfg,
                       const TrainConfig& tcfg);

}  // namespace aqtc
