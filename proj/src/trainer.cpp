#include "aqtc/trainer.hpp"

#include <algorithm>
#include <map>

#include "aqtc/error.hpp"
#include "aqtc/kernels.hpp"
#include "aqtc/rng.hpp"

namespace aqtc {

double batch_gradients(const ModelParams& params, const ModelConfig& cfg,
                       std::span<const SampleFeatures> samples,
                       std::span<const BatchInstance> batch, bool teacher_forcing,
                       Gradients& grads) {
  grads = ModelParams::zeros(cfg);
  if (batch.empty()) return 0.0;

  const double scale = 1.0 / static_cast<double>(batch.size());
  std::map<std::size_t, std::vector<double>> groups;
  for (const auto& inst : batch) {
    if (inst.sample >= samples.size() || inst.step >= samples[inst.sample].steps.size()) {
      fail(ErrorCode::IndexOutOfRange, "batch instance out of range");
    }
    auto& w = groups[inst.sample];
    if (w.empty()) w.assign(samples[inst.sample].steps.size(), 0.0);
    w[inst.step] += 1.0;
  }
  std::vector<std::pair<std::size_t, std::vector<double>>> work(groups.begin(), groups.end());
  for (auto& [s, w] : work) {
    for (auto& x : w) x *= scale;
  }

  // Buffers are reused chunk by chunk to bound memory at one gradient copy per thread.
  const std::size_t chunk = std::max<std::size_t>(1, static_cast<std::size_t>(kernels::max_threads()));
  std::vector<Gradients> local(std::min(chunk, work.size()), ModelParams::zeros(cfg));
  std::vector<double> losses(work.size(), 0.0);
  for (std::size_t base = 0; base < work.size(); base += chunk) {
    const std::size_t count = std::min(chunk, work.size() - base);
    kernels::parallel_for(count, [&](std::size_t k) {
      const auto& [s, w] = work[base + k];
      local[k].set_zero();
      const auto trace = forward(params, cfg, samples[s], w, teacher_forcing);
      backward(params, cfg, samples[s], trace, w, local[k]);
      losses[base + k] = trace.loss;
    });
    for (std::size_t k = 0; k < count; ++k) accumulate(grads, local[k]);
  }
  double loss = 0.0;
  for (const double l : losses) loss += l;
  return loss;
}

std::vector<SampleRankings> predict_all(const ModelParams& params, const ModelConfig& cfg,
                                        std::span<const SampleFeatures> samples) {
  std::vector<SampleRankings> out(samples.size());
  kernels::parallel_for(samples.size(), [&](std::size_t s) {
    for (auto& step : predict(params, cfg, samples[s])) out[s].push_back(std::move(step.ranking));
  });
  return out;
}

MetricReport evaluate_model(const ModelParams& params, const ModelConfig& cfg,
                            std::span<const SampleFeatures> samples) {
  const auto predictions = predict_all(params, cfg, samples);
  std::vector<std::vector<std::size_t>> gt;
  gt.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<std::size_t> g;
    for (const auto& st : s.steps) g.push_back(st.gt_index);
    gt.push_back(std::move(g));
  }
  return evaluate(predictions, gt);
}

namespace {

bool better(const MetricReport& a, const MetricReport& b) {
  if (a.r_at_1 != b.r_at_1) return a.r_at_1 > b.r_at_1;
  return a.mrr > b.mrr;
}

}  // namespace

TrainResult train(std::span<const SampleFeatures> train_set,
                  std::span<const SampleFeatures> eval_set, const ModelConfig& cfg,
                  const TrainConfig& tcfg) {
  return train_from(ModelParams::initialize(cfg), train_set, eval_set, cfg, tcfg);
}

TrainResult train_from(ModelParams initial, std::span<const SampleFeatures> train_set,
                       std::span<const SampleFeatures> eval_set, const ModelConfig& cfg,
                       const TrainConfig& tcfg) {
  cfg.validate();
  tcfg.validate();
  if (train_set.empty()) fail(ErrorCode::EmptyDataset, "training set is empty");
  const auto eval = eval_set.empty() ? train_set : eval_set;

  std::vector<BatchInstance> instances;
  for (std::size_t s = 0; s < train_set.size(); ++s) {
    for (std::size_t i = 0; i < train_set[s].steps.size(); ++i) instances.push_back({s, i});
  }

  TrainResult result;
  result.final_params = std::move(initial);
  OptState state = OptState::for_params(result.final_params);
  Rng shuffle_rng = Rng::stream(cfg.seed, "shuffle");
  Gradients grads;

  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(instances));
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < instances.size(); begin += tcfg.batch_size) {
      const std::size_t end = std::min(instances.size(), begin + tcfg.batch_size);
      const std::span<const BatchInstance> batch(instances.data() + begin, end - begin);
      const double loss = batch_gradients(result.final_params, cfg, train_set, batch,
                                          tcfg.teacher_forcing, grads);
      loss_sum += loss * static_cast<double>(batch.size());
      adam_update(result.final_params, grads, state, tcfg);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(instances.size());
    entry.eval = evaluate_model(result.final_params, cfg, eval);
    if (result.log.empty() || better(entry.eval, result.log[result.best_epoch - 1].eval)) {
      result.best_epoch = epoch;
      result.params = result.final_params;
    }
    result.log.push_back(std::move(entry));
  }
  return result;
}

}  // namespace aqtc
