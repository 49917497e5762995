#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aqtc/model.hpp"

namespace aqtc {

struct TrainConfig {
  double lr = 1e-4;
  std::size_t epochs = 100;
  std::size_t batch_size = 16;  // step-instances per batch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool teacher_forcing = true;

  void validate() const;
};

struct OptState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t t = 0;

  static OptState for_params(const ModelParams& params);
};

// One bias-corrected Adam step on a flat tensor; `t` is the 1-based step count.
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::uint64_t t, const TrainConfig& cfg);

void adam_update(ModelParams& params, const Gradients& grads, OptState& state,
                 const TrainConfig& cfg);

}  // namespace aqtc
