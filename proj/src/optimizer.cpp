#include "aqtc/optimizer.hpp"

#include <cmath>

#include "aqtc/error.hpp"

namespace aqtc {

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) fail(ErrorCode::ConfigError, "lr must be finite and >= 0");
  if (epochs < 1) fail(ErrorCode::ConfigError, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorCode::ConfigError, "Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) fail(ErrorCode::ConfigError, "Adam eps must be positive");
}

OptState OptState::for_params(const ModelParams& params) {
  OptState s;
  params.for_each([&](std::string_view, const Matrix& p) {
    s.m.emplace_back(p.rows, p.cols);
    s.v.emplace_back(p.rows, p.cols);
  });
  return s;
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::uint64_t t, const TrainConfig& cfg) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    fail(ErrorCode::DimensionMismatch, "Adam buffers do not match parameter shape");
  }
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adam_update(ModelParams& params, const Gradients& grads, OptState& state,
                 const TrainConfig& cfg) {
  std::vector<const Matrix*> g;
  grads.for_each([&](std::string_view, const Matrix& m) { g.push_back(&m); });
  ++state.t;
  std::size_t i = 0;
  params.for_each([&](std::string_view name, Matrix& p) {
    if (i >= g.size() || i >= state.m.size()) {
      fail(ErrorCode::DimensionMismatch, "optimizer state missing tensor " + std::string(name));
    }
    adam_update(p.data, g[i]->data, state.m[i].data, state.v[i].data, state.t, cfg);
    ++i;
  });
}

}  // namespace aqtc
