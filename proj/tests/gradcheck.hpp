#pragma once

// Central finite-difference check of the analytic batch gradient.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "aqtc/trainer.hpp"

namespace aqtc::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, floor). Central differences at h = 1e-5 carry about
// 1e-11 of absolute rounding noise, so gradients that are zero by symmetry
// (mlp.b2 shifts every logit equally) are compared in absolute terms.
inline constexpr double kGradFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
  return std::abs(analytic - numeric) / denom;
}

inline GradCheckResult gradient_check(ModelParams params, const ModelConfig& cfg,
                                      std::span<const SampleFeatures> samples,
                                      std::span<const BatchInstance> batch, double h = 1e-5) {
  Gradients analytic;
  batch_gradients(params, cfg, samples, batch, true, analytic);
  std::vector<Matrix*> grads;
  analytic.for_each([&](std::string_view, Matrix& m) { grads.push_back(&m); });

  Gradients scratch;
  const auto loss_at = [&](const ModelParams& p) {
    return batch_gradients(p, cfg, samples, batch, true, scratch);
  };

  GradCheckResult result;
  std::size_t t = 0;
  params.for_each([&](std::string_view name, Matrix& m) {
    const Matrix& g = *grads[t++];
    for (std::size_t k = 0; k < m.data.size(); ++k) {
      const double saved = m.data[k];
      m.data[k] = saved + h;
      const double plus = loss_at(params);
      m.data[k] = saved - h;
      const double minus = loss_at(params);
      m.data[k] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double err = relative_error(g.data[k], numeric);
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        std::ostringstream where;
        where << name << "[" << k << "] analytic=" << g.data[k] << " numeric=" << numeric;
        result.worst_tensor = where.str();
      }
      ++result.checked;
    }
  });
  return result;
}

// Every toggle combination with at least one function and one answer feature.
inline std::vector<FeatureToggles> valid_feature_toggles() {
  std::vector<FeatureToggles> out;
  for (int mask = 0; mask < 16; ++mask) {
    const FeatureToggles f{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, (mask & 8) != 0};
    if ((f.function_v || f.function_t) && (f.answer_v || f.answer_t)) out.push_back(f);
  }
  return out;
}

}  // namespace aqtc::testing
