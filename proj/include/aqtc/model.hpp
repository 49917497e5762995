#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqtc/embedding.hpp"
#include "aqtc/script.hpp"
#include "aqtc/tensor.hpp"

namespace aqtc {

enum class GroundingMode : std::uint8_t { Tfidf = 0, CrossAttention = 1 };

GroundingMode parse_grounding_mode(std::string_view name);
std::string_view to_string(GroundingMode mode);

struct FeatureToggles {
  bool function_v = true;
  bool function_t = true;
  bool answer_v = true;
  bool answer_t = true;

  friend bool operator==(const FeatureToggles&, const FeatureToggles&) = default;
};

// Parses "fT,fV,aT,aV" (any subset, any order).
FeatureToggles parse_feature_toggles(std::string_view list);
std::string to_string(const FeatureToggles& f);

struct ModelConfig {
  std::uint32_t dim_t = 768;
  std::uint32_t dim_v = 768;
  std::uint32_t hidden = 128;
  std::uint32_t mlp_hidden = 512;
  FeatureToggles features;
  GroundingMode grounding = GroundingMode::Tfidf;
  std::uint64_t seed = 0;

  // Width of concat(enabled of [E_f^t, E_f^v]).
  std::size_t function_dim() const;
  // Width of concat(enabled of [E_a^t, E_a^v]).
  std::size_t answer_dim() const;
  // GRU input: [context; question; previous answer].
  std::size_t input_dim() const;
  // MLP input: [hidden; context; question; candidate answer].
  std::size_t head_dim() const;

  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ModelParams {
  // GRU gates: update (z), reset (r), candidate (h).
  Matrix w_z, u_z, b_z;
  Matrix w_r, u_r, b_r;
  Matrix w_h, u_h, b_h;
  // Prediction head: hidden layer (relu) and a scalar output per candidate.
  Matrix mlp_w1, mlp_b1;
  Matrix mlp_w2, mlp_b2;
  // Stands in for the previous answer at the first step.
  Matrix start;
  // Bilinear question/function attention; 0x0 unless grounding is CrossAttention.
  Matrix w_att;

  static ModelParams zeros(const ModelConfig& cfg);
  // Glorot-uniform matrices, zero biases, drawn from the config's seed.
  static ModelParams initialize(const ModelConfig& cfg);

  // Visits every tensor in declaration order (w_att only when present).
  void for_each(const std::function<void(std::string_view, Matrix&)>& fn);
  void for_each(const std::function<void(std::string_view, const Matrix&)>& fn) const;

  std::size_t parameter_count() const;
  void set_zero();

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

using Gradients = ModelParams;

void accumulate(Gradients& into, const Gradients& from);

struct StepFeatures {
  Matrix answers;  // m x answer_dim
  std::size_t gt_index = 0;
};

// Everything the network reads for one question, already resolved from the
// embedding table and widened to double.
struct SampleFeatures {
  Matrix functions;                 // n x function_dim
  Matrix function_text;             // n x dim_t, read only by cross-attention
  std::vector<double> question;     // dim_t
  std::vector<double> tfidf_weights;  // n, read only by TF-IDF grounding
  std::vector<StepFeatures> steps;
};

// Rows of concat(enabled of [E_f^t_i, E_f^v_i]) for every function of a video.
Matrix function_features(const EmbeddingTable& table, std::string_view video_id,
                         std::span<const FunctionUnit> functions, const ModelConfig& cfg);
Matrix function_text_features(const EmbeddingTable& table, std::string_view video_id,
                              std::span<const FunctionUnit> functions);

// context = sum_i w_i * features_i
std::vector<double> fuse_context(std::span<const double> weights, const Matrix& features);
std::vector<double> fuse_context(std::span<const double> weights, const EmbeddingTable& table,
                                 std::string_view video_id,
                                 std::span<const FunctionUnit> functions, const ModelConfig& cfg);

std::vector<double> cross_attention_weights(const ModelParams& params,
                                            std::span<const double> question,
                                            const Matrix& function_text);

std::vector<double> softmax(std::span<const double> logits);
double ce_loss(std::span<const double> probs, std::size_t gt_index);

std::vector<double> gru_step(const ModelParams& params, std::span<const double> h_prev,
                             std::span<const double> x);

std::vector<double> score_candidates(const ModelParams& params, std::span<const double> h,
                                     std::span<const double> context,
                                     std::span<const double> question, const Matrix& answers);

struct StepTrace {
  std::vector<double> x, h_prev, z, r, rh, h_tilde, h;
  Matrix head_in;   // m x head_dim
  Matrix head_pre;  // m x mlp_hidden, before relu
  std::vector<double> logits, probs;
  std::size_t chosen = 0;  // answer fed to the next step
};

struct ForwardTrace {
  std::vector<double> attention_scores;  // cross-attention only
  std::vector<double> weights;
  std::vector<double> context;
  std::vector<StepTrace> steps;
  double loss = 0.0;  // sum_i step_weights[i] * ce_i
};

// Unrolls the steps network up to the last step with a nonzero loss weight.
// An empty step_weights runs every step and leaves the loss at zero.
ForwardTrace forward(const ModelParams& params, const ModelConfig& cfg,
                     const SampleFeatures& sample, std::span<const double> step_weights,
                     bool teacher_forcing);

// Adds d(loss)/d(params) for a completed forward pass into `grads`.
void backward(const ModelParams& params, const ModelConfig& cfg, const SampleFeatures& sample,
              const ForwardTrace& trace, std::span<const double> step_weights, Gradients& grads);

struct StepPrediction {
  std::vector<std::size_t> ranking;  // candidate indices, best first
  std::vector<double> probs;
};

// Inference: each step consumes the answer picked at the previous step, either
// the model's own top-1 or an externally supplied choice.
using ChoiceFn = std::function<std::size_t(std::size_t step, const StepPrediction&)>;

std::vector<StepPrediction> predict(const ModelParams& params, const ModelConfig& cfg,
                                    const SampleFeatures& sample,
                                    const ChoiceFn& choose = nullptr);

std::vector<std::size_t> rank_by_probability(std::span<const double> probs);

}  // namespace aqtc
