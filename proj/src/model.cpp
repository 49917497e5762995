#include "aqtc/model.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <numeric>

#include "aqtc/error.hpp"
#include "aqtc/kernels.hpp"
#include "aqtc/rng.hpp"

namespace aqtc {

namespace {

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                           std::to_string(want) + ", got " + std::to_string(got));
  }
}

// out[offset..] = src
void put(std::span<double> out, std::size_t offset, std::span<const double> src) {
  std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
}

void put_widened(std::span<double> out, std::size_t offset, std::span<const float> src) {
  std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
}

void add_bias(std::span<double> y, const Matrix& b) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.data[i];
}

void glorot(Matrix& m, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  for (auto& v : m.data) v = rng.uniform(-a, a);
}

}  // namespace

GroundingMode parse_grounding_mode(std::string_view name) {
  if (name == "tfidf") return GroundingMode::Tfidf;
  if (name == "cross-att") return GroundingMode::CrossAttention;
  fail(ErrorCode::ConfigError,
       "unknown grounding mode '" + std::string(name) + "' (expected tfidf|cross-att)");
}

std::string_view to_string(GroundingMode mode) {
  return mode == GroundingMode::Tfidf ? "tfidf" : "cross-att";
}

FeatureToggles parse_feature_toggles(std::string_view list) {
  FeatureToggles f{false, false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = std::min(list.find(',', pos), list.size());
    auto item = list.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (item == "fT") {
      f.function_t = true;
    } else if (item == "fV") {
      f.function_v = true;
    } else if (item == "aT") {
      f.answer_t = true;
    } else if (item == "aV") {
      f.answer_v = true;
    } else if (!item.empty()) {
      fail(ErrorCode::ConfigError, "unknown feature '" + std::string(item) + "' (expected fT,fV,aT,aV)");
    }
    pos = comma + 1;
  }
  return f;
}

std::string to_string(const FeatureToggles& f) {
  std::string out;
  const auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(f.function_t, "fT");
  add(f.function_v, "fV");
  add(f.answer_t, "aT");
  add(f.answer_v, "aV");
  return out;
}

std::size_t ModelConfig::function_dim() const {
  return (features.function_t ? dim_t : 0) + (features.function_v ? dim_v : 0);
}

std::size_t ModelConfig::answer_dim() const {
  return (features.answer_t ? dim_t : 0) + (features.answer_v ? dim_v : 0);
}

std::size_t ModelConfig::input_dim() const { return function_dim() + dim_t + answer_dim(); }

std::size_t ModelConfig::head_dim() const { return hidden + input_dim(); }

void ModelConfig::validate() const {
  if (!features.function_t && !features.function_v) {
    fail(ErrorCode::ConfigError, "at least one function feature (fT, fV) must be enabled");
  }
  if (!features.answer_t && !features.answer_v) {
    fail(ErrorCode::ConfigError, "at least one answer feature (aT, aV) must be enabled");
  }
  if (hidden == 0 || mlp_hidden == 0) fail(ErrorCode::ConfigError, "hidden sizes must be positive");
  if (dim_t == 0 || dim_v == 0) fail(ErrorCode::ConfigError, "embedding dims must be positive");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t h = cfg.hidden;
  const std::size_t in = cfg.input_dim();
  ModelParams p;
  p.w_z = Matrix(h, in);
  p.u_z = Matrix(h, h);
  p.b_z = Matrix(h, 1);
  p.w_r = Matrix(h, in);
  p.u_r = Matrix(h, h);
  p.b_r = Matrix(h, 1);
  p.w_h = Matrix(h, in);
  p.u_h = Matrix(h, h);
  p.b_h = Matrix(h, 1);
  p.mlp_w1 = Matrix(cfg.mlp_hidden, cfg.head_dim());
  p.mlp_b1 = Matrix(cfg.mlp_hidden, 1);
  p.mlp_w2 = Matrix(1, cfg.mlp_hidden);
  p.mlp_b2 = Matrix(1, 1);
  p.start = Matrix(cfg.answer_dim(), 1);
  if (cfg.grounding == GroundingMode::CrossAttention) p.w_att = Matrix(cfg.dim_t, cfg.dim_t);
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& cfg) {
  ModelParams p = zeros(cfg);
  Rng rng = Rng::stream(cfg.seed, "init");
  for (Matrix* m : {&p.w_z, &p.u_z, &p.w_r, &p.u_r, &p.w_h, &p.u_h, &p.mlp_w1, &p.mlp_w2,
                    &p.start, &p.w_att}) {
    glorot(*m, rng);
  }
  return p;
}

void ModelParams::for_each(const std::function<void(std::string_view, Matrix&)>& fn) {
  fn("gru.w_z", w_z);
  fn("gru.u_z", u_z);
  fn("gru.b_z", b_z);
  fn("gru.w_r", w_r);
  fn("gru.u_r", u_r);
  fn("gru.b_r", b_r);
  fn("gru.w_h", w_h);
  fn("gru.u_h", u_h);
  fn("gru.b_h", b_h);
  fn("mlp.w1", mlp_w1);
  fn("mlp.b1", mlp_b1);
  fn("mlp.w2", mlp_w2);
  fn("mlp.b2", mlp_b2);
  fn("start", start);
  if (w_att.size() > 0) fn("att.w", w_att);
}

void ModelParams::for_each(const std::function<void(std::string_view, const Matrix&)>& fn) const {
  const_cast<ModelParams*>(this)->for_each(
      [&](std::string_view name, Matrix& m) { fn(name, m); });
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, const Matrix& m) { n += m.size(); });
  return n;
}

void ModelParams::set_zero() {
  for_each([](std::string_view, Matrix& m) { m.set_zero(); });
}

void accumulate(Gradients& into, const Gradients& from) {
  std::vector<const Matrix*> src;
  from.for_each([&](std::string_view, const Matrix& m) { src.push_back(&m); });
  std::size_t i = 0;
  into.for_each([&](std::string_view, Matrix& m) {
    const Matrix& f = *src.at(i++);
    for (std::size_t k = 0; k < m.data.size(); ++k) m.data[k] += f.data[k];
  });
}

Matrix function_features(const EmbeddingTable& table, std::string_view video_id,
                         std::span<const FunctionUnit> functions, const ModelConfig& cfg) {
  if (functions.empty()) fail(ErrorCode::EmptyFunctionSet, "no functions for video");
  require_dim(table.dim(), cfg.dim_t, "embedding table");
  Matrix out(functions.size(), cfg.function_dim());
  for (std::size_t i = 0; i < functions.size(); ++i) {
    std::size_t offset = 0;
    const auto row = out.row(i);
    if (cfg.features.function_t) {
      put_widened(row, offset, table.get(make_embedding_id(EmbeddingKind::FunctionText, video_id,
                                                           functions[i].function_id)));
      offset += cfg.dim_t;
    }
    if (cfg.features.function_v) {
      put_widened(row, offset, table.get(make_embedding_id(EmbeddingKind::FunctionVisual,
                                                           video_id, functions[i].function_id)));
    }
  }
  return out;
}

Matrix function_text_features(const EmbeddingTable& table, std::string_view video_id,
                              std::span<const FunctionUnit> functions) {
  Matrix out(functions.size(), table.dim());
  for (std::size_t i = 0; i < functions.size(); ++i) {
    put_widened(out.row(i), 0,
                table.get(make_embedding_id(EmbeddingKind::FunctionText, video_id,
                                            functions[i].function_id)));
  }
  return out;
}

std::vector<double> fuse_context(std::span<const double> weights, const Matrix& features) {
  require_dim(weights.size(), features.rows, "function weights");
  std::vector<double> ctx(features.cols, 0.0);
  for (std::size_t i = 0; i < features.rows; ++i) {
    if (weights[i] == 0.0) continue;
    kernels::axpy(weights[i], features.row(i), ctx);
  }
  return ctx;
}

std::vector<double> fuse_context(std::span<const double> weights, const EmbeddingTable& table,
                                 std::string_view video_id,
                                 std::span<const FunctionUnit> functions, const ModelConfig& cfg) {
  require_dim(weights.size(), functions.size(), "function weights");
  return fuse_context(weights, function_features(table, video_id, functions, cfg));
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    p[j] = std::exp(logits[j] - mx);
    sum += p[j];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double ce_loss(std::span<const double> probs, std::size_t gt_index) {
  if (gt_index >= probs.size()) {
    fail(ErrorCode::IndexOutOfRange, "gt_index " + std::to_string(gt_index) + " with " +
                                         std::to_string(probs.size()) + " candidates");
  }
  const double p = probs[gt_index];
  return p >= 1.0 ? 0.0 : -std::log(p);
}

std::vector<double> cross_attention_weights(const ModelParams& params,
                                            std::span<const double> question,
                                            const Matrix& function_text) {
  if (function_text.rows == 0) fail(ErrorCode::EmptyFunctionSet, "no functions to attend over");
  require_dim(params.w_att.rows, question.size(), "cross-attention matrix");
  require_dim(function_text.cols, params.w_att.cols, "function text embedding");
  // q^T W f_i = (W^T q) . f_i
  std::vector<double> projected(params.w_att.cols, 0.0);
  kernels::gemv_t_acc(params.w_att, question, projected);
  std::vector<double> scores(function_text.rows);
  kernels::gemv(function_text, projected, scores);
  return softmax(scores);
}

namespace {

struct GruOut {
  std::vector<double> z, r, rh, h_tilde, h;
};

GruOut gru_forward(const ModelParams& p, std::span<const double> h_prev,
                   std::span<const double> x) {
  const std::size_t n = p.b_z.rows;
  require_dim(h_prev.size(), n, "GRU hidden state");
  require_dim(x.size(), p.w_z.cols, "GRU input");

  GruOut o;
  std::vector<double> tmp(n);
  o.z.assign(n, 0.0);
  kernels::gemv(p.w_z, x, o.z);
  kernels::gemv(p.u_z, h_prev, tmp);
  for (std::size_t k = 0; k < n; ++k) o.z[k] = sigmoid(o.z[k] + tmp[k] + p.b_z.data[k]);

  o.r.assign(n, 0.0);
  kernels::gemv(p.w_r, x, o.r);
  kernels::gemv(p.u_r, h_prev, tmp);
  for (std::size_t k = 0; k < n; ++k) o.r[k] = sigmoid(o.r[k] + tmp[k] + p.b_r.data[k]);

  o.rh.resize(n);
  for (std::size_t k = 0; k < n; ++k) o.rh[k] = o.r[k] * h_prev[k];
  o.h_tilde.assign(n, 0.0);
  kernels::gemv(p.w_h, x, o.h_tilde);
  kernels::gemv(p.u_h, o.rh, tmp);
  for (std::size_t k = 0; k < n; ++k) o.h_tilde[k] = std::tanh(o.h_tilde[k] + tmp[k] + p.b_h.data[k]);

  o.h.resize(n);
  for (std::size_t k = 0; k < n; ++k) o.h[k] = (1.0 - o.z[k]) * h_prev[k] + o.z[k] * o.h_tilde[k];
  return o;
}

// Fills head_in / head_pre and returns logits.
std::vector<double> head_forward(const ModelParams& p, std::span<const double> h,
                                 std::span<const double> context,
                                 std::span<const double> question, const Matrix& answers,
                                 Matrix& head_in, Matrix& head_pre) {
  const std::size_t m = answers.rows;
  const std::size_t width = h.size() + context.size() + question.size() + answers.cols;
  require_dim(width, p.mlp_w1.cols, "prediction head input");
  head_in = Matrix(m, width);
  head_pre = Matrix(m, p.mlp_w1.rows);
  std::vector<double> logits(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto u = head_in.row(j);
    std::size_t off = 0;
    put(u, off, h);
    off += h.size();
    put(u, off, context);
    off += context.size();
    put(u, off, question);
    off += question.size();
    put(u, off, answers.row(j));

    const auto pre = head_pre.row(j);
    kernels::gemv(p.mlp_w1, u, pre);
    add_bias(pre, p.mlp_b1);
    double logit = p.mlp_b2.data[0];
    for (std::size_t k = 0; k < pre.size(); ++k) logit += p.mlp_w2.data[k] * std::max(pre[k], 0.0);
    logits[j] = logit;
  }
  return logits;
}

std::vector<double> step_input(std::span<const double> context, std::span<const double> question,
                               std::span<const double> previous) {
  std::vector<double> x(context.size() + question.size() + previous.size());
  put(x, 0, context);
  put(x, context.size(), question);
  put(x, context.size() + question.size(), previous);
  return x;
}

std::size_t argmax_first(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void check_sample(const ModelConfig& cfg, const SampleFeatures& s) {
  require_dim(s.question.size(), cfg.dim_t, "question embedding");
  require_dim(s.functions.cols, cfg.function_dim(), "function features");
  if (s.functions.rows == 0) fail(ErrorCode::EmptyFunctionSet, "sample has no functions");
  for (const auto& st : s.steps) {
    require_dim(st.answers.cols, cfg.answer_dim(), "answer features");
    if (st.gt_index >= st.answers.rows) {
      fail(ErrorCode::IndexOutOfRange, "gt_index out of range");
    }
  }
}

std::vector<double> sample_weights(const ModelParams& params, const ModelConfig& cfg,
                                   const SampleFeatures& s, std::vector<double>* scores) {
  if (cfg.grounding == GroundingMode::CrossAttention) {
    require_dim(s.function_text.rows, s.functions.rows, "function text rows");
    std::vector<double> projected(params.w_att.cols, 0.0);
    kernels::gemv_t_acc(params.w_att, s.question, projected);
    std::vector<double> raw(s.function_text.rows);
    kernels::gemv(s.function_text, projected, raw);
    auto w = softmax(raw);
    if (scores) *scores = std::move(raw);
    return w;
  }
  require_dim(s.tfidf_weights.size(), s.functions.rows, "grounding weights");
  return s.tfidf_weights;
}

}  // namespace

std::vector<double> gru_step(const ModelParams& params, std::span<const double> h_prev,
                             std::span<const double> x) {
  return gru_forward(params, h_prev, x).h;
}

std::vector<double> score_candidates(const ModelParams& params, std::span<const double> h,
                                     std::span<const double> context,
                                     std::span<const double> question, const Matrix& answers) {
  Matrix in, pre;
  return head_forward(params, h, context, question, answers, in, pre);
}

ForwardTrace forward(const ModelParams& params, const ModelConfig& cfg,
                     const SampleFeatures& sample, std::span<const double> step_weights,
                     bool teacher_forcing) {
  check_sample(cfg, sample);
  if (!step_weights.empty()) require_dim(step_weights.size(), sample.steps.size(), "step weights");

  std::size_t last = sample.steps.size();
  if (!step_weights.empty()) {
    last = 0;
    for (std::size_t i = 0; i < step_weights.size(); ++i) {
      if (step_weights[i] != 0.0) last = i + 1;
    }
  }

  ForwardTrace t;
  t.weights = sample_weights(params, cfg, sample, &t.attention_scores);
  t.context = fuse_context(t.weights, sample.functions);

  std::vector<double> h(cfg.hidden, 0.0);
  std::vector<double> previous = params.start.data;
  t.steps.reserve(last);
  for (std::size_t i = 0; i < last; ++i) {
    const auto& st = sample.steps[i];
    StepTrace s;
    s.x = step_input(t.context, sample.question, previous);
    s.h_prev = h;
    auto g = gru_forward(params, h, s.x);
    s.z = std::move(g.z);
    s.r = std::move(g.r);
    s.rh = std::move(g.rh);
    s.h_tilde = std::move(g.h_tilde);
    s.h = std::move(g.h);
    s.logits = head_forward(params, s.h, t.context, sample.question, st.answers, s.head_in,
                            s.head_pre);
    s.probs = softmax(s.logits);
    if (!step_weights.empty() && step_weights[i] != 0.0) {
      t.loss += step_weights[i] * ce_loss(s.probs, st.gt_index);
    }
    s.chosen = teacher_forcing ? st.gt_index : argmax_first(s.probs);
    const auto prev_row = st.answers.row(s.chosen);
    previous.assign(prev_row.begin(), prev_row.end());
    h = s.h;
    t.steps.push_back(std::move(s));
  }
  return t;
}

void backward(const ModelParams& p, const ModelConfig& cfg, const SampleFeatures& sample,
              const ForwardTrace& t, std::span<const double> step_weights, Gradients& g) {
  const std::size_t n_hidden = cfg.hidden;
  const std::size_t f_dim = cfg.function_dim();
  const std::size_t q_dim = cfg.dim_t;
  const std::size_t a_dim = cfg.answer_dim();
  const std::size_t steps = t.steps.size();

  std::vector<double> d_context(f_dim, 0.0);
  // Gradient reaching h_i from the prediction head at step i.
  std::vector<std::vector<double>> d_h_head(steps, std::vector<double>(n_hidden, 0.0));

  std::vector<double> d_pre(p.mlp_w1.rows);
  std::vector<double> d_in(p.mlp_w1.cols);
  for (std::size_t i = 0; i < steps; ++i) {
    const double lambda = step_weights.empty() ? 0.0 : step_weights[i];
    if (lambda == 0.0) continue;
    const auto& s = t.steps[i];
    const std::size_t gt = sample.steps[i].gt_index;
    for (std::size_t j = 0; j < s.probs.size(); ++j) {
      const double d_logit = lambda * (s.probs[j] - (j == gt ? 1.0 : 0.0));
      if (d_logit == 0.0) continue;
      const auto pre = s.head_pre.row(j);
      g.mlp_b2.data[0] += d_logit;
      for (std::size_t k = 0; k < pre.size(); ++k) {
        const double act = std::max(pre[k], 0.0);
        g.mlp_w2.data[k] += d_logit * act;
        d_pre[k] = pre[k] > 0.0 ? d_logit * p.mlp_w2.data[k] : 0.0;
      }
      kernels::ger_acc(d_pre, s.head_in.row(j), g.mlp_w1);
      kernels::axpy(1.0, d_pre, g.mlp_b1.data);
      std::fill(d_in.begin(), d_in.end(), 0.0);
      kernels::gemv_t_acc(p.mlp_w1, d_pre, d_in);
      for (std::size_t k = 0; k < n_hidden; ++k) d_h_head[i][k] += d_in[k];
      for (std::size_t k = 0; k < f_dim; ++k) d_context[k] += d_in[n_hidden + k];
    }
  }

  // Backpropagation through time.
  std::vector<double> d_h(n_hidden, 0.0);
  std::vector<double> d_x(cfg.input_dim());
  std::vector<double> d_az(n_hidden), d_ar(n_hidden), d_ah(n_hidden), d_rh(n_hidden);
  for (std::size_t ii = steps; ii-- > 0;) {
    const auto& s = t.steps[ii];
    for (std::size_t k = 0; k < n_hidden; ++k) d_h[k] += d_h_head[ii][k];

    std::vector<double> d_h_prev(n_hidden, 0.0);
    for (std::size_t k = 0; k < n_hidden; ++k) {
      const double d_ht = d_h[k] * s.z[k];
      const double d_z = d_h[k] * (s.h_tilde[k] - s.h_prev[k]);
      d_h_prev[k] = d_h[k] * (1.0 - s.z[k]);
      d_ah[k] = d_ht * (1.0 - s.h_tilde[k] * s.h_tilde[k]);
      d_az[k] = d_z * s.z[k] * (1.0 - s.z[k]);
    }
    std::fill(d_rh.begin(), d_rh.end(), 0.0);
    kernels::gemv_t_acc(p.u_h, d_ah, d_rh);
    for (std::size_t k = 0; k < n_hidden; ++k) {
      d_h_prev[k] += d_rh[k] * s.r[k];
      const double d_r = d_rh[k] * s.h_prev[k];
      d_ar[k] = d_r * s.r[k] * (1.0 - s.r[k]);
    }

    kernels::ger_acc(d_ah, s.x, g.w_h);
    kernels::ger_acc(d_ah, s.rh, g.u_h);
    kernels::axpy(1.0, d_ah, g.b_h.data);
    kernels::ger_acc(d_ar, s.x, g.w_r);
    kernels::ger_acc(d_ar, s.h_prev, g.u_r);
    kernels::axpy(1.0, d_ar, g.b_r.data);
    kernels::ger_acc(d_az, s.x, g.w_z);
    kernels::ger_acc(d_az, s.h_prev, g.u_z);
    kernels::axpy(1.0, d_az, g.b_z.data);

    kernels::gemv_t_acc(p.u_r, d_ar, d_h_prev);
    kernels::gemv_t_acc(p.u_z, d_az, d_h_prev);

    std::fill(d_x.begin(), d_x.end(), 0.0);
    kernels::gemv_t_acc(p.w_h, d_ah, d_x);
    kernels::gemv_t_acc(p.w_r, d_ar, d_x);
    kernels::gemv_t_acc(p.w_z, d_az, d_x);
    for (std::size_t k = 0; k < f_dim; ++k) d_context[k] += d_x[k];
    if (ii == 0) {
      for (std::size_t k = 0; k < a_dim; ++k) g.start.data[k] += d_x[f_dim + q_dim + k];
    }
    d_h = std::move(d_h_prev);
  }

  if (cfg.grounding == GroundingMode::CrossAttention) {
    // context = sum_i w_i F_i, w = softmax(s), s_i = q^T W f_i
    const std::size_t n = sample.functions.rows;
    std::vector<double> d_w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = sample.functions.row(i);
      d_w[i] = std::inner_product(row.begin(), row.end(), d_context.begin(), 0.0);
    }
    const double mean = std::inner_product(t.weights.begin(), t.weights.end(), d_w.begin(), 0.0);
    std::vector<double> d_f(q_dim, 0.0);  // sum_i ds_i f_i
    for (std::size_t i = 0; i < n; ++i) {
      const double d_s = t.weights[i] * (d_w[i] - mean);
      kernels::axpy(d_s, sample.function_text.row(i), d_f);
    }
    kernels::ger_acc(sample.question, d_f, g.w_att);
  }
}

std::vector<std::size_t> rank_by_probability(std::span<const double> probs) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  return order;
}

std::vector<StepPrediction> predict(const ModelParams& params, const ModelConfig& cfg,
                                    const SampleFeatures& sample, const ChoiceFn& choose) {
  check_sample(cfg, sample);
  const auto weights = sample_weights(params, cfg, sample, nullptr);
  const auto context = fuse_context(weights, sample.functions);

  std::vector<StepPrediction> out;
  out.reserve(sample.steps.size());
  std::vector<double> h(cfg.hidden, 0.0);
  std::vector<double> previous = params.start.data;
  for (std::size_t i = 0; i < sample.steps.size(); ++i) {
    const auto& st = sample.steps[i];
    h = gru_step(params, h, step_input(context, sample.question, previous));
    StepPrediction pred;
    pred.probs = softmax(score_candidates(params, h, context, sample.question, st.answers));
    pred.ranking = rank_by_probability(pred.probs);
    std::size_t chosen = pred.ranking.front();
    if (choose) {
      chosen = choose(i, pred);
      if (chosen >= st.answers.rows) fail(ErrorCode::IndexOutOfRange, "chosen answer out of range");
    }
    const auto row = st.answers.row(chosen);
    previous.assign(row.begin(), row.end());
    out.push_back(std::move(pred));
  }
  return out;
}

}  // namespace aqtc
