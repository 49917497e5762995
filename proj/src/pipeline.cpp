#include "aqtc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/checkpoint.hpp"
#include "aqtc/embedding.hpp"
#include "aqtc/error.hpp"
#include "aqtc/kernels.hpp"
#include "aqtc/tfidf.hpp"

namespace aqtc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(ErrorCode::ConfigError, std::string(key) + ": expected a non-negative integer, got '" +
                                     std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    fail(ErrorCode::ConfigError, std::string(key) + ": expected a real number, got '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorCode::ConfigError, std::string(key) + ": expected true|false, got '" + std::string(value) + "'");
}

void require(const std::string& value, const char* key) {
  if (value.empty()) fail(ErrorCode::ConfigError, std::string("missing required setting '") + key + "'");
}

std::string lowercase_trimmed(std::string_view s) {
  std::string out(trim(s));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

void set_config_value(RunConfig& rc, std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "scripts") {
    rc.scripts = value;
  } else if (key == "functions") {
    rc.functions = value;
  } else if (key == "data") {
    rc.data = value;
  } else if (key == "eval_data") {
    rc.eval_data = value;
  } else if (key == "emb") {
    rc.emb = value;
  } else if (key == "ckpt") {
    rc.ckpt = value;
  } else if (key == "out") {
    rc.out = value;
  } else if (key == "log") {
    rc.log = value;
  } else if (key == "mode") {
    rc.mode = parse_segmentation_mode(value);
  } else if (key == "grounding") {
    rc.grounding = parse_grounding_mode(value);
  } else if (key == "feat") {
    rc.features = parse_feature_toggles(value);
  } else if (key == "top_k") {
    if (value.empty() || value == "none") {
      rc.top_k.reset();
    } else {
      rc.top_k = parse_unsigned<std::size_t>(key, value);
      if (*rc.top_k == 0) fail(ErrorCode::ConfigError, "top_k must be positive");
    }
  } else if (key == "seed") {
    rc.seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "hidden") {
    rc.hidden = parse_unsigned<std::uint32_t>(key, value);
  } else if (key == "mlp_hidden") {
    rc.mlp_hidden = parse_unsigned<std::uint32_t>(key, value);
  } else if (key == "lr") {
    rc.train.lr = parse_real(key, value);
  } else if (key == "epochs") {
    rc.train.epochs = parse_unsigned<std::size_t>(key, value);
  } else if (key == "batch_size") {
    rc.train.batch_size = parse_unsigned<std::size_t>(key, value);
  } else if (key == "beta1") {
    rc.train.beta1 = parse_real(key, value);
  } else if (key == "beta2") {
    rc.train.beta2 = parse_real(key, value);
  } else if (key == "eps") {
    rc.train.eps = parse_real(key, value);
  } else if (key == "teacher_forcing") {
    rc.train.teacher_forcing = parse_bool(key, value);
  } else {
    fail(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = std::string_view(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(base, trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  RunConfig rc = parse_run_config(read_text_file(path), std::move(base));
  // Relative paths in a config file resolve against the file's directory.
  const fs::path dir = fs::path(path).parent_path();
  for (std::string* p : {&rc.scripts, &rc.functions, &rc.data, &rc.eval_data, &rc.emb, &rc.ckpt,
                         &rc.out, &rc.log}) {
    if (!p->empty() && fs::path(*p).is_relative()) *p = (dir / *p).lexically_normal().string();
  }
  return rc;
}

FunctionLibrary load_library(const RunConfig& rc, const QADataset& data) {
  if (!rc.functions.empty()) return load_function_library(rc.functions, data);
  if (!rc.scripts.empty()) return segment_script_dir(rc.scripts, rc.mode);
  fail(ErrorCode::ConfigError, "either 'functions' or 'scripts' must be set");
}

ModelConfig model_config_for(const RunConfig& rc, std::uint32_t emb_dim) {
  ModelConfig cfg;
  cfg.dim_t = emb_dim;
  cfg.dim_v = emb_dim;
  cfg.hidden = rc.hidden;
  cfg.mlp_hidden = rc.mlp_hidden;
  cfg.features = rc.features;
  cfg.grounding = rc.grounding;
  cfg.seed = rc.seed;
  cfg.validate();
  return cfg;
}

void run_segment(const std::string& script_path, SegmentationMode mode, const std::string& out_path) {
  const Script script = load_script(script_path);
  const FunctionSet set{script.video_id, segment(script, mode)};
  write_text_file(out_path, functions_to_json(set));
}

void run_ground(const std::string& functions_path, std::string_view question,
                std::optional<std::size_t> top_k, const std::string& out_path) {
  const auto set = load_functions(functions_path);
  std::vector<std::string> paras;
  for (const auto& f : set.functions) paras.push_back(f.para_text);
  const auto w = ground_text(question, paras, top_k);
  const json out = {{"weights", w.weights}, {"scores", w.scores}};
  write_text_file(out_path, out.dump(2) + "\n");
}

std::string train_log_json(const TrainResult& result) {
  json epochs = json::array();
  for (const auto& e : result.log) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"r_at_1", e.eval.r_at_1},
                      {"r_at_3", e.eval.r_at_3},
                      {"mr", e.eval.mr},
                      {"mrr", e.eval.mrr}});
  }
  return json{{"best_epoch", result.best_epoch}, {"epochs", std::move(epochs)}}.dump(2) + "\n";
}

TrainOutcome run_train(const RunConfig& rc) {
  require(rc.data, "data");
  require(rc.emb, "emb");
  require(rc.ckpt, "ckpt");
  const auto data = load_qa_dataset(rc.data);
  const auto table = load_embeddings(rc.emb);
  const auto cfg = model_config_for(rc, table.dim());

  const auto lib = load_library(rc, data);
  const auto train_set = resolve_dataset(data, lib, table, cfg, rc.top_k);
  std::vector<SampleFeatures> eval_set;
  if (!rc.eval_data.empty()) {
    const auto eval_data = load_qa_dataset(rc.eval_data);
    eval_set = resolve_dataset(eval_data, load_library(rc, eval_data), table, cfg, rc.top_k);
  }

  TrainOutcome outcome{cfg, train(train_set, eval_set, cfg, rc.train)};
  save_checkpoint({cfg, outcome.result.params}, rc.ckpt);
  if (!rc.log.empty()) write_text_file(rc.log, train_log_json(outcome.result));
  return outcome;
}

MetricReport run_eval(const RunConfig& rc) {
  require(rc.ckpt, "ckpt");
  require(rc.data, "data");
  require(rc.emb, "emb");
  const auto ckpt = load_checkpoint(rc.ckpt);
  const auto table = load_embeddings(rc.emb);
  if (table.dim() != ckpt.config.dim_t || table.dim() != ckpt.config.dim_v) {
    fail(ErrorCode::DimensionMismatch, "checkpoint expects embedding dim " +
                                           std::to_string(ckpt.config.dim_t) + " but " + rc.emb +
                                           " has dim " + std::to_string(table.dim()));
  }
  const auto data = load_qa_dataset(rc.data);
  const auto samples = resolve_dataset(data, load_library(rc, data), table, ckpt.config, rc.top_k);
  const auto report = evaluate(predict_all(ckpt.params, ckpt.config, samples), ground_truth(data));
  if (!rc.out.empty()) write_text_file(rc.out, report_to_json(report));
  return report;
}

void run_infer(const RunConfig& rc, std::string_view question, std::string_view video_id,
               std::istream& in, std::ostream& out) {
  require(rc.ckpt, "ckpt");
  require(rc.data, "data");
  require(rc.emb, "emb");
  const auto ckpt = load_checkpoint(rc.ckpt);
  const auto table = load_embeddings(rc.emb);
  const auto data = load_qa_dataset(rc.data);

  const auto wanted = lowercase_trimmed(question);
  const auto it = std::find_if(data.samples.begin(), data.samples.end(), [&](const QASample& s) {
    return s.video_id == video_id && lowercase_trimmed(s.question_text) == wanted;
  });
  if (it == data.samples.end()) {
    fail(ErrorCode::MissingId, "no sample for video '" + std::string(video_id) + "' with question '" +
                                   std::string(question) + "'");
  }
  QADataset one{{*it}};
  const auto features = resolve_sample(*it, load_library(rc, one), table, ckpt.config, rc.top_k);

  const auto choose = [&](std::size_t step, const StepPrediction& pred) {
    const auto& cands = it->steps[step].candidates;
    out << "step " << step + 1 << ":\n";
    for (std::size_t k = 0; k < pred.ranking.size(); ++k) {
      const auto j = pred.ranking[k];
      out << "  " << k + 1 << ". [" << j << "] " << cands[j].text_emb_id << "  p="
          << std::fixed << std::setprecision(4) << pred.probs[j] << "\n";
    }
    out << "choose> " << std::flush;
    std::string line;
    std::size_t chosen = pred.ranking.front();
    if (std::getline(in, line) && !trim(line).empty()) {
      const auto text = trim(line);
      chosen = parse_unsigned<std::size_t>("choice", text);
      if (chosen >= cands.size()) {
        fail(ErrorCode::IndexOutOfRange, "choice " + std::to_string(chosen) + " out of range");
      }
    }
    out << chosen << "\n";
    return chosen;
  };
  predict(ckpt.params, ckpt.config, features, choose);
}

std::vector<AblationAxis> parse_axes(std::string_view list) {
  std::vector<AblationAxis> axes;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = std::min(list.find(',', pos), list.size());
    const auto item = trim(list.substr(pos, comma - pos));
    AblationAxis axis;
    if (item == "segmentation") {
      axis = AblationAxis::Segmentation;
    } else if (item == "grounding") {
      axis = AblationAxis::Grounding;
    } else if (item == "features") {
      axis = AblationAxis::Features;
    } else if (item.empty()) {
      pos = comma + 1;
      continue;
    } else {
      fail(ErrorCode::ConfigError, "unknown ablation axis '" + std::string(item) + "'");
    }
    if (std::find(axes.begin(), axes.end(), axis) == axes.end()) axes.push_back(axis);
    pos = comma + 1;
  }
  return axes;
}

std::vector<AblationRow> ablation_matrix(const RunConfig& rc, std::span<const AblationAxis> axes) {
  const auto has = [&](AblationAxis a) { return std::find(axes.begin(), axes.end(), a) != axes.end(); };
  require(rc.data, "data");
  require(rc.emb, "emb");
  if (has(AblationAxis::Segmentation) && rc.scripts.empty()) {
    fail(ErrorCode::ConfigError, "the segmentation axis needs 'scripts'");
  }

  std::vector<SegmentationMode> modes{rc.mode};
  if (has(AblationAxis::Segmentation)) {
    modes = {SegmentationMode::SentenceCentric, SegmentationMode::FunctionCentric};
  }
  std::vector<GroundingMode> groundings{rc.grounding};
  if (has(AblationAxis::Grounding)) groundings = {GroundingMode::CrossAttention, GroundingMode::Tfidf};
  std::vector<FeatureToggles> features{rc.features};
  if (has(AblationAxis::Features)) {
    features = {{true, true, false, true}, {false, true, true, true}, {true, true, true, true}};
  }

  std::vector<AblationRow> rows;
  for (const auto mode : modes) {
    for (const auto g : groundings) {
      for (const auto& f : features) rows.push_back({mode, g, f, {}, 0});
    }
  }

  const auto data = load_qa_dataset(rc.data);
  const auto table = load_embeddings(rc.emb);
  std::optional<QADataset> eval_data;
  if (!rc.eval_data.empty()) eval_data = load_qa_dataset(rc.eval_data);

  kernels::parallel_for(rows.size(), [&](std::size_t i) {
    auto& row = rows[i];
    RunConfig cell = rc;
    cell.mode = row.mode;
    cell.grounding = row.grounding;
    cell.features = row.features;
    if (has(AblationAxis::Segmentation)) cell.functions.clear();
    const auto cfg = model_config_for(cell, table.dim());
    const auto lib = load_library(cell, data);
    const auto train_set = resolve_dataset(data, lib, table, cfg, cell.top_k);
    std::vector<SampleFeatures> eval_set;
    if (eval_data) {
      eval_set = resolve_dataset(*eval_data, load_library(cell, *eval_data), table, cfg, cell.top_k);
    }
    const auto result = train(train_set, eval_set, cfg, cell.train);
    row.best_epoch = result.best_epoch;
    row.report = result.log.at(result.best_epoch - 1).eval;
    if (!rc.out.empty()) {
      const fs::path dir = fs::path(rc.out) / ("cell_" + std::to_string(i));
      fs::create_directories(dir);
      save_checkpoint({cfg, result.params}, (dir / "model.qam1").string());
      write_text_file((dir / "report.json").string(), report_to_json(row.report));
      write_text_file((dir / "train_log.json").string(), train_log_json(result));
    }
  });
  return rows;
}

namespace {

std::string checks(bool v, bool t) {
  return std::string(v ? "V" : "-") + " " + (t ? "T" : "-");
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

}  // namespace

std::string ablation_markdown(std::span<const AblationRow> rows) {
  std::ostringstream md;
  md << "| Segmentation | Grounding | Functions V T | Answers V T | R@1 | R@3 | MR | MRR |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << (r.mode == SegmentationMode::FunctionCentric ? "Function-centric" : "Sentence-centric")
       << " | " << (r.grounding == GroundingMode::Tfidf ? "TF-IDF" : "cross-att.") << " | "
       << checks(r.features.function_v, r.features.function_t) << " | "
       << checks(r.features.answer_v, r.features.answer_t) << " | " << fixed(r.report.r_at_1, 1)
       << " | " << fixed(r.report.r_at_3, 1) << " | " << fixed(r.report.mr, 2) << " | "
       << fixed(r.report.mrr, 3) << " |\n";
  }
  return md.str();
}

std::string ablation_json(std::span<const AblationRow> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"segmentation", to_string(r.mode)},
                   {"grounding", to_string(r.grounding)},
                   {"features", to_string(r.features)},
                   {"best_epoch", r.best_epoch},
                   {"r_at_1", r.report.r_at_1},
                   {"r_at_3", r.report.r_at_3},
                   {"mr", r.report.mr},
                   {"mrr", r.report.mrr},
                   {"count", r.report.count}});
  }
  return json{{"rows", std::move(out)}}.dump(2) + "\n";
}

}  // namespace aqtc
