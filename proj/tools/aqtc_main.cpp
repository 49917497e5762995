// aqtc: segment scripts, ground questions, train/evaluate the step answer
// ranker, and run ablation matrices.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/embedding.hpp"
#include "aqtc/error.hpp"
#include "aqtc/pipeline.hpp"

namespace {

using Overrides = std::map<std::string, std::string>;

// Registers `--flag` storing into overrides[key]; values are validated later
// by the same parser used for config files.
void add_setting(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o[key] = v; }, help);
}

aqtc::RunConfig resolve(const std::optional<std::string>& config_path, const Overrides& o) {
  aqtc::RunConfig rc;
  if (config_path) rc = aqtc::load_run_config(*config_path);
  for (const auto& [k, v] : o) aqtc::set_config_value(rc, k, v);
  return rc;
}

int report_error(std::string_view code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Function-centric question answering over instructional scripts"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<std::string> config_path;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
  };

  auto* seg = app.add_subcommand("segment", "split a script into function units");
  std::string script_path;
  seg->add_option("--script", script_path, "script JSON")->required();
  add_setting(seg, o, "--mode", "mode", "function|sentence");
  add_setting(seg, o, "--out", "out", "functions.json to write");
  add_config(seg);

  auto* ground = app.add_subcommand("ground", "TF-IDF weights of a question over functions");
  std::string functions_path;
  std::string question;
  ground->add_option("--functions", functions_path, "functions.json")->required();
  ground->add_option("--question", question, "question text")->required();
  add_setting(ground, o, "--top-k", "top_k", "keep only the k best-scoring functions");
  add_setting(ground, o, "--out", "out", "weights.json to write");
  add_config(ground);

  auto* tr = app.add_subcommand("train", "train the step answer ranker");
  add_setting(tr, o, "--data", "data", "QA dataset JSON");
  add_setting(tr, o, "--eval-data", "eval_data", "held-out QA dataset JSON");
  add_setting(tr, o, "--functions", "functions", "directory of <video_id>.json function files");
  add_setting(tr, o, "--scripts", "scripts", "directory of scripts (segmented with --mode)");
  add_setting(tr, o, "--mode", "mode", "function|sentence");
  add_setting(tr, o, "--emb", "emb", "EMB1 embedding file");
  add_setting(tr, o, "--grounding", "grounding", "tfidf|cross-att");
  add_setting(tr, o, "--feat", "feat", "enabled features, e.g. fT,fV,aT,aV");
  add_setting(tr, o, "--top-k", "top_k", "TF-IDF top-k selection");
  add_setting(tr, o, "--seed", "seed", "random seed (default 0)");
  add_setting(tr, o, "--hidden", "hidden", "GRU hidden size");
  add_setting(tr, o, "--mlp-hidden", "mlp_hidden", "MLP hidden width");
  add_setting(tr, o, "--lr", "lr", "Adam learning rate");
  add_setting(tr, o, "--epochs", "epochs", "training epochs");
  add_setting(tr, o, "--batch-size", "batch_size", "step-instances per batch");
  add_setting(tr, o, "--teacher-forcing", "teacher_forcing", "true|false");
  add_setting(tr, o, "--log", "log", "per-epoch log JSON to write");
  add_setting(tr, o, "--out", "ckpt", "checkpoint to write");
  add_config(tr);

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  add_setting(ev, o, "--ckpt", "ckpt", "QAM1 checkpoint");
  add_setting(ev, o, "--data", "data", "QA dataset JSON");
  add_setting(ev, o, "--functions", "functions", "directory of function files");
  add_setting(ev, o, "--scripts", "scripts", "directory of scripts");
  add_setting(ev, o, "--mode", "mode", "function|sentence");
  add_setting(ev, o, "--emb", "emb", "EMB1 embedding file");
  add_setting(ev, o, "--top-k", "top_k", "TF-IDF top-k selection");
  add_setting(ev, o, "--out", "out", "report.json to write");
  add_config(ev);

  auto* inf = app.add_subcommand("infer", "rank answers step by step, reading choices from stdin");
  std::string infer_question;
  std::string video;
  add_setting(inf, o, "--ckpt", "ckpt", "QAM1 checkpoint");
  inf->add_option("--question", infer_question, "question text")->required();
  inf->add_option("--video", video, "video id")->required();
  add_setting(inf, o, "--data", "data", "QA dataset holding the question's candidates");
  add_setting(inf, o, "--functions", "functions", "directory of function files");
  add_setting(inf, o, "--scripts", "scripts", "directory of scripts");
  add_setting(inf, o, "--mode", "mode", "function|sentence");
  add_setting(inf, o, "--emb", "emb", "EMB1 embedding file");
  add_setting(inf, o, "--top-k", "top_k", "TF-IDF top-k selection");
  add_config(inf);

  auto* emb = app.add_subcommand("emb", "embedding file tools");
  emb->require_subcommand(1);
  auto* inspect = emb->add_subcommand("inspect", "print count, dim and first/last ids");
  std::string emb_path;
  inspect->add_option("path", emb_path, "EMB1 file")->required();

  auto* abl = app.add_subcommand("ablate", "run an ablation matrix");
  std::string axes = "segmentation,grounding";
  std::string table_out;
  abl->add_option("--axes", axes, "subset of segmentation,grounding,features");
  abl->add_option("--table", table_out, "markdown table to write (also printed)");
  add_setting(abl, o, "--data", "data", "training QA dataset JSON");
  add_setting(abl, o, "--eval-data", "eval_data", "held-out QA dataset JSON");
  add_setting(abl, o, "--scripts", "scripts", "directory of scripts");
  add_setting(abl, o, "--functions", "functions", "directory of function files");
  add_setting(abl, o, "--emb", "emb", "EMB1 embedding file");
  add_setting(abl, o, "--seed", "seed", "random seed");
  add_setting(abl, o, "--out", "out", "output directory for per-cell artifacts and ablation.json");
  add_config(abl);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seg) {
      const auto rc = resolve(config_path, o);
      if (rc.out.empty()) aqtc::fail(aqtc::ErrorCode::ConfigError, "missing --out");
      aqtc::run_segment(script_path, rc.mode, rc.out);
    } else if (*ground) {
      const auto rc = resolve(config_path, o);
      if (rc.out.empty()) aqtc::fail(aqtc::ErrorCode::ConfigError, "missing --out");
      aqtc::run_ground(functions_path, question, rc.top_k, rc.out);
    } else if (*tr) {
      const auto outcome = aqtc::run_train(resolve(config_path, o));
      const auto& best = outcome.result.log.at(outcome.result.best_epoch - 1);
      std::cout << "best epoch " << outcome.result.best_epoch << ": R@1 " << best.eval.r_at_1
                << " R@3 " << best.eval.r_at_3 << " MR " << best.eval.mr << " MRR " << best.eval.mrr
                << " (final train loss " << outcome.result.log.back().train_loss << ")\n";
    } else if (*ev) {
      const auto rep = aqtc::run_eval(resolve(config_path, o));
      std::cout << "R@1 " << rep.r_at_1 << " R@3 " << rep.r_at_3 << " MR " << rep.mr << " MRR "
                << rep.mrr << " over " << rep.count << " steps\n";
    } else if (*inf) {
      aqtc::run_infer(resolve(config_path, o), infer_question, video, std::cin, std::cout);
    } else if (*inspect) {
      const auto table = aqtc::load_embeddings(emb_path);
      std::cout << "count " << table.size() << "\ndim " << table.dim() << "\n";
      if (table.size() > 0) {
        std::cout << "first " << table.entries().begin()->first << "\nlast "
                  << table.entries().rbegin()->first << "\n";
      }
    } else if (*abl) {
      const auto rc = resolve(config_path, o);
      const auto rows = aqtc::ablation_matrix(rc, aqtc::parse_axes(axes));
      const auto md = aqtc::ablation_markdown(rows);
      std::cout << md;
      if (!table_out.empty()) aqtc::write_text_file(table_out, md);
      if (!rc.out.empty()) {
        std::filesystem::create_directories(rc.out);
        aqtc::write_text_file((std::filesystem::path(rc.out) / "ablation.json").string(),
                              aqtc::ablation_json(rows));
      }
    }
  } catch (const aqtc::Error& e) {
    return report_error(aqtc::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what());
  }
  return 0;
}
