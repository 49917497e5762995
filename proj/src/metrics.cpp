#include "aqtc/metrics.hpp"

#include <algorithm>

#include <json.hpp>

#include "aqtc/error.hpp"

namespace aqtc {

namespace {

void require_records(std::span<const RankRecord> records) {
  if (records.empty()) fail(ErrorCode::EmptyRecords, "no rank records");
}

}  // namespace

double recall_at_k(std::span<const RankRecord> records, std::size_t k) {
  require_records(records);
  if (k == 0) fail(ErrorCode::ConfigError, "k must be at least 1");
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [k](const RankRecord& r) { return r.rank <= k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(records.size());
}

double mean_rank(std::span<const RankRecord> records) {
  require_records(records);
  double sum = 0.0;
  for (const auto& r : records) sum += static_cast<double>(r.rank);
  return sum / static_cast<double>(records.size());
}

double mrr(std::span<const RankRecord> records) {
  require_records(records);
  double sum = 0.0;
  for (const auto& r : records) sum += 1.0 / static_cast<double>(r.rank);
  return sum / static_cast<double>(records.size());
}

MetricReport summarize(std::span<const RankRecord> records) {
  MetricReport rep;
  rep.r_at_1 = recall_at_k(records, 1);
  rep.r_at_3 = recall_at_k(records, 3);
  rep.mr = mean_rank(records);
  rep.mrr = mrr(records);
  rep.count = records.size();
  rep.ranks.reserve(records.size());
  for (const auto& r : records) rep.ranks.push_back(r.rank);
  return rep;
}

MetricReport evaluate(std::span<const SampleRankings> predictions,
                      std::span<const std::vector<std::size_t>> gt_indices) {
  if (predictions.size() != gt_indices.size()) {
    fail(ErrorCode::CoverageGap, "predictions cover " + std::to_string(predictions.size()) +
                                     " samples, dataset has " + std::to_string(gt_indices.size()));
  }
  std::vector<RankRecord> records;
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (predictions[s].size() != gt_indices[s].size()) {
      fail(ErrorCode::CoverageGap, "sample " + std::to_string(s) + " has " +
                                       std::to_string(gt_indices[s].size()) + " steps but " +
                                       std::to_string(predictions[s].size()) + " predictions");
    }
    for (std::size_t i = 0; i < gt_indices[s].size(); ++i) {
      const auto& ranking = predictions[s][i];
      const auto it = std::find(ranking.begin(), ranking.end(), gt_indices[s][i]);
      if (it == ranking.end()) {
        fail(ErrorCode::CoverageGap, "sample " + std::to_string(s) + " step " + std::to_string(i) +
                                         ": ground truth missing from ranking");
      }
      records.push_back({static_cast<std::size_t>(it - ranking.begin()) + 1, ranking.size()});
    }
  }
  return summarize(records);
}

std::string report_to_json(const MetricReport& report) {
  const nlohmann::json j = {{"r_at_1", report.r_at_1}, {"r_at_3", report.r_at_3},
                            {"mr", report.mr},         {"mrr", report.mrr},
                            {"count", report.count},   {"ranks", report.ranks}};
  return j.dump(2) + "\n";
}

}  // namespace aqtc
