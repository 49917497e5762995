#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aqtc {

struct RankRecord {
  std::size_t rank = 1;  // 1-based position of the ground truth
  std::size_t num_candidates = 1;
};

struct MetricReport {
  double r_at_1 = 0.0;  // percent
  double r_at_3 = 0.0;  // percent
  double mr = 0.0;
  double mrr = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> ranks;
};

double recall_at_k(std::span<const RankRecord> records, std::size_t k);
double mean_rank(std::span<const RankRecord> records);
double mrr(std::span<const RankRecord> records);

MetricReport summarize(std::span<const RankRecord> records);

// Per sample, per step: candidate indices best-first.
using SampleRankings = std::vector<std::vector<std::size_t>>;

// gt_indices[s][i] is the ground truth of step i of sample s.
MetricReport evaluate(std::span<const SampleRankings> predictions,
                      std::span<const std::vector<std::size_t>> gt_indices);

std::string report_to_json(const MetricReport& report);

}  // namespace aqtc
