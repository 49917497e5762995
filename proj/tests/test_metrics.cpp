#include <doctest.h>

#include <algorithm>

#include "aqtc/error.hpp"
#include "aqtc/metrics.hpp"
#include "aqtc/rng.hpp"

using namespace aqtc;

namespace {

std::vector<RankRecord> records(std::initializer_list<std::size_t> ranks, std::size_t m = 4) {
  std::vector<RankRecord> out;
  for (const auto r : ranks) out.push_back({r, m});
  return out;
}

}  // namespace

TEST_CASE("metric examples") {
  const auto a = records({1, 2, 3});
  CHECK(recall_at_k(a, 1) == doctest::Approx(100.0 / 3));
  CHECK(recall_at_k(a, 3) == 100.0);
  CHECK(mean_rank(a) == 2.0);
  CHECK(mrr(a) == doctest::Approx((1.0 + 0.5 + 1.0 / 3) / 3));
  CHECK(mrr(a) == doctest::Approx(0.6111).epsilon(1e-4));

  const auto b = records({1, 1, 1, 1});
  CHECK(recall_at_k(b, 1) == 100.0);
  CHECK(mean_rank(b) == 1.0);
  CHECK(mrr(b) == 1.0);

  const auto c = records({4});
  CHECK(recall_at_k(c, 3) == 0.0);
  CHECK(mrr(c) == 0.25);
  CHECK_THROWS_AS(summarize(std::vector<RankRecord>{}), Error);
  CHECK_THROWS_AS(mrr(std::vector<RankRecord>{}), Error);
}

TEST_CASE("evaluate maps rankings to ranks") {
  const std::vector<SampleRankings> preds{{{2, 0, 1}, {1, 0}}, {{0, 1, 2}}};
  const std::vector<std::vector<std::size_t>> gt{{0, 1}, {2}};
  const auto rep = evaluate(preds, gt);
  CHECK(rep.ranks == std::vector<std::size_t>{2, 1, 3});
  CHECK(rep.count == 3);
  CHECK(rep.mr == 2.0);

  const std::vector<std::vector<std::size_t>> short_gt{{0, 1}, {2, 0}};
  CHECK_THROWS_AS(evaluate(preds, short_gt), Error);
  const std::vector<SampleRankings> missing{{{2, 1}, {1, 0}}, {{0, 1, 2}}};
  CHECK_THROWS_AS(evaluate(missing, gt), Error);
}

TEST_CASE("metric properties against a brute-force oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankRecord> rs;
    const std::size_t n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = 1 + rng.below(6);
      rs.push_back({1 + rng.below(m), m});
    }
    std::size_t hit1 = 0, hit3 = 0;
    double sum_rank = 0.0, sum_rr = 0.0;
    for (const auto& r : rs) {
      hit1 += r.rank <= 1;
      hit3 += r.rank <= 3;
      sum_rank += static_cast<double>(r.rank);
      sum_rr += 1.0 / static_cast<double>(r.rank);
    }
    const auto rep = summarize(rs);
    CHECK(rep.r_at_1 == doctest::Approx(100.0 * hit1 / n).epsilon(1e-12));
    CHECK(rep.r_at_3 == doctest::Approx(100.0 * hit3 / n).epsilon(1e-12));
    CHECK(rep.mr == doctest::Approx(sum_rank / n).epsilon(1e-12));
    CHECK(rep.mrr == doctest::Approx(sum_rr / n).epsilon(1e-12));
    CHECK(rep.r_at_1 <= rep.r_at_3);
    CHECK(rep.mrr <= 1.0);
    CHECK(rep.mrr >= 1.0 / rep.mr - 1e-12);  // harmonic mean <= arithmetic mean
    const std::size_t max_m = std::max_element(rs.begin(), rs.end(), [](auto& x, auto& y) {
                                return x.num_candidates < y.num_candidates;
                              })->num_candidates;
    CHECK(rep.mr <= static_cast<double>(max_m));
    if (max_m <= 3) CHECK(rep.r_at_3 == 100.0);
  }
}

TEST_CASE("report json carries every field") {
  const auto rep = summarize(records({1, 2}));
  const auto text = report_to_json(rep);
  for (const char* key : {"\"r_at_1\"", "\"r_at_3\"", "\"mr\"", "\"mrr\"", "\"count\"", "\"ranks\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
}
