#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "aqtc/binary_io.hpp"
#include "aqtc/error.hpp"
#include "aqtc/tfidf.hpp"
#include "test_util.hpp"
#include "tfidf_oracle.hpp"

using namespace aqtc;
using aqtc::testing::DenseTfidf;
using aqtc::testing::random_corpus;

namespace {

SparseVector sparse(std::size_t dim, std::vector<std::pair<std::size_t, double>> e) {
  return SparseVector{std::move(e), dim};
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Press the start button.") == TokenList{"press", "the", "start", "button"});
  CHECK(tokenize("How to defrost 2kg of fish?") ==
        TokenList{"how", "to", "defrost", "2kg", "of", "fish"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("button.Press 30 seconds") == TokenList{"button", "press", "30", "seconds"});
  CHECK(tokenize("Crème brûlée") == TokenList{"crème", "brûlée"});
  for (const auto& t : tokenize("  a\tb\n--c  ")) {
    CHECK_FALSE(t.empty());
    CHECK(t.find(' ') == std::string::npos);
  }
}

TEST_CASE("idf uses the smoothed formula") {
  const std::vector<TokenList> two{{"both", "only"}, {"both"}};
  const auto m = TfidfModel::build(two);
  CHECK(m.doc_count() == 2);
  CHECK(m.vocab_size() == 2);
  // ln(3/3) + 1 and ln(3/2) + 1
  CHECK(m.idf(*m.column("both")) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.idf(*m.column("only")) == doctest::Approx(1.4054651081081644).epsilon(1e-15));

  const std::vector<TokenList> one{{"x", "y"}};
  const auto single = TfidfModel::build(one);
  CHECK(single.idf(*single.column("x")) == 1.0);

  CHECK_THROWS_AS(TfidfModel::build(std::vector<TokenList>{}), Error);
}

TEST_CASE("vectorize") {
  const std::vector<TokenList> docs{{"press", "press", "start"}, {"press", "start"}};
  const auto m = TfidfModel::build(docs);
  const auto v = m.vectorize(docs[0]);
  CHECK(v.dimension == 2);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0].first == *m.column("press"));
  CHECK(v.entries[0].second == 2.0);  // count 2, idf 1
  CHECK(m.vectorize({"unknown", "words"}).empty());
  CHECK(m.vectorize({}).empty());
}

TEST_CASE("cosine_sim") {
  const auto a = sparse(4, {{0, 1.0}, {2, 3.0}});
  CHECK(cosine_sim(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_sim(a, sparse(4, {{1, 2.0}, {3, 1.0}})) == 0.0);
  CHECK(cosine_sim(sparse(4, {}), a) == 0.0);
  CHECK_THROWS_AS(cosine_sim(a, sparse(5, {})), Error);
}

TEST_CASE("cosine_sim is symmetric and scale invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<std::size_t, double>> ea, eb;
    for (std::size_t k = 0; k < 12; ++k) {
      if (rng.below(2)) ea.emplace_back(k, rng.uniform(0.0, 3.0));
      if (rng.below(2)) eb.emplace_back(k, rng.uniform(0.0, 3.0));
    }
    const auto a = sparse(12, ea);
    const auto b = sparse(12, eb);
    CHECK(cosine_sim(a, b) == cosine_sim(b, a));
    const double c = rng.uniform(0.01, 100.0);
    auto scaled = a;
    for (auto& e : scaled.entries) e.second *= c;
    CHECK(std::abs(cosine_sim(scaled, b) - cosine_sim(a, b)) <= 1e-12);
    if (!a.empty()) CHECK(std::abs(cosine_sim(a, a) - 1.0) <= 1e-12);
  }
}

TEST_CASE("grounding matches the dense oracle") {
  Rng rng(2022);
  for (int trial = 0; trial < 200; ++trial) {
    const auto corpus = random_corpus(rng, 10, 50);
    const auto question = random_corpus(rng, 1, 50).front();
    const auto model = TfidfModel::build(corpus);
    const DenseTfidf oracle(corpus);

    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto sv = model.vectorize(corpus[i]);
      const auto dv = oracle.vec(corpus[i]);
      double sparse_sq = 0.0, dense_sq = 0.0;
      for (const auto& [col, v] : sv.entries) sparse_sq += v * v;
      for (const double v : dv) dense_sq += v * v;
      CHECK(std::abs(sparse_sq - dense_sq) <= 1e-9);
      for (const auto& [term, col] : model.vocab()) {
        const auto pos = std::find(oracle.terms.begin(), oracle.terms.end(), term) - oracle.terms.begin();
        double got = 0.0;
        for (const auto& [c, v] : sv.entries) {
          if (c == col) got = v;
        }
        CHECK(std::abs(got - dv[static_cast<std::size_t>(pos)]) <= 1e-9);
      }
      for (std::size_t j = 0; j < corpus.size(); ++j) {
        CHECK(std::abs(cosine_sim(sv, model.vectorize(corpus[j])) -
                       DenseTfidf::cosine(dv, oracle.vec(corpus[j]))) <= 1e-9);
      }
    }
    const auto w = ground_question(model, question, corpus);
    const auto ow = oracle.weights(question, corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(std::abs(w.weights[i] - ow[i]) <= 1e-9);
  }
}

TEST_CASE("grounding the defrost question picks the defrost function-para") {
  const auto doc = nlohmann::json::parse(read_text_file(std::string(AQTC_DATA_DIR) + "/fig2/grounding_case.json"));
  const auto paras = doc["function_paras"].get<std::vector<std::string>>();
  const auto w = ground_text(doc["question"].get<std::string>(), paras);
  REQUIRE(w.weights.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(w.weights[0] > w.weights[i]);
    CHECK(w.scores[0] > w.scores[i]);
  }
}

TEST_CASE("grounding edge cases") {
  const std::vector<TokenList> one{{"press", "start"}};
  const auto m1 = TfidfModel::build(one);
  CHECK(ground_question(m1, {"press"}, one).weights == std::vector<double>{1.0});

  const std::vector<TokenList> three{{"a", "b"}, {"c"}, {"d", "e"}};
  const auto m3 = TfidfModel::build(three);
  const auto w = ground_question(m3, {"zzz"}, three);
  for (const double x : w.weights) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(ground_question(m3, {"a"}, std::vector<TokenList>{}), Error);
}

TEST_CASE("top_k keeps the k best and breaks ties by index") {
  const auto w = normalize_scores({0.2, 0.5, 0.5, 0.1}, 2);
  CHECK(w.weights == std::vector<double>{0.0, 0.5, 0.5, 0.0});
  const auto tie = normalize_scores({0.3, 0.3, 0.3}, 1);
  CHECK(tie.weights == std::vector<double>{1.0, 0.0, 0.0});
  const auto zero = normalize_scores({0.0, 0.0, 0.0, 0.0}, 2);
  CHECK(zero.weights == std::vector<double>{0.5, 0.5, 0.0, 0.0});
  CHECK(zero.scores == std::vector<double>{0.0, 0.0, 0.0, 0.0});
  const auto wide = normalize_scores({1.0, 3.0}, 5);
  CHECK(wide.weights[1] == doctest::Approx(0.75));
}

TEST_CASE("weights form a distribution with at most k nonzeros") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto corpus = random_corpus(rng, 10, 30);
    const auto q = random_corpus(rng, 1, 30).front();
    const auto m = TfidfModel::build(corpus);
    std::optional<std::size_t> k;
    if (rng.below(2)) k = 1 + rng.below(corpus.size());
    const auto w = ground_question(m, q, corpus, k);
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (const double x : w.weights) {
      CHECK(x >= 0.0);
      sum += x;
      nonzero += x > 0.0 ? 1 : 0;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    if (k) CHECK(nonzero <= *k);
  }
}

TEST_CASE("repeating the question leaves the grounding argmax unchanged") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto corpus = random_corpus(rng, 10, 30);
    const auto q = random_corpus(rng, 1, 30).front();
    const auto m = TfidfModel::build(corpus);
    const auto base = ground_question(m, q, corpus).weights;
    const auto argmax = std::max_element(base.begin(), base.end()) - base.begin();
    for (std::size_t k = 2; k <= 4; ++k) {
      TokenList repeated;
      for (std::size_t r = 0; r < k; ++r) repeated.insert(repeated.end(), q.begin(), q.end());
      const auto w = ground_question(m, repeated, corpus).weights;
      CHECK(std::max_element(w.begin(), w.end()) - w.begin() == argmax);
    }
  }
}
