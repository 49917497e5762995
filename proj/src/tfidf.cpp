#include "aqtc/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "aqtc/error.hpp"

namespace aqtc {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double SparseVector::norm() const {
  double sq = 0.0;
  for (const auto& [idx, v] : entries) sq += v * v;
  return std::sqrt(sq);
}

TfidfModel TfidfModel::build(std::span<const TokenList> corpus) {
  if (corpus.empty()) fail(ErrorCode::EmptyCorpus, "cannot build TF-IDF over an empty corpus");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    const std::set<std::string> distinct(doc.begin(), doc.end());
    for (const auto& term : distinct) ++df[term];
  }

  TfidfModel model;
  model.doc_count_ = corpus.size();
  model.idf_.reserve(df.size());
  const double n = static_cast<double>(corpus.size());
  std::size_t col = 0;
  for (const auto& [term, count] : df) {
    model.vocab_.emplace(term, col++);
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

std::optional<std::size_t> TfidfModel::column(const std::string& term) const {
  const auto it = vocab_.find(term);
  if (it == vocab_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfModel::vectorize(const TokenList& tokens) const {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) {
    if (const auto col = column(t)) counts[*col] += 1.0;
  }
  SparseVector out;
  out.dimension = vocab_size();
  out.entries.reserve(counts.size());
  for (const auto& [col, count] : counts) out.entries.emplace_back(col, count * idf_[col]);
  return out;
}

double cosine_sim(const SparseVector& a, const SparseVector& b) {
  if (a.dimension != b.dimension) {
    fail(ErrorCode::DimensionMismatch, "cosine_sim over vectors of dimension " +
                                           std::to_string(a.dimension) + " and " +
                                           std::to_string(b.dimension));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;

  double dot = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

FunctionWeights normalize_scores(std::vector<double> scores, std::optional<std::size_t> top_k) {
  const std::size_t n = scores.size();
  if (n == 0) fail(ErrorCode::EmptyFunctionSet, "no functions to ground against");
  if (top_k && *top_k == 0) fail(ErrorCode::ConfigError, "top_k must be positive");

  std::vector<bool> selected(n, true);
  if (top_k && *top_k < n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::fill(selected.begin(), selected.end(), false);
    for (std::size_t i = 0; i < *top_k; ++i) selected[order[i]] = true;
  }

  FunctionWeights out;
  out.weights.assign(n, 0.0);
  double total = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!selected[i]) continue;
    out.weights[i] = scores[i];
    total += scores[i];
    ++kept;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!selected[i]) continue;
    out.weights[i] = total > 0.0 ? out.weights[i] / total : 1.0 / static_cast<double>(kept);
  }
  out.scores = std::move(scores);
  return out;
}

FunctionWeights ground_question(const TfidfModel& model, const TokenList& question,
                                std::span<const TokenList> functions,
                                std::optional<std::size_t> top_k) {
  if (functions.empty()) fail(ErrorCode::EmptyFunctionSet, "no functions to ground against");
  const SparseVector q = model.vectorize(question);
  std::vector<double> scores;
  scores.reserve(functions.size());
  for (const auto& f : functions) scores.push_back(cosine_sim(q, model.vectorize(f)));
  return normalize_scores(std::move(scores), top_k);
}

FunctionWeights ground_text(std::string_view question, std::span<const std::string> paras,
                            std::optional<std::size_t> top_k) {
  if (paras.empty()) fail(ErrorCode::EmptyFunctionSet, "no functions to ground against");
  std::vector<TokenList> docs;
  docs.reserve(paras.size());
  for (const auto& p : paras) docs.push_back(tokenize(p));
  const auto model = TfidfModel::build(docs);
  return ground_question(model, tokenize(question), docs, top_k);
}

}  // namespace aqtc
