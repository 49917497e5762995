#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqtc {

using TokenList = std::vector<std::string>;

// Lowercases ASCII letters and splits on every ASCII character that is not a
// letter or digit. Bytes >= 0x80 count as word characters so multi-byte UTF-8
// letters stay inside their token.
TokenList tokenize(std::string_view text);

struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;  // strictly increasing index
  std::size_t dimension = 0;

  bool empty() const noexcept { return entries.empty(); }
  double norm() const;
};

// Vocabulary columns are assigned in lexicographic term order.
class TfidfModel {
 public:
  // idf(t) = ln((1 + N) / (1 + df(t))) + 1
  static TfidfModel build(std::span<const TokenList> corpus);

  SparseVector vectorize(const TokenList& tokens) const;

  std::size_t vocab_size() const noexcept { return idf_.size(); }
  std::size_t doc_count() const noexcept { return doc_count_; }
  std::optional<std::size_t> column(const std::string& term) const;
  double idf(std::size_t column) const { return idf_.at(column); }
  const std::map<std::string, std::size_t>& vocab() const noexcept { return vocab_; }

 private:
  std::map<std::string, std::size_t> vocab_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

double cosine_sim(const SparseVector& a, const SparseVector& b);

struct FunctionWeights {
  std::vector<double> weights;  // normalized, aligned with the function list
  std::vector<double> scores;   // raw cosine scores before top-k and normalization
};

// Normalizes raw scores into a distribution. With top_k, only the k highest
// scores survive (ties go to the lower index); an all-zero selection falls back
// to uniform weights over the selected entries.
FunctionWeights normalize_scores(std::vector<double> scores, std::optional<std::size_t> top_k);

FunctionWeights ground_question(const TfidfModel& model, const TokenList& question,
                                std::span<const TokenList> functions,
                                std::optional<std::size_t> top_k = std::nullopt);

// Builds the per-video model over the function paragraphs and grounds the
// question against them.
FunctionWeights ground_text(std::string_view question, std::span<const std::string> paras,
                            std::optional<std::size_t> top_k = std::nullopt);

}  // namespace aqtc
