#pragma once

// Dense brute-force TF-IDF used as an independent check of the sparse
// implementation. Vocabulary order here is first appearance, not sorted, so
// the two only agree through term identity.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "aqtc/rng.hpp"
#include "aqtc/tfidf.hpp"

namespace aqtc::testing {

struct DenseTfidf {
  std::vector<std::string> terms;
  std::vector<double> idf;

  explicit DenseTfidf(const std::vector<TokenList>& docs) {
    for (const auto& d : docs) {
      for (const auto& t : d) {
        bool known = false;
        for (const auto& k : terms) known = known || k == t;
        if (!known) terms.push_back(t);
      }
    }
    const double n = static_cast<double>(docs.size());
    for (const auto& t : terms) {
      double df = 0.0;
      for (const auto& d : docs) {
        bool has = false;
        for (const auto& x : d) has = has || x == t;
        df += has ? 1.0 : 0.0;
      }
      idf.push_back(std::log((1.0 + n) / (1.0 + df)) + 1.0);
    }
  }

  std::vector<double> vec(const TokenList& doc) const {
    std::vector<double> v(terms.size(), 0.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      for (const auto& x : doc) {
        if (x == terms[k]) v[k] += idf[k];
      }
    }
    return v;
  }

  static double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      dot += a[k] * b[k];
      na += a[k] * a[k];
      nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  }

  std::vector<double> weights(const TokenList& q, const std::vector<TokenList>& docs) const {
    std::vector<double> s;
    double total = 0.0;
    for (const auto& d : docs) {
      s.push_back(cosine(vec(q), vec(d)));
      total += s.back();
    }
    for (auto& x : s) x = total > 0.0 ? x / total : 1.0 / static_cast<double>(docs.size());
    return s;
  }
};

// Up to `max_docs` documents over a vocabulary of up to `max_terms` terms.
inline std::vector<TokenList> random_corpus(Rng& rng, std::size_t max_docs, std::size_t max_terms) {
  const std::size_t vocab = 1 + rng.below(max_terms);
  const std::size_t docs = 1 + rng.below(max_docs);
  std::vector<TokenList> corpus(docs);
  for (auto& d : corpus) {
    const std::size_t len = rng.below(12);
    for (std::size_t i = 0; i < len; ++i) d.push_back("t" + std::to_string(rng.below(vocab)));
  }
  return corpus;
}

}  // namespace aqtc::testing
