#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqtc {

enum class EmbeddingKind { FunctionText, FunctionVisual, Question, AnswerText, AnswerVisual };

// `<kind>:<video_id>:<local_id>` with kind one of ft, fv, q, at, av.
struct EmbeddingId {
  EmbeddingKind kind;
  std::string video_id;
  std::string local_id;

  static std::optional<EmbeddingId> parse(std::string_view text);
  std::string str() const;
};

std::string_view kind_prefix(EmbeddingKind kind);
std::string make_embedding_id(EmbeddingKind kind, std::string_view video_id,
                              std::string_view local_id);

// id -> fixed-dimension vector. Values are held at the on-disk f32 precision
// so save/load is exact; callers widen to double when they copy features out.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::uint32_t dim);

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view id) const;

  void insert(std::string id, std::vector<float> values);
  void insert(std::string id, std::span<const double> values);

  std::span<const float> get(std::string_view id) const;
  std::vector<double> get_widened(std::string_view id) const;

  const std::map<std::string, std::vector<float>, std::less<>>& entries() const noexcept {
    return entries_;
  }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::uint32_t dim_;
  std::map<std::string, std::vector<float>, std::less<>> entries_;
};

inline constexpr std::size_t kEmb1HeaderBytes = 12;

std::vector<std::uint8_t> encode_embeddings(const EmbeddingTable& table);
EmbeddingTable decode_embeddings(std::span<const std::uint8_t> bytes);

EmbeddingTable load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

std::vector<double> mean_pool(std::span<const std::vector<double>> vectors);

}  // namespace aqtc
