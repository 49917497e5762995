#include "aqtc/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aqtc/error.hpp"
#include "aqtc/binary_io.hpp"

namespace aqtc {

namespace {

constexpr std::string_view kMagic = "EMB1";

std::optional<EmbeddingKind> kind_from_prefix(std::string_view p) {
  if (p == "ft") return EmbeddingKind::FunctionText;
  if (p == "fv") return EmbeddingKind::FunctionVisual;
  if (p == "q") return EmbeddingKind::Question;
  if (p == "at") return EmbeddingKind::AnswerText;
  if (p == "av") return EmbeddingKind::AnswerVisual;
  return std::nullopt;
}

}  // namespace

std::string_view kind_prefix(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::FunctionText: return "ft";
    case EmbeddingKind::FunctionVisual: return "fv";
    case EmbeddingKind::Question: return "q";
    case EmbeddingKind::AnswerText: return "at";
    case EmbeddingKind::AnswerVisual: return "av";
  }
  return "";
}

std::optional<EmbeddingId> EmbeddingId::parse(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) return std::nullopt;
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  const auto kind = kind_from_prefix(text.substr(0, first));
  if (!kind) return std::nullopt;
  return EmbeddingId{*kind, std::string(text.substr(first + 1, second - first - 1)),
                     std::string(text.substr(second + 1))};
}

std::string EmbeddingId::str() const { return make_embedding_id(kind, video_id, local_id); }

std::string make_embedding_id(EmbeddingKind kind, std::string_view video_id,
                              std::string_view local_id) {
  std::string out(kind_prefix(kind));
  out += ':';
  out += video_id;
  out += ':';
  out += local_id;
  return out;
}

EmbeddingTable::EmbeddingTable(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::DimensionMismatch, "embedding dimension must be positive");
}

bool EmbeddingTable::contains(std::string_view id) const { return entries_.find(id) != entries_.end(); }

void EmbeddingTable::insert(std::string id, std::vector<float> values) {
  if (values.size() != dim_) {
    fail(ErrorCode::DimensionMismatch, "entry '" + id + "' has " + std::to_string(values.size()) +
                                           " components, table dim is " + std::to_string(dim_));
  }
  for (const float v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "entry '" + id + "' is not finite");
  }
  if (id.size() > 0xFFFF) fail(ErrorCode::IoError, "id longer than 65535 bytes");
  if (contains(id)) fail(ErrorCode::DuplicateId, "duplicate embedding id '" + id + "'");
  entries_.emplace(std::move(id), std::move(values));
}

void EmbeddingTable::insert(std::string id, std::span<const double> values) {
  insert(std::move(id), std::vector<float>(values.begin(), values.end()));
}

std::span<const float> EmbeddingTable::get(std::string_view id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) fail(ErrorCode::MissingId, "missing embedding '" + std::string(id) + "'");
  return it->second;
}

std::vector<double> EmbeddingTable::get_widened(std::string_view id) const {
  const auto v = get(id);
  return {v.begin(), v.end()};
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingTable& table) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(table.size()));
  w.u32(table.dim());
  for (const auto& [id, values] : table.entries()) {
    w.u16(static_cast<std::uint16_t>(id.size()));
    w.bytes(id);
    for (const float v : values) w.f32(v);
  }
  return std::move(w).take();
}

EmbeddingTable decode_embeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorCode::BadMagic, "not an EMB1 file");
  }
  ByteReader r(bytes.subspan(kMagic.size()));
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  EmbeddingTable table(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = r.u16();
    std::string id = r.string(len);
    std::vector<float> values(dim);
    for (auto& v : values) {
      v = r.f32();
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "entry '" + id + "' is not finite");
    }
    table.insert(std::move(id), std::move(values));
  }
  if (!r.at_end()) {
    fail(ErrorCode::TruncatedFile, "EMB1 declares " + std::to_string(count) + " entries of dim " +
                                       std::to_string(dim) + " but has " +
                                       std::to_string(r.remaining()) + " trailing bytes");
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  return decode_embeddings(read_binary_file(path));
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  write_binary_file(path, encode_embeddings(table));
}

std::vector<double> mean_pool(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) fail(ErrorCode::EmptyList, "mean_pool over an empty list");
  const std::size_t dim = vectors.front().size();
  std::vector<double> out(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.size() != dim) fail(ErrorCode::DimensionMismatch, "mean_pool over unequal dimensions");
    for (std::size_t k = 0; k < dim; ++k) out[k] += v[k];
  }
  const double n = static_cast<double>(vectors.size());
  for (auto& x : out) x /= n;
  return out;
}

}  // namespace aqtc
