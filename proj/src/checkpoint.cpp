#include "aqtc/checkpoint.hpp"

#include <cmath>
#include <cstring>

#include "aqtc/binary_io.hpp"
#include "aqtc/error.hpp"

namespace aqtc {

namespace {

constexpr std::string_view kMagic = "QAM1";

std::uint8_t feature_bits(const FeatureToggles& f) {
  return static_cast<std::uint8_t>((f.function_t ? 1 : 0) | (f.function_v ? 2 : 0) |
                                   (f.answer_t ? 4 : 0) | (f.answer_v ? 8 : 0));
}

FeatureToggles features_from_bits(std::uint8_t b) {
  if (b & ~0x0F) fail(ErrorCode::BadMagic, "unknown feature bits in checkpoint");
  return {(b & 2) != 0, (b & 1) != 0, (b & 8) != 0, (b & 4) != 0};
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const auto& c = ckpt.config;
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(c.dim_t);
  w.u32(c.dim_v);
  w.u32(c.hidden);
  w.u32(c.mlp_hidden);
  w.u8(feature_bits(c.features));
  w.u8(static_cast<std::uint8_t>(c.grounding));
  w.u64(c.seed);

  std::uint32_t count = 0;
  ckpt.params.for_each([&](std::string_view, const Matrix&) { ++count; });
  w.u32(count);
  ckpt.params.for_each([&](std::string_view name, const Matrix& m) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(m.rows));
    w.u32(static_cast<std::uint32_t>(m.cols));
    for (const double v : m.data) w.f64(v);
  });
  return std::move(w).take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorCode::BadMagic, "not a QAM1 checkpoint");
  }
  ByteReader r(bytes.subspan(kMagic.size()));
  Checkpoint ckpt;
  auto& c = ckpt.config;
  c.dim_t = r.u32();
  c.dim_v = r.u32();
  c.hidden = r.u32();
  c.mlp_hidden = r.u32();
  c.features = features_from_bits(r.u8());
  const std::uint8_t grounding = r.u8();
  if (grounding > 1) fail(ErrorCode::BadMagic, "unknown grounding mode in checkpoint");
  c.grounding = static_cast<GroundingMode>(grounding);
  c.seed = r.u64();
  c.validate();

  // Shapes are fully determined by the config; the file must agree.
  ckpt.params = ModelParams::zeros(c);
  std::uint32_t expected = 0;
  ckpt.params.for_each([&](std::string_view, const Matrix&) { ++expected; });
  const std::uint32_t count = r.u32();
  if (count != expected) {
    fail(ErrorCode::DimensionMismatch, "checkpoint has " + std::to_string(count) +
                                           " tensors, config implies " + std::to_string(expected));
  }
  ckpt.params.for_each([&](std::string_view name, Matrix& m) {
    const std::string got = r.string(r.u16());
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (got != name || rows != m.rows || cols != m.cols) {
      fail(ErrorCode::DimensionMismatch,
           "tensor '" + got + "' " + std::to_string(rows) + "x" + std::to_string(cols) +
               " does not match expected '" + std::string(name) + "' " + std::to_string(m.rows) +
               "x" + std::to_string(m.cols));
    }
    for (auto& v : m.data) {
      v = r.f64();
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "non-finite value in " + got);
    }
  });
  if (!r.at_end()) fail(ErrorCode::TruncatedFile, "trailing bytes after checkpoint tensors");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  write_binary_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_binary_file(path));
}

}  // namespace aqtc
