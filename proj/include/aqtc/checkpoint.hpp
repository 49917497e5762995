#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqtc/model.hpp"

namespace aqtc {

// QAM1 layout, all integers little-endian:
//   "QAM1"
//   u32 dim_t | u32 dim_v | u32 hidden | u32 mlp_hidden
//   u8 feature bits (fT=1, fV=2, aT=4, aV=8) | u8 grounding (0 tfidf, 1 cross-att)
//   u64 seed
//   u32 tensor_count, then per tensor in declaration order:
//     u16 name_len | name | u32 rows | u32 cols | rows*cols f64
struct Checkpoint {
  ModelConfig config;
  ModelParams params;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace aqtc
