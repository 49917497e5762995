#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "aqtc/binary_io.hpp"
#include "aqtc/embedding.hpp"
#include "aqtc/error.hpp"
#include "test_util.hpp"

using namespace aqtc;

namespace {

ErrorCode decode_error(std::vector<std::uint8_t> bytes) {
  try {
    decode_embeddings(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected decode to fail");
  return ErrorCode::IoError;
}

EmbeddingTable sample_table() {
  EmbeddingTable t(4);
  t.insert("ft:v1:fn0", std::vector<float>{1.0f, -2.5f, 0.125f, 3.0f});
  t.insert("at:v1:a0", std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f});
  t.insert("q:v1:q0", std::vector<float>{-1.0f, 0.0f, 1e-30f, 7.0f});
  return t;
}

}  // namespace

TEST_CASE("embedding ids") {
  const auto id = EmbeddingId::parse("ft:video_7:fn2");
  REQUIRE(id);
  CHECK(id->kind == EmbeddingKind::FunctionText);
  CHECK(id->video_id == "video_7");
  CHECK(id->local_id == "fn2");
  CHECK(id->str() == "ft:video_7:fn2");
  CHECK_FALSE(EmbeddingId::parse("xx:v:a"));
  CHECK_FALSE(EmbeddingId::parse("ft:v"));
  CHECK_FALSE(EmbeddingId::parse("ft:v:a:b"));
}

TEST_CASE("empty table encodes to the header alone") {
  const EmbeddingTable t(768);
  const auto bytes = encode_embeddings(t);
  CHECK(bytes.size() == kEmb1HeaderBytes);
  const auto back = decode_embeddings(bytes);
  CHECK(back.size() == 0);
  CHECK(back.dim() == 768);
}

TEST_CASE("file size follows the layout") {
  EmbeddingTable t(4);
  t.insert("ft:v1:fn0", std::vector<float>{1, 2, 3, 4});
  // header + u16 length + 9 id bytes + 4 floats
  CHECK(encode_embeddings(t).size() == 12 + 2 + 9 + 16);
}

TEST_CASE("layout is little-endian and sorted by id") {
  EmbeddingTable t(1);
  t.insert("b", std::vector<float>{1.0f});
  t.insert("a", std::vector<float>{-2.0f});
  const auto bytes = encode_embeddings(t);
  const std::vector<std::uint8_t> expected{'E', 'M', 'B', '1', 2, 0, 0, 0, 1, 0, 0, 0,
                                           1, 0, 'a', 0x00, 0x00, 0x00, 0xC0,
                                           1, 0, 'b', 0x00, 0x00, 0x80, 0x3F};
  CHECK(bytes == expected);
}

TEST_CASE("save and load round-trip bit-exactly") {
  const auto dir = aqtc::testing::temp_dir("emb");
  const auto path = (dir / "t.emb1").string();
  const auto table = sample_table();
  save_embeddings(table, path);
  const auto first = read_binary_file(path);
  const auto back = load_embeddings(path);
  CHECK(back == table);
  save_embeddings(back, path);
  CHECK(read_binary_file(path) == first);
}

TEST_CASE("random tables round-trip") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    EmbeddingTable t(static_cast<std::uint32_t>(1 + rng.below(16)));
    const std::size_t n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<float> v(t.dim());
      for (auto& x : v) x = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()) & 0xBF7FFFFFu);
      t.insert("at:v:" + std::to_string(rng.next_u64()), v);
    }
    CHECK(decode_embeddings(encode_embeddings(t)) == t);
  }
}

TEST_CASE("corrupt files are rejected") {
  const auto good = encode_embeddings(sample_table());

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(decode_error(bad_magic) == ErrorCode::BadMagic);
  CHECK(decode_error({'E', 'M'}) == ErrorCode::BadMagic);

  auto truncated = good;
  truncated.pop_back();
  CHECK(decode_error(truncated) == ErrorCode::TruncatedFile);
  CHECK(decode_error({'E', 'M', 'B', '1', 1, 0}) == ErrorCode::TruncatedFile);

  auto trailing = good;
  trailing.push_back(0);
  CHECK(decode_error(trailing) == ErrorCode::TruncatedFile);

  auto overcount = good;
  overcount[4] = 4;  // declares one entry more than present
  CHECK(decode_error(overcount) == ErrorCode::TruncatedFile);

  EmbeddingTable one(1);
  one.insert("a", std::vector<float>{1.0f});
  auto nan = encode_embeddings(one);
  const auto qnan = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  for (int i = 0; i < 4; ++i) nan[nan.size() - 4 + i] = static_cast<std::uint8_t>(qnan >> (8 * i));
  CHECK(decode_error(nan) == ErrorCode::NonFiniteValue);

  const std::vector<std::uint8_t> dup{'E', 'M', 'B', '1', 2, 0, 0, 0, 1, 0, 0, 0,
                                      1, 0, 'a', 0, 0, 0, 0, 1, 0, 'a', 0, 0, 0, 0};
  CHECK(decode_error(dup) == ErrorCode::DuplicateId);
}

TEST_CASE("get") {
  const auto t = sample_table();
  const auto v = t.get("ft:v1:fn0");
  CHECK(std::vector<float>(v.begin(), v.end()) == std::vector<float>{1.0f, -2.5f, 0.125f, 3.0f});
  CHECK(t.get_widened("at:v1:a0")[0] == static_cast<double>(0.1f));
  CHECK_THROWS_AS(t.get("ft:v1:missing"), Error);
  try {
    t.get("not an id at all");
    FAIL("expected MissingId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingId);
  }
}

TEST_CASE("insert validates entries") {
  EmbeddingTable t(2);
  CHECK_THROWS_AS(t.insert("a", std::vector<float>{1.0f}), Error);
  CHECK_THROWS_AS(t.insert("a", std::vector<float>{1.0f, INFINITY}), Error);
  t.insert("a", std::vector<float>{1.0f, 2.0f});
  CHECK_THROWS_AS(t.insert("a", std::vector<float>{1.0f, 2.0f}), Error);
}

TEST_CASE("mean_pool") {
  const std::vector<std::vector<double>> one{{1.5, -2.0}};
  CHECK(mean_pool(one) == one[0]);
  const std::vector<std::vector<double>> basis{{1.0, 0.0}, {0.0, 1.0}};
  CHECK(mean_pool(basis) == std::vector<double>{0.5, 0.5});
  const std::vector<std::vector<double>> copies(5, {0.3, -7.25, 1e-3});
  const auto pooled = mean_pool(copies);
  for (std::size_t k = 0; k < 3; ++k) CHECK(pooled[k] == doctest::Approx(copies[0][k]).epsilon(1e-15));
  CHECK_THROWS_AS(mean_pool(std::vector<std::vector<double>>{}), Error);
  CHECK_THROWS_AS(mean_pool(std::vector<std::vector<double>>{{1.0}, {1.0, 2.0}}), Error);
}

TEST_CASE("mean_pool is permutation invariant and bounded") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<std::vector<double>> vs;
    for (std::size_t i = 0; i < n; ++i) vs.push_back(aqtc::testing::random_vector(5, rng, 10.0));
    const auto pooled = mean_pool(vs);
    auto shuffled = vs;
    rng.shuffle(std::span(shuffled));
    const auto again = mean_pool(shuffled);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(std::abs(pooled[k] - again[k]) <= 1e-12);
      double lo = vs[0][k], hi = vs[0][k];
      for (const auto& v : vs) {
        lo = std::min(lo, v[k]);
        hi = std::max(hi, v[k]);
      }
      CHECK(pooled[k] >= lo - 1e-12);
      CHECK(pooled[k] <= hi + 1e-12);
    }
  }
}
