#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "divsamp/error.hpp"
#include "divsamp/feature_io.hpp"

namespace divsamp {
namespace {

std::string header_bytes(std::uint64_t count, std::uint32_t dim) {
  std::ostringstream out;
  write_binary_header(out, {count, dim});
  return out.str();
}

std::string float_bytes(std::size_t n, float start = 0.0f) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    const float f = start + static_cast<float>(i);
    char raw[4];
    std::memcpy(raw, &f, 4);
    out.append(raw, 4);
  }
  return out;
}

std::vector<FeatureVector> read_string(const std::string& bytes, ReaderOptions options = {}) {
  std::istringstream in(bytes);
  auto reader = FeatureReader::from_stream(in, options);
  return read_all(reader);
}

ErrorCode read_error(const std::string& bytes, ReaderOptions options = {}) {
  try {
    read_string(bytes, options);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no divsamp::Error thrown";
  return ErrorCode::kInvalidConfig;
}

TEST(BinaryFormat, HeaderLayout) {
  const std::string h = header_bytes(0x0102030405060708ull, 0x0a0b0c0du);
  ASSERT_EQ(h.size(), kFeatureHeaderBytes);
  EXPECT_EQ(h.substr(0, 6), "FSTRM1");
  EXPECT_EQ(static_cast<unsigned char>(h[6]), 0x08);
  EXPECT_EQ(static_cast<unsigned char>(h[13]), 0x01);
  EXPECT_EQ(static_cast<unsigned char>(h[14]), 0x0d);
  EXPECT_EQ(static_cast<unsigned char>(h[17]), 0x0a);
}

TEST(BinaryFormat, DeclaredCount) {
  std::istringstream in(header_bytes(2, 3) + float_bytes(6));
  auto reader = FeatureReader::from_stream(in);
  EXPECT_EQ(reader.format(), FeatureFormat::kBinary);
  EXPECT_EQ(reader.dim(), 3u);
  EXPECT_EQ(reader.declared_count(), std::optional<std::uint64_t>(2));
  const auto frames = read_all(reader);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0], (FeatureVector{0, {0, 1, 2}}));
  EXPECT_EQ(frames[1], (FeatureVector{1, {3, 4, 5}}));
}

TEST(BinaryFormat, StreamingModeReadsToEnd) {
  std::istringstream in(header_bytes(0, 3) + float_bytes(9));
  auto reader = FeatureReader::from_stream(in);
  EXPECT_FALSE(reader.declared_count().has_value());
  const auto frames = read_all(reader);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[2].index, 2u);
  EXPECT_EQ(frames[2].values, (Vector{6, 7, 8}));
}

TEST(BinaryFormat, TruncatedPayload) {
  const std::string bytes25 = float_bytes(7).substr(0, 25);
  EXPECT_EQ(read_error(header_bytes(0, 3) + bytes25), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(read_error(header_bytes(3, 3) + float_bytes(6)), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(read_error(header_bytes(1, 3) + float_bytes(6)), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(read_error(std::string("FSTRM1") + "\x01\x00", {FeatureFormat::kBinary, false}),
            ErrorCode::kTruncatedPayload);
}

TEST(BinaryFormat, BadMagic) {
  std::string bytes = header_bytes(1, 2) + float_bytes(2);
  bytes[5] = '2';
  EXPECT_EQ(read_error(bytes, {FeatureFormat::kBinary, false}), ErrorCode::kBadMagic);
}

TEST(BinaryFormat, NonFiniteValuesRejected) {
  std::string payload = float_bytes(2);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(payload.data() + 4, &nan, 4);
  EXPECT_EQ(read_error(header_bytes(1, 2) + payload), ErrorCode::kNonFiniteValue);
}

TEST(BinaryFormat, WriteReadRoundTrip) {
  std::vector<FeatureVector> frames{{0, {0.5, -1.25}}, {1, {3.0, 1e-3}}};
  for (bool declare : {true, false}) {
    std::ostringstream out;
    write_binary(out, frames, declare);
    const auto back = read_string(out.str());
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].values, frames[0].values);
    EXPECT_EQ(back[1].values[0], 3.0);
    EXPECT_EQ(back[1].values[1], static_cast<double>(1e-3f));
  }
}

TEST(CsvFormat, ParsesRowsAndSkipsBlankLines) {
  const auto frames = read_string("1,2,3\n\n4.5, -6 ,7e1\n");
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1], (FeatureVector{1, {4.5, -6.0, 70.0}}));
}

TEST(CsvFormat, OptionalHeaderRow) {
  const auto frames = read_string("a,b\n1,2\n", {FeatureFormat::kCsv, true});
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].values, (Vector{1, 2}));
}

TEST(CsvFormat, ParseErrorReportsPosition) {
  try {
    read_string("1,2\n3,x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCsvParse);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(CsvFormat, RaggedRowsRejected) {
  EXPECT_EQ(read_error("1,2,3\n4,5\n"), ErrorCode::kCsvParse);
}

TEST(CsvFormat, ShortInputsAreStillSniffedAsCsv) {
  const auto frames = read_string("7");
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].values, (Vector{7}));
  EXPECT_TRUE(read_string("").empty());
}

TEST(FeatureIoProperty, CsvAndBinaryReadIdentically) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FeatureVector> frames(1 + trial * 3);
    const std::size_t dim = 1 + trial % 7;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      frames[i].index = i;
      frames[i].values.resize(dim);
      for (auto& x : frames[i].values) x = g(rng);
    }
    std::ostringstream bin, csv;
    write_binary(bin, frames, trial % 2 == 0);
    write_csv(csv, frames);
    EXPECT_EQ(read_string(bin.str()), read_string(csv.str()));
  }
}

TEST(FeatureReader, MissingFileIsAnIoError) {
  try {
    FeatureReader::open("/nonexistent/divsamp/features.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace divsamp
