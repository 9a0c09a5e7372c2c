#include "divsamp/feature_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <istream>
#include <limits>
#include <ostream>

#include "divsamp/error.hpp"

namespace divsamp {

namespace {

std::uint64_t load_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

FeatureReader::FeatureReader(FeatureReader&&) noexcept = default;
FeatureReader& FeatureReader::operator=(FeatureReader&&) noexcept = default;
FeatureReader::~FeatureReader() = default;

FeatureReader FeatureReader::open(const std::string& path, ReaderOptions options) {
  FeatureReader reader;
  if (path == "-") {
    reader.in_ = &std::cin;
  } else {
    reader.owned_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*reader.owned_) throw Error(ErrorCode::kIo, "cannot open " + path);
    reader.in_ = reader.owned_.get();
  }
  reader.detect(options);
  return reader;
}

FeatureReader FeatureReader::from_stream(std::istream& in, ReaderOptions options) {
  FeatureReader reader;
  reader.in_ = &in;
  reader.detect(options);
  return reader;
}

void FeatureReader::detect(ReaderOptions options) {
  format_ = options.format;
  if (format_ == FeatureFormat::kCsv) {
    if (options.csv_skip_header) {
      std::string ignored;
      read_csv_line(ignored);
    }
    return;
  }

  std::array<char, kFeatureMagic.size()> magic{};
  in_->read(magic.data(), magic.size());
  const auto got = static_cast<std::size_t>(in_->gcount());
  if (got == magic.size() && magic == kFeatureMagic) {
    format_ = FeatureFormat::kBinary;
  } else if (format_ == FeatureFormat::kBinary) {
    throw Error(ErrorCode::kBadMagic, "input does not start with FSTRM1");
  } else {
    format_ = FeatureFormat::kCsv;
    pending_prefix_.assign(magic.data(), got);
    in_->clear(in_->rdstate() & ~std::ios::failbit);
    if (options.csv_skip_header) {
      std::string ignored;
      read_csv_line(ignored);
    }
    return;
  }

  unsigned char rest[kFeatureHeaderBytes - kFeatureMagic.size()];
  in_->read(reinterpret_cast<char*>(rest), sizeof rest);
  if (static_cast<std::size_t>(in_->gcount()) != sizeof rest) {
    throw Error(ErrorCode::kTruncatedPayload, "FSTRM1 header is truncated");
  }
  const std::uint64_t count = load_le(rest, 8);
  const auto dim = static_cast<std::uint32_t>(load_le(rest + 8, 4));
  if (dim == 0) throw Error(ErrorCode::kBadMagic, "FSTRM1 header declares dimension 0");
  dim_ = dim;
  if (count > 0) declared_count_ = count;
  buffer_.resize(4 * static_cast<std::size_t>(dim));
}

std::optional<FeatureVector> FeatureReader::next() {
  auto frame = format_ == FeatureFormat::kBinary ? next_binary() : next_csv();
  if (frame) validate_stream_item(*frame, dim_);
  return frame;
}

std::optional<FeatureVector> FeatureReader::next_binary() {
  if (declared_count_ && produced_ == *declared_count_) {
    if (in_->peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kTruncatedPayload,
                  "payload longer than the declared " + std::to_string(*declared_count_) + " frames");
    }
    return std::nullopt;
  }
  in_->read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
  const auto got = static_cast<std::size_t>(in_->gcount());
  if (got == 0 && !declared_count_) return std::nullopt;
  if (got != buffer_.size()) {
    throw Error(ErrorCode::kTruncatedPayload,
                "frame " + std::to_string(produced_) + " has " + std::to_string(got) + " of " +
                    std::to_string(buffer_.size()) + " bytes");
  }
  FeatureVector frame{produced_++, Vector(dim_)};
  for (std::size_t j = 0; j < dim_; ++j) {
    const auto bits = static_cast<std::uint32_t>(load_le(buffer_.data() + 4 * j, 4));
    frame.values[j] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return frame;
}

bool FeatureReader::read_csv_line(std::string& line) {
  // Bytes consumed while sniffing for the binary magic come first.
  if (const auto nl = pending_prefix_.find('\n'); nl != std::string::npos) {
    line = pending_prefix_.substr(0, nl);
    pending_prefix_.erase(0, nl + 1);
    ++csv_row_;
    return true;
  }
  std::string rest;
  const bool got = static_cast<bool>(std::getline(*in_, rest));
  line = std::move(pending_prefix_) + rest;
  pending_prefix_.clear();
  if (!got && line.empty()) return false;
  ++csv_row_;
  return true;
}

std::optional<FeatureVector> FeatureReader::next_csv() {
  std::string line;
  for (;;) {
    if (!read_csv_line(line)) return std::nullopt;
    if (!trim(line).empty()) break;
  }
  Vector values;
  std::string_view rest(line);
  std::size_t col = 0;
  for (;;) {
    ++col;
    const auto comma = rest.find(',');
    const std::string_view cell = trim(rest.substr(0, comma));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw Error(ErrorCode::kCsvParse, "row " + std::to_string(csv_row_) + ", column " +
                                            std::to_string(col) + ": '" + std::string(cell) + "'");
    }
    values.push_back(static_cast<double>(static_cast<float>(v)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (dim_ == 0) {
    dim_ = values.size();
  } else if (values.size() != dim_) {
    throw Error(ErrorCode::kCsvParse, "row " + std::to_string(csv_row_) + ", column " +
                                          std::to_string(std::min(values.size(), dim_) + 1) + ": expected " +
                                          std::to_string(dim_) + " columns, got " +
                                          std::to_string(values.size()));
  }
  return FeatureVector{produced_++, std::move(values)};
}

std::vector<FeatureVector> read_all(FeatureReader& reader) {
  std::vector<FeatureVector> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return frames;
}

void write_binary_header(std::ostream& out, const FeatureFileHeader& header) {
  out.write(kFeatureMagic.data(), kFeatureMagic.size());
  store_le(out, header.count, 8);
  store_le(out, header.dim, 4);
}

void write_binary_frame(std::ostream& out, std::span<const double> values) {
  for (double v : values) store_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
}

void write_binary(std::ostream& out, std::span<const FeatureVector> frames, bool declare_count) {
  const std::uint32_t dim = frames.empty() ? 1 : static_cast<std::uint32_t>(frames.front().values.size());
  write_binary_header(out, {declare_count ? frames.size() : 0, dim});
  for (const auto& f : frames) write_binary_frame(out, f.values);
}

void write_csv(std::ostream& out, std::span<const FeatureVector> frames) {
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (const auto& f : frames) {
    for (std::size_t j = 0; j < f.values.size(); ++j) {
      if (j) out << ',';
      out << static_cast<float>(f.values[j]);
    }
    out << '\n';
  }
}

}  // namespace divsamp
