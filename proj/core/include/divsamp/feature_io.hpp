#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divsamp/model.hpp"

namespace divsamp {

// FSTRM1 binary layout, all little-endian:
//   6 bytes  "FSTRM1"
//   u64      frame count (0 = unknown, read to end of input)
//   u32      dimension D >= 1
//   payload  count * D float32, row-major
inline constexpr std::array<char, 6> kFeatureMagic{'F', 'S', 'T', 'R', 'M', '1'};
inline constexpr std::size_t kFeatureHeaderBytes = 18;

struct FeatureFileHeader {
  std::uint64_t count = 0;
  std::uint32_t dim = 0;
};

enum class FeatureFormat { kAuto, kBinary, kCsv };

struct ReaderOptions {
  FeatureFormat format = FeatureFormat::kAuto;
  bool csv_skip_header = false;
};

// Pulls frames one at a time from an FSTRM1 or CSV source; indices are
// assigned 0, 1, ... Values are rounded to float32 for both formats so the
// same logical data reads identically either way.
//
// Errors: Error(kBadMagic), Error(kTruncatedPayload), Error(kCsvParse),
// Error(kNonFiniteValue), Error(kIo).
class FeatureReader {
 public:
  // `path` of "-" reads standard input.
  static FeatureReader open(const std::string& path, ReaderOptions options = {});
  // Reads from a caller-owned stream.
  static FeatureReader from_stream(std::istream& in, ReaderOptions options = {});

  FeatureReader(FeatureReader&&) noexcept;
  FeatureReader& operator=(FeatureReader&&) noexcept;
  ~FeatureReader();

  std::optional<FeatureVector> next();

  FeatureFormat format() const noexcept { return format_; }
  // Known after the header (binary) or first row (CSV); 0 before that.
  std::size_t dim() const noexcept { return dim_; }
  // Frame count declared by a binary header; nullopt for CSV or count = 0.
  std::optional<std::uint64_t> declared_count() const noexcept { return declared_count_; }

 private:
  FeatureReader() = default;
  void detect(ReaderOptions options);
  std::optional<FeatureVector> next_binary();
  std::optional<FeatureVector> next_csv();
  bool read_csv_line(std::string& line);

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_ = nullptr;
  FeatureFormat format_ = FeatureFormat::kAuto;
  std::size_t dim_ = 0;
  std::optional<std::uint64_t> declared_count_;
  std::uint64_t produced_ = 0;
  std::uint64_t csv_row_ = 0;
  std::string pending_prefix_;  // bytes consumed while sniffing the format
  std::vector<unsigned char> buffer_;
};

std::vector<FeatureVector> read_all(FeatureReader& reader);

// Writes an FSTRM1 header; pass count = 0 for an open-ended stream.
void write_binary_header(std::ostream& out, const FeatureFileHeader& header);
void write_binary_frame(std::ostream& out, std::span<const double> values);
void write_binary(std::ostream& out, std::span<const FeatureVector> frames, bool declare_count = true);
void write_csv(std::ostream& out, std::span<const FeatureVector> frames);

}  // namespace divsamp
