#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wdl/fft.hpp"
#include "wdl/phase_grid.hpp"
#include "wdl/schrodinger.hpp"

namespace wdl::io {

enum class Dtype : std::uint8_t { kF64 = 1, kC128 = 2 };

/// 64-byte little-endian header of a .wdlb array file.
///   0  magic "WDLB"      4  u32 version    8  u8 dtype   9  u8 ndim
///   10 u16 reserved      12 u32 params hash 16 u64 dims[4]
///   48 u64 seed          56 f64 time
/// The payload follows in row-major order.
struct ArrayHeader {
  std::uint32_t version = 1;
  Dtype dtype = Dtype::kF64;
  std::uint8_t ndim = 1;
  std::uint32_t params_hash = 0;
  std::array<std::uint64_t, 4> dims{1, 1, 1, 1};
  std::uint64_t seed = 0;
  double time = 0.0;

  std::uint64_t element_count() const;
};

inline constexpr std::size_t kHeaderBytes = 64;

struct ArrayFile {
  ArrayHeader header;
  std::vector<double> real;     // dtype f64
  std::vector<cplx> complex;    // dtype c128
};

std::array<unsigned char, kHeaderBytes> encode_header(const ArrayHeader& h);
ArrayHeader decode_header(std::span<const unsigned char> bytes);

void write_array(std::ostream& os, const ArrayHeader& h, std::span<const double> data);
void write_array(std::ostream& os, const ArrayHeader& h, std::span<const cplx> data);
void write_array(const std::filesystem::path& path, const ArrayHeader& h, std::span<const double> data);
void write_array(const std::filesystem::path& path, const ArrayHeader& h, std::span<const cplx> data);
ArrayFile read_array(std::istream& is);
ArrayFile read_array(const std::filesystem::path& path);

ArrayHeader header_for(const Grid& grid, Dtype dtype);

void write_wave_field(const std::filesystem::path& path, const WaveField& f, std::uint32_t params_hash,
                      std::uint64_t seed);
/// Potential snapshot on the grid.
void write_real_field(const std::filesystem::path& path, const Grid& grid, std::span<const double> values,
                      double time, std::uint32_t params_hash, std::uint64_t seed);
/// dims = (nx, nk); the phase grid geometry goes to the manifest.
void write_wigner(const std::filesystem::path& path, const WignerGrid& w, std::uint32_t params_hash,
                  std::uint64_t seed);

/// Rows of numbers with a header line; fixed %.17g formatting for bit-stable output.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> columns);
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);
  void row_text(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

std::string format_number(double v);

}  // namespace wdl::io
