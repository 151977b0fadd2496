#include "wdl/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "wdl/errors.hpp"

namespace wdl::io {
namespace {


template <class T>
void put(unsigned char* dst, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) dst[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
}

template <class T>
T get(const unsigned char* src) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(static_cast<U>(src[i]) << (8 * i));
  return std::bit_cast<T>(u);
}

void write_doubles(std::ostream& os, const double* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    unsigned char buf[8];
    for (std::size_t i = 0; i < n; ++i) {
      put(buf, data[i]);
      os.write(reinterpret_cast<const char*>(buf), 8);
    }
  }
}

void read_doubles(std::istream& is, double* data, std::size_t n) {
  std::vector<unsigned char> raw(n * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw NumericalError("array file: truncated payload");
  for (std::size_t i = 0; i < n; ++i) data[i] = get<double>(raw.data() + 8 * i);
}

void check_count(const ArrayHeader& h, std::size_t n, Dtype expect) {
  if (h.dtype != expect) throw DomainError("array file: dtype does not match payload");
  if (h.element_count() != n) throw DomainError("array file: dims do not match payload length");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace

std::uint64_t ArrayHeader::element_count() const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < ndim; ++i) n *= dims[i];
  return n;
}

std::array<unsigned char, kHeaderBytes> encode_header(const ArrayHeader& h) {
  if (h.ndim < 1 || h.ndim > 4) throw DomainError("array header: ndim must be 1..4");
  std::array<unsigned char, kHeaderBytes> b{};
  std::memcpy(b.data(), "WDLB", 4);
  put(b.data() + 4, h.version);
  b[8] = static_cast<unsigned char>(h.dtype);
  b[9] = h.ndim;
  put(b.data() + 10, std::uint16_t{0});
  put(b.data() + 12, h.params_hash);
  for (std::size_t i = 0; i < 4; ++i) put(b.data() + 16 + 8 * i, i < h.ndim ? h.dims[i] : std::uint64_t{1});
  put(b.data() + 48, h.seed);
  put(b.data() + 56, h.time);
  return b;
}

ArrayHeader decode_header(std::span<const unsigned char> b) {
  if (b.size() < kHeaderBytes || std::memcmp(b.data(), "WDLB", 4) != 0) {
    throw DomainError("array file: bad magic");
  }
  ArrayHeader h;
  h.version = get<std::uint32_t>(b.data() + 4);
  if (b[8] != 1 && b[8] != 2) throw DomainError("array file: unknown dtype code");
  h.dtype = static_cast<Dtype>(b[8]);
  h.ndim = b[9];
  if (h.ndim < 1 || h.ndim > 4) throw DomainError("array file: ndim must be 1..4");
  h.params_hash = get<std::uint32_t>(b.data() + 12);
  for (std::size_t i = 0; i < 4; ++i) h.dims[i] = get<std::uint64_t>(b.data() + 16 + 8 * i);
  h.seed = get<std::uint64_t>(b.data() + 48);
  h.time = get<double>(b.data() + 56);
  return h;
}

void write_array(std::ostream& os, const ArrayHeader& h, std::span<const double> data) {
  check_count(h, data.size(), Dtype::kF64);
  const auto b = encode_header(h);
  os.write(reinterpret_cast<const char*>(b.data()), kHeaderBytes);
  write_doubles(os, data.data(), data.size());
}

void write_array(std::ostream& os, const ArrayHeader& h, std::span<const cplx> data) {
  check_count(h, data.size(), Dtype::kC128);
  const auto b = encode_header(h);
  os.write(reinterpret_cast<const char*>(b.data()), kHeaderBytes);
  write_doubles(os, reinterpret_cast<const double*>(data.data()), 2 * data.size());
}

void write_array(const std::filesystem::path& path, const ArrayHeader& h, std::span<const double> data) {
  auto os = open_out(path);
  write_array(os, h, data);
}

void write_array(const std::filesystem::path& path, const ArrayHeader& h, std::span<const cplx> data) {
  auto os = open_out(path);
  write_array(os, h, data);
}

ArrayFile read_array(std::istream& is) {
  std::array<unsigned char, kHeaderBytes> b{};
  is.read(reinterpret_cast<char*>(b.data()), kHeaderBytes);
  if (is.gcount() != static_cast<std::streamsize>(kHeaderBytes)) throw DomainError("array file: short header");
  ArrayFile f;
  f.header = decode_header(b);
  const auto n = static_cast<std::size_t>(f.header.element_count());
  if (f.header.dtype == Dtype::kF64) {
    f.real.resize(n);
    read_doubles(is, f.real.data(), n);
  } else {
    f.complex.resize(n);
    read_doubles(is, reinterpret_cast<double*>(f.complex.data()), 2 * n);
  }
  return f;
}

ArrayFile read_array(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path.string() + "'");
  return read_array(is);
}

ArrayHeader header_for(const Grid& grid, Dtype dtype) {
  ArrayHeader h;
  h.dtype = dtype;
  h.ndim = static_cast<std::uint8_t>(grid.d);
  for (int i = 0; i < grid.d; ++i) h.dims[static_cast<std::size_t>(i)] = grid.n;
  return h;
}

void write_wave_field(const std::filesystem::path& path, const WaveField& f, std::uint32_t params_hash,
                      std::uint64_t seed) {
  auto h = header_for(f.grid, Dtype::kC128);
  h.params_hash = params_hash;
  h.seed = seed;
  h.time = f.time;
  write_array(path, h, std::span<const cplx>(f.values));
}

void write_real_field(const std::filesystem::path& path, const Grid& grid, std::span<const double> values,
                      double time, std::uint32_t params_hash, std::uint64_t seed) {
  auto h = header_for(grid, Dtype::kF64);
  h.params_hash = params_hash;
  h.seed = seed;
  h.time = time;
  write_array(path, h, values);
}

void write_wigner(const std::filesystem::path& path, const WignerGrid& w, std::uint32_t params_hash,
                  std::uint64_t seed) {
  ArrayHeader h;
  h.dtype = Dtype::kF64;
  h.ndim = 2;
  h.dims = {w.grid.nx, w.grid.nk, 1, 1};
  h.params_hash = params_hash;
  h.seed = seed;
  h.time = w.time;
  write_array(path, h, std::span<const double>(w.values));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> columns) : os_(os), width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != width_) throw DomainError("csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DomainError("csv: row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
  os_ << '\n';
}

}  // namespace wdl::io
