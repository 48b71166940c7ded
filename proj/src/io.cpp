#include "nlo/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace nlo {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'O', 'M'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
uint64_t read_u64(std::istream& in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void write_grid(std::ostream& out, const FrequencyGrid& g) {
  write_f64(out, g.omega_start);
  write_f64(out, g.delta_omega);
  write_u64(out, static_cast<uint64_t>(g.n_points));
}

FrequencyGrid read_grid(std::istream& in) {
  FrequencyGrid g;
  g.omega_start = read_f64(in);
  g.delta_omega = read_f64(in);
  g.n_points = static_cast<Index>(read_u64(in));
  return g;
}

}  // namespace

void write_matrix(const std::string& path, const Matrixcd& m, uint32_t kind_tag,
                  const FrequencyGrid& signal, const FrequencyGrid& idler) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, kind_tag);
  write_u64(out, static_cast<uint64_t>(m.rows()));
  write_u64(out, static_cast<uint64_t>(m.cols()));
  write_grid(out, signal);
  write_grid(out, idler);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      write_f64(out, m(r, c).real());
      write_f64(out, m(r, c).imag());
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

MatrixFile read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a matrix container: " + path);
  const uint32_t version = read_u32(in);
  if (version != kVersion) throw std::runtime_error("unsupported container version");
  MatrixFile file;
  file.kind_tag = read_u32(in);
  const uint64_t rows = read_u64(in);
  const uint64_t cols = read_u64(in);
  file.signal_grid = read_grid(in);
  file.idler_grid = read_grid(in);
  file.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < file.values.rows(); ++r)
    for (Index c = 0; c < file.values.cols(); ++c) {
      const double re = read_f64(in);
      const double im = read_f64(in);
      file.values(r, c) = Complex{re, im};
    }
  if (!in) throw std::runtime_error("truncated matrix container: " + path);
  return file;
}

void write_transfer_matrix(const std::string& path, const TransferMatrix& u) {
  const uint32_t tag = u.kind == PropagatorKind::Squeezer ? 1u : 2u;
  write_matrix(path, u.full(), tag, u.signal_grid, u.idler_grid);
}

TransferMatrix read_transfer_matrix(const std::string& path) {
  const MatrixFile file = read_matrix(path);
  if (file.kind_tag != 1 && file.kind_tag != 2)
    throw std::runtime_error("matrix container does not hold a transfer matrix");
  const PropagatorKind kind =
      file.kind_tag == 1 ? PropagatorKind::Squeezer : PropagatorKind::Converter;
  return TransferMatrix::from_full(file.values, kind, file.signal_grid, file.idler_grid);
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t k = 0; k < table.header.size(); ++k) {
    if (k) out << ',';
    out << table.header[k];
  }
  out << '\n';
  char buf[32];
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("table row width does not match the header");
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_magnitude_grid(const std::string& path, const Matrixcd& values, const Arrayd& row_axis,
                          const Arrayd& col_axis) {
  if (row_axis.size() != values.rows() || col_axis.size() != values.cols())
    throw std::invalid_argument("axis sizes do not match the grid");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[32];
  out << "row\\col";
  for (Index c = 0; c < col_axis.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", col_axis(c));
    out << ',' << buf;
  }
  out << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", row_axis(r));
    out << buf;
    for (Index c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(values(r, c)));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nlo
