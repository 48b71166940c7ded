#pragma once

#include <string>
#include <vector>

#include "nlo/propagator.hpp"

namespace nlo {

/// Self-describing binary container for complex matrices: magic "NLOM",
/// version, kind tag, shape, two grid-metadata blocks, then the row-major
/// complex-double payload.  Byte-exact round trips, no timestamps.
void write_matrix(const std::string& path, const Matrixcd& m, uint32_t kind_tag,
                  const FrequencyGrid& signal, const FrequencyGrid& idler);

struct MatrixFile {
  Matrixcd values;
  uint32_t kind_tag = 0;
  FrequencyGrid signal_grid, idler_grid;
};

MatrixFile read_matrix(const std::string& path);

void write_transfer_matrix(const std::string& path, const TransferMatrix& u);
TransferMatrix read_transfer_matrix(const std::string& path);

/// UTF-8 comma-separated table with a header row; numbers are emitted with
/// round-trip precision.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_table(const std::string& path, const Table& table);

/// Plot-ready |values| grid with leading axis row/column.
void write_magnitude_grid(const std::string& path, const Matrixcd& values, const Arrayd& row_axis,
                          const Arrayd& col_axis);

}  // namespace nlo
