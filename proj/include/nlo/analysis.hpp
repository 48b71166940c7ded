#pragma once

#include "nlo/propagator.hpp"

namespace nlo {

/// Schmidt decomposition of the cross-mode kernel U_si.  Squeezers map
/// singular values to r = asinh(s); converters to r = asin(s) with a 1e-8
/// clamping tolerance.  Mode columns are normalized as sum |tau|^2 dw = 1
/// with the dominant component of each output mode made real-positive.
struct SchmidtDecomposition {
  Arrayd r;                    // descending
  Matrixcd input_modes;        // tau^(l) over the idler grid, one column per mode
  Matrixcd output_modes;       // rho^(l) over the signal grid
  PropagatorKind kind = PropagatorKind::Squeezer;
  double delta_omega = 0;
};

SchmidtDecomposition schmidt_decompose(const TransferMatrix& u);

struct PurityResult {
  double schmidt_number;  // K
  double purity;          // 1/K
};

PurityResult purity_and_schmidt_number(const Arrayd& r);

/// <N> = sum sinh^2(r_l) = Frobenius norm^2 of the discrete U_si (lossless).
double mean_photon_number(const TransferMatrix& u);
double mean_photon_number(const Arrayd& r);

struct QpgMetrics {
  Arrayd eta;          // sin^2(r_l), descending
  Arrayd separability; // eta_j / sum eta
  double selectivity;  // eta_1 * separability_1
};

QpgMetrics qpg_metrics(const Arrayd& r);

/// |sum conj(phi) psi dw|^2 for unit-normalized spectra on a shared grid.
double spectral_overlap(const Arraycd& phi, const Arraycd& psi, double delta_omega);

/// 2D discrete Fourier transform of U_si with the process-kind sign
/// convention (e^{+i w_i t_i} for squeezers, e^{-i w_i t_i} for converters).
struct TemporalTransfer {
  Matrixcd amplitude;  // rows t_s, cols t_i
  Arrayd t_signal;     // s
  Arrayd t_idler;      // s
};

TemporalTransfer temporal_transfer_function(const TransferMatrix& u);

}  // namespace nlo
