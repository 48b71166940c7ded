#pragma once

#include <vector>

#include "nlo/propagator.hpp"

namespace nlo {

/// Complex (a, a^dag) covariance over the ordered modes
/// (a_s1..a_sNs, a_i1..a_iNi, a_s1^dag.., a_i1^dag..); the vacuum is the
/// identity matrix.
struct CovarianceState {
  Matrixcd sigma;
  FrequencyGrid signal_grid, idler_grid;

  Index n_signal() const { return signal_grid.n_points; }
  Index n_idler() const { return idler_grid.n_points; }
  Index n_modes() const { return n_signal() + n_idler(); }

  static CovarianceState vacuum(const FrequencyGrid& signal, const FrequencyGrid& idler);

  /// Mean photon number summed over a mode range of the annihilation half,
  /// (sum diag - count) / 2.
  double mean_photons() const;
  double mean_photons_signal() const;
  double mean_photons_idler() const;
};

struct SymplecticMap {
  Matrixcd m;  // 2(Ns+Ni) x 2(Ns+Ni)

  double symplectic_defect() const;  // ||M K M^dag - K||_F
};

/// Embed a transfer matrix as a symplectic map over (a_s, a_i, a_s^dag, a_i^dag).
/// Squeezer blocks land in the a-adag corners; converters embed as a passive
/// block-unitary.  Throws when the input violates its structure condition
/// beyond 1e-6.
SymplecticMap symplectic_from_transfer(const TransferMatrix& u);

CovarianceState evolve(const CovarianceState& state, const SymplecticMap& map);

/// Virtual-beam-splitter loss with per-mode amplitude transmittances
/// (one value per signal and idler frequency mode):
/// sigma -> T sigma T^dag + (1 - T T^dag).
CovarianceState apply_loss(const CovarianceState& state, const Arrayd& t_signal,
                           const Arrayd& t_idler);
CovarianceState apply_loss(const CovarianceState& state, double t_signal, double t_idler);

/// Vacuum-projection probability of a subset of modes (threshold detector
/// "off"): P_off = det[(1 + sigma_S)/2]^(-1/2).  Mode indices address the
/// annihilation half, signal first.
double prob_vacuum(const CovarianceState& state, const std::vector<Index>& modes);
double prob_vacuum_signal(const CovarianceState& state);
double prob_vacuum_idler(const CovarianceState& state);

double prob_click(const CovarianceState& state, const std::vector<Index>& modes);
double prob_coincidence(const CovarianceState& state, const std::vector<Index>& modes_a,
                        const std::vector<Index>& modes_b);

struct HeraldingEfficiency {
  double signal;  // P_coin / P_on(signal)
  double idler;   // P_coin / P_on(idler)
};
HeraldingEfficiency heralding_efficiency(const CovarianceState& state);

/// Squeezing values from the quadrature eigendecomposition; r sorted
/// descending, one entry per mode pair (degenerate doublets paired).
struct SqueezingSpectrum {
  Arrayd r;
  Matrixd quad_eigenvalues;  // raw spectrum, descending (diagnostic)
};
SqueezingSpectrum squeezing_from_covariance(const CovarianceState& state);

struct LossyPropagateOptions {
  Frame frame = Frame::CoRotating;
  double dz = 0;
  /// Number of loss sections; 0 selects N with alpha*L/N <= 0.01 Np.
  Index sections = 0;
};

/// Segment propagation with loss interleaving: the segment is sliced into N
/// sections, each advanced unitarily and followed by a virtual beam splitter
/// with amplitude transmittance exp(-alpha dz / 2) per mode (the classical
/// pump is attenuated the same way between sections).
CovarianceState propagate_segment_lossy(const SegmentProfile& segment, const PumpTrajectory& pump,
                                        const CovarianceState& input,
                                        const LossyPropagateOptions& options = {});

}  // namespace nlo
