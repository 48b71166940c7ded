#pragma once

#include <vector>

#include "nlo/core.hpp"

namespace nlo {

/// Autocorrelation E_p on the 2N-1 difference lattice:
/// E_p(k*dw) = sum_w' conj(beta(w'-k*dw)) * beta(w') * dw, k in [-(N-1), N-1].
/// E_p(0) (index N-1) equals the pulse energy.
struct PumpAutocorrelation {
  Arraycd values;      // size 2N-1
  double delta_omega;  // spacing of the difference axis

  /// Value at difference index k in [-(N-1), N-1]; zero outside.
  Complex at(Index k) const {
    const Index mid = (values.size() - 1) / 2;
    const Index j = k + mid;
    if (j < 0 || j >= values.size()) return {0, 0};
    return values(j);
  }
};

PumpAutocorrelation pump_autocorrelation(const PumpField& pump);
PumpAutocorrelation pump_autocorrelation(const Arraycd& amplitudes, double delta_omega);

/// Pump spectral amplitude along a segment, sampled on the z grid the
/// propagator steps through.  Single-sample trajectories are z-independent.
struct PumpTrajectory {
  ModeSpec mode;
  std::vector<double> z;
  std::vector<Arraycd> amplitudes;

  static PumpTrajectory constant(const PumpField& pump);
  Arraycd at(double z) const;  // linear interpolation
  PumpField field_at(double z) const;
  PumpField final_field() const;
  /// Restriction to [z0, z1], re-based to start at zero.
  PumpTrajectory crop(double z0, double z1) const;
};

/// Classical pump self-phase modulation (frequency-domain Kerr evolution,
/// fixed-step RK4).  Energy is conserved by the dynamics; a per-step drift
/// above 1e-6 relative raises StepSizeError.
PumpTrajectory evolve_pump_spm(const PumpField& pump, const SegmentProfile& segment, double dz);

PumpField apply_pump_loss(const PumpField& pump, double transmittance_amplitude);

}  // namespace nlo
