#pragma once

#include <vector>

#include "nlo/core.hpp"

namespace nlo {

/// Phase matching function on a signal x idler grid,
/// Phi = (1/sqrt(2pi)) int_0^L gamma(z) exp[i int_0^z dk(z') dz'] dz with
/// dk = central mismatch - walkoff_s * nu_s - walkoff_i * nu_i (detunings
/// measured from the grid centers; gamma includes the poling sign).
struct PhaseMatchingFunction {
  Matrixcd values;  // rows signal, cols idler
  FrequencyGrid signal_grid, idler_grid;
};

PhaseMatchingFunction phase_matching_function(const SegmentProfile& segment,
                                              const FrequencyGrid& signal,
                                              const FrequencyGrid& idler);

/// Same integral evaluated on explicit residual-mismatch values
/// delta = walkoff_s * nu_s + walkoff_i * nu_i (uniform segments only).
Arraycd phase_matching_line(const SegmentProfile& segment, const Arrayd& delta);

struct JointSpectralAmplitude {
  Matrixcd values;  // rows signal, cols idler
  FrequencyGrid signal_grid, idler_grid;
  bool unit_frobenius = false;

  JointSpectralAmplitude normalized() const;
  double frobenius() const { return values.norm(); }
};

/// First-order JSA f = beta_p(w_s + w_i) * Phi(w_s, w_i); pump values outside
/// the pump grid are zero-filled (with a warning on stderr).
JointSpectralAmplitude first_order_jsa(const PumpField& pump, const PhaseMatchingFunction& pm);

/// Two-stage interference envelope,
/// Phi_tot = 2 Phi cos((dphi + T_s nu_s + T_i nu_i)/2).
PhaseMatchingFunction interferometer_pm(const PhaseMatchingFunction& single, double dphi,
                                        double walkoff_s, double walkoff_i);

/// A routed path element: a nonlinear segment or a fixed pair of relative
/// delays (spacers, compensators), both referenced to the pump frame.
struct PathElement {
  const SegmentProfile* segment = nullptr;
  double delay_signal = 0;  // s
  double delay_idler = 0;   // s
};

struct WalkoffSummary {
  double tau_s = 0, tau_i = 0;  // first nonlinear stage walk-offs (s)
  double T_s = 0, T_i = 0;      // accumulated to the start of the second stage
  double theta_pm = 0;          // atan(-tau_s / tau_i), rad
  double theta_int = 0;         // atan(-T_s / T_i), rad
};

WalkoffSummary walkoff_and_slopes(const std::vector<PathElement>& path);

/// Closed-form intrinsic heralding efficiency of a uniformly lossy waveguide,
/// evaluated with series-stable limits at alpha -> 0 and mismatch -> 0.
/// alpha is the power attenuation in Np/m.
double analytic_heralding_efficiency(double alpha, double mismatch, double length);

}  // namespace nlo
