#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlo/poling.hpp"
#include "nlo/types.hpp"

namespace nlo {

/// Uniform angular-frequency grid.  Point k (0-based) sits at
/// omega_start + k * delta_omega.
struct FrequencyGrid {
  double omega_start = 0;  // rad/s
  double delta_omega = 0;  // rad/s
  Index n_points = 0;

  double omega(Index k) const { return omega_start + static_cast<double>(k) * delta_omega; }
  double center() const { return omega_start + 0.5 * delta_omega * static_cast<double>(n_points - 1); }
  double span() const { return delta_omega * static_cast<double>(n_points - 1); }
  double omega_end() const { return omega(n_points - 1); }
  Arrayd omegas() const;
  /// Offsets from the grid center, (omega_k - center).
  Arrayd detunings() const;

  /// Exact inverse of omega(k); throws if omega is not a grid point.
  Index index_of(double omega, double tol = 1e-6) const;
  bool contains(double omega) const { return omega >= omega_start - 0.5 * delta_omega && omega <= omega_end() + 0.5 * delta_omega; }
  bool same_spacing(const FrequencyGrid& other, double tol = 1e-9) const;

  bool operator==(const FrequencyGrid&) const = default;
};

FrequencyGrid build_frequency_grid(double center, double span, Index n_points);

/// Grid holding every pairwise sum omega_a + omega_b of two equal-spacing
/// grids; this is where a squeezing pump must live so that beta_p(w_n + w_m)
/// lands on grid points.
FrequencyGrid sum_lattice(const FrequencyGrid& a, const FrequencyGrid& b);

/// Grid holding every pairwise difference omega_b - omega_a (converter pump).
FrequencyGrid difference_lattice(const FrequencyGrid& a, const FrequencyGrid& b);

enum class ModeLabel { Signal, Idler, Pump, Pump2 };

std::string to_string(ModeLabel label);

struct ModeSpec {
  ModeLabel label = ModeLabel::Signal;
  double center_frequency = 0;  // rad/s
  FrequencyGrid grid;

  void validate() const;
};

ModeSpec make_mode(ModeLabel label, double center_frequency, const FrequencyGrid& grid);

/// Per-mode scalar bundle for segment samples.
struct ModeScalars {
  double signal = 0, idler = 0, pump = 0, pump2 = 0;

  double get(ModeLabel label) const;
  double& ref(ModeLabel label);
};

enum class ProcessKind { Pdc, Qfc, Sfwm };

/// One z-sample of a waveguide segment.  Values between samples are obtained
/// by piecewise-linear interpolation.
struct SegmentSample {
  double z = 0;                   // m
  ModeScalars group_velocity;     // m/s
  ModeScalars beta_center;        // central propagation constant, rad/m
  ModeScalars loss;               // power attenuation, Np/m
  double gamma = 0;               // process coupling (PDC/QFC: W^-1/2 m^-1, SFWM: W^-1 m^-1)
  double gamma_spm = 0;           // W^-1 m^-1
  double gamma_xpm_s = 0;         // W^-1 m^-1
  double gamma_xpm_i = 0;         // W^-1 m^-1
};

/// Piecewise description of one nonlinear waveguide section.
struct SegmentProfile {
  double length = 0;  // m
  ProcessKind process = ProcessKind::Pdc;
  std::vector<SegmentSample> samples;
  std::optional<PolingPattern> poling;
  /// Mismatch phase already accumulated before this segment's z = 0; set by
  /// crop_segment so a sliced segment keeps phase continuity with its parent.
  double mismatch_phase_offset = 0;

  void validate() const;
  bool is_uniform() const;

  SegmentSample at(double z) const;

  /// Central phase mismatch at z: sum of pump beta_centers minus the pair's
  /// (PDC: kp-ks-ki, QFC: kp+ks-ki, SFWM: kp1+kp2-ks-ki).
  double central_mismatch(double z) const;
  /// Integral of central_mismatch from 0 to z (exact for the piecewise-linear
  /// interpolation; shared by the propagator and the oracles).
  double accumulated_mismatch(double z) const;

  /// Walk-off rate 1/v_m - 1/v_p at z (s/m); reference is Pump (or Pump2's
  /// partner p1 for SFWM, which is also Pump).
  double walkoff_rate(ModeLabel mode, double z) const;
  /// Integral of walkoff_rate over [0, length].
  double walkoff(ModeLabel mode) const;

  /// Poling sign at z (+1 when unpoled).
  int poling_sign(double z) const;
};

SegmentProfile make_uniform_segment(double length, ProcessKind process, const SegmentSample& sample);

/// Restriction of a segment to [z0, z1], re-based to start at zero.  Poling
/// is cropped (partial domains keep their sign) and the accumulated mismatch
/// phase at z0 is carried over so sliced propagation matches the unsliced one.
SegmentProfile crop_segment(const SegmentProfile& segment, double z0, double z1);

/// Complex spectral amplitude of a classical pump; units sqrt(J*s) so that
/// sum |beta|^2 * delta_omega is the pulse energy.
struct PumpField {
  ModeSpec mode;
  Arraycd amplitudes;

  double energy() const;
  void validate() const;
};

/// Spectral-intensity-FWHM Gaussian pump, specified in wavelength as
/// delta_omega_fwhm = 2*pi*c*fwhm_wavelength / center_wavelength^2, with the
/// discrete energy normalization enforced exactly.
PumpField gaussian_pump(const ModeSpec& mode, double fwhm_wavelength, double pulse_energy,
                        double center_wavelength);

double wavelength_to_omega(double wavelength);
double omega_to_wavelength(double omega);

}  // namespace nlo
