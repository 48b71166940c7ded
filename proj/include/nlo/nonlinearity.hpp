#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nlo/core.hpp"

namespace nlo {

/// Cross-section mode field on an imported cell grid (midpoint quadrature,
/// no re-meshing).  E is in the solver's normalized units; when H is present
/// the power-normalization integral must equal 2 v within 1%.
struct FieldCell {
  double x = 0, y = 0;   // m
  double area = 0;       // m^2
  Eigen::Vector3cd e;
  std::optional<Eigen::Vector3cd> h;
};

struct ModeFieldProfile {
  std::vector<FieldCell> cells;
  double group_velocity = 0;    // m/s
  double center_frequency = 0;  // rad/s

  /// Re[ integral (e x h* - h x e*) . z dA ]; defined only when H is present.
  double normalization_integral() const;
  void validate() const;
};

struct SusceptibilityTensors {
  std::array<std::array<std::array<double, 3>, 3>, 3> chi2{};              // pm/V style, SI units
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> chi3{};  // m^2/V^2

  double frobenius_chi2() const;
  double frobenius_chi3() const;
};

/// chi2 = 2 d, expanded from the contracted 3m-class d-matrix (Kleinman
/// symmetry, d15 = d31).  Inputs in m/V.
SusceptibilityTensors chi2_from_contracted_3m(double d22, double d31, double d33);
/// 43m class: only d14 = d25 = d36.
SusceptibilityTensors chi2_from_contracted_43m(double d14);

/// Fill the dispersion-free, full-permutation-symmetric chi3 with diagonal
/// components `diag` and every distinct-index pairing `offdiag` (m^2/V^2).
void fill_isotropic_chi3(SusceptibilityTensors& tensors, double diag, double offdiag);

/// Rotation about the x axis applied to both tensors.
SusceptibilityTensors rotate_tensors(const SusceptibilityTensors& tensors, double angle);

enum class NonlinearProcess { Pdc, Qfc, Spm, XpmSignal, XpmIdler, Sfwm };

struct ModeFieldSet {
  const ModeFieldProfile* signal = nullptr;
  const ModeFieldProfile* idler = nullptr;
  const ModeFieldProfile* pump = nullptr;
  const ModeFieldProfile* pump2 = nullptr;  // SFWM only
};

/// Cell-area-weighted overlap integral with the process prefactor
/// (PDC/QFC: W^-1/2 m^-1, four-wave processes: W^-1 m^-1).
double overlap_gamma(const ModeFieldSet& fields, const SusceptibilityTensors& tensors,
                     NonlinearProcess process);

/// Miller's-rule scaling of a contracted d entry between frequency triples;
/// eps values are the linear relative permittivities at (2w, w, w).
struct MillerTriple {
  double eps_i = 0, eps_j = 0, eps_k = 0;
};
double millers_rule(double d_reference, const MillerTriple& reference, const MillerTriple& target);

/// Eq.-of-convention conversion n2 [m^2/W] -> chi3 [m^2/V^2]:
/// chi3 = n2 * n^2 / 282.55.
double n2_to_chi3(double n2, double refractive_index);

/// First-order (or odd higher order) quasi-phase-matching period; nullopt
/// when already phase matched.
std::optional<double> qpm_period(double mismatch, int order = 1);

PolingPattern periodic_pattern(double period, double length, double duty = 0.5);

struct ApodizedPolingResult {
  PolingPattern pattern;
  Arrayd z;         // domain boundaries
  Arrayd realized;  // |Phi(z)| at boundaries, normalized units (gamma = 1, no 1/sqrt(2pi))
  Arrayd target;    // target amplitude at boundaries, same units
  bool infeasible_slope = false;
};

/// Greedy domain-by-domain sign choice tracking the erf-shaped target
/// |Phi(z)| = c |erf((L-2z)/(2 sqrt2 sigma)) - erf(L/(2 sqrt2 sigma))|,
/// one domain per coherence length pi/|mismatch|.
ApodizedPolingResult apodized_pattern(double mismatch, double length, double sigma, double c);

/// Angular-phase-matching coupling profile in centered coordinates,
/// gamma(z) = gamma0 exp(-z^2 / 2 Leff^2) |sin(2 pi z / period)|, or its
/// dominant Fourier term -(4/3pi) cos(4 pi z / period) for oracle work.
double apm_gamma(double z_centered, double gamma0, double l_eff, double period,
                 bool cosine_approximation = false);

struct ApmProfile {
  Arrayd z;      // segment coordinates in [0, L]
  Arrayd gamma;  // coupling at z
};

ApmProfile apm_profile(double gamma0, double l_eff, double period, double length,
                       bool cosine_approximation = false, Index samples_per_period = 40);

/// Segment samples combining an APM gamma profile with uniform base data.
std::vector<SegmentSample> samples_from_apm(const ApmProfile& profile, const SegmentSample& base);

}  // namespace nlo
