#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "nlo/analysis.hpp"
#include "nlo/gaussian.hpp"
#include "nlo/oracle.hpp"

namespace nlo {

/// Passive routing element: per-mode group delays relative to the pump, a
/// lumped pair-phase knob, and insertion losses.
struct LinearElement {
  double delay_signal = 0;  // s
  double delay_idler = 0;   // s
  double loss_signal_db = 0;
  double loss_idler_db = 0;
  double loss_pump_db = 0;
  double phase = 0;         // rad; squeezers see phi_s + phi_i, converters phi_s - phi_i
  bool phase_knob = false;  // sweep target

  /// Delays quoted as absolute traversal times (e.g. solver tables) are
  /// referenced to the pump's.
  static LinearElement from_absolute_delays(double pump_delay, double signal_delay,
                                            double idler_delay);
};

using CircuitElement = std::variant<SegmentProfile, LinearElement>;

struct Circuit {
  std::vector<CircuitElement> elements;

  Index knob_index() const;  // first phase-knob element, -1 if none
  void validate() const;
};

/// Lossless transfer-matrix route (amplitude scaling only when the element
/// carries loss; the result is then no longer symplectic).
TransferMatrix apply_linear_element(const TransferMatrix& u, const LinearElement& element);
/// Covariance route: diagonal symplectic phases followed by a loss map.  The
/// process kind selects the pair-phase split of the knob.
CovarianceState apply_linear_element(const CovarianceState& state, const LinearElement& element,
                                     PropagatorKind kind = PropagatorKind::Squeezer);

struct CircuitRunOptions {
  Frame frame = Frame::CoRotating;
  double dz = 0;
  bool with_loss = false;
  Index loss_sections = 0;  // 0: auto
  std::optional<double> phase_override;  // applied to the knob element
  double pump_spm_dz = 0;   // 0: segment length / 16
};

struct CircuitMetrics {
  double mean_photons_signal = 0;
  double mean_photons_idler = 0;
  Arrayd schmidt_r;  // lossless: Schmidt values; lossy: covariance squeezing
  double purity = 0; // lossless squeezers only
};

struct CircuitRunResult {
  std::optional<TransferMatrix> u;          // lossless route
  std::optional<CovarianceState> state;     // with_loss route
  PumpField pump_out;
  CircuitMetrics metrics;
};

CircuitRunResult run_circuit(const Circuit& circuit, const PumpField& pump,
                             const FrequencyGrid& signal, const FrequencyGrid& idler,
                             const CircuitRunOptions& options = {});

struct PhaseSweepResult {
  Arrayd phases;
  Arrayd value;       // mean signal photons (squeezer) or eta_1 (converter)
  double visibility;  // (max - min) / (max + min)
};

PhaseSweepResult sweep_phase(const Circuit& circuit, const PumpField& pump,
                             const FrequencyGrid& signal, const FrequencyGrid& idler,
                             const Arrayd& phases, const CircuitRunOptions& options = {},
                             Index jobs = 1);

struct StageMetrics {
  Index stages = 0;
  double leading_r = 0;
  double bandwidth = 0;  // FWHM of the signal marginal of |U_si|^2 (lossless runs)
  double mean_photons = 0;
};

/// Compose `stage (+ compensator)` N times and report per-stage-count
/// metrics.  Without a compensator the stages are butt-coupled.
std::vector<StageMetrics> cascade_stages(const SegmentProfile& stage,
                                         const std::optional<LinearElement>& twoc, Index n_stages,
                                         const PumpField& pump, const FrequencyGrid& signal,
                                         const FrequencyGrid& idler,
                                         const CircuitRunOptions& options = {});

/// Walk-off path view of a circuit for the slope oracles.
std::vector<PathElement> circuit_path(const Circuit& circuit);

/// Interpolated full width at half maximum of a sampled positive curve.
double fwhm(const Arrayd& x, const Arrayd& y);

}  // namespace nlo
