#pragma once

#include <optional>

#include "nlo/core.hpp"
#include "nlo/pump.hpp"

namespace nlo {

enum class Frame { Lab, CoRotating };
enum class PropagatorKind { Squeezer, Converter };

/// Discretized generator of the pair/conversion dynamics at one z.
/// Squeezer:  d/dz (a_s, a_i^dag) = i Q (a_s, a_i^dag), Q = [[G, F], [-F^dag, -H^dag]].
/// Converter: d/dz (a_s, a_i)     = i Q (a_s, a_i),     Q = [[G, F], [F^dag,  H]], Hermitian.
struct QGenerator {
  Matrixcd g;  // signal diagonal walk-off + XPM kernel
  Matrixcd h;  // idler counterpart
  Matrixcd f;  // pair-creation (squeezer) or conversion (converter) kernel
  PropagatorKind kind = PropagatorKind::Squeezer;

  Matrixcd assemble() const;
};

/// Frequency-domain propagator between two positions.  Blocks follow the
/// input-output relation
///   a_s(out) = U_ss a_s + U_si a_i^dag,  a_i(out) = U_ii a_i + U_is a_s^dag
/// for squeezers (drop the daggers for converters).  The continuous transfer
/// function is block(w_m, w_n) / delta_omega.
struct TransferMatrix {
  Matrixcd ss, si, is, ii;
  PropagatorKind kind = PropagatorKind::Squeezer;
  FrequencyGrid signal_grid, idler_grid;

  Index n_signal() const { return signal_grid.n_points; }
  Index n_idler() const { return idler_grid.n_points; }

  /// 2N x 2N matrix acting on (a_s, a_i^dag) [squeezer] or (a_s, a_i) [converter].
  Matrixcd full() const;
  static TransferMatrix from_full(const Matrixcd& m, PropagatorKind kind,
                                  const FrequencyGrid& signal, const FrequencyGrid& idler);
  static TransferMatrix identity(PropagatorKind kind, const FrequencyGrid& signal,
                                 const FrequencyGrid& idler);

  /// ||U K U^dag - K||_F for squeezers, ||U^dag U - 1||_F for converters.
  double structure_defect() const;
};

/// Split of the central mismatch between the signal and idler frames,
/// dks + dki = central mismatch (PDC/SFWM) or dki - dks = mismatch (QFC).
struct FrameSplit {
  double dks = 0;
  double dki = 0;
};

/// Default split, proportional to the walk-off magnitudes |1/v_j - 1/v_p|.
/// Any split yields the same lab-frame result; this one keeps the residual
/// diagonal terms balanced.
FrameSplit default_frame_split(const SegmentProfile& segment, double z);

/// Q(z) for PDC (squeezer).  The pump field must live on the sum lattice of
/// the signal and idler grids; sums outside its span read as zero.
QGenerator build_q_generator(const SegmentProfile& segment, double z, const PumpField& pump_at_z,
                             const FrequencyGrid& signal, const FrequencyGrid& idler,
                             Frame frame = Frame::Lab,
                             const std::optional<FrameSplit>& split = std::nullopt);

/// Q(z) for QFC (converter, Hermitian).  Pump on the difference lattice.
QGenerator build_qfc_generator(const SegmentProfile& segment, double z, const PumpField& pump_at_z,
                               const FrequencyGrid& signal, const FrequencyGrid& idler,
                               Frame frame = Frame::Lab,
                               const std::optional<FrameSplit>& split = std::nullopt);

/// Q(z) for dual-pump SFWM (squeezer).  Degenerate pumping passes the same
/// field twice.  Both pumps live on grids whose sum lattice covers w_n + w_m.
QGenerator build_sfwm_generator(const PumpField& pump1_at_z, const PumpField& pump2_at_z,
                                const SegmentProfile& segment, double z,
                                const FrequencyGrid& signal, const FrequencyGrid& idler,
                                Frame frame = Frame::Lab,
                                const std::optional<FrameSplit>& split = std::nullopt);

/// exp(i dz Q) by scaling-and-squaring.
TransferMatrix step_exponential(const QGenerator& q, double dz, const FrequencyGrid& signal,
                                const FrequencyGrid& idler);

struct PropagateOptions {
  Frame frame = Frame::CoRotating;
  /// Trotter step; 0 selects the default (poling-aligned, <= domain width,
  /// <= L/2000 for unpoled inhomogeneous segments, single step when exact).
  double dz = 0;
};

/// Ordered Trotter product over one segment, returned in the lab frame.
/// Homogeneous segments (constant Q after the frame change) collapse to a
/// single exponential; poled-but-otherwise-uniform segments reuse the two
/// distinct domain exponentials with run-length binary powering.
TransferMatrix propagate_segment(const SegmentProfile& segment, const PumpTrajectory& pump,
                                 const FrequencyGrid& signal, const FrequencyGrid& idler,
                                 const PropagateOptions& options = {});

/// Same-kind composition: returns "first, then second" (block product).
TransferMatrix compose(const TransferMatrix& first, const TransferMatrix& second);

/// Left-multiplies the diagonal lab-frame restoration phases
/// exp(i theta_s) on the signal rows and the conjugate on the idler rows.
TransferMatrix restore_lab_frame(const TransferMatrix& u, double theta_s, double theta_i);

}  // namespace nlo
