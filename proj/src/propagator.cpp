#include "nlo/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <vector>

namespace nlo {

Matrixcd QGenerator::assemble() const {
  const Index ns = g.rows();
  const Index ni = h.rows();
  Matrixcd q(ns + ni, ns + ni);
  if (kind == PropagatorKind::Squeezer) {
    q.topLeftCorner(ns, ns) = g;
    q.topRightCorner(ns, ni) = f;
    q.bottomLeftCorner(ni, ns) = -f.adjoint();
    q.bottomRightCorner(ni, ni) = -h.adjoint();
  } else {
    q.topLeftCorner(ns, ns) = g;
    q.topRightCorner(ns, ni) = f;
    q.bottomLeftCorner(ni, ns) = f.adjoint();
    q.bottomRightCorner(ni, ni) = h;
  }
  return q;
}

Matrixcd TransferMatrix::full() const {
  const Index ns = n_signal();
  const Index ni = n_idler();
  Matrixcd m(ns + ni, ns + ni);
  m.topLeftCorner(ns, ns) = ss;
  m.topRightCorner(ns, ni) = si;
  if (kind == PropagatorKind::Squeezer) {
    m.bottomLeftCorner(ni, ns) = is.conjugate();
    m.bottomRightCorner(ni, ni) = ii.conjugate();
  } else {
    m.bottomLeftCorner(ni, ns) = is;
    m.bottomRightCorner(ni, ni) = ii;
  }
  return m;
}

TransferMatrix TransferMatrix::from_full(const Matrixcd& m, PropagatorKind kind,
                                         const FrequencyGrid& signal, const FrequencyGrid& idler) {
  const Index ns = signal.n_points;
  const Index ni = idler.n_points;
  if (m.rows() != ns + ni || m.cols() != ns + ni)
    throw std::invalid_argument("full matrix size does not match the grids");
  TransferMatrix u;
  u.kind = kind;
  u.signal_grid = signal;
  u.idler_grid = idler;
  u.ss = m.topLeftCorner(ns, ns);
  u.si = m.topRightCorner(ns, ni);
  if (kind == PropagatorKind::Squeezer) {
    u.is = m.bottomLeftCorner(ni, ns).conjugate();
    u.ii = m.bottomRightCorner(ni, ni).conjugate();
  } else {
    u.is = m.bottomLeftCorner(ni, ns);
    u.ii = m.bottomRightCorner(ni, ni);
  }
  return u;
}

TransferMatrix TransferMatrix::identity(PropagatorKind kind, const FrequencyGrid& signal,
                                        const FrequencyGrid& idler) {
  return from_full(Matrixcd::Identity(signal.n_points + idler.n_points,
                                      signal.n_points + idler.n_points),
                   kind, signal, idler);
}

double TransferMatrix::structure_defect() const {
  const Matrixcd m = full();
  if (kind == PropagatorKind::Converter)
    return (m.adjoint() * m - Matrixcd::Identity(m.rows(), m.cols())).norm();
  Vectorcd kdiag(m.rows());
  kdiag.head(n_signal()).setConstant(1.0);
  kdiag.tail(n_idler()).setConstant(-1.0);
  const Matrixcd lhs = m * kdiag.asDiagonal() * m.adjoint();
  return (lhs - Matrixcd(kdiag.asDiagonal())).norm();
}

FrameSplit default_frame_split(const SegmentProfile& segment, double z) {
  const double mismatch = segment.central_mismatch(z);
  const double ws = std::abs(segment.walkoff_rate(ModeLabel::Signal, z));
  const double wi = std::abs(segment.walkoff_rate(ModeLabel::Idler, z));
  double fs = 0.5;
  if (ws + wi > 0) fs = ws / (ws + wi);
  FrameSplit split;
  if (segment.process == ProcessKind::Qfc) {
    // dki - dks = mismatch
    split.dks = -mismatch * fs;
    split.dki = mismatch * (1.0 - fs);
  } else {
    split.dks = mismatch * fs;
    split.dki = mismatch * (1.0 - fs);
  }
  return split;
}

namespace {

// beta_p lookups on an aligned lattice; out-of-range reads are zero.
struct PumpLattice {
  const Arraycd* amps = nullptr;
  Index base = 0;

  Complex at(Index k) const {
    const Index j = base + k;
    if (j < 0 || j >= amps->size()) return {0, 0};
    return (*amps)(j);
  }
};

// Index of target_start on the pump grid; throws when the lattices are not
// aligned (values would fall between pump grid points).
Index lattice_base(double target_start, const FrequencyGrid& pump_grid) {
  const double x = (target_start - pump_grid.omega_start) / pump_grid.delta_omega;
  const Index k = static_cast<Index>(std::llround(x));
  if (std::abs(x - static_cast<double>(k)) > 1e-6)
    throw std::invalid_argument("pump grid is not aligned with the signal/idler lattice");
  return k;
}

Arrayd walkoff_diagonal(const SegmentProfile& segment, ModeLabel mode, double z,
                        const FrequencyGrid& grid, double frame_shift) {
  const double rate = segment.walkoff_rate(mode, z);
  return rate * grid.detunings() - frame_shift;
}

void add_xpm(Matrixcd& block, const PumpAutocorrelation& acf, double gamma, double delta_omega,
             bool conjugate) {
  if (gamma == 0) return;
  const Index n = block.rows();
  const double scale = gamma / (2.0 * kPi) * delta_omega;
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      Complex e = acf.at(r - c);
      if (conjugate) e = std::conj(e);
      block(r, c) += scale * e;
    }
}

struct XpmKernels {
  bool have = false;
  PumpAutocorrelation acf;
};

// Shared assembly for the two squeezer processes (PDC, SFWM); they differ
// only in the pair kernel values and prefactor.
QGenerator build_squeezer_generator(const SegmentProfile& segment, double z,
                                    const Arraycd& kernel_values, const FrequencyGrid& kernel_grid,
                                    Complex prefactor, const FrequencyGrid& signal,
                                    const FrequencyGrid& idler, Frame frame,
                                    const std::optional<FrameSplit>& split_opt,
                                    const XpmKernels& xpm, double gamma_xpm_s,
                                    double gamma_xpm_i) {
  if (!signal.same_spacing(idler))
    throw std::invalid_argument("signal and idler grids must share delta_omega");
  const double dw = signal.delta_omega;
  const Index ns = signal.n_points;
  const Index ni = idler.n_points;

  FrameSplit split{0, 0};
  if (frame == Frame::CoRotating) split = split_opt ? *split_opt : default_frame_split(segment, z);

  QGenerator q;
  q.kind = PropagatorKind::Squeezer;
  q.g = walkoff_diagonal(segment, ModeLabel::Signal, z, signal, split.dks)
            .cast<Complex>()
            .matrix()
            .asDiagonal();
  q.h = walkoff_diagonal(segment, ModeLabel::Idler, z, idler, split.dki)
            .cast<Complex>()
            .matrix()
            .asDiagonal();
  if (xpm.have) {
    add_xpm(q.g, xpm.acf, gamma_xpm_s, dw, false);
    add_xpm(q.h, xpm.acf, gamma_xpm_i, dw, true);
  }

  PumpLattice lattice;
  lattice.amps = &kernel_values;
  lattice.base = lattice_base(signal.omega_start + idler.omega_start, kernel_grid);

  q.f.resize(ns, ni);
  const Complex pref = prefactor * dw;
  for (Index n = 0; n < ns; ++n)
    for (Index m = 0; m < ni; ++m) q.f(n, m) = pref * lattice.at(n + m);
  return q;
}

}  // namespace

QGenerator build_q_generator(const SegmentProfile& segment, double z, const PumpField& pump_at_z,
                             const FrequencyGrid& signal, const FrequencyGrid& idler, Frame frame,
                             const std::optional<FrameSplit>& split) {
  if (segment.process != ProcessKind::Pdc)
    throw std::invalid_argument("build_q_generator expects a PDC segment");
  const SegmentSample s = segment.at(z);
  const double gamma = s.gamma * static_cast<double>(segment.poling_sign(z));
  const double theta = segment.mismatch_phase_offset +
                       (frame == Frame::Lab ? segment.accumulated_mismatch(z) : 0.0);
  const Complex phase = std::exp(kI * theta);
  XpmKernels xpm;
  if (s.gamma_xpm_s != 0 || s.gamma_xpm_i != 0) {
    xpm.have = true;
    xpm.acf = pump_autocorrelation(pump_at_z.amplitudes, pump_at_z.mode.grid.delta_omega);
  }
  return build_squeezer_generator(segment, z, pump_at_z.amplitudes, pump_at_z.mode.grid,
                                  gamma / std::sqrt(2.0 * kPi) * phase, signal, idler, frame,
                                  split, xpm, s.gamma_xpm_s, s.gamma_xpm_i);
}

QGenerator build_sfwm_generator(const PumpField& pump1_at_z, const PumpField& pump2_at_z,
                                const SegmentProfile& segment, double z,
                                const FrequencyGrid& signal, const FrequencyGrid& idler,
                                Frame frame, const std::optional<FrameSplit>& split) {
  if (segment.process != ProcessKind::Sfwm)
    throw std::invalid_argument("build_sfwm_generator expects an SFWM segment");
  const SegmentSample s = segment.at(z);
  if (s.group_velocity.pump2 <= 0)
    throw std::invalid_argument("SFWM segments must provide a pump2 group velocity "
                                "(equal to pump for degenerate pumping)");

  const FrequencyGrid& g1 = pump1_at_z.mode.grid;
  const FrequencyGrid& g2 = pump2_at_z.mode.grid;
  if (!g1.same_spacing(g2)) throw std::invalid_argument("pump grids must share delta_omega");
  const FrequencyGrid bgrid = sum_lattice(g1, g2);
  const double dw = g1.delta_omega;

  // Pump-pump walk-off phase accumulated up to z (trapezoid; exact for the
  // piecewise-linear profile interpolation).
  double pump_walkoff = 0;
  {
    const SegmentSample s0 = segment.at(0.0);
    const double r0 = 1.0 / s0.group_velocity.pump - 1.0 / s0.group_velocity.pump2;
    const double rz = 1.0 / s.group_velocity.pump - 1.0 / s.group_velocity.pump2;
    pump_walkoff = 0.5 * (r0 + rz) * z;
  }

  // B_p(w) = sum_{w'} beta1(w - w') beta2(w') exp(-i T_pp (w' - wbar2)) dw
  Arraycd bvals = Arraycd::Zero(bgrid.n_points);
  const Index n1 = g1.n_points;
  const Index n2 = g2.n_points;
  for (Index k = 0; k < bgrid.n_points; ++k) {
    Complex sum{0, 0};
    const Index j2_lo = std::max<Index>(0, k - (n1 - 1));
    const Index j2_hi = std::min<Index>(n2 - 1, k);
    for (Index j2 = j2_lo; j2 <= j2_hi; ++j2) {
      const double nu2 = g2.omega(j2) - pump2_at_z.mode.center_frequency;
      sum += pump1_at_z.amplitudes(k - j2) * pump2_at_z.amplitudes(j2) *
             std::exp(-kI * (pump_walkoff * nu2));
    }
    bvals(k) = sum * dw;
  }

  const double gamma = s.gamma * static_cast<double>(segment.poling_sign(z));
  const double theta = segment.mismatch_phase_offset +
                       (frame == Frame::Lab ? segment.accumulated_mismatch(z) : 0.0);
  const Complex phase = std::exp(kI * theta);
  XpmKernels xpm;
  if (s.gamma_xpm_s != 0 || s.gamma_xpm_i != 0) {
    xpm.have = true;
    xpm.acf = pump_autocorrelation(pump1_at_z.amplitudes, dw);
    xpm.acf.values += pump_autocorrelation(pump2_at_z.amplitudes, dw).values;
  }
  return build_squeezer_generator(segment, z, bvals, bgrid, gamma / (2.0 * kPi) * phase, signal,
                                  idler, frame, split, xpm, s.gamma_xpm_s, s.gamma_xpm_i);
}

QGenerator build_qfc_generator(const SegmentProfile& segment, double z, const PumpField& pump_at_z,
                               const FrequencyGrid& signal, const FrequencyGrid& idler, Frame frame,
                               const std::optional<FrameSplit>& split_opt) {
  if (segment.process != ProcessKind::Qfc)
    throw std::invalid_argument("build_qfc_generator expects a QFC segment");
  if (!signal.same_spacing(idler))
    throw std::invalid_argument("signal and idler grids must share delta_omega");
  const SegmentSample s = segment.at(z);
  const double dw = signal.delta_omega;
  const Index ns = signal.n_points;
  const Index ni = idler.n_points;

  FrameSplit split{0, 0};
  if (frame == Frame::CoRotating) split = split_opt ? *split_opt : default_frame_split(segment, z);

  QGenerator q;
  q.kind = PropagatorKind::Converter;
  q.g = walkoff_diagonal(segment, ModeLabel::Signal, z, signal, split.dks)
            .cast<Complex>()
            .matrix()
            .asDiagonal();
  q.h = walkoff_diagonal(segment, ModeLabel::Idler, z, idler, split.dki)
            .cast<Complex>()
            .matrix()
            .asDiagonal();
  if (s.gamma_xpm_s != 0 || s.gamma_xpm_i != 0) {
    const PumpAutocorrelation acf =
        pump_autocorrelation(pump_at_z.amplitudes, pump_at_z.mode.grid.delta_omega);
    add_xpm(q.g, acf, s.gamma_xpm_s, dw, false);
    add_xpm(q.h, acf, s.gamma_xpm_i, dw, false);
  }

  const double gamma = s.gamma * static_cast<double>(segment.poling_sign(z));
  const double theta = segment.mismatch_phase_offset +
                       (frame == Frame::Lab ? segment.accumulated_mismatch(z) : 0.0);
  const Complex phase = std::exp(-kI * theta);

  // Signal row couples to the idler through conj(beta_p(w_i - w_s)); the
  // difference w_i(m) - w_s(n) starts at i_start - s_end for (n, m) = (ns-1, 0).
  PumpLattice lattice;
  lattice.amps = &pump_at_z.amplitudes;
  lattice.base = lattice_base(idler.omega_start - signal.omega_end(), pump_at_z.mode.grid);

  q.f.resize(ns, ni);
  const Complex pref = gamma / std::sqrt(2.0 * kPi) * phase * dw;
  for (Index n = 0; n < ns; ++n)
    for (Index m = 0; m < ni; ++m) q.f(n, m) = pref * std::conj(lattice.at(m + (ns - 1 - n)));
  return q;
}

TransferMatrix step_exponential(const QGenerator& q, double dz, const FrequencyGrid& signal,
                                const FrequencyGrid& idler) {
  if (dz <= 0) throw std::invalid_argument("step length must be positive");
  const Matrixcd x = kI * dz * q.assemble();
  const Matrixcd u = x.exp();
  if (!u.allFinite()) throw NumericalError("matrix exponential produced non-finite entries");
  return TransferMatrix::from_full(u, q.kind, signal, idler);
}

namespace {

Matrixcd matrix_power(const Matrixcd& m, long k) {
  Matrixcd result = Matrixcd::Identity(m.rows(), m.cols());
  Matrixcd base = m;
  while (k > 0) {
    if (k & 1) result = (result * base).eval();
    base = (base * base).eval();
    k >>= 1;
  }
  return result;
}

struct Step {
  double z0 = 0;
  double dz = 0;
  int sign = 1;
};

std::vector<Step> make_step_plan(const SegmentProfile& segment, const PropagateOptions& options) {
  std::vector<Step> steps;
  if (segment.poling) {
    const auto& pol = *segment.poling;
    for (Index d = 0; d < pol.domain_count(); ++d) {
      const double a = pol.boundaries[static_cast<size_t>(d)];
      const double b = pol.boundaries[static_cast<size_t>(d) + 1];
      Index sub = 1;
      if (options.dz > 0)
        sub = std::max<Index>(1, static_cast<Index>(std::ceil((b - a) / options.dz - 1e-9)));
      const double h = (b - a) / static_cast<double>(sub);
      for (Index j = 0; j < sub; ++j)
        steps.push_back({a + h * static_cast<double>(j), h, pol.signs[static_cast<size_t>(d)]});
    }
    if (pol.end() < segment.length * (1 - 1e-12))
      steps.push_back({pol.end(), segment.length - pol.end(), 1});
    return steps;
  }

  double dz = options.dz;
  if (dz <= 0) dz = segment.is_uniform() ? segment.length : segment.length / 2000.0;
  const Index n = std::max<Index>(1, static_cast<Index>(std::llround(segment.length / dz)));
  if (std::abs(static_cast<double>(n) * dz - segment.length) > 1e-9 * segment.length)
    throw std::invalid_argument("dz must divide the segment length");
  const double h = segment.length / static_cast<double>(n);
  for (Index j = 0; j < n; ++j) steps.push_back({h * static_cast<double>(j), h, 1});
  return steps;
}

QGenerator build_step_generator(const SegmentProfile& segment, double z, const PumpTrajectory& pump,
                                const PumpTrajectory* pump2, const FrequencyGrid& signal,
                                const FrequencyGrid& idler, Frame frame,
                                const std::optional<FrameSplit>& split) {
  switch (segment.process) {
    case ProcessKind::Pdc:
      return build_q_generator(segment, z, pump.field_at(z), signal, idler, frame, split);
    case ProcessKind::Qfc:
      return build_qfc_generator(segment, z, pump.field_at(z), signal, idler, frame, split);
    case ProcessKind::Sfwm: {
      const PumpTrajectory& p2 = pump2 ? *pump2 : pump;
      return build_sfwm_generator(pump.field_at(z), p2.field_at(z), segment, z, signal, idler,
                                  frame, split);
    }
  }
  throw std::invalid_argument("unknown process kind");
}

void check_aliasing(const SegmentProfile& segment, const std::vector<Step>& steps) {
  for (const auto& st : steps) {
    const double mismatch = std::abs(segment.central_mismatch(st.z0 + 0.5 * st.dz));
    if (mismatch > 0 && st.dz > 0.5 * kPi / mismatch * (1.0 + 1e-9))
      throw std::invalid_argument(
          "lab-frame step exceeds half the local coherence length; reduce dz or use the "
          "co-rotating frame");
  }
}

void warn_if_pump_band_narrow(const SegmentProfile& segment, const PumpTrajectory& pump,
                              const FrequencyGrid& signal, const FrequencyGrid& idler) {
  const FrequencyGrid& pg = pump.mode.grid;
  double lo = 0, hi = 0;
  if (segment.process == ProcessKind::Qfc) {
    lo = idler.omega_start - signal.omega_end();
    hi = idler.omega_end() - signal.omega_start;
  } else {
    lo = signal.omega_start + idler.omega_start;
    hi = signal.omega_end() + idler.omega_end();
  }
  if (pg.omega_start > lo + 1e-9 * pg.delta_omega || pg.omega_end() < hi - 1e-9 * pg.delta_omega)
    std::fprintf(stderr,
                 "nlo: warning: pump grid does not cover the full signal/idler band; "
                 "out-of-range couplings are zero-filled\n");
}

bool trajectory_is_constant(const PumpTrajectory& traj) {
  for (size_t k = 1; k < traj.amplitudes.size(); ++k)
    if (!(traj.amplitudes[k] == traj.amplitudes[0]).all()) return false;
  return true;
}

TransferMatrix propagate_impl(const SegmentProfile& segment, const PumpTrajectory& pump,
                              const PumpTrajectory* pump2, const FrequencyGrid& signal,
                              const FrequencyGrid& idler, const PropagateOptions& options) {
  segment.validate();
  warn_if_pump_band_narrow(segment, pump, signal, idler);

  const Frame frame = options.frame;
  const PropagatorKind kind =
      segment.process == ProcessKind::Qfc ? PropagatorKind::Converter : PropagatorKind::Squeezer;

  std::vector<Step> steps = make_step_plan(segment, options);
  if (frame == Frame::Lab) check_aliasing(segment, steps);

  auto split_at = [&](double z) -> std::optional<FrameSplit> {
    if (frame != Frame::CoRotating) return std::nullopt;
    return default_frame_split(segment, z);
  };

  bool sfwm_z_dependent_kernel = false;
  if (segment.process == ProcessKind::Sfwm) {
    const SegmentSample s0 = segment.at(0.0);
    sfwm_z_dependent_kernel =
        std::abs(1.0 / s0.group_velocity.pump - 1.0 / s0.group_velocity.pump2) > 0;
  }
  const bool pump_constant =
      trajectory_is_constant(pump) && (!pump2 || trajectory_is_constant(*pump2));
  const bool cacheable = frame == Frame::CoRotating && segment.is_uniform() && pump_constant &&
                         !sfwm_z_dependent_kernel;

  const Index dim = signal.n_points + idler.n_points;
  Matrixcd u = Matrixcd::Identity(dim, dim);
  double theta_s = 0, theta_i = 0;

  if (cacheable) {
    // Q depends on z only through the poling sign; at most a handful of
    // distinct step exponentials, combined with run-length binary powers.
    const Step& first = steps.front();
    QGenerator q_plus =
        build_step_generator(segment, first.z0 + 0.5 * first.dz, pump, pump2, signal, idler,
                             frame, split_at(0.0));
    if (first.sign < 0) q_plus.f = -q_plus.f;  // cache is normalized to sign +1

    std::vector<std::pair<std::pair<double, int>, Matrixcd>> cache;
    auto step_matrix = [&](double dz, int sign) -> const Matrixcd& {
      for (auto& entry : cache)
        if (std::abs(entry.first.first - dz) <= 1e-12 * dz && entry.first.second == sign)
          return entry.second;
      QGenerator q = q_plus;
      if (sign < 0) q.f = -q.f;
      cache.emplace_back(std::make_pair(dz, sign), step_exponential(q, dz, signal, idler).full());
      return cache.back().second;
    };

    size_t k = 0;
    while (k < steps.size()) {
      const double w = steps[k].dz;
      size_t end = k + 1;
      const bool alternating = end < steps.size() && steps[end].sign != steps[k].sign &&
                               std::abs(steps[end].dz - w) <= 1e-12 * w;
      while (end < steps.size() && std::abs(steps[end].dz - w) <= 1e-12 * w) {
        const int expected =
            alternating ? ((end - k) % 2 == 0 ? steps[k].sign : -steps[k].sign) : steps[k].sign;
        if (steps[end].sign != expected) break;
        ++end;
      }
      const long count = static_cast<long>(end - k);
      const Matrixcd& ua = step_matrix(w, steps[k].sign);
      if (!alternating) {
        u = matrix_power(ua, count) * u;
      } else {
        const Matrixcd& ub = step_matrix(w, -steps[k].sign);
        u = matrix_power(ub * ua, count / 2) * u;
        if (count % 2 == 1) u = ua * u;
      }
      k = end;
    }
    if (frame == Frame::CoRotating) {
      const FrameSplit split = *split_at(0.0);
      theta_s = split.dks * segment.length;
      theta_i = split.dki * segment.length;
    }
  } else {
    for (const auto& st : steps) {
      const double zm = st.z0 + 0.5 * st.dz;
      const auto split = split_at(zm);
      const QGenerator q = build_step_generator(segment, zm, pump, pump2, signal, idler, frame, split);
      u = (step_exponential(q, st.dz, signal, idler).full() * u).eval();
      if (split) {
        theta_s += split->dks * st.dz;
        theta_i += split->dki * st.dz;
      }
    }
  }

  TransferMatrix result = TransferMatrix::from_full(u, kind, signal, idler);
  if (frame == Frame::CoRotating) result = restore_lab_frame(result, theta_s, theta_i);
  if (!result.ss.allFinite() || !result.si.allFinite() || !result.is.allFinite() ||
      !result.ii.allFinite())
    throw NumericalError("propagation produced non-finite entries");
  return result;
}

}  // namespace

TransferMatrix propagate_segment(const SegmentProfile& segment, const PumpTrajectory& pump,
                                 const FrequencyGrid& signal, const FrequencyGrid& idler,
                                 const PropagateOptions& options) {
  if (segment.process == ProcessKind::Sfwm)
    return propagate_impl(segment, pump, &pump, signal, idler, options);
  return propagate_impl(segment, pump, nullptr, signal, idler, options);
}

TransferMatrix restore_lab_frame(const TransferMatrix& u, double theta_s, double theta_i) {
  // a_s rows gain exp(i theta_s); the idler rows gain exp(-i theta_i) on
  // a_i^dag (squeezer), which maps to exp(+i theta_i) on the stored kernels.
  // Converter rows act on a_i directly with the same stored-kernel factor.
  const Complex ps = std::exp(kI * theta_s);
  const Complex pi_factor = std::exp(kI * theta_i);
  TransferMatrix out = u;
  out.ss *= ps;
  out.si *= ps;
  out.is *= pi_factor;
  out.ii *= pi_factor;
  return out;
}

TransferMatrix compose(const TransferMatrix& first, const TransferMatrix& second) {
  if (first.kind != second.kind)
    throw std::invalid_argument("cannot compose different propagator kinds");
  if (!(first.signal_grid == second.signal_grid) || !(first.idler_grid == second.idler_grid))
    throw std::invalid_argument("cannot compose transfer matrices on different grids");
  return TransferMatrix::from_full(second.full() * first.full(), first.kind, first.signal_grid,
                                   first.idler_grid);
}

}  // namespace nlo
