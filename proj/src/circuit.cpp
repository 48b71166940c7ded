#include "nlo/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nlo {

LinearElement LinearElement::from_absolute_delays(double pump_delay, double signal_delay,
                                                  double idler_delay) {
  LinearElement el;
  el.delay_signal = signal_delay - pump_delay;
  el.delay_idler = idler_delay - pump_delay;
  return el;
}

Index Circuit::knob_index() const {
  for (size_t k = 0; k < elements.size(); ++k) {
    if (const auto* el = std::get_if<LinearElement>(&elements[k]); el && el->phase_knob)
      return static_cast<Index>(k);
  }
  return -1;
}

void Circuit::validate() const {
  if (elements.empty()) throw std::invalid_argument("circuit has no elements");
  bool has_segment = false;
  for (const auto& el : elements)
    if (std::holds_alternative<SegmentProfile>(el)) {
      std::get<SegmentProfile>(el).validate();
      has_segment = true;
    }
  if (!has_segment) throw std::invalid_argument("circuit needs at least one nonlinear segment");
}

namespace {

struct ElementPhases {
  Arraycd ds;  // per signal frequency mode
  Arraycd di;  // per idler frequency mode
};

ElementPhases element_phases(const LinearElement& el, const FrequencyGrid& signal,
                             const FrequencyGrid& idler, PropagatorKind kind) {
  const double ts = db_to_amplitude(el.loss_signal_db);
  const double ti = db_to_amplitude(el.loss_idler_db);
  const double idler_phase_sign = kind == PropagatorKind::Squeezer ? 1.0 : -1.0;
  ElementPhases out;
  const Arrayd nus = signal.detunings();
  const Arrayd nui = idler.detunings();
  out.ds = (ts * (kI * (nus * el.delay_signal + 0.5 * el.phase)).exp());
  out.di = (ti * (kI * (nui * el.delay_idler + idler_phase_sign * 0.5 * el.phase)).exp());
  return out;
}

}  // namespace

TransferMatrix apply_linear_element(const TransferMatrix& u, const LinearElement& element) {
  const ElementPhases ph = element_phases(element, u.signal_grid, u.idler_grid, u.kind);
  TransferMatrix out = u;
  out.ss = ph.ds.matrix().asDiagonal() * u.ss;
  out.si = ph.ds.matrix().asDiagonal() * u.si;
  // Stored idler kernels transform with the unconjugated mode phase for both
  // kinds (the squeezer's conjugation lives in full()).
  out.is = ph.di.matrix().asDiagonal() * u.is;
  out.ii = ph.di.matrix().asDiagonal() * u.ii;
  return out;
}

CovarianceState apply_linear_element(const CovarianceState& state, const LinearElement& element,
                                     PropagatorKind kind) {
  // Phases first (unit-modulus diagonal symplectic), then the loss map; the
  // two commute, matching the lumped treatment of routing elements.
  const Index ns = state.n_signal();
  const Index ni = state.n_idler();
  const Index n = ns + ni;
  ElementPhases ph = element_phases(element, state.signal_grid, state.idler_grid, kind);
  // strip the loss scaling; covariance loss is applied through apply_loss
  const double ts = db_to_amplitude(element.loss_signal_db);
  const double ti = db_to_amplitude(element.loss_idler_db);
  ph.ds /= ts;
  ph.di /= ti;

  SymplecticMap map;
  map.m = Matrixcd::Zero(2 * n, 2 * n);
  for (Index k = 0; k < ns; ++k) {
    map.m(k, k) = ph.ds(k);
    map.m(n + k, n + k) = std::conj(ph.ds(k));
  }
  for (Index k = 0; k < ni; ++k) {
    map.m(ns + k, ns + k) = ph.di(k);
    map.m(n + ns + k, n + ns + k) = std::conj(ph.di(k));
  }
  CovarianceState out = evolve(state, map);
  if (ts < 1 || ti < 1) out = apply_loss(out, ts, ti);
  return out;
}

namespace {

PumpTrajectory pump_through_segment(const PumpField& pump, const SegmentProfile& segment,
                                    double spm_dz) {
  bool has_spm = false;
  for (const auto& s : segment.samples) has_spm |= s.gamma_spm != 0;
  if (!has_spm) return PumpTrajectory::constant(pump);
  const double dz = spm_dz > 0 ? spm_dz : segment.length / 16.0;
  return evolve_pump_spm(pump, segment, dz);
}

}  // namespace

CircuitRunResult run_circuit(const Circuit& circuit, const PumpField& pump,
                             const FrequencyGrid& signal, const FrequencyGrid& idler,
                             const CircuitRunOptions& options) {
  circuit.validate();
  pump.validate();

  PropagatorKind kind = PropagatorKind::Squeezer;
  for (const auto& el : circuit.elements)
    if (std::holds_alternative<SegmentProfile>(el) &&
        std::get<SegmentProfile>(el).process == ProcessKind::Qfc)
      kind = PropagatorKind::Converter;

  const Index knob = circuit.knob_index();

  CircuitRunResult result;
  PumpField current_pump = pump;
  TransferMatrix u = TransferMatrix::identity(kind, signal, idler);
  std::optional<CovarianceState> state;
  if (options.with_loss) state = CovarianceState::vacuum(signal, idler);

  Index index = 0;
  for (const auto& el : circuit.elements) {
    if (std::holds_alternative<SegmentProfile>(el)) {
      const SegmentProfile& segment = std::get<SegmentProfile>(el);
      const PumpTrajectory traj = pump_through_segment(current_pump, segment, options.pump_spm_dz);
      if (options.with_loss) {
        LossyPropagateOptions lopt;
        lopt.frame = options.frame;
        lopt.dz = options.dz;
        lopt.sections = options.loss_sections;
        state = propagate_segment_lossy(segment, traj, *state, lopt);
      } else {
        PropagateOptions popt;
        popt.frame = options.frame;
        popt.dz = options.dz;
        u = compose(u, propagate_segment(segment, traj, signal, idler, popt));
      }
      current_pump = traj.final_field();
      if (options.with_loss) {
        const double alpha_p = segment.at(0.5 * segment.length).loss.pump;
        if (alpha_p > 0)
          current_pump = apply_pump_loss(current_pump, std::exp(-0.5 * alpha_p * segment.length));
      }
    } else {
      LinearElement element = std::get<LinearElement>(el);
      if (index == knob && options.phase_override) element.phase = *options.phase_override;
      if (options.with_loss)
        state = apply_linear_element(*state, element, kind);
      else
        u = apply_linear_element(u, element);
      if (element.loss_pump_db > 0)
        current_pump = apply_pump_loss(current_pump, db_to_amplitude(element.loss_pump_db));
    }
    ++index;
  }

  result.pump_out = current_pump;
  if (options.with_loss) {
    result.state = state;
    result.metrics.mean_photons_signal = state->mean_photons_signal();
    result.metrics.mean_photons_idler = state->mean_photons_idler();
    result.metrics.schmidt_r = squeezing_from_covariance(*state).r;
  } else {
    result.u = u;
    const SchmidtDecomposition schmidt = schmidt_decompose(u);
    result.metrics.schmidt_r = schmidt.r;
    result.metrics.mean_photons_signal = mean_photon_number(u);
    result.metrics.mean_photons_idler = result.metrics.mean_photons_signal;
    if (kind == PropagatorKind::Squeezer && schmidt.r.size() > 0 && schmidt.r(0) > 0)
      result.metrics.purity = purity_and_schmidt_number(schmidt.r).purity;
  }
  return result;
}

PhaseSweepResult sweep_phase(const Circuit& circuit, const PumpField& pump,
                             const FrequencyGrid& signal, const FrequencyGrid& idler,
                             const Arrayd& phases, const CircuitRunOptions& options, Index jobs) {
  if (phases.size() < 2) throw std::invalid_argument("phase sweep needs at least two points");
  if (circuit.knob_index() < 0)
    throw std::invalid_argument("phase sweep needs an element with phase_knob set");
  const double span = phases.maxCoeff() - phases.minCoeff();
  if (span < 2.0 * kPi * (1.0 - 1e-9))
    throw std::invalid_argument("phase sweep must cover at least 2 pi");

  PropagatorKind kind = PropagatorKind::Squeezer;
  for (const auto& el : circuit.elements)
    if (std::holds_alternative<SegmentProfile>(el) &&
        std::get<SegmentProfile>(el).process == ProcessKind::Qfc)
      kind = PropagatorKind::Converter;

  PhaseSweepResult result;
  result.phases = phases;
  result.value = Arrayd::Zero(phases.size());

  auto worker = [&](Index first, Index stride) {
    for (Index k = first; k < phases.size(); k += stride) {
      CircuitRunOptions opt = options;
      opt.phase_override = phases(k);
      const CircuitRunResult run = run_circuit(circuit, pump, signal, idler, opt);
      if (kind == PropagatorKind::Converter) {
        const double r1 = run.metrics.schmidt_r.size() > 0 ? run.metrics.schmidt_r(0) : 0.0;
        result.value(k) = std::sin(r1) * std::sin(r1);
      } else {
        result.value(k) = run.metrics.mean_photons_signal;
      }
    }
  };

  const Index n_jobs = std::max<Index>(1, std::min<Index>(jobs, phases.size()));
  if (n_jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(n_jobs));
    for (Index t = 0; t < n_jobs; ++t) threads.emplace_back(worker, t, n_jobs);
    for (auto& t : threads) t.join();
  }

  const double vmax = result.value.maxCoeff();
  const double vmin = result.value.minCoeff();
  result.visibility = (vmax + vmin) > 0 ? (vmax - vmin) / (vmax + vmin) : 0.0;
  return result;
}

std::vector<StageMetrics> cascade_stages(const SegmentProfile& stage,
                                         const std::optional<LinearElement>& twoc, Index n_stages,
                                         const PumpField& pump, const FrequencyGrid& signal,
                                         const FrequencyGrid& idler,
                                         const CircuitRunOptions& options) {
  if (n_stages < 1) throw std::invalid_argument("cascade needs at least one stage");
  const PumpTrajectory traj = pump_through_segment(pump, stage, options.pump_spm_dz);
  PropagateOptions popt;
  popt.frame = options.frame;
  popt.dz = options.dz;
  const TransferMatrix u_stage = propagate_segment(stage, traj, signal, idler, popt);

  std::vector<StageMetrics> metrics;
  metrics.reserve(static_cast<size_t>(n_stages));
  TransferMatrix u = u_stage;
  for (Index n = 1; n <= n_stages; ++n) {
    if (n > 1) {
      TransferMatrix previous = u;
      if (twoc) previous = apply_linear_element(previous, *twoc);
      u = compose(previous, u_stage);
    }
    StageMetrics m;
    m.stages = n;
    const SchmidtDecomposition schmidt = schmidt_decompose(u);
    m.leading_r = schmidt.r.size() > 0 ? schmidt.r(0) : 0.0;
    m.mean_photons = mean_photon_number(u);
    const Arrayd marginal = u.si.cwiseAbs2().rowwise().sum();
    m.bandwidth = fwhm(u.signal_grid.omegas(), marginal);
    metrics.push_back(m);
  }
  return metrics;
}

std::vector<PathElement> circuit_path(const Circuit& circuit) {
  std::vector<PathElement> path;
  for (const auto& el : circuit.elements) {
    PathElement p;
    if (std::holds_alternative<SegmentProfile>(el)) {
      p.segment = &std::get<SegmentProfile>(el);
    } else {
      const auto& lin = std::get<LinearElement>(el);
      p.delay_signal = lin.delay_signal;
      p.delay_idler = lin.delay_idler;
    }
    path.push_back(p);
  }
  return path;
}

double fwhm(const Arrayd& x, const Arrayd& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm needs matched arrays");
  Index peak = 0;
  y.maxCoeff(&peak);
  const double half = 0.5 * y(peak);
  double left = x(0), right = x(x.size() - 1);
  for (Index k = peak; k > 0; --k) {
    if (y(k - 1) <= half) {
      const double t = (half - y(k - 1)) / (y(k) - y(k - 1));
      left = x(k - 1) + t * (x(k) - x(k - 1));
      break;
    }
  }
  for (Index k = peak; k + 1 < y.size(); ++k) {
    if (y(k + 1) <= half) {
      const double t = (y(k) - half) / (y(k) - y(k + 1));
      right = x(k) + t * (x(k + 1) - x(k));
      break;
    }
  }
  return right - left;
}

}  // namespace nlo
