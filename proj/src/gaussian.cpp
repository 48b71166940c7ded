#include "nlo/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nlo {

CovarianceState CovarianceState::vacuum(const FrequencyGrid& signal, const FrequencyGrid& idler) {
  CovarianceState state;
  state.signal_grid = signal;
  state.idler_grid = idler;
  const Index n = 2 * (signal.n_points + idler.n_points);
  state.sigma = Matrixcd::Identity(n, n);
  return state;
}

double CovarianceState::mean_photons() const {
  const Index n = n_modes();
  return (sigma.diagonal().head(n).real().sum() - static_cast<double>(n)) / 2.0;
}

double CovarianceState::mean_photons_signal() const {
  const Index n = n_signal();
  return (sigma.diagonal().head(n).real().sum() - static_cast<double>(n)) / 2.0;
}

double CovarianceState::mean_photons_idler() const {
  const Index n = n_idler();
  return (sigma.diagonal().segment(n_signal(), n).real().sum() - static_cast<double>(n)) / 2.0;
}

double SymplecticMap::symplectic_defect() const {
  const Index n = m.rows() / 2;
  Vectorcd kdiag(2 * n);
  kdiag.head(n).setConstant(1.0);
  kdiag.tail(n).setConstant(-1.0);
  return (m * kdiag.asDiagonal() * m.adjoint() - Matrixcd(kdiag.asDiagonal())).norm();
}

SymplecticMap symplectic_from_transfer(const TransferMatrix& u) {
  if (u.structure_defect() > 1e-6)
    throw std::invalid_argument("transfer matrix violates its structure condition");
  const Index ns = u.n_signal();
  const Index ni = u.n_idler();
  const Index n = ns + ni;
  SymplecticMap map;
  map.m = Matrixcd::Zero(2 * n, 2 * n);
  if (u.kind == PropagatorKind::Squeezer) {
    map.m.block(0, 0, ns, ns) = u.ss;
    map.m.block(0, n + ns, ns, ni) = u.si;
    map.m.block(ns, ns, ni, ni) = u.ii;
    map.m.block(ns, n, ni, ns) = u.is;
    map.m.block(n, ns, ns, ni) = u.si.conjugate();
    map.m.block(n, n, ns, ns) = u.ss.conjugate();
    map.m.block(n + ns, 0, ni, ns) = u.is.conjugate();
    map.m.block(n + ns, n + ns, ni, ni) = u.ii.conjugate();
  } else {
    map.m.block(0, 0, ns, ns) = u.ss;
    map.m.block(0, ns, ns, ni) = u.si;
    map.m.block(ns, 0, ni, ns) = u.is;
    map.m.block(ns, ns, ni, ni) = u.ii;
    map.m.block(n, n, n, n) = map.m.block(0, 0, n, n).conjugate();
  }
  return map;
}

CovarianceState evolve(const CovarianceState& state, const SymplecticMap& map) {
  if (map.m.rows() != state.sigma.rows())
    throw std::invalid_argument("symplectic map and covariance dimensions differ");
  CovarianceState out = state;
  out.sigma = map.m * state.sigma * map.m.adjoint();
  out.sigma = 0.5 * (out.sigma + out.sigma.adjoint()).eval();
  return out;
}

CovarianceState apply_loss(const CovarianceState& state, const Arrayd& t_signal,
                           const Arrayd& t_idler) {
  if (t_signal.size() != state.n_signal() || t_idler.size() != state.n_idler())
    throw std::invalid_argument("transmittance array sizes must match the mode counts");
  if ((t_signal < 0).any() || (t_signal > 1).any() || (t_idler < 0).any() || (t_idler > 1).any())
    throw std::invalid_argument("amplitude transmittance must lie in [0, 1]");
  const Index n = state.n_modes();
  Arrayd t(2 * n);
  t.head(state.n_signal()) = t_signal;
  t.segment(state.n_signal(), state.n_idler()) = t_idler;
  t.tail(n) = t.head(n);
  CovarianceState out = state;
  // sigma -> T sigma T + (1 - T^2), T real diagonal.
  out.sigma = (t.matrix().asDiagonal() * state.sigma * t.matrix().asDiagonal()).eval();
  out.sigma.diagonal().array() += (1.0 - t * t).cast<Complex>();
  return out;
}

CovarianceState apply_loss(const CovarianceState& state, double t_signal, double t_idler) {
  return apply_loss(state, Arrayd::Constant(state.n_signal(), t_signal),
                    Arrayd::Constant(state.n_idler(), t_idler));
}

namespace {

// log det[(1 + sigma_S)/2] via Cholesky; sigma_S spans the conjugate pairs of
// the selected modes.
double log_det_half_one_plus_sigma(const CovarianceState& state, const std::vector<Index>& modes) {
  const Index n = state.n_modes();
  const Index k = static_cast<Index>(modes.size());
  Matrixcd sub(2 * k, 2 * k);
  for (Index r = 0; r < 2 * k; ++r) {
    const Index gr = (r < k) ? modes[static_cast<size_t>(r)] : modes[static_cast<size_t>(r - k)] + n;
    for (Index c = 0; c < 2 * k; ++c) {
      const Index gc = (c < k) ? modes[static_cast<size_t>(c)] : modes[static_cast<size_t>(c - k)] + n;
      sub(r, c) = state.sigma(gr, gc);
    }
  }
  Matrixcd m = 0.5 * (Matrixcd::Identity(2 * k, 2 * k) + sub);
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::LLT<Matrixcd> llt(m);
  if (llt.info() != Eigen::Success) {
    // Guard against marginal positivity loss from rounding.
    m.diagonal().array() += 1e-10;
    llt.compute(m);
    if (llt.info() != Eigen::Success)
      throw NumericalError("covariance is not physical: det[(1+sigma)/2] not positive");
  }
  double logdet = 0;
  for (Index j = 0; j < m.rows(); ++j) logdet += 2.0 * std::log(std::real(llt.matrixL()(j, j)));
  return logdet;
}

std::vector<Index> signal_indices(const CovarianceState& state) {
  std::vector<Index> v(static_cast<size_t>(state.n_signal()));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

std::vector<Index> idler_indices(const CovarianceState& state) {
  std::vector<Index> v(static_cast<size_t>(state.n_idler()));
  std::iota(v.begin(), v.end(), state.n_signal());
  return v;
}

}  // namespace

double prob_vacuum(const CovarianceState& state, const std::vector<Index>& modes) {
  if (modes.empty()) return 1.0;
  for (Index m : modes)
    if (m < 0 || m >= state.n_modes()) throw std::invalid_argument("mode index out of range");
  return std::exp(-0.5 * log_det_half_one_plus_sigma(state, modes));
}

double prob_vacuum_signal(const CovarianceState& state) {
  return prob_vacuum(state, signal_indices(state));
}

double prob_vacuum_idler(const CovarianceState& state) {
  return prob_vacuum(state, idler_indices(state));
}

double prob_click(const CovarianceState& state, const std::vector<Index>& modes) {
  return 1.0 - prob_vacuum(state, modes);
}

double prob_coincidence(const CovarianceState& state, const std::vector<Index>& modes_a,
                        const std::vector<Index>& modes_b) {
  for (Index a : modes_a)
    for (Index b : modes_b)
      if (a == b) throw std::invalid_argument("coincidence subsets must be disjoint");
  std::vector<Index> both = modes_a;
  both.insert(both.end(), modes_b.begin(), modes_b.end());
  return 1.0 - prob_vacuum(state, modes_a) - prob_vacuum(state, modes_b) +
         prob_vacuum(state, both);
}

HeraldingEfficiency heralding_efficiency(const CovarianceState& state) {
  const auto s = signal_indices(state);
  const auto i = idler_indices(state);
  const double coin = prob_coincidence(state, s, i);
  const double on_s = prob_click(state, s);
  const double on_i = prob_click(state, i);
  if (on_s <= 0 || on_i <= 0)
    throw std::domain_error("heralding efficiency undefined: click probability is zero");
  return {coin / on_s, coin / on_i};
}

SqueezingSpectrum squeezing_from_covariance(const CovarianceState& state) {
  const Index n = state.n_modes();
  const double asym = (state.sigma - state.sigma.adjoint()).norm();
  if (asym > 1e-8 * std::max(1.0, state.sigma.norm()))
    throw NumericalError("covariance matrix is not Hermitian");

  // Quadrature transform W: x = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2);
  // W is unitary, so the vacuum stays the identity and det sigma is preserved.
  Matrixcd w = Matrixcd::Zero(2 * n, 2 * n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < n; ++j) {
    w(j, j) = inv_sqrt2;
    w(j, j + n) = inv_sqrt2;
    w(j + n, j) = -kI * inv_sqrt2;
    w(j + n, j + n) = kI * inv_sqrt2;
  }
  Matrixcd quad = w * state.sigma * w.adjoint();
  Matrixd quad_real = quad.real();
  quad_real = 0.5 * (quad_real + quad_real.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrixd> solver(quad_real);
  if (solver.info() != Eigen::Success) throw NumericalError("quadrature eigendecomposition failed");
  Arrayd lambda = solver.eigenvalues().array().reverse();  // descending

  SqueezingSpectrum spec;
  spec.quad_eigenvalues = lambda.matrix();
  spec.r = Arrayd(n);
  // Anti-squeezed variances come in degenerate pairs; each pair carries one r.
  for (Index k = 0; k < n; ++k) spec.r(k) = 0.5 * std::log(std::max(lambda(2 * k), 1e-300));
  return spec;
}

CovarianceState propagate_segment_lossy(const SegmentProfile& segment, const PumpTrajectory& pump,
                                        const CovarianceState& input,
                                        const LossyPropagateOptions& options) {
  segment.validate();
  const SegmentSample s0 = segment.at(0.0);
  double alpha_max = 0;
  for (ModeLabel m : {ModeLabel::Signal, ModeLabel::Idler})
    alpha_max = std::max(alpha_max, s0.loss.get(m));

  Index sections = options.sections;
  if (sections <= 0) {
    sections = alpha_max > 0
                   ? std::max<Index>(1, static_cast<Index>(std::ceil(alpha_max * segment.length / 0.01)))
                   : 1;
  }

  PropagateOptions popt;
  popt.frame = options.frame;
  popt.dz = options.dz;

  CovarianceState state = input;
  PumpTrajectory traj = pump;
  const double dz_section = segment.length / static_cast<double>(sections);
  for (Index k = 0; k < sections; ++k) {
    const double z0 = dz_section * static_cast<double>(k);
    const double z1 = (k == sections - 1) ? segment.length : z0 + dz_section;
    const SegmentProfile sub = crop_segment(segment, z0, z1);
    const PumpTrajectory sub_pump = traj.crop(z0, z1);
    const TransferMatrix u = propagate_segment(sub, sub_pump, state.signal_grid, state.idler_grid, popt);
    state = evolve(state, symplectic_from_transfer(u));

    const SegmentSample sm = segment.at(0.5 * (z0 + z1));
    const double ts = std::exp(-0.5 * sm.loss.signal * (z1 - z0));
    const double ti = std::exp(-0.5 * sm.loss.idler * (z1 - z0));
    if (ts < 1 || ti < 1) state = apply_loss(state, ts, ti);

    // Classical pump attenuation for the remaining sections.
    const double tp = std::exp(-0.5 * sm.loss.pump * (z1 - z0));
    const double tp2 = std::exp(-0.5 * sm.loss.pump2 * (z1 - z0));
    if (tp < 1 || tp2 < 1) {
      const double factor = segment.process == ProcessKind::Sfwm ? std::sqrt(tp * tp2) : tp;
      for (auto& amps : traj.amplitudes) amps *= factor;
    }
  }
  return state;
}

}  // namespace nlo
