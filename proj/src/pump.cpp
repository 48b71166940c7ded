#include "nlo/pump.hpp"

#include <algorithm>
#include <cmath>

namespace nlo {

PumpAutocorrelation pump_autocorrelation(const Arraycd& amplitudes, double delta_omega) {
  const Index n = amplitudes.size();
  PumpAutocorrelation acf;
  acf.delta_omega = delta_omega;
  acf.values = Arraycd::Zero(2 * n - 1);
  // E_p(k) = sum_j conj(beta_{j-k}) beta_j * dw; direct O(N^2) evaluation.
  for (Index k = -(n - 1); k <= n - 1; ++k) {
    Complex sum{0, 0};
    const Index j0 = std::max<Index>(0, k);
    const Index j1 = std::min<Index>(n - 1, n - 1 + k);
    for (Index j = j0; j <= j1; ++j) sum += std::conj(amplitudes(j - k)) * amplitudes(j);
    acf.values(k + n - 1) = sum * delta_omega;
  }
  return acf;
}

PumpAutocorrelation pump_autocorrelation(const PumpField& pump) {
  pump.validate();
  return pump_autocorrelation(pump.amplitudes, pump.mode.grid.delta_omega);
}

PumpTrajectory PumpTrajectory::constant(const PumpField& pump) {
  PumpTrajectory traj;
  traj.mode = pump.mode;
  traj.z = {0.0};
  traj.amplitudes = {pump.amplitudes};
  return traj;
}

Arraycd PumpTrajectory::at(double zq) const {
  if (amplitudes.empty()) throw std::invalid_argument("empty pump trajectory");
  if (amplitudes.size() == 1 || zq <= z.front()) return amplitudes.front();
  if (zq >= z.back()) return amplitudes.back();
  auto hi = std::upper_bound(z.begin(), z.end(), zq);
  const size_t ih = static_cast<size_t>(std::distance(z.begin(), hi));
  const size_t il = ih - 1;
  const double t = (zq - z[il]) / (z[ih] - z[il]);
  return amplitudes[il] * (1.0 - t) + amplitudes[ih] * t;
}

PumpField PumpTrajectory::field_at(double zq) const {
  PumpField f;
  f.mode = mode;
  f.amplitudes = at(zq);
  return f;
}

PumpField PumpTrajectory::final_field() const {
  PumpField f;
  f.mode = mode;
  f.amplitudes = amplitudes.back();
  return f;
}

PumpTrajectory PumpTrajectory::crop(double z0, double z1) const {
  if (z1 <= z0) throw std::invalid_argument("invalid crop interval");
  PumpTrajectory out;
  out.mode = mode;
  out.z.push_back(0.0);
  out.amplitudes.push_back(at(z0));
  for (size_t k = 0; k < z.size(); ++k) {
    if (z[k] <= z0 + 1e-15 || z[k] >= z1 - 1e-15) continue;
    out.z.push_back(z[k] - z0);
    out.amplitudes.push_back(amplitudes[k]);
  }
  if (z1 - z0 > out.z.back() + 1e-15) {
    out.z.push_back(z1 - z0);
    out.amplitudes.push_back(at(z1));
  }
  return out;
}

namespace {

// d(beta)/dz = i * gamma/(2pi) * sum_w' E_p(w - w') beta(w') dw, with E_p the
// autocorrelation of the stage field itself.
Arraycd spm_derivative(const Arraycd& beta, double gamma, double delta_omega) {
  const Index n = beta.size();
  const PumpAutocorrelation acf = pump_autocorrelation(beta, delta_omega);
  Arraycd out(n);
  const double scale = gamma / (2.0 * kPi) * delta_omega;
  for (Index k = 0; k < n; ++k) {
    Complex sum{0, 0};
    for (Index j = 0; j < n; ++j) sum += acf.at(k - j) * beta(j);
    out(k) = kI * scale * sum;
  }
  return out;
}

// Peak instantaneous power of the pulse, from a direct DFT onto the periodic
// time window of the grid.
double peak_power(const Arraycd& beta, double delta_omega) {
  const Index n = beta.size();
  const double t_span = 2.0 * kPi / delta_omega;
  const Index nt = 4 * n;
  double peak = 0;
  for (Index it = 0; it < nt; ++it) {
    const double t = -0.5 * t_span + t_span * static_cast<double>(it) / static_cast<double>(nt);
    Complex b{0, 0};
    for (Index k = 0; k < n; ++k)
      b += beta(k) * std::exp(-kI * (delta_omega * static_cast<double>(k) * t));
    const double p = std::norm(b) * delta_omega * delta_omega / (2.0 * kPi);
    peak = std::max(peak, p);
  }
  return peak;
}

}  // namespace

PumpTrajectory evolve_pump_spm(const PumpField& pump, const SegmentProfile& segment, double dz) {
  if (dz <= 0) throw std::invalid_argument("pump SPM step must be positive");
  pump.validate();
  segment.validate();

  PumpTrajectory traj;
  traj.mode = pump.mode;

  double gamma_max = 0;
  for (const auto& s : segment.samples) gamma_max = std::max(gamma_max, std::abs(s.gamma_spm));
  if (gamma_max == 0 || pump.energy() == 0) {
    // No interaction: constant trajectory.
    traj.z = {0.0, segment.length};
    traj.amplitudes = {pump.amplitudes, pump.amplitudes};
    return traj;
  }

  const double dw = pump.mode.grid.delta_omega;
  const double p_peak = peak_power(pump.amplitudes, dw);
  const double coherence_scale = 1.0 / (gamma_max * p_peak);  // nonlinear length
  const double step_target = std::min(dz, coherence_scale / 20.0);
  const Index n_steps = std::max<Index>(1, static_cast<Index>(std::ceil(segment.length / step_target)));
  const double h = segment.length / static_cast<double>(n_steps);

  Arraycd beta = pump.amplitudes;
  double e_prev = beta.abs2().sum() * dw;
  traj.z.reserve(static_cast<size_t>(n_steps) + 1);
  traj.amplitudes.reserve(static_cast<size_t>(n_steps) + 1);
  traj.z.push_back(0.0);
  traj.amplitudes.push_back(beta);

  for (Index step = 0; step < n_steps; ++step) {
    const double z0 = h * static_cast<double>(step);
    const double g0 = segment.at(z0).gamma_spm;
    const double gm = segment.at(z0 + 0.5 * h).gamma_spm;
    const double g1 = segment.at(z0 + h).gamma_spm;

    const Arraycd k1 = spm_derivative(beta, g0, dw);
    const Arraycd k2 = spm_derivative(beta + 0.5 * h * k1, gm, dw);
    const Arraycd k3 = spm_derivative(beta + 0.5 * h * k2, gm, dw);
    const Arraycd k4 = spm_derivative(beta + h * k3, g1, dw);
    const Arraycd next = beta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double e1 = next.abs2().sum() * dw;
    if (std::abs(e1 - e_prev) > 1e-6 * e_prev)
      throw StepSizeError("pump SPM step too large: energy drift above 1e-6 per step");
    e_prev = e1;
    beta = next;
    traj.z.push_back(z0 + h);
    traj.amplitudes.push_back(beta);
  }
  return traj;
}

PumpField apply_pump_loss(const PumpField& pump, double transmittance_amplitude) {
  if (transmittance_amplitude < 0 || transmittance_amplitude > 1)
    throw std::invalid_argument("amplitude transmittance must lie in [0, 1]");
  PumpField out = pump;
  out.amplitudes *= transmittance_amplitude;
  return out;
}

}  // namespace nlo
