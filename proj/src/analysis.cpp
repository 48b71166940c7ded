#include "nlo/analysis.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace nlo {

SchmidtDecomposition schmidt_decompose(const TransferMatrix& u) {
  if (!u.signal_grid.same_spacing(u.idler_grid))
    throw std::invalid_argument("Schmidt decomposition expects matching grid spacings");
  const double dw = u.signal_grid.delta_omega;

  Eigen::JacobiSVD<Matrixcd> svd(u.si, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Arrayd s = svd.singularValues().array();

  SchmidtDecomposition out;
  out.kind = u.kind;
  out.delta_omega = dw;
  out.r = Arrayd(s.size());
  for (Index l = 0; l < s.size(); ++l) {
    if (u.kind == PropagatorKind::Squeezer) {
      out.r(l) = std::asinh(s(l));
    } else {
      if (s(l) > 1.0 + 1e-8)
        throw NumericalError("converter singular value exceeds 1 beyond tolerance");
      out.r(l) = std::asin(std::min(s(l), 1.0));
    }
  }

  // Squeezer kernel: U_si = sum_l s_l rho_l tau_l^T with tau = conj(V);
  // converter kernel: U_si = sum_l s_l rho_l tau_l^dag with tau = V.
  Matrixcd rho = svd.matrixU();
  Matrixcd tau = u.kind == PropagatorKind::Squeezer ? svd.matrixV().conjugate().eval()
                                                    : svd.matrixV().eval();
  // Fix phases: the dominant component of each output mode is made
  // real-positive; the compensating phase moves into the input mode.
  for (Index l = 0; l < rho.cols(); ++l) {
    Index pivot = 0;
    double best = 0;
    for (Index k = 0; k < rho.rows(); ++k)
      if (std::abs(rho(k, l)) > best) {
        best = std::abs(rho(k, l));
        pivot = k;
      }
    if (best > 0) {
      const Complex phase = rho(pivot, l) / best;
      rho.col(l) /= phase;
      if (u.kind == PropagatorKind::Squeezer)
        tau.col(l) *= phase;  // keeps rho tau^T invariant
      else
        tau.col(l) *= std::conj(phase);  // keeps rho tau^dag invariant
    }
  }
  // Continuum normalization sum |mode|^2 dw = 1.
  out.output_modes = rho / std::sqrt(dw);
  out.input_modes = tau / std::sqrt(dw);
  return out;
}

PurityResult purity_and_schmidt_number(const Arrayd& r) {
  const Arrayd s2 = r.sinh().square();
  const double total = s2.sum();
  if (total <= 0) throw std::invalid_argument("Schmidt number undefined for an all-zero spectrum");
  const double k = total * total / s2.square().sum();
  return {k, 1.0 / k};
}

double mean_photon_number(const TransferMatrix& u) { return u.si.squaredNorm(); }

double mean_photon_number(const Arrayd& r) { return r.sinh().square().sum(); }

QpgMetrics qpg_metrics(const Arrayd& r) {
  QpgMetrics m;
  m.eta = r.sin().square();
  const double total = m.eta.sum();
  if (total <= 0) {
    m.separability = Arrayd::Zero(r.size());
    m.selectivity = 0;
    return m;
  }
  m.separability = m.eta / total;
  m.selectivity = m.eta(0) * m.separability(0);
  return m;
}

double spectral_overlap(const Arraycd& phi, const Arraycd& psi, double delta_omega) {
  if (phi.size() != psi.size()) throw std::invalid_argument("spectra must share a grid");
  const double norm_phi = phi.abs2().sum() * delta_omega;
  const double norm_psi = psi.abs2().sum() * delta_omega;
  if (std::abs(norm_phi - 1.0) > 1e-6 || std::abs(norm_psi - 1.0) > 1e-6)
    throw std::invalid_argument("spectral_overlap expects unit-normalized spectra");
  const Complex inner = (phi.conjugate() * psi).sum() * delta_omega;
  return std::norm(inner);
}

TemporalTransfer temporal_transfer_function(const TransferMatrix& u) {
  const FrequencyGrid& sg = u.signal_grid;
  const FrequencyGrid& ig = u.idler_grid;
  const Index ns = sg.n_points;
  const Index ni = ig.n_points;

  TemporalTransfer out;
  const double dts = 2.0 * kPi / (static_cast<double>(ns) * sg.delta_omega);
  const double dti = 2.0 * kPi / (static_cast<double>(ni) * ig.delta_omega);
  out.t_signal = dts * (Arrayd::LinSpaced(ns, 0, static_cast<double>(ns - 1)) -
                        std::floor(static_cast<double>(ns) / 2.0));
  out.t_idler = dti * (Arrayd::LinSpaced(ni, 0, static_cast<double>(ni - 1)) -
                       std::floor(static_cast<double>(ni) / 2.0));

  // Times are measured relative to the pump peak, so only detunings enter.
  const Arrayd nus = sg.detunings();
  const Arrayd nui = ig.detunings();
  Matrixcd es(ns, ns);
  for (Index a = 0; a < ns; ++a)
    for (Index b = 0; b < ns; ++b) es(a, b) = std::exp(kI * (nus(b) * out.t_signal(a)));
  const double idler_sign = u.kind == PropagatorKind::Squeezer ? 1.0 : -1.0;
  Matrixcd ei(ni, ni);
  for (Index a = 0; a < ni; ++a)
    for (Index b = 0; b < ni; ++b) ei(a, b) = std::exp(kI * (idler_sign * nui(b) * out.t_idler(a)));

  const double scale = sg.delta_omega * ig.delta_omega / (2.0 * kPi);
  out.amplitude = scale * (es * u.si * ei.transpose());
  return out;
}

}  // namespace nlo
