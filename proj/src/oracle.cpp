#include "nlo/oracle.hpp"

#include <cmath>
#include <cstdio>

namespace nlo {

namespace {

double stable_sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// sum_{j=0}^{c-1} exp(i j theta), Dirichlet form.
Complex unit_geometric_sum(double theta, long c) {
  const double half = 0.5 * theta;
  if (std::abs(std::sin(half)) < 1e-12)
    return static_cast<double>(c) * std::exp(kI * (half * static_cast<double>(c - 1)));
  return std::exp(kI * (half * static_cast<double>(c - 1))) *
         (std::sin(half * static_cast<double>(c)) / std::sin(half));
}

// Per-domain integral of exp(i k z) over [z0, z0 + w].
Complex domain_integral(double k, double z0, double w) {
  if (std::abs(k * w) < 1e-12) return w * std::exp(kI * (k * (z0 + 0.5 * w)));
  return (std::exp(kI * (k * (z0 + w))) - std::exp(kI * (k * z0))) / (kI * k);
}

// Exact evaluation for a uniform (possibly poled) segment at one residual
// mismatch value:  sum over poling runs with Dirichlet kernels.
Complex uniform_phi_at(double k, double gamma, const std::vector<PolingRun>& runs, double length,
                       double end_of_pattern) {
  Complex total{0, 0};
  for (const auto& run : runs) {
    const Complex i0 = domain_integral(k, run.z0, run.domain_width);
    if (run.alternating) {
      // signs s, -s, s, ... and translation phase k*w per domain.
      const double theta = k * run.domain_width + kPi;
      total += static_cast<double>(run.first_sign) * i0 *
               unit_geometric_sum(theta, static_cast<long>(run.count));
    } else {
      const double theta = k * run.domain_width;
      total += static_cast<double>(run.first_sign) * i0 *
               unit_geometric_sum(theta, static_cast<long>(run.count));
    }
  }
  if (end_of_pattern < length * (1 - 1e-12))
    total += domain_integral(k, end_of_pattern, length - end_of_pattern);
  return gamma * total / std::sqrt(2.0 * kPi);
}

}  // namespace

Arraycd phase_matching_line(const SegmentProfile& segment, const Arrayd& delta) {
  segment.validate();
  if (!segment.is_uniform())
    throw std::invalid_argument("phase_matching_line requires a uniform segment");
  const SegmentSample s = segment.at(0.0);
  const double mismatch = segment.central_mismatch(0.0);

  std::vector<PolingRun> runs;
  double end_of_pattern = 0;
  if (segment.poling) {
    runs = compress_to_runs(*segment.poling);
    end_of_pattern = segment.poling->end();
  } else {
    PolingRun whole;
    whole.z0 = 0;
    whole.domain_width = segment.length;
    whole.count = 1;
    whole.first_sign = 1;
    whole.alternating = false;
    runs = {whole};
    end_of_pattern = segment.length;
  }

  const Complex offset_phase = std::exp(kI * segment.mismatch_phase_offset);
  Arraycd out(delta.size());
  for (Index j = 0; j < delta.size(); ++j)
    out(j) = offset_phase *
             uniform_phi_at(mismatch - delta(j), s.gamma, runs, segment.length, end_of_pattern);
  return out;
}

PhaseMatchingFunction phase_matching_function(const SegmentProfile& segment,
                                              const FrequencyGrid& signal,
                                              const FrequencyGrid& idler) {
  segment.validate();
  PhaseMatchingFunction pm;
  pm.signal_grid = signal;
  pm.idler_grid = idler;
  const Index ns = signal.n_points;
  const Index ni = idler.n_points;
  pm.values.resize(ns, ni);
  const Arrayd nus = signal.detunings();
  const Arrayd nui = idler.detunings();

  if (segment.is_uniform()) {
    const double bs = segment.walkoff_rate(ModeLabel::Signal, 0.0);
    const double bi = segment.walkoff_rate(ModeLabel::Idler, 0.0);
    // delta is a rank-1 combination: evaluate the 1D kernel on unique sums.
    for (Index a = 0; a < ns; ++a) {
      Arrayd delta(ni);
      for (Index b = 0; b < ni; ++b) delta(b) = bs * nus(a) + bi * nui(b);
      pm.values.row(a) = phase_matching_line(segment, delta).matrix().transpose();
    }
    return pm;
  }

  // Inhomogeneous segment: composite trapezoid on a partition refined at
  // sample points and poling walls, assembled as a rank-factored product
  // E_s diag(w) E_i^T across the z nodes.
  std::vector<double> knots{0.0, segment.length};
  for (const auto& smpl : segment.samples)
    if (smpl.z > 0 && smpl.z < segment.length) knots.push_back(smpl.z);
  if (segment.poling)
    for (double b : segment.poling->boundaries)
      if (b > 0 && b < segment.length) knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              knots.end());

  // Refine so the fastest phase advance per step stays small over the band.
  const double numax_s = nus.abs().maxCoeff();
  const double numax_i = nui.abs().maxCoeff();
  std::vector<double> zs;
  for (size_t j = 0; j + 1 < knots.size(); ++j) {
    const double a = knots[j];
    const double b = knots[j + 1];
    const double zm = 0.5 * (a + b);
    const double rate = std::abs(segment.central_mismatch(zm)) +
                        std::abs(segment.walkoff_rate(ModeLabel::Signal, zm)) * numax_s +
                        std::abs(segment.walkoff_rate(ModeLabel::Idler, zm)) * numax_i;
    const Index sub = std::max<Index>(1, static_cast<Index>(std::ceil(rate * (b - a) / 0.15)));
    for (Index q = 0; q <= sub; ++q) {
      const double z = a + (b - a) * static_cast<double>(q) / static_cast<double>(sub);
      if (zs.empty() || z > zs.back() + 1e-15) zs.push_back(z);
    }
  }

  const Index nz = static_cast<Index>(zs.size());
  Arrayd theta0(nz), theta_s(nz), theta_i(nz), weight(nz), gamma(nz);
  // Cumulative phases by trapezoid between nodes.
  theta0(0) = segment.mismatch_phase_offset;
  theta_s(0) = 0;
  theta_i(0) = 0;
  for (Index j = 0; j < nz; ++j) {
    if (j > 0) {
      const double h = zs[static_cast<size_t>(j)] - zs[static_cast<size_t>(j - 1)];
      theta0(j) = theta0(j - 1) +
                  0.5 * h *
                      (segment.central_mismatch(zs[static_cast<size_t>(j - 1)]) +
                       segment.central_mismatch(zs[static_cast<size_t>(j)]));
      theta_s(j) = theta_s(j - 1) +
                   0.5 * h *
                       (segment.walkoff_rate(ModeLabel::Signal, zs[static_cast<size_t>(j - 1)]) +
                        segment.walkoff_rate(ModeLabel::Signal, zs[static_cast<size_t>(j)]));
      theta_i(j) = theta_i(j - 1) +
                   0.5 * h *
                       (segment.walkoff_rate(ModeLabel::Idler, zs[static_cast<size_t>(j - 1)]) +
                        segment.walkoff_rate(ModeLabel::Idler, zs[static_cast<size_t>(j)]));
    }
    // Trapezoid weights; poling signs are constant between consecutive nodes,
    // sampled just inside the interval on each side.
    double w = 0;
    if (j > 0) w += 0.5 * (zs[static_cast<size_t>(j)] - zs[static_cast<size_t>(j - 1)]);
    if (j + 1 < nz) w += 0.5 * (zs[static_cast<size_t>(j + 1)] - zs[static_cast<size_t>(j)]);
    weight(j) = w;
    const double z = zs[static_cast<size_t>(j)];
    gamma(j) = segment.at(z).gamma * static_cast<double>(segment.poling_sign(
                   std::min(z + 1e-15 * segment.length, segment.length)));
  }

  Matrixcd es(ns, nz), ei(ni, nz);
  for (Index j = 0; j < nz; ++j) {
    for (Index a = 0; a < ns; ++a) es(a, j) = std::exp(-kI * (theta_s(j) * nus(a)));
    for (Index b = 0; b < ni; ++b) ei(b, j) = std::exp(-kI * (theta_i(j) * nui(b)));
  }
  Vectorcd mid(nz);
  for (Index j = 0; j < nz; ++j)
    mid(j) = weight(j) * gamma(j) * std::exp(kI * theta0(j)) / std::sqrt(2.0 * kPi);
  pm.values = es * mid.asDiagonal() * ei.transpose();
  return pm;
}

JointSpectralAmplitude JointSpectralAmplitude::normalized() const {
  JointSpectralAmplitude out = *this;
  const double n = out.values.norm();
  if (n > 0) out.values /= n;
  out.unit_frobenius = true;
  return out;
}

JointSpectralAmplitude first_order_jsa(const PumpField& pump, const PhaseMatchingFunction& pm) {
  pump.validate();
  const FrequencyGrid& sg = pm.signal_grid;
  const FrequencyGrid& ig = pm.idler_grid;
  const FrequencyGrid& pg = pump.mode.grid;
  if (!sg.same_spacing(pg))
    throw std::invalid_argument("pump grid spacing must match the signal/idler spacing");

  const double x = (sg.omega_start + ig.omega_start - pg.omega_start) / pg.delta_omega;
  const Index base = static_cast<Index>(std::llround(x));
  if (std::abs(x - static_cast<double>(base)) > 1e-6)
    throw std::invalid_argument("pump grid is not aligned with the signal+idler lattice");
  if (base < 0 || base + sg.n_points + ig.n_points - 2 >= pg.n_points)
    std::fprintf(stderr, "nlo: warning: pump grid does not cover the JSA band; zero-filling\n");

  JointSpectralAmplitude jsa;
  jsa.signal_grid = sg;
  jsa.idler_grid = ig;
  jsa.values.resize(sg.n_points, ig.n_points);
  for (Index a = 0; a < sg.n_points; ++a)
    for (Index b = 0; b < ig.n_points; ++b) {
      const Index k = base + a + b;
      const Complex bp = (k >= 0 && k < pg.n_points) ? pump.amplitudes(k) : Complex{0, 0};
      jsa.values(a, b) = bp * pm.values(a, b);
    }
  return jsa;
}

PhaseMatchingFunction interferometer_pm(const PhaseMatchingFunction& single, double dphi,
                                        double walkoff_s, double walkoff_i) {
  PhaseMatchingFunction out = single;
  const Arrayd nus = single.signal_grid.detunings();
  const Arrayd nui = single.idler_grid.detunings();
  for (Index a = 0; a < nus.size(); ++a)
    for (Index b = 0; b < nui.size(); ++b)
      out.values(a, b) =
          2.0 * single.values(a, b) *
          std::cos(0.5 * (dphi + walkoff_s * nus(a) + walkoff_i * nui(b)));
  return out;
}

WalkoffSummary walkoff_and_slopes(const std::vector<PathElement>& path) {
  WalkoffSummary w;
  bool seen_first_stage = false;
  bool before_second_stage = true;
  double ts = 0, ti = 0;
  for (const auto& el : path) {
    if (el.segment) {
      if (!seen_first_stage) {
        w.tau_s = el.segment->walkoff(ModeLabel::Signal);
        w.tau_i = el.segment->walkoff(ModeLabel::Idler);
        ts += w.tau_s;
        ti += w.tau_i;
        seen_first_stage = true;
      } else if (before_second_stage) {
        before_second_stage = false;  // stop at the second nonlinear stage
      }
    } else if (seen_first_stage && before_second_stage) {
      ts += el.delay_signal;
      ti += el.delay_idler;
    }
  }
  if (!seen_first_stage) throw std::invalid_argument("path contains no nonlinear segment");
  w.T_s = ts;
  w.T_i = ti;
  w.theta_pm = std::atan2(-w.tau_s, w.tau_i);
  w.theta_int = std::atan2(-w.T_s, w.T_i);
  return w;
}

double analytic_heralding_efficiency(double alpha, double mismatch, double length) {
  if (alpha < 0) throw std::invalid_argument("loss must be non-negative");
  if (length <= 0) throw std::invalid_argument("length must be positive");
  const double u = alpha * length;
  const double x = mismatch * length;
  const double sinc_half = stable_sinc(0.5 * x);
  const double numerator = (u * u + x * x) * sinc_half * sinc_half;
  const double half_sin = std::sin(0.5 * x);
  const double denominator = 2.0 * (std::expm1(u) + 2.0 * half_sin * half_sin - u * stable_sinc(x));
  if (denominator <= 0) return 1.0;  // u -> 0 and x -> 0 limit
  return numerator / denominator;
}

}  // namespace nlo
