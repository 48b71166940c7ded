#include "nlo/nonlinearity.hpp"

#include <cmath>

namespace nlo {

double ModeFieldProfile::normalization_integral() const {
  double acc = 0;
  for (const auto& c : cells) {
    if (!c.h) throw std::invalid_argument("normalization integral needs H fields");
    const Eigen::Vector3cd cross = c.e.cross(c.h->conjugate()) - c.h->cross(c.e.conjugate());
    acc += std::real(cross.z()) * c.area;
  }
  return acc;
}

void ModeFieldProfile::validate() const {
  if (cells.empty()) throw std::invalid_argument("mode field needs at least one cell");
  if (group_velocity <= 0) throw std::invalid_argument("group velocity must be positive");
  if (center_frequency <= 0) throw std::invalid_argument("center frequency must be positive");
  for (const auto& c : cells)
    if (c.area <= 0) throw std::invalid_argument("cell areas must be positive");
  if (cells.front().h) {
    const double integral = normalization_integral();
    if (std::abs(integral - 2.0 * group_velocity) > 0.01 * 2.0 * group_velocity)
      throw std::invalid_argument("mode fields violate the 2v normalization by more than 1%");
  }
}

double SusceptibilityTensors::frobenius_chi2() const {
  double acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) acc += chi2[i][j][k] * chi2[i][j][k];
  return std::sqrt(acc);
}

double SusceptibilityTensors::frobenius_chi3() const {
  double acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) acc += chi3[i][j][k][l] * chi3[i][j][k][l];
  return std::sqrt(acc);
}

namespace {

// Contracted index pairs: 1:xx 2:yy 3:zz 4:yz,zy 5:xz,zx 6:xy,yx
constexpr int kContracted[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};

void set_d(SusceptibilityTensors& t, int i, int contracted, double d) {
  const int j = kContracted[contracted][0];
  const int k = kContracted[contracted][1];
  t.chi2[i][j][k] = 2.0 * d;
  t.chi2[i][k][j] = 2.0 * d;
}

}  // namespace

SusceptibilityTensors chi2_from_contracted_3m(double d22, double d31, double d33) {
  SusceptibilityTensors t{};
  // Row 1: d15 = d31 (Kleinman), d16 = -d22
  set_d(t, 0, 4, d31);
  set_d(t, 0, 5, -d22);
  // Row 2: d21 = -d22, d22, d24 = d31 (Kleinman d24 = d15 = d31)
  set_d(t, 1, 0, -d22);
  set_d(t, 1, 1, d22);
  set_d(t, 1, 3, d31);
  // Row 3: d31, d32 = d31, d33
  set_d(t, 2, 0, d31);
  set_d(t, 2, 1, d31);
  set_d(t, 2, 2, d33);
  return t;
}

SusceptibilityTensors chi2_from_contracted_43m(double d14) {
  SusceptibilityTensors t{};
  set_d(t, 0, 3, d14);
  set_d(t, 1, 4, d14);
  set_d(t, 2, 5, d14);
  return t;
}

void fill_isotropic_chi3(SusceptibilityTensors& t, double diag, double offdiag) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const int idx[4] = {i, j, k, l};
          int counts[3] = {0, 0, 0};
          for (int a : idx) ++counts[a];
          double value = 0;
          if (counts[0] == 4 || counts[1] == 4 || counts[2] == 4) {
            value = diag;
          } else {
            // pairs of two distinct axes (xxyy and permutations)
            int pairs = 0;
            for (int c : counts) pairs += (c == 2);
            if (pairs == 2) value = offdiag;
          }
          t.chi3[i][j][k][l] = value;
        }
}

SusceptibilityTensors rotate_tensors(const SusceptibilityTensors& t, double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("rotation angle must be finite");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double r[3][3] = {{1, 0, 0}, {0, c, s}, {0, -s, c}};
  SusceptibilityTensors out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double acc = 0;
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n)
            for (int o = 0; o < 3; ++o) acc += r[i][m] * r[j][n] * r[k][o] * t.chi2[m][n][o];
        out.chi2[i][j][k] = acc;
      }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double acc = 0;
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
              for (int o = 0; o < 3; ++o)
                for (int p = 0; p < 3; ++p)
                  acc += r[i][m] * r[j][n] * r[k][o] * r[l][p] * t.chi3[m][n][o][p];
          out.chi3[i][j][k][l] = acc;
        }
  return out;
}

namespace {

void check_compatible(const ModeFieldProfile& a, const ModeFieldProfile& b) {
  if (a.cells.size() != b.cells.size())
    throw std::invalid_argument("mode field grids are not compatible");
  for (size_t k = 0; k < a.cells.size(); ++k) {
    const auto& ca = a.cells[k];
    const auto& cb = b.cells[k];
    const double scale = std::abs(ca.area) + std::abs(cb.area);
    if (std::abs(ca.x - cb.x) > 1e-9 || std::abs(ca.y - cb.y) > 1e-9 ||
        std::abs(ca.area - cb.area) > 1e-9 * scale)
      throw std::invalid_argument("mode field grids are not compatible");
  }
}

Complex chi2_overlap(const ModeFieldProfile& a, const ModeFieldProfile& b,
                     const ModeFieldProfile& c, const SusceptibilityTensors& t, bool conj_a,
                     bool conj_b, bool conj_c) {
  Complex acc{0, 0};
  for (size_t cell = 0; cell < a.cells.size(); ++cell) {
    const Eigen::Vector3cd ea = conj_a ? a.cells[cell].e.conjugate().eval() : a.cells[cell].e;
    const Eigen::Vector3cd eb = conj_b ? b.cells[cell].e.conjugate().eval() : b.cells[cell].e;
    const Eigen::Vector3cd ec = conj_c ? c.cells[cell].e.conjugate().eval() : c.cells[cell].e;
    Complex cellsum{0, 0};
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
          const double chi = t.chi2[l][m][n];
          if (chi != 0) cellsum += chi * ea(l) * eb(m) * ec(n);
        }
    acc += cellsum * a.cells[cell].area;
  }
  return acc;
}

Complex chi3_overlap(const ModeFieldProfile& a, const ModeFieldProfile& b,
                     const ModeFieldProfile& c, const ModeFieldProfile& d,
                     const SusceptibilityTensors& t) {
  // a and b enter conjugated, c and d directly (all four-wave variants).
  Complex acc{0, 0};
  for (size_t cell = 0; cell < a.cells.size(); ++cell) {
    const Eigen::Vector3cd ea = a.cells[cell].e.conjugate();
    const Eigen::Vector3cd eb = b.cells[cell].e.conjugate();
    const Eigen::Vector3cd& ec = c.cells[cell].e;
    const Eigen::Vector3cd& ed = d.cells[cell].e;
    Complex cellsum{0, 0};
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
          for (int o = 0; o < 3; ++o) {
            const double chi = t.chi3[l][m][n][o];
            if (chi != 0) cellsum += chi * ea(l) * eb(m) * ec(n) * ed(o);
          }
    acc += cellsum * a.cells[cell].area;
  }
  return acc;
}

}  // namespace

double overlap_gamma(const ModeFieldSet& fields, const SusceptibilityTensors& tensors,
                     NonlinearProcess process) {
  const ModeFieldProfile* s = fields.signal;
  const ModeFieldProfile* i = fields.idler;
  const ModeFieldProfile* p = fields.pump;
  if (!p) throw std::invalid_argument("overlap_gamma needs a pump field");
  p->validate();
  if (s) {
    s->validate();
    check_compatible(*s, *p);
  }
  if (i) {
    i->validate();
    check_compatible(*i, *p);
  }

  switch (process) {
    case NonlinearProcess::Pdc: {
      if (!s || !i) throw std::invalid_argument("PDC needs signal, idler, and pump fields");
      const double pref = kVacuumPermittivity *
                          std::sqrt(s->center_frequency * i->center_frequency /
                                    (2.0 * p->group_velocity * s->group_velocity * i->group_velocity));
      return pref * std::real(chi2_overlap(*s, *i, *p, tensors, true, true, false));
    }
    case NonlinearProcess::Qfc: {
      if (!s || !i) throw std::invalid_argument("QFC needs signal, idler, and pump fields");
      const double pref = kVacuumPermittivity *
                          std::sqrt(s->center_frequency * i->center_frequency /
                                    (2.0 * p->group_velocity * s->group_velocity * i->group_velocity));
      return pref * std::real(chi2_overlap(*s, *i, *p, tensors, false, true, true));
    }
    case NonlinearProcess::Spm: {
      const double pref = kVacuumPermittivity * 3.0 * p->center_frequency /
                          (4.0 * p->group_velocity * p->group_velocity);
      return pref * std::real(chi3_overlap(*p, *p, *p, *p, tensors));
    }
    case NonlinearProcess::XpmSignal: {
      if (!s) throw std::invalid_argument("XPM needs the signal field");
      const double pref = kVacuumPermittivity * 3.0 * s->center_frequency /
                          (2.0 * p->group_velocity * s->group_velocity);
      return pref * std::real(chi3_overlap(*p, *s, *p, *s, tensors));
    }
    case NonlinearProcess::XpmIdler: {
      if (!i) throw std::invalid_argument("XPM needs the idler field");
      const double pref = kVacuumPermittivity * 3.0 * i->center_frequency /
                          (2.0 * p->group_velocity * i->group_velocity);
      return pref * std::real(chi3_overlap(*p, *i, *p, *i, tensors));
    }
    case NonlinearProcess::Sfwm: {
      const ModeFieldProfile* p2 = fields.pump2 ? fields.pump2 : p;
      if (!s || !i) throw std::invalid_argument("SFWM needs signal and idler fields");
      if (fields.pump2) {
        fields.pump2->validate();
        check_compatible(*p2, *p);
      }
      const double pref =
          kVacuumPermittivity * 3.0 * std::sqrt(s->center_frequency * i->center_frequency) /
          (2.0 * std::sqrt(p->group_velocity * p2->group_velocity * s->group_velocity *
                           i->group_velocity));
      return pref * std::real(chi3_overlap(*s, *i, *p, *p2, tensors));
    }
  }
  throw std::invalid_argument("unknown nonlinear process");
}

double millers_rule(double d_reference, const MillerTriple& reference, const MillerTriple& target) {
  for (double e : {reference.eps_i, reference.eps_j, reference.eps_k, target.eps_i, target.eps_j,
                   target.eps_k})
    if (e <= 1.0) throw std::invalid_argument("Miller's rule needs eps_1 > 1");
  const double num = (target.eps_i - 1.0) * (target.eps_j - 1.0) * (target.eps_k - 1.0);
  const double den = (reference.eps_i - 1.0) * (reference.eps_j - 1.0) * (reference.eps_k - 1.0);
  return d_reference * num / den;
}

double n2_to_chi3(double n2, double refractive_index) {
  if (refractive_index <= 0) throw std::invalid_argument("refractive index must be positive");
  return n2 * refractive_index * refractive_index / 282.55;
}

std::optional<double> qpm_period(double mismatch, int order) {
  if (order < 1 || order % 2 == 0)
    throw std::invalid_argument("QPM order must be a positive odd integer");
  if (mismatch == 0) return std::nullopt;
  return 2.0 * kPi * static_cast<double>(order) / std::abs(mismatch);
}

PolingPattern periodic_pattern(double period, double length, double duty) {
  if (duty <= 0 || duty >= 1) throw std::invalid_argument("duty cycle must lie in (0, 1)");
  if (period <= 0 || period >= length)
    throw std::invalid_argument("period must be positive and smaller than the length");
  PolingPattern pattern;
  pattern.boundaries.push_back(0);
  double z = 0;
  int sign = 1;
  while (z < length - 1e-15 * length) {
    const double width = (sign > 0 ? duty : 1.0 - duty) * period;
    const double next = std::min(z + width, length);
    pattern.boundaries.push_back(next);
    pattern.signs.push_back(sign);
    sign = -sign;
    z = next;
  }
  pattern.validate(length);
  return pattern;
}

ApodizedPolingResult apodized_pattern(double mismatch, double length, double sigma, double c) {
  if (mismatch == 0) throw std::invalid_argument("apodized poling needs a nonzero mismatch");
  if (sigma <= 0 || c <= 0) throw std::invalid_argument("sigma and c must be positive");
  const double lc = kPi / std::abs(mismatch);
  const Index domains = static_cast<Index>(std::floor(length / lc + 1e-9));
  if (domains < 2) throw std::invalid_argument("length must hold at least two coherence lengths");

  const double erf_edge = std::erf(length / (2.0 * std::sqrt(2.0) * sigma));
  auto target_at = [&](double z) {
    return c * std::abs(std::erf((length - 2.0 * z) / (2.0 * std::sqrt(2.0) * sigma)) - erf_edge);
  };

  ApodizedPolingResult result;
  result.infeasible_slope = c * std::sqrt(2.0 / kPi) / sigma > (2.0 / kPi) * (1.0 + 1e-9);

  result.pattern.boundaries.reserve(static_cast<size_t>(domains) + 1);
  result.pattern.signs.reserve(static_cast<size_t>(domains));
  result.z = Arrayd(domains + 1);
  result.realized = Arrayd(domains + 1);
  result.target = Arrayd(domains + 1);

  Complex running{0, 0};
  int prev_sign = 1;
  result.pattern.boundaries.push_back(0);
  result.z(0) = 0;
  result.realized(0) = 0;
  result.target(0) = target_at(0);
  for (Index d = 0; d < domains; ++d) {
    const double z0 = lc * static_cast<double>(d);
    const double z1 = (d == domains - 1) ? length : z0 + lc;
    // integral of exp(i*mismatch*z) over the domain
    const Complex inc = (std::exp(kI * (mismatch * z1)) - std::exp(kI * (mismatch * z0))) /
                        (kI * mismatch);
    const double target = target_at(z1);
    const double up = std::abs(running + inc);
    const double down = std::abs(running - inc);
    int sign;
    if (std::abs(std::abs(up - target) - std::abs(down - target)) <
        1e-12 * (std::abs(up) + std::abs(down) + target)) {
      sign = prev_sign;  // tie: continue the previous sign
    } else {
      sign = std::abs(up - target) < std::abs(down - target) ? 1 : -1;
    }
    running += static_cast<double>(sign) * inc;
    prev_sign = sign;
    result.pattern.boundaries.push_back(z1);
    result.pattern.signs.push_back(sign);
    result.z(d + 1) = z1;
    result.realized(d + 1) = std::abs(running);
    result.target(d + 1) = target;
  }
  result.pattern.validate(length);
  return result;
}

double apm_gamma(double z_centered, double gamma0, double l_eff, double period,
                 bool cosine_approximation) {
  const double envelope = std::exp(-0.5 * (z_centered / l_eff) * (z_centered / l_eff));
  if (cosine_approximation)
    return gamma0 * envelope * (-4.0 / (3.0 * kPi)) * std::cos(4.0 * kPi * z_centered / period);
  return gamma0 * envelope * std::abs(std::sin(2.0 * kPi * z_centered / period));
}

ApmProfile apm_profile(double gamma0, double l_eff, double period, double length,
                       bool cosine_approximation, Index samples_per_period) {
  if (period <= 0 || l_eff <= 0 || length <= 0)
    throw std::invalid_argument("APM profile needs positive period, l_eff, and length");
  const Index n = std::max<Index>(
      64, static_cast<Index>(std::ceil(length / period * static_cast<double>(samples_per_period))));
  ApmProfile profile;
  profile.z = Arrayd::LinSpaced(n + 1, 0.0, length);
  profile.gamma = Arrayd(n + 1);
  for (Index k = 0; k <= n; ++k)
    profile.gamma(k) =
        apm_gamma(profile.z(k) - 0.5 * length, gamma0, l_eff, period, cosine_approximation);
  return profile;
}

std::vector<SegmentSample> samples_from_apm(const ApmProfile& profile, const SegmentSample& base) {
  std::vector<SegmentSample> samples;
  samples.reserve(static_cast<size_t>(profile.z.size()));
  for (Index k = 0; k < profile.z.size(); ++k) {
    SegmentSample s = base;
    s.z = profile.z(k);
    s.gamma = profile.gamma(k);
    samples.push_back(s);
  }
  return samples;
}

}  // namespace nlo
