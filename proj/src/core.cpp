#include "nlo/core.hpp"

#include <algorithm>
#include <cmath>

namespace nlo {

Arrayd FrequencyGrid::omegas() const {
  return omega_start + delta_omega * Arrayd::LinSpaced(n_points, 0.0, static_cast<double>(n_points - 1));
}

Arrayd FrequencyGrid::detunings() const { return omegas() - center(); }

Index FrequencyGrid::index_of(double omega, double tol) const {
  const double x = (omega - omega_start) / delta_omega;
  const Index k = static_cast<Index>(std::llround(x));
  if (k < 0 || k >= n_points || std::abs(x - static_cast<double>(k)) > tol)
    throw std::invalid_argument("frequency is not a grid point");
  return k;
}

bool FrequencyGrid::same_spacing(const FrequencyGrid& other, double tol) const {
  return std::abs(delta_omega - other.delta_omega) <= tol * delta_omega;
}

FrequencyGrid build_frequency_grid(double center, double span, Index n_points) {
  if (span <= 0) throw std::invalid_argument("grid span must be positive");
  if (n_points < 2) throw std::invalid_argument("grid needs at least two points");
  FrequencyGrid grid;
  grid.n_points = n_points;
  grid.delta_omega = span / static_cast<double>(n_points - 1);
  grid.omega_start = center - 0.5 * span;
  return grid;
}

namespace {

FrequencyGrid combined_lattice(const FrequencyGrid& a, const FrequencyGrid& b, double center) {
  if (!a.same_spacing(b))
    throw std::invalid_argument("grids must share delta_omega to form a pump lattice");
  FrequencyGrid grid;
  grid.n_points = a.n_points + b.n_points - 1;
  grid.delta_omega = a.delta_omega;
  grid.omega_start = center - 0.5 * grid.delta_omega * static_cast<double>(grid.n_points - 1);
  return grid;
}

}  // namespace

FrequencyGrid sum_lattice(const FrequencyGrid& a, const FrequencyGrid& b) {
  return combined_lattice(a, b, a.center() + b.center());
}

FrequencyGrid difference_lattice(const FrequencyGrid& a, const FrequencyGrid& b) {
  return combined_lattice(a, b, b.center() - a.center());
}

std::string to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::Signal: return "signal";
    case ModeLabel::Idler: return "idler";
    case ModeLabel::Pump: return "pump";
    case ModeLabel::Pump2: return "pump2";
  }
  return "?";
}

void ModeSpec::validate() const {
  if (center_frequency <= 0) throw std::invalid_argument("mode center frequency must be positive");
  if (!grid.contains(center_frequency))
    throw std::invalid_argument("mode center frequency must lie within its grid span");
}

ModeSpec make_mode(ModeLabel label, double center_frequency, const FrequencyGrid& grid) {
  ModeSpec mode{label, center_frequency, grid};
  mode.validate();
  return mode;
}

double ModeScalars::get(ModeLabel label) const {
  switch (label) {
    case ModeLabel::Signal: return signal;
    case ModeLabel::Idler: return idler;
    case ModeLabel::Pump: return pump;
    case ModeLabel::Pump2: return pump2;
  }
  return 0;
}

double& ModeScalars::ref(ModeLabel label) {
  switch (label) {
    case ModeLabel::Signal: return signal;
    case ModeLabel::Idler: return idler;
    case ModeLabel::Pump: return pump;
    default: return pump2;
  }
}

void SegmentProfile::validate() const {
  if (length <= 0) throw std::invalid_argument("segment length must be positive");
  if (samples.empty()) throw std::invalid_argument("segment needs at least one sample");
  double prev = -1;
  for (const auto& s : samples) {
    if (s.z < 0 || s.z > length * (1 + 1e-12)) throw std::invalid_argument("segment sample z outside [0, L]");
    if (s.z <= prev) throw std::invalid_argument("segment samples must be strictly ordered in z");
    prev = s.z;
    for (ModeLabel m : {ModeLabel::Signal, ModeLabel::Idler, ModeLabel::Pump, ModeLabel::Pump2}) {
      if (s.group_velocity.get(m) < 0) throw std::invalid_argument("group velocities must be positive");
      if (s.loss.get(m) < 0) throw std::invalid_argument("losses must be non-negative");
    }
  }
  if (poling) poling->validate(length);
}

bool SegmentProfile::is_uniform() const { return samples.size() == 1; }

SegmentSample SegmentProfile::at(double z) const {
  if (samples.size() == 1) {
    SegmentSample s = samples.front();
    s.z = z;
    return s;
  }
  if (z <= samples.front().z) {
    SegmentSample s = samples.front();
    s.z = z;
    return s;
  }
  if (z >= samples.back().z) {
    SegmentSample s = samples.back();
    s.z = z;
    return s;
  }
  auto hi = std::upper_bound(samples.begin(), samples.end(), z,
                             [](double v, const SegmentSample& s) { return v < s.z; });
  auto lo = std::prev(hi);
  const double t = (z - lo->z) / (hi->z - lo->z);
  auto lerp = [t](double a, double b) { return a + t * (b - a); };
  SegmentSample s;
  s.z = z;
  for (ModeLabel m : {ModeLabel::Signal, ModeLabel::Idler, ModeLabel::Pump, ModeLabel::Pump2}) {
    s.group_velocity.ref(m) = lerp(lo->group_velocity.get(m), hi->group_velocity.get(m));
    s.beta_center.ref(m) = lerp(lo->beta_center.get(m), hi->beta_center.get(m));
    s.loss.ref(m) = lerp(lo->loss.get(m), hi->loss.get(m));
  }
  s.gamma = lerp(lo->gamma, hi->gamma);
  s.gamma_spm = lerp(lo->gamma_spm, hi->gamma_spm);
  s.gamma_xpm_s = lerp(lo->gamma_xpm_s, hi->gamma_xpm_s);
  s.gamma_xpm_i = lerp(lo->gamma_xpm_i, hi->gamma_xpm_i);
  return s;
}

namespace {

double mismatch_of(const SegmentSample& s, ProcessKind process) {
  const auto& k = s.beta_center;
  switch (process) {
    case ProcessKind::Pdc: return k.pump - k.signal - k.idler;
    case ProcessKind::Qfc: return k.pump + k.signal - k.idler;
    case ProcessKind::Sfwm: return k.pump + k.pump2 - k.signal - k.idler;
  }
  return 0;
}

}  // namespace

double SegmentProfile::central_mismatch(double z) const { return mismatch_of(at(z), process); }

double SegmentProfile::accumulated_mismatch(double z) const {
  // Trapezoid over the sample break-points is exact for piecewise-linear data.
  if (z <= 0) return 0;
  double acc = 0;
  double z_prev = 0;
  double v_prev = central_mismatch(0.0);
  for (const auto& s : samples) {
    if (s.z <= 0) continue;
    const double z_here = std::min(s.z, z);
    if (z_here > z_prev) {
      const double v_here = central_mismatch(z_here);
      acc += 0.5 * (v_prev + v_here) * (z_here - z_prev);
      z_prev = z_here;
      v_prev = v_here;
    }
    if (s.z >= z) break;
  }
  if (z > z_prev) {
    const double v_here = central_mismatch(z);
    acc += 0.5 * (v_prev + v_here) * (z - z_prev);
  }
  return acc;
}

double SegmentProfile::walkoff_rate(ModeLabel mode, double z) const {
  const SegmentSample s = at(z);
  const double vm = s.group_velocity.get(mode);
  const double vp = s.group_velocity.get(ModeLabel::Pump);
  if (vm <= 0 || vp <= 0) throw std::invalid_argument("group velocities must be positive");
  return 1.0 / vm - 1.0 / vp;
}

double SegmentProfile::walkoff(ModeLabel mode) const {
  double acc = 0;
  double z_prev = 0;
  double v_prev = walkoff_rate(mode, 0.0);
  for (const auto& s : samples) {
    if (s.z <= 0) continue;
    const double z_here = std::min(s.z, length);
    const double v_here = walkoff_rate(mode, z_here);
    acc += 0.5 * (v_prev + v_here) * (z_here - z_prev);
    z_prev = z_here;
    v_prev = v_here;
  }
  if (length > z_prev) acc += 0.5 * (v_prev + walkoff_rate(mode, length)) * (length - z_prev);
  return acc;
}

int SegmentProfile::poling_sign(double z) const { return poling ? poling->sign_at(z) : 1; }

SegmentProfile make_uniform_segment(double length, ProcessKind process, const SegmentSample& sample) {
  SegmentProfile seg;
  seg.length = length;
  seg.process = process;
  SegmentSample s = sample;
  s.z = 0;
  seg.samples = {s};
  seg.validate();
  return seg;
}

SegmentProfile crop_segment(const SegmentProfile& segment, double z0, double z1) {
  if (z0 < 0 || z1 > segment.length * (1 + 1e-12) || z1 <= z0)
    throw std::invalid_argument("invalid crop interval");
  SegmentProfile out;
  out.length = z1 - z0;
  out.process = segment.process;
  out.mismatch_phase_offset = segment.mismatch_phase_offset + segment.accumulated_mismatch(z0);

  SegmentSample first = segment.at(z0);
  first.z = 0;
  out.samples.push_back(first);
  for (const auto& s : segment.samples) {
    if (s.z <= z0 + 1e-15 || s.z >= z1 - 1e-15) continue;
    SegmentSample mid = s;
    mid.z = s.z - z0;
    out.samples.push_back(mid);
  }
  if (out.length > 1e-15) {
    SegmentSample last = segment.at(z1);
    last.z = out.length;
    if (last.z > out.samples.back().z + 1e-15) out.samples.push_back(last);
  }

  if (segment.poling) {
    const auto& pol = *segment.poling;
    PolingPattern cropped;
    for (Index d = 0; d < pol.domain_count(); ++d) {
      const double a = std::max(pol.boundaries[static_cast<size_t>(d)], z0);
      const double b = std::min(pol.boundaries[static_cast<size_t>(d) + 1], z1);
      if (b - a <= 1e-15) continue;
      if (cropped.boundaries.empty()) cropped.boundaries.push_back(a - z0);
      cropped.boundaries.push_back(b - z0);
      cropped.signs.push_back(pol.signs[static_cast<size_t>(d)]);
    }
    if (!cropped.signs.empty()) out.poling = std::move(cropped);
  }
  out.validate();
  return out;
}

double PumpField::energy() const {
  return (amplitudes.abs2().sum()) * mode.grid.delta_omega;
}

void PumpField::validate() const {
  mode.validate();
  if (amplitudes.size() != mode.grid.n_points)
    throw std::invalid_argument("pump amplitude count must match its grid");
  if (!amplitudes.isFinite().all()) throw std::invalid_argument("pump amplitudes must be finite");
}

double wavelength_to_omega(double wavelength) { return 2.0 * kPi * kSpeedOfLight / wavelength; }
double omega_to_wavelength(double omega) { return 2.0 * kPi * kSpeedOfLight / omega; }

PumpField gaussian_pump(const ModeSpec& mode, double fwhm_wavelength, double pulse_energy,
                        double center_wavelength) {
  if (fwhm_wavelength <= 0) throw std::invalid_argument("pump FWHM must be positive");
  if (pulse_energy < 0) throw std::invalid_argument("pulse energy must be non-negative");
  mode.validate();

  const double fwhm_omega =
      2.0 * kPi * kSpeedOfLight * fwhm_wavelength / (center_wavelength * center_wavelength);
  if (fwhm_omega < 3.0 * mode.grid.delta_omega)
    throw std::invalid_argument("under-resolved pump: FWHM narrower than 3 grid spacings");

  PumpField pump;
  pump.mode = mode;
  if (pulse_energy == 0) {
    pump.amplitudes = Arraycd::Zero(mode.grid.n_points);
    return pump;
  }

  const double sigma = fwhm_omega / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const Arrayd nu = mode.grid.omegas() - mode.center_frequency;
  const Arrayd intensity = (-(nu * nu) / (2.0 * sigma * sigma)).exp();
  const double norm = intensity.sum() * mode.grid.delta_omega;
  pump.amplitudes = (intensity * (pulse_energy / norm)).sqrt().cast<Complex>();
  return pump;
}

}  // namespace nlo
