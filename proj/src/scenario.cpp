#include "nlo/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlo {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!current.empty()) tokens.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

bool parse_number(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string key_location(const DocumentSection& section, const std::string& key) {
  std::string loc = "[" + section.type;
  if (!section.name.empty()) loc += " " + section.name;
  loc += "] " + key;
  return loc;
}

double convert_unit(double value, const std::string& unit, Dimension dimension,
                    const std::string& where) {
  auto expect = [&](std::initializer_list<std::pair<const char*, double>> table,
                    const char* family) -> double {
    if (unit.empty())
      fail(where + ": missing unit (expected " + family + ")");
    for (const auto& [name, scale] : table)
      if (unit == name) return value * scale;
    fail(where + ": unknown unit '" + unit + "' (expected " + family + ")");
  };
  switch (dimension) {
    case Dimension::Length:
      return expect({{"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}},
                    "nm/um/mm/cm/m");
    case Dimension::Time:
      return expect({{"fs", 1e-15}, {"ps", 1e-12}, {"ns", 1e-9}, {"s", 1.0}}, "fs/ps/ns/s");
    case Dimension::Energy:
      return expect({{"fJ", 1e-15}, {"pJ", 1e-12}, {"nJ", 1e-9}, {"J", 1.0}}, "fJ/pJ/nJ/J");
    case Dimension::Frequency: {
      if (unit == "THz") return value * 2.0 * kPi * 1e12;
      if (unit == "GHz") return value * 2.0 * kPi * 1e9;
      if (unit == "rad/s") return value;
      fail(where + ": unknown unit '" + unit + "' (expected THz/GHz/rad/s)");
    }
    case Dimension::Angle: {
      if (unit == "rad") return value;
      if (unit == "deg") return value * kPi / 180.0;
      if (unit.empty()) return value;  // radians by default
      fail(where + ": unknown unit '" + unit + "' (expected rad/deg)");
    }
    case Dimension::LossPerLength: {
      if (unit == "dB/cm") return db_per_cm_to_np_per_m(value);
      if (unit == "dB/m") return db_per_cm_to_np_per_m(value / 100.0);
      if (unit == "Np/m") return value;
      fail(where + ": unknown unit '" + unit + "' (expected dB/cm, dB/m, Np/m)");
    }
    case Dimension::LossDb: {
      if (unit == "dB" || unit.empty()) return value;
      fail(where + ": unknown unit '" + unit + "' (expected dB)");
    }
    case Dimension::InverseLength: {
      if (unit == "rad/m" || unit == "1/m") return value;
      fail(where + ": unknown unit '" + unit + "' (expected rad/m)");
    }
    case Dimension::Velocity: {
      if (unit == "m/s") return value;
      fail(where + ": unknown unit '" + unit + "' (expected m/s)");
    }
    case Dimension::Scalar: {
      if (unit.empty()) return value;
      fail(where + ": unexpected unit '" + unit + "' (expected a bare number)");
    }
  }
  fail(where + ": unhandled dimension");
}

}  // namespace

const DocumentSection* ParsedDocument::find(const std::string& type,
                                            const std::string& name) const {
  for (const auto& s : sections)
    if (s.type == type && (name.empty() || s.name == name)) return &s;
  return nullptr;
}

std::vector<const DocumentSection*> ParsedDocument::find_all(const std::string& type) const {
  std::vector<const DocumentSection*> out;
  for (const auto& s : sections)
    if (s.type == type) out.push_back(&s);
  return out;
}

ParsedDocument parse_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open file: " + path);
  ParsedDocument doc;
  DocumentSection* current = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(path + ":" + std::to_string(line_no) + ": unterminated section header");
      const auto tokens = split_tokens(line.substr(1, line.size() - 2));
      if (tokens.empty() || tokens.size() > 2)
        fail(path + ":" + std::to_string(line_no) + ": section header needs 'type' or 'type name'");
      DocumentSection section;
      section.type = tokens[0];
      if (tokens.size() == 2) section.name = tokens[1];
      section.line = line_no;
      doc.sections.push_back(std::move(section));
      current = &doc.sections.back();
      continue;
    }
    if (!current) fail(path + ":" + std::to_string(line_no) + ": content before any [section]");
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      current->data_rows.push_back(split_tokens(line));
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(path + ":" + std::to_string(line_no) + ": empty key");
    if (current->values.count(key))
      fail(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    DocumentValue value;
    value.tokens = split_tokens(line.substr(eq + 1));
    value.line = line_no;
    current->values.emplace(key, std::move(value));
  }
  return doc;
}

double quantity(const DocumentSection& section, const std::string& key, Dimension dimension) {
  const auto it = section.values.find(key);
  if (it == section.values.end()) fail(key_location(section, key) + ": missing required value");
  const auto& tokens = it->second.tokens;
  if (tokens.empty() || tokens.size() > 2)
    fail(key_location(section, key) + ": expected 'number [unit]'");
  double v = 0;
  if (!parse_number(tokens[0], v))
    fail(key_location(section, key) + ": '" + tokens[0] + "' is not a number");
  return convert_unit(v, tokens.size() == 2 ? tokens[1] : "", dimension,
                      key_location(section, key));
}

double quantity_or(const DocumentSection& section, const std::string& key, Dimension dimension,
                   double fallback) {
  return section.has(key) ? quantity(section, key, dimension) : fallback;
}

long integer(const DocumentSection& section, const std::string& key) {
  const auto it = section.values.find(key);
  if (it == section.values.end()) fail(key_location(section, key) + ": missing required value");
  if (it->second.tokens.size() != 1)
    fail(key_location(section, key) + ": expected an integer");
  const std::string& t = it->second.tokens[0];
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    fail(key_location(section, key) + ": '" + t + "' is not an integer");
  return v;
}

long integer_or(const DocumentSection& section, const std::string& key, long fallback) {
  return section.has(key) ? integer(section, key) : fallback;
}

bool boolean_or(const DocumentSection& section, const std::string& key, bool fallback) {
  if (!section.has(key)) return fallback;
  const std::string w = word(section, key);
  if (w == "true" || w == "yes" || w == "on") return true;
  if (w == "false" || w == "no" || w == "off") return false;
  fail(key_location(section, key) + ": expected a boolean (true/false)");
}

std::string word(const DocumentSection& section, const std::string& key) {
  const auto it = section.values.find(key);
  if (it == section.values.end()) fail(key_location(section, key) + ": missing required value");
  if (it->second.tokens.size() != 1)
    fail(key_location(section, key) + ": expected a single word");
  return it->second.tokens[0];
}

std::string word_or(const DocumentSection& section, const std::string& key,
                    const std::string& fallback) {
  return section.has(key) ? word(section, key) : fallback;
}

std::vector<std::string> word_list(const DocumentSection& section, const std::string& key) {
  const auto it = section.values.find(key);
  if (it == section.values.end()) fail(key_location(section, key) + ": missing required value");
  if (it->second.tokens.empty()) fail(key_location(section, key) + ": expected a list of words");
  return it->second.tokens;
}

namespace {

void check_known_keys(const DocumentSection& section, const std::set<std::string>& known) {
  for (const auto& [key, value] : section.values)
    if (!known.count(key))
      fail(key_location(section, key) + ": unknown key (line " + std::to_string(value.line) + ")");
}

double center_frequency(const DocumentSection& section, const std::string& key) {
  // Accept either a wavelength or an angular frequency.
  const auto it = section.values.find(key);
  if (it == section.values.end()) fail(key_location(section, key) + ": missing required value");
  const auto& tokens = it->second.tokens;
  if (tokens.size() == 2 && (tokens[1] == "nm" || tokens[1] == "um")) {
    return wavelength_to_omega(quantity(section, key, Dimension::Length));
  }
  return quantity(section, key, Dimension::Frequency);
}

double mode_velocity(const DocumentSection& section, const std::string& suffix) {
  const std::string vel_key = "velocity_" + suffix;
  const std::string idx_key = "group_index_" + suffix;
  if (section.has(vel_key)) return quantity(section, vel_key, Dimension::Velocity);
  if (section.has(idx_key)) return kSpeedOfLight / quantity(section, idx_key, Dimension::Scalar);
  fail(key_location(section, idx_key) + ": missing (need velocity_* or group_index_*)");
}

SegmentProfile parse_segment(const DocumentSection& section) {
  check_known_keys(section,
                   {"process", "length", "gamma", "gamma_end", "gamma_spm", "gamma_xpm_signal",
                    "gamma_xpm_idler", "mismatch", "mismatch_end", "loss", "loss_signal",
                    "loss_idler", "loss_pump", "poling", "poling_period", "duty",
                    "apodized_sigma_fraction", "apodized_c_scale", "apm_gamma0", "apm_period",
                    "apm_leff", "velocity_signal", "velocity_idler", "velocity_pump",
                    "velocity_pump2", "group_index_signal", "group_index_idler",
                    "group_index_pump", "group_index_pump2"});

  const std::string process_word = word(section, "process");
  ProcessKind process;
  if (process_word == "pdc") process = ProcessKind::Pdc;
  else if (process_word == "qfc") process = ProcessKind::Qfc;
  else if (process_word == "sfwm") process = ProcessKind::Sfwm;
  else fail(key_location(section, "process") + ": expected pdc, qfc, or sfwm");

  const double length = quantity(section, "length", Dimension::Length);
  if (length <= 0) fail(key_location(section, "length") + ": must be positive");

  SegmentSample base;
  base.z = 0;
  base.group_velocity.signal = mode_velocity(section, "signal");
  base.group_velocity.idler = mode_velocity(section, "idler");
  base.group_velocity.pump = mode_velocity(section, "pump");
  base.group_velocity.pump2 =
      (section.has("velocity_pump2") || section.has("group_index_pump2"))
          ? mode_velocity(section, "pump2")
          : (process == ProcessKind::Sfwm ? base.group_velocity.pump : 0.0);
  base.gamma = quantity(section, "gamma", Dimension::Scalar);
  base.gamma_spm = quantity_or(section, "gamma_spm", Dimension::Scalar, 0.0);
  base.gamma_xpm_s = quantity_or(section, "gamma_xpm_signal", Dimension::Scalar, 0.0);
  base.gamma_xpm_i = quantity_or(section, "gamma_xpm_idler", Dimension::Scalar, 0.0);
  const double loss_all = quantity_or(section, "loss", Dimension::LossPerLength, 0.0);
  base.loss.signal = quantity_or(section, "loss_signal", Dimension::LossPerLength, loss_all);
  base.loss.idler = quantity_or(section, "loss_idler", Dimension::LossPerLength, loss_all);
  base.loss.pump = quantity_or(section, "loss_pump", Dimension::LossPerLength, loss_all);
  base.loss.pump2 = base.loss.pump;
  // The central mismatch is carried on the pump's beta_center.
  base.beta_center.pump = quantity_or(section, "mismatch", Dimension::InverseLength, 0.0);

  SegmentProfile segment;
  segment.length = length;
  segment.process = process;

  const bool has_apm = section.has("apm_gamma0");
  if (has_apm) {
    const double gamma0 = quantity(section, "apm_gamma0", Dimension::Scalar);
    const double period = quantity(section, "apm_period", Dimension::Length);
    const double leff = quantity(section, "apm_leff", Dimension::Length);
    base.beta_center.pump = 4.0 * kPi / period;
    segment.samples = samples_from_apm(apm_profile(gamma0, leff, period, length), base);
  } else if (section.has("gamma_end") || section.has("mismatch_end")) {
    SegmentSample end = base;
    end.z = length;
    end.gamma = quantity_or(section, "gamma_end", Dimension::Scalar, base.gamma);
    end.beta_center.pump =
        quantity_or(section, "mismatch_end", Dimension::InverseLength, base.beta_center.pump);
    segment.samples = {base, end};
  } else {
    segment.samples = {base};
  }

  const std::string poling = word_or(section, "poling", "none");
  if (poling == "periodic") {
    const double period = section.has("poling_period")
                              ? quantity(section, "poling_period", Dimension::Length)
                              : qpm_period(segment.central_mismatch(0.0)).value();
    segment.poling = periodic_pattern(period, length,
                                      quantity_or(section, "duty", Dimension::Scalar, 0.5));
  } else if (poling == "apodized") {
    const double sigma =
        length * quantity_or(section, "apodized_sigma_fraction", Dimension::Scalar, 0.25);
    const double c =
        std::sqrt(2.0 / kPi) * sigma *
        quantity_or(section, "apodized_c_scale", Dimension::Scalar, 1.0);
    segment.poling = apodized_pattern(segment.central_mismatch(0.0), length, sigma, c).pattern;
  } else if (poling != "none") {
    fail(key_location(section, "poling") + ": expected none, periodic, or apodized");
  }
  segment.validate();
  return segment;
}

LinearElement parse_element(const DocumentSection& section) {
  check_known_keys(section, {"delay_signal", "delay_idler", "loss_signal", "loss_idler",
                             "loss_pump", "phase", "phase_knob"});
  LinearElement el;
  el.delay_signal = quantity_or(section, "delay_signal", Dimension::Time, 0.0);
  el.delay_idler = quantity_or(section, "delay_idler", Dimension::Time, 0.0);
  el.loss_signal_db = quantity_or(section, "loss_signal", Dimension::LossDb, 0.0);
  el.loss_idler_db = quantity_or(section, "loss_idler", Dimension::LossDb, 0.0);
  el.loss_pump_db = quantity_or(section, "loss_pump", Dimension::LossDb, 0.0);
  el.phase = quantity_or(section, "phase", Dimension::Angle, 0.0);
  el.phase_knob = boolean_or(section, "phase_knob", false);
  return el;
}

}  // namespace

Circuit Scenario::make_circuit() const {
  Circuit circuit;
  for (const auto& name : circuit_order) {
    bool found = false;
    for (const auto& [n, seg] : segments)
      if (n == name) {
        circuit.elements.emplace_back(seg);
        found = true;
      }
    for (const auto& [n, el] : elements)
      if (n == name) {
        circuit.elements.emplace_back(el);
        found = true;
      }
    if (!found) fail("[circuit] elements: unknown element '" + name + "'");
  }
  circuit.validate();
  return circuit;
}

ModeSpec Scenario::pump_mode() const {
  bool qfc = false;
  for (const auto& [n, seg] : segments) qfc |= seg.process == ProcessKind::Qfc;
  const FrequencyGrid lattice = qfc ? difference_lattice(signal_grid, idler_grid)
                                    : sum_lattice(signal_grid, idler_grid);
  return make_mode(ModeLabel::Pump, pump_center > 0 ? pump_center : lattice.center(), lattice);
}

PumpField Scenario::make_pump() const {
  const ModeSpec mode = pump_mode();
  return gaussian_pump(mode, pump_fwhm_wavelength, pump_energy,
                       omega_to_wavelength(mode.center_frequency));
}

Scenario parse_scenario(const std::string& path) {
  const ParsedDocument doc = parse_document(path);
  for (const auto& section : doc.sections) {
    static const std::set<std::string> known_types{"grids",  "pump",    "segment", "element",
                                                   "circuit", "sweep",  "run",     "outputs"};
    if (!known_types.count(section.type))
      fail("[" + section.type + "]: unknown section type (line " + std::to_string(section.line) + ")");
  }

  Scenario sc;
  const DocumentSection* grids = doc.find("grids");
  if (!grids) fail("scenario needs a [grids] section");
  check_known_keys(*grids, {"signal_center", "idler_center", "span", "points"});
  const double ws = center_frequency(*grids, "signal_center");
  const double wi = center_frequency(*grids, "idler_center");
  const double span = quantity(*grids, "span", Dimension::Frequency);
  const long points = integer(*grids, "points");
  if (points < 2) fail("[grids] points: must be at least 2");
  sc.signal_grid = build_frequency_grid(ws, span, points);
  sc.idler_grid = build_frequency_grid(wi, span, points);

  const DocumentSection* pump = doc.find("pump");
  if (!pump) fail("scenario needs a [pump] section");
  check_known_keys(*pump, {"center", "fwhm", "energy"});
  sc.pump_center = pump->has("center") ? center_frequency(*pump, "center") : 0.0;
  sc.pump_fwhm_wavelength = quantity(*pump, "fwhm", Dimension::Length);
  sc.pump_energy = quantity(*pump, "energy", Dimension::Energy);

  for (const auto* section : doc.find_all("segment")) {
    if (section->name.empty()) fail("[segment]: needs a name (line " + std::to_string(section->line) + ")");
    sc.segments.emplace_back(section->name, parse_segment(*section));
  }
  for (const auto* section : doc.find_all("element")) {
    if (section->name.empty()) fail("[element]: needs a name (line " + std::to_string(section->line) + ")");
    sc.elements.emplace_back(section->name, parse_element(*section));
  }
  if (sc.segments.empty()) fail("scenario needs at least one [segment]");

  if (const DocumentSection* circuit = doc.find("circuit")) {
    check_known_keys(*circuit, {"elements"});
    sc.circuit_order = word_list(*circuit, "elements");
  } else {
    sc.circuit_order = {sc.segments.front().first};
  }

  if (const DocumentSection* sweep = doc.find("sweep")) {
    check_known_keys(*sweep, {"phase_points", "phase_start", "phase_end", "jobs"});
    sc.sweep.present = true;
    sc.sweep.points = integer(*sweep, "phase_points");
    if (sc.sweep.points < 2) fail("[sweep] phase_points: must be at least 2");
    sc.sweep.start = quantity_or(*sweep, "phase_start", Dimension::Angle, 0.0);
    sc.sweep.end = quantity_or(*sweep, "phase_end", Dimension::Angle, 2.0 * kPi);
    sc.sweep.jobs = integer_or(*sweep, "jobs", 1);
  }

  if (const DocumentSection* run = doc.find("run")) {
    check_known_keys(*run, {"frame", "dz", "with_loss", "loss_sections", "stages"});
    const std::string frame = word_or(*run, "frame", "corotating");
    if (frame == "lab") sc.run.frame = Frame::Lab;
    else if (frame == "corotating") sc.run.frame = Frame::CoRotating;
    else fail("[run] frame: expected lab or corotating");
    sc.run.dz = quantity_or(*run, "dz", Dimension::Length, 0.0);
    sc.run.with_loss = boolean_or(*run, "with_loss", false);
    sc.run.loss_sections = integer_or(*run, "loss_sections", 0);
    sc.run.stages = integer_or(*run, "stages", 1);
    if (sc.run.stages < 1) fail("[run] stages: must be at least 1");
  }

  if (const DocumentSection* outputs = doc.find("outputs")) {
    check_known_keys(*outputs,
                     {"transfer_matrix", "metrics", "jsa_grid", "temporal_grid", "poling_table"});
    sc.outputs.transfer_matrix = word_or(*outputs, "transfer_matrix", "");
    sc.outputs.metrics = word_or(*outputs, "metrics", "");
    sc.outputs.jsa_grid = word_or(*outputs, "jsa_grid", "");
    sc.outputs.temporal_grid = word_or(*outputs, "temporal_grid", "");
    sc.outputs.poling_table = word_or(*outputs, "poling_table", "");
  }

  sc.make_circuit();  // validates the element order
  return sc;
}

FieldFixture parse_field_fixture(const std::string& path) {
  const ParsedDocument doc = parse_document(path);
  FieldFixture fixture;

  const DocumentSection* tensors = doc.find("tensors");
  if (!tensors) fail("field fixture needs a [tensors] section");
  check_known_keys(*tensors, {"class", "d14", "d22", "d31", "d33", "chi3_diag", "chi3_offdiag"});
  const std::string crystal = word(*tensors, "class");
  auto pm_per_v = [&](const std::string& key) {
    if (!tensors->has(key)) return 0.0;
    const auto& tokens = tensors->values.at(key).tokens;
    if (tokens.size() != 2 || tokens[1] != "pm/V")
      fail(key_location(*tensors, key) + ": expected 'number pm/V'");
    double v = 0;
    if (!parse_number(tokens[0], v)) fail(key_location(*tensors, key) + ": not a number");
    return v * 1e-12;
  };
  if (crystal == "3m") {
    fixture.tensors = chi2_from_contracted_3m(pm_per_v("d22"), pm_per_v("d31"), pm_per_v("d33"));
  } else if (crystal == "43m") {
    fixture.tensors = chi2_from_contracted_43m(pm_per_v("d14"));
  } else {
    fail(key_location(*tensors, "class") + ": expected 3m or 43m");
  }
  auto pm2_per_v2 = [&](const std::string& key) {
    if (!tensors->has(key)) return 0.0;
    const auto& tokens = tensors->values.at(key).tokens;
    if (tokens.size() != 2 || tokens[1] != "pm2/V2")
      fail(key_location(*tensors, key) + ": expected 'number pm2/V2'");
    double v = 0;
    if (!parse_number(tokens[0], v)) fail(key_location(*tensors, key) + ": not a number");
    return v * 1e-24;
  };
  if (tensors->has("chi3_diag"))
    fill_isotropic_chi3(fixture.tensors, pm2_per_v2("chi3_diag"), pm2_per_v2("chi3_offdiag"));

  for (const auto* section : doc.find_all("field")) {
    if (section->name.empty()) fail("[field]: needs a mode name");
    check_known_keys(*section, {"center", "group_index", "group_velocity", "scale"});
    ModeFieldProfile profile;
    profile.center_frequency = center_frequency(*section, "center");
    if (section->has("group_velocity"))
      profile.group_velocity = quantity(*section, "group_velocity", Dimension::Velocity);
    else
      profile.group_velocity =
          kSpeedOfLight / quantity(*section, "group_index", Dimension::Scalar);
    const double scale = quantity_or(*section, "scale", Dimension::Scalar, 1.0);
    for (const auto& row : section->data_rows) {
      if (row.size() != 9)
        fail("[field " + section->name +
             "]: data rows need 9 columns (x um, y um, area um2, ex_re ex_im ey_re ey_im ez_re ez_im)");
      double v[9];
      for (int k = 0; k < 9; ++k)
        if (!parse_number(row[static_cast<size_t>(k)], v[k]))
          fail("[field " + section->name + "]: bad number '" + row[static_cast<size_t>(k)] + "'");
      FieldCell cell;
      cell.x = v[0] * 1e-6;
      cell.y = v[1] * 1e-6;
      cell.area = v[2] * 1e-12;
      cell.e = Eigen::Vector3cd(Complex{v[3], v[4]}, Complex{v[5], v[6]}, Complex{v[7], v[8]});
      cell.e *= scale;
      profile.cells.push_back(cell);
    }
    profile.validate();
    fixture.fields.emplace(section->name, std::move(profile));
  }
  return fixture;
}

}  // namespace nlo
