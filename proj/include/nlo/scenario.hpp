#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlo/circuit.hpp"
#include "nlo/nonlinearity.hpp"

namespace nlo {

/// Raised on scenario/fixture schema violations (maps to exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One parsed "key = value" entry; values keep their raw tokens so typed
/// accessors can report precise errors.
struct DocumentValue {
  std::vector<std::string> tokens;
  int line = 0;
};

struct DocumentSection {
  std::string type;  // e.g. "segment"
  std::string name;  // e.g. "main" (may be empty)
  std::map<std::string, DocumentValue> values;
  std::vector<std::vector<std::string>> data_rows;  // bare rows (field fixtures)
  int line = 0;

  bool has(const std::string& key) const { return values.count(key) != 0; }
};

/// Line-oriented structured text: "[type name]" headers, "key = value"
/// entries, '#' comments, and bare data rows inside a section.
struct ParsedDocument {
  std::vector<DocumentSection> sections;

  const DocumentSection* find(const std::string& type, const std::string& name = "") const;
  std::vector<const DocumentSection*> find_all(const std::string& type) const;
};

ParsedDocument parse_document(const std::string& path);

/// Unit-aware scalar conversions; the dimension names the accepted unit
/// family and the return value is SI.
enum class Dimension {
  Length,        // nm um mm cm m
  Time,          // fs ps ns s
  Energy,        // fJ pJ nJ J
  Frequency,     // THz GHz (optical cycles -> rad/s), rad/s
  Angle,         // rad deg
  LossPerLength, // dB/cm dB/m Np/m
  LossDb,        // dB
  InverseLength, // rad/m 1/m
  Velocity,      // m/s
  Scalar         // bare number
};

double quantity(const DocumentSection& section, const std::string& key, Dimension dimension);
double quantity_or(const DocumentSection& section, const std::string& key, Dimension dimension,
                   double fallback);
long integer(const DocumentSection& section, const std::string& key);
long integer_or(const DocumentSection& section, const std::string& key, long fallback);
bool boolean_or(const DocumentSection& section, const std::string& key, bool fallback);
std::string word(const DocumentSection& section, const std::string& key);
std::string word_or(const DocumentSection& section, const std::string& key,
                    const std::string& fallback);
std::vector<std::string> word_list(const DocumentSection& section, const std::string& key);

/// A fully validated run plan.
struct Scenario {
  FrequencyGrid signal_grid, idler_grid;
  double pump_center = 0;           // rad/s
  double pump_fwhm_wavelength = 0;  // m
  double pump_energy = 0;           // J
  std::vector<std::pair<std::string, SegmentProfile>> segments;
  std::vector<std::pair<std::string, LinearElement>> elements;
  std::vector<std::string> circuit_order;

  struct Sweep {
    bool present = false;
    Index points = 0;
    double start = 0, end = 0;
    Index jobs = 1;
  } sweep;

  struct Run {
    Frame frame = Frame::CoRotating;
    double dz = 0;
    bool with_loss = false;
    Index loss_sections = 0;
    Index stages = 1;
  } run;

  struct Outputs {
    std::string transfer_matrix;
    std::string metrics;
    std::string jsa_grid;
    std::string temporal_grid;
    std::string poling_table;
  } outputs;

  Circuit make_circuit() const;
  PumpField make_pump() const;
  ModeSpec pump_mode() const;
};

Scenario parse_scenario(const std::string& path);

/// Field fixture: susceptibility tensors plus one mode field per section.
struct FieldFixture {
  SusceptibilityTensors tensors;
  std::map<std::string, ModeFieldProfile> fields;
};

FieldFixture parse_field_fixture(const std::string& path);

}  // namespace nlo
