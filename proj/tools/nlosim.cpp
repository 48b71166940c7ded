#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "nlo/analysis.hpp"
#include "nlo/circuit.hpp"
#include "nlo/gaussian.hpp"
#include "nlo/io.hpp"
#include "nlo/oracle.hpp"
#include "nlo/scenario.hpp"

namespace {

using namespace nlo;

void write_run_metrics(const std::string& path, const CircuitRunResult& run) {
  if (path.empty()) return;
  Table table;
  table.header = {"mean_photons_signal", "mean_photons_idler", "purity", "r1", "r2", "r3"};
  const Arrayd& r = run.metrics.schmidt_r;
  auto rk = [&](Index k) { return r.size() > k ? r(k) : 0.0; };
  table.rows.push_back({run.metrics.mean_photons_signal, run.metrics.mean_photons_idler,
                        run.metrics.purity, rk(0), rk(1), rk(2)});
  write_table(path, table);
}

int cmd_simulate(const std::string& scenario_path) {
  const Scenario sc = parse_scenario(scenario_path);
  const PumpField pump = sc.make_pump();
  CircuitRunOptions options;
  options.frame = sc.run.frame;
  options.dz = sc.run.dz;
  options.with_loss = sc.run.with_loss;
  options.loss_sections = sc.run.loss_sections;

  if (sc.run.stages > 1) {
    const Circuit circuit = sc.make_circuit();
    const SegmentProfile* stage = nullptr;
    std::optional<LinearElement> twoc;
    for (const auto& el : circuit.elements) {
      if (std::holds_alternative<SegmentProfile>(el) && !stage)
        stage = &std::get<SegmentProfile>(el);
      else if (std::holds_alternative<LinearElement>(el) && !twoc)
        twoc = std::get<LinearElement>(el);
    }
    if (!stage) throw ValidationError("staged run needs one [segment]");
    const auto metrics =
        cascade_stages(*stage, twoc, sc.run.stages, pump, sc.signal_grid, sc.idler_grid, options);
    if (!sc.outputs.metrics.empty()) {
      Table table;
      table.header = {"stages", "r1", "bandwidth_rad_s", "mean_photons"};
      for (const auto& m : metrics)
        table.rows.push_back(
            {static_cast<double>(m.stages), m.leading_r, m.bandwidth, m.mean_photons});
      write_table(sc.outputs.metrics, table);
    }
    for (const auto& m : metrics)
      std::printf("stages=%td  r1=%.6f  bandwidth=%.6g rad/s  <N>=%.6g\n", m.stages, m.leading_r,
                  m.bandwidth, m.mean_photons);
    return 0;
  }

  const CircuitRunResult run =
      run_circuit(sc.make_circuit(), pump, sc.signal_grid, sc.idler_grid, options);
  write_run_metrics(sc.outputs.metrics, run);
  if (run.u && !sc.outputs.transfer_matrix.empty())
    write_transfer_matrix(sc.outputs.transfer_matrix, *run.u);
  if (run.u && !sc.outputs.jsa_grid.empty())
    write_magnitude_grid(sc.outputs.jsa_grid, run.u->si, sc.signal_grid.omegas(),
                         sc.idler_grid.omegas());
  if (run.u && !sc.outputs.temporal_grid.empty()) {
    const TemporalTransfer tt = temporal_transfer_function(*run.u);
    write_magnitude_grid(sc.outputs.temporal_grid, tt.amplitude, tt.t_signal, tt.t_idler);
  }
  std::printf("<N_s>=%.6g  purity=%.4f  r1=%.6f\n", run.metrics.mean_photons_signal,
              run.metrics.purity,
              run.metrics.schmidt_r.size() > 0 ? run.metrics.schmidt_r(0) : 0.0);
  return 0;
}

int cmd_oracle_jsa(const std::string& scenario_path) {
  const Scenario sc = parse_scenario(scenario_path);
  const PumpField pump = sc.make_pump();
  const SegmentProfile& segment = sc.segments.front().second;
  const PhaseMatchingFunction pm =
      phase_matching_function(segment, sc.signal_grid, sc.idler_grid);
  const JointSpectralAmplitude jsa = first_order_jsa(pump, pm);
  if (!sc.outputs.jsa_grid.empty())
    write_magnitude_grid(sc.outputs.jsa_grid, jsa.values, sc.signal_grid.omegas(),
                         sc.idler_grid.omegas());
  if (!sc.outputs.metrics.empty()) {
    Eigen::JacobiSVD<Matrixcd> svd(jsa.values);
    Table table;
    table.header = {"frobenius", "s1", "s2", "s3"};
    const auto& s = svd.singularValues();
    auto sk = [&](Index k) { return s.size() > k ? s(k) : 0.0; };
    table.rows.push_back({jsa.frobenius(), sk(0), sk(1), sk(2)});
    write_table(sc.outputs.metrics, table);
  }
  std::printf("|f|_F=%.6g\n", jsa.frobenius());
  return 0;
}

int cmd_poling_design(const std::string& scenario_path) {
  const ParsedDocument doc = parse_document(scenario_path);
  const DocumentSection* chosen = nullptr;
  for (const auto* section : doc.find_all("segment"))
    if (word_or(*section, "poling", "none") == "apodized") chosen = section;
  if (!chosen) throw ValidationError("poling-design needs a [segment] with poling = apodized");
  const double length = quantity(*chosen, "length", Dimension::Length);
  const double mismatch = quantity(*chosen, "mismatch", Dimension::InverseLength);
  const double sigma =
      length * quantity_or(*chosen, "apodized_sigma_fraction", Dimension::Scalar, 0.25);
  const double c = std::sqrt(2.0 / kPi) * sigma *
                   quantity_or(*chosen, "apodized_c_scale", Dimension::Scalar, 1.0);
  const ApodizedPolingResult result = apodized_pattern(mismatch, length, sigma, c);

  const Scenario sc = parse_scenario(scenario_path);
  std::string out = sc.outputs.poling_table;
  if (out.empty()) out = "poling_design.csv";
  Table table;
  table.header = {"boundary_m", "sign", "realized", "target"};
  for (Index d = 0; d < result.pattern.domain_count(); ++d)
    table.rows.push_back({result.pattern.boundaries[static_cast<size_t>(d) + 1],
                          static_cast<double>(result.pattern.signs[static_cast<size_t>(d)]),
                          result.realized(d + 1), result.target(d + 1)});
  write_table(out, table);
  std::printf("domains=%td  infeasible_slope=%d  wrote %s\n", result.pattern.domain_count(),
              result.infeasible_slope ? 1 : 0, out.c_str());
  return 0;
}

int cmd_gamma(const std::string& fixture_path, const std::string& process_word, double angle_deg) {
  const FieldFixture fixture = parse_field_fixture(fixture_path);
  NonlinearProcess process;
  if (process_word == "pdc") process = NonlinearProcess::Pdc;
  else if (process_word == "qfc") process = NonlinearProcess::Qfc;
  else if (process_word == "spm") process = NonlinearProcess::Spm;
  else if (process_word == "xpm-s") process = NonlinearProcess::XpmSignal;
  else if (process_word == "xpm-i") process = NonlinearProcess::XpmIdler;
  else if (process_word == "sfwm") process = NonlinearProcess::Sfwm;
  else throw ValidationError("--process expects pdc|qfc|spm|xpm-s|xpm-i|sfwm");

  ModeFieldSet fields;
  auto lookup = [&](const char* name) -> const ModeFieldProfile* {
    const auto it = fixture.fields.find(name);
    return it == fixture.fields.end() ? nullptr : &it->second;
  };
  fields.signal = lookup("signal");
  fields.idler = lookup("idler");
  fields.pump = lookup("pump");
  fields.pump2 = lookup("pump2");

  SusceptibilityTensors tensors = fixture.tensors;
  if (angle_deg != 0) tensors = rotate_tensors(tensors, angle_deg * kPi / 180.0);
  const double gamma = overlap_gamma(fields, tensors, process);
  std::printf("gamma = %.10g\n", gamma);
  return 0;
}

int cmd_sweep(const std::string& scenario_path, long jobs_override) {
  const Scenario sc = parse_scenario(scenario_path);
  if (!sc.sweep.present) throw ValidationError("sweep needs a [sweep] section");
  const PumpField pump = sc.make_pump();
  CircuitRunOptions options;
  options.frame = sc.run.frame;
  options.dz = sc.run.dz;
  options.with_loss = sc.run.with_loss;
  options.loss_sections = sc.run.loss_sections;
  const Arrayd phases =
      Arrayd::LinSpaced(sc.sweep.points, sc.sweep.start, sc.sweep.end);
  const Index jobs = jobs_override > 0 ? jobs_override : sc.sweep.jobs;
  const PhaseSweepResult result =
      sweep_phase(sc.make_circuit(), pump, sc.signal_grid, sc.idler_grid, phases, options, jobs);
  if (!sc.outputs.metrics.empty()) {
    Table table;
    table.header = {"phase_rad", "value"};
    for (Index k = 0; k < result.phases.size(); ++k)
      table.rows.push_back({result.phases(k), result.value(k)});
    write_table(sc.outputs.metrics, table);
  }
  std::printf("visibility=%.6f  max=%.6g  min=%.6g\n", result.visibility, result.value.maxCoeff(),
              result.value.minCoeff());
  return 0;
}

int cmd_analyze(const std::string& matrix_path, const std::string& out) {
  const TransferMatrix u = read_transfer_matrix(matrix_path);
  const SchmidtDecomposition schmidt = schmidt_decompose(u);
  Table table;
  table.header = {"mode", "r", "weight"};
  const Index n_report = std::min<Index>(schmidt.r.size(), 10);
  for (Index l = 0; l < n_report; ++l) {
    const double weight = u.kind == PropagatorKind::Squeezer
                              ? std::sinh(schmidt.r(l)) * std::sinh(schmidt.r(l))
                              : std::sin(schmidt.r(l)) * std::sin(schmidt.r(l));
    table.rows.push_back({static_cast<double>(l + 1), schmidt.r(l), weight});
  }
  if (!out.empty()) write_table(out, table);
  if (u.kind == PropagatorKind::Squeezer) {
    const PurityResult purity = purity_and_schmidt_number(schmidt.r);
    std::printf("<N>=%.6g  K=%.4f  purity=%.4f  r1=%.6f\n", mean_photon_number(u),
                purity.schmidt_number, purity.purity, schmidt.r(0));
  } else {
    const QpgMetrics qpg = qpg_metrics(schmidt.r);
    std::printf("eta1=%.6f  separability=%.4f  selectivity=%.4f\n", qpg.eta(0),
                qpg.separability(0), qpg.selectivity);
  }
  return 0;
}

int cmd_detect(const std::string& scenario_path) {
  const Scenario sc = parse_scenario(scenario_path);
  const PumpField pump = sc.make_pump();
  CircuitRunOptions options;
  options.frame = sc.run.frame;
  options.dz = sc.run.dz;
  options.with_loss = true;
  options.loss_sections = sc.run.loss_sections;
  const CircuitRunResult run =
      run_circuit(sc.make_circuit(), pump, sc.signal_grid, sc.idler_grid, options);
  const CovarianceState& state = *run.state;
  const double poff_s = prob_vacuum_signal(state);
  const double poff_i = prob_vacuum_idler(state);
  const HeraldingEfficiency he = heralding_efficiency(state);
  if (!sc.outputs.metrics.empty()) {
    Table table;
    table.header = {"P_off_signal", "P_off_idler", "P_on_signal", "P_on_idler", "HE_signal",
                    "HE_idler", "mean_photons_signal"};
    table.rows.push_back({poff_s, poff_i, 1.0 - poff_s, 1.0 - poff_i, he.signal, he.idler,
                          run.metrics.mean_photons_signal});
    write_table(sc.outputs.metrics, table);
  }
  std::printf("P_on(S)=%.6g  P_on(I)=%.6g  HE_s=%.6f  HE_i=%.6f\n", 1.0 - poff_s, 1.0 - poff_i,
              he.signal, he.idler);
  return 0;
}

int cmd_temporal(const std::string& matrix_path, const std::string& out) {
  const TransferMatrix u = read_transfer_matrix(matrix_path);
  const TemporalTransfer tt = temporal_transfer_function(u);
  if (!out.empty()) write_magnitude_grid(out, tt.amplitude, tt.t_signal, tt.t_idler);
  Index r = 0, c = 0;
  tt.amplitude.cwiseAbs().maxCoeff(&r, &c);
  std::printf("peak |U~| at t_s=%.4g ps, t_i=%.4g ps\n", tt.t_signal(r) * 1e12,
              tt.t_idler(c) * 1e12);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed nonlinear quantum photonics simulator"};
  app.require_subcommand(1);

  std::string scenario_path, fixture_path, matrix_path, out_path, process_word = "pdc";
  double angle_deg = 0;
  long jobs = 0;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario circuit");
  simulate->add_option("scenario", scenario_path, "scenario file")->required();

  auto* oracle = app.add_subcommand("oracle-jsa", "First-order JSA of the first segment");
  oracle->add_option("scenario", scenario_path, "scenario file")->required();

  auto* poling = app.add_subcommand("poling-design", "Apodized poling pattern and traces");
  poling->add_option("scenario", scenario_path, "scenario file")->required();

  auto* gamma = app.add_subcommand("gamma", "Nonlinear coupling from a field fixture");
  gamma->add_option("fixture", fixture_path, "field fixture file")->required();
  gamma->add_option("--process", process_word, "pdc|qfc|spm|xpm-s|xpm-i|sfwm");
  gamma->add_option("--angle", angle_deg, "tensor rotation angle (deg)");

  auto* sweep = app.add_subcommand("sweep", "Phase sweep and interference visibility");
  sweep->add_option("scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--jobs", jobs, "parallel sweep workers");

  auto* analyze = app.add_subcommand("analyze", "Schmidt metrics of a saved transfer matrix");
  analyze->add_option("matrix", matrix_path, "matrix container")->required();
  analyze->add_option("--out", out_path, "metrics csv path");

  auto* detect = app.add_subcommand("detect", "Covariance run with loss and click statistics");
  detect->add_option("scenario", scenario_path, "scenario file")->required();

  auto* temporal = app.add_subcommand("temporal", "Temporal transfer function of a saved matrix");
  temporal->add_option("matrix", matrix_path, "matrix container")->required();
  temporal->add_option("--out", out_path, "magnitude grid csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path);
    if (oracle->parsed()) return cmd_oracle_jsa(scenario_path);
    if (poling->parsed()) return cmd_poling_design(scenario_path);
    if (gamma->parsed()) return cmd_gamma(fixture_path, process_word, angle_deg);
    if (sweep->parsed()) return cmd_sweep(scenario_path, jobs);
    if (analyze->parsed()) return cmd_analyze(matrix_path, out_path);
    if (detect->parsed()) return cmd_detect(scenario_path);
    if (temporal->parsed()) return cmd_temporal(matrix_path, out_path);
  } catch (const nlo::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const nlo::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
