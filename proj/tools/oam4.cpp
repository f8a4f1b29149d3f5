// oam4: four-photon OAM source, detection and entanglement analysis.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oam4/correlations.hpp"
#include "oam4/crystal.hpp"
#include "oam4/error.hpp"
#include "oam4/pipeline.hpp"
#include "oam4/spdc.hpp"
#include "oam4/tomography.hpp"
#include "oam4/witnesses.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oam4;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string output_dir = ".";
};

std::uint64_t require_seed(const Globals& g, const std::string& command) {
  if (g.seed_opt->count() == 0)
    throw ValidationError(command + " is randomized and needs --seed (or OAM4_SEED)");
  return g.seed;
}

fs::path output_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.output_dir);
  return fs::path(g.output_dir) / name;
}

void write_json(const Globals& g, const std::string& name, const json& j) {
  const fs::path p = output_path(g, name);
  std::ofstream out(p);
  if (!out) throw ValidationError("cannot write " + p.string());
  out << j.dump(2) << '\n';
  std::cout << p.string() << '\n';
}

template <class Writer>
void write_text(const Globals& g, const std::string& name, Writer&& writer) {
  const fs::path p = output_path(g, name);
  std::ofstream out(p);
  if (!out) throw ValidationError("cannot write " + p.string());
  writer(out);
  std::cout << p.string() << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Noise flags shared by the simulating commands.
struct NoiseFlags {
  bool calibrated = false;
  double background = 0.0;
  double white = 0.0;
  double sigma = 0.0;
  CLI::Option* background_opt = nullptr;
  CLI::Option* white_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;

  void add(CLI::App* app) {
    app->add_flag("--calibrated", calibrated, "start from the calibrated noise model");
    background_opt = app->add_option("--background", background, "uncorrelated double-pair fraction");
    white_opt = app->add_option("--white-noise", white, "depolarizing fraction");
    sigma_opt = app->add_option("--misalignment", sigma, "std. dev. of per-arm rotation angles (rad)");
  }

  NoiseModel model(std::uint64_t seed) const {
    NoiseModel n = calibrated ? NoiseModel::calibrated(seed) : NoiseModel{0.0, 0.0, 0.0, seed};
    auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (!calibrated || given(background_opt)) n.background_fraction = background;
    if (!calibrated || given(white_opt)) n.white_noise = white;
    if (!calibrated || given(sigma_opt)) n.misalignment_sigma = sigma;
    n.validate();
    return n;
  }
};

json noise_json(const NoiseModel& n) {
  return {{"background_fraction", n.background_fraction},
          {"white_noise", n.white_noise},
          {"misalignment_sigma", n.misalignment_sigma},
          {"seed", n.seed}};
}

json tables_json(const DensityMatrix& rho) {
  json tables = json::array();
  for (Basis b : kAllBases) tables.push_back(probability_table_json(probability_table(rho, b), b));
  return tables;
}

// ---- state -------------------------------------------------------------

struct StateArgs {
  SpdcParams params;
};

void run_state(const Globals& g, const StateArgs& a) {
  a.params.validate();
  const FockState full = expand_vacuum(a.params);
  json j = {{"config",
             {{"command", "state"},
              {"gain", a.params.gain},
              {"max_ell", a.params.max_ell},
              {"gaussian", a.params.include_gaussian},
              {"order", a.params.order}}},
            {"state", to_json(full)},
            {"two_photon", to_json(normalize(project_photon_number(full, 2)))}};
  if (a.params.order >= 2) j["four_photon"] = to_json(four_photon_state(a.params));
  write_json(g, "state.json", j);
}

// ---- correlations ------------------------------------------------------

struct CorrelationArgs {
  NoiseFlags noise;
  double events = 0.0;  // per basis; 0 = no sampling
};

json correlations_payload(const DensityMatrix& noisy, const NoiseModel& noise, double events, std::uint64_t seed,
                          std::vector<CountRecord>* counts) {
  json j = {{"config", {{"command", "correlations"}, {"noise", noise_json(noise)}, {"events_per_basis", events}}},
            {"theory", tables_json(projector(dicke_4_2()))},
            {"noisy", tables_json(noisy)}};
  if (events > 0.0) {
    j["config"]["seed"] = seed;
    json sampled = json::array();
    for (Basis b : kAllBases) {
      std::vector<MeasurementSetting> settings;
      for (unsigned o = 0; o < 16; ++o) settings.push_back(MeasurementSetting::from_outcome(b, o));
      const auto records = simulate_dataset(noisy, settings, events, 1.0, seed + static_cast<std::uint64_t>(b) * 7919);
      double total = 0.0;
      for (const auto& r : records) total += static_cast<double>(r.count);
      std::array<double, 16> table{};
      for (unsigned o = 0; o < 16; ++o) table[o] = total > 0 ? static_cast<double>(records[o].count) / total : 0.0;
      sampled.push_back(probability_table_json(table, b));
      if (counts) counts->insert(counts->end(), records.begin(), records.end());
    }
    j["sampled"] = sampled;
  }
  return j;
}

void run_correlations(const Globals& g, const CorrelationArgs& a, const std::string& prefix) {
  if (a.events < 0.0) throw ValidationError("events must be non-negative");
  const std::uint64_t seed = a.events > 0.0 || a.noise.sigma > 0.0 || a.noise.calibrated
                                 ? require_seed(g, "correlations with sampling or misalignment")
                                 : g.seed;
  const NoiseModel noise = a.noise.model(seed);
  const DensityMatrix noisy = apply_noise(dicke_4_2(), noise);
  std::vector<CountRecord> counts;
  write_json(g, prefix + "correlations.json", correlations_payload(noisy, noise, a.events, seed, &counts));
  if (!counts.empty())
    write_text(g, prefix + "correlations_counts.csv", [&](std::ostream& out) { write_counts_csv(out, counts); });
}

// ---- powerscan ---------------------------------------------------------

struct PowerScanArgs {
  PowerScanConfig config;
  std::vector<double> powers = default_scan_powers();
};

void run_powerscan(const Globals& g, PowerScanArgs a, const std::string& prefix) {
  a.config.seed = require_seed(g, "powerscan");
  if (a.powers.size() < 2) throw ValidationError("need at least two pump powers");
  for (double p : a.powers)
    if (!(p > 0.0)) throw ValidationError("pump powers must be positive");
  const auto rows = power_scan(a.powers, a.config);
  std::vector<double> singles, fourfold;
  for (const auto& r : rows) {
    singles.push_back(r.singles_rate);
    fourfold.push_back(r.fourfold_rate);
  }
  const PowerLawFit fs = fit_power_law(a.powers, singles);
  const PowerLawFit ff = fit_power_law(a.powers, fourfold);
  write_text(g, prefix + "powerscan.csv", [&](std::ostream& out) { write_power_scan_csv(out, rows); });
  const auto& c = a.config;
  write_json(g, prefix + "powerscan_fit.json",
             {{"config",
               {{"command", "powerscan"},
                {"powers_mw", a.powers},
                {"repetition_rate_hz", c.repetition_rate_hz},
                {"pair_probability_per_mw", c.pair_probability_per_mw},
                {"max_ell", c.max_ell},
                {"singles_efficiency", c.singles_efficiency},
                {"fourfold_efficiency", c.fourfold_efficiency},
                {"background_fraction", c.background_fraction},
                {"duration_s", c.duration_s},
                {"seed", c.seed}}},
              {"singles_exponent", fs.exponent},
              {"fourfold_exponent", ff.exponent},
              {"delayed_ratio", delayed_ratio(rows)}});
}

// ---- tomo / witness ----------------------------------------------------

struct PipelineArgs {
  NoiseFlags noise;
  double gain = 0.1;
  double events = 1e5;
  bool noiseless_counts = false;
  int restarts = 2;
  int starts = 8;
  std::string input;
};

PipelineConfig pipeline_config(std::uint64_t seed, const PipelineArgs& a) {
  PipelineConfig c;
  c.gain = a.gain;
  c.noise = a.noise.model(seed);
  c.total_events = a.events;
  c.sample_counts = !a.noiseless_counts;
  c.mle_restarts = a.restarts;
  c.witness_starts = a.starts;
  c.seed = seed;
  return c;
}

json density_payload(const DensityMatrix& rho, const MleResult& mle, const json& config) {
  return density_matrix_json(rho, {{"config", config},
                                   {"log_likelihood", mle.log_likelihood},
                                   {"iterations", mle.iterations},
                                   {"scale", mle.scale}});
}

void run_tomo(const Globals& g, const PipelineArgs& a, const std::string& prefix) {
  const std::uint64_t seed = require_seed(g, "tomo");
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    if (!in) throw ValidationError("cannot read " + a.input);
    const auto records = read_counts_csv(in);
    const MleResult r = reconstruct_mle(TomographyDataset{records, ProjectorSetId::Custom}, {seed, a.restarts});
    const json config = {{"command", "tomo"}, {"input", a.input}, {"seed", seed}, {"restarts", a.restarts}};
    write_json(g, prefix + "rho.json", density_payload(r.rho, r, config));
    return;
  }
  if (!(a.events > 0.0)) throw ValidationError("events must be positive");
  const PipelineConfig c = pipeline_config(seed, a);
  const PureState4 ideal = detector_state(c.gain);
  const DensityMatrix truth = apply_noise(ideal, c.noise);
  const auto settings = full_mub_settings();
  MleResult r;
  json config = to_json(c);
  config["command"] = "tomo";
  if (c.sample_counts) {
    const auto records = simulate_dataset(truth, settings, c.total_events / 81.0, 1.0, seed);
    write_text(g, prefix + "counts.csv", [&](std::ostream& out) { write_counts_csv(out, records); });
    r = reconstruct_mle(TomographyDataset{records, ProjectorSetId::FullMub1296}, {seed, c.mle_restarts});
  } else {
    r = reconstruct_mle(expected_observations(truth, settings, c.total_events / 81.0, 1.0), {seed, c.mle_restarts});
  }
  json payload = density_payload(r.rho, r, config);
  payload["metadata"]["fidelity_to_truth"] = fidelity(r.rho, truth);
  payload["metadata"]["fidelity_to_dicke"] = fidelity(r.rho, projector(dicke_4_2()));
  write_json(g, prefix + "rho.json", payload);
  write_json(g, prefix + "rho_ideal.json", density_matrix_json(projector(ideal), {{"config", config}}));
}

json witness_reports(const DensityMatrix& rho, int starts, std::uint64_t seed) {
  OptimizeOptions opt;
  opt.n_starts = starts;
  opt.seed = seed;
  json raw = json::array(), optimized = json::array();
  for (WitnessId id : {WitnessId::CollectiveSpin, WitnessId::DickeFidelity, WitnessId::I24}) {
    raw.push_back(to_json(evaluate_witness(id, rho)));
    optimized.push_back(to_json(optimize_witness(rho, id, opt)));
  }
  return {{"raw", raw}, {"optimized", optimized}};
}

void run_witness(const Globals& g, const PipelineArgs& a, const std::string& prefix) {
  const std::uint64_t seed = require_seed(g, "witness");
  if (a.starts < 0) throw ValidationError("starts must be non-negative");
  if (!a.input.empty()) {
    const DensityMatrix rho = density_matrix_from_json(read_json(a.input));
    json j = witness_reports(rho, a.starts, seed);
    j["config"] = {{"command", "witness"}, {"input", a.input}, {"starts", a.starts}, {"seed", seed}};
    write_json(g, prefix + "witnesses.json", j);
    return;
  }
  const PipelineConfig c = pipeline_config(seed, a);
  const PipelineResult r = run_pipeline(c);
  json j = witness_summary_json(r);
  j["config"] = to_json(c);
  j["config"]["command"] = "witness";
  write_json(g, prefix + "witnesses.json", j);
}

// ---- crystal -----------------------------------------------------------

struct CrystalArgs {
  double delta_ng = 0.456;
  double pulse_ps = 2.0;
};

void run_crystal(const Globals& g, const CrystalArgs& a) {
  const WalkOff w = group_velocity_walkoff(a.delta_ng, a.pulse_ps);
  write_json(g, "crystal.json",
             {{"config", {{"command", "crystal"}, {"delta_ng", a.delta_ng}, {"pulse_ps", a.pulse_ps}}},
              {"dispersion_ps_per_mm", w.dispersion_ps_per_mm},
              {"walkoff_length_mm", w.walkoff_length_mm}});
}

// ---- reproduce ---------------------------------------------------------

void reproduce_fig3(const Globals& g) {
  CorrelationArgs a;
  a.noise.calibrated = true;
  a.events = 5000;
  run_correlations(g, a, "fig3_");
}

void reproduce_fig4(const Globals& g) {
  PipelineArgs a;
  a.noise.calibrated = true;
  run_tomo(g, a, "fig4_");
}

void reproduce_witnesses(const Globals& g) {
  const std::uint64_t seed = require_seed(g, "reproduce witnesses");
  PipelineArgs a;
  a.noise.calibrated = true;
  json datasets = json::array();
  for (std::uint64_t k = 0; k < 3; ++k) {
    const PipelineConfig c = pipeline_config(seed + k, a);
    const PipelineResult r = run_pipeline(c);
    json d = witness_summary_json(r);
    d["config"] = to_json(c);
    datasets.push_back(d);
  }
  write_json(g, "witnesses_reproduced.json",
             {{"config", {{"command", "reproduce witnesses"}, {"seed", seed}, {"datasets", 3}}}, {"datasets", datasets}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-photon OAM entanglement: source, detection and analysis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values, one section per subcommand");
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "seed for every random draw")->envname("OAM4_SEED");
  app.add_option("-o,--output-dir", g.output_dir, "directory for output files")->capture_default_str();

  StateArgs state;
  auto* state_cmd = app.add_subcommand("state", "SPDC output state and its two- and four-photon sectors");
  state_cmd->add_option("--gain", state.params.gain, "single-pass amplitude gain")->capture_default_str();
  state_cmd->add_option("--lmax", state.params.max_ell, "OAM cutoff")->capture_default_str();
  state_cmd->add_option("--order", state.params.order, "pair-creation steps kept (1-3)")->capture_default_str();
  state_cmd->add_flag("--gaussian,!--no-gaussian", state.params.include_gaussian, "include the Gaussian mode");

  CorrelationArgs corr;
  auto* corr_cmd = app.add_subcommand("correlations", "joint detection tables in the three bases");
  corr.noise.add(corr_cmd);
  corr_cmd->add_option("--events", corr.events, "expected four-folds per basis to sample (0: none)");

  PowerScanArgs scan;
  auto* scan_cmd = app.add_subcommand("powerscan", "singles and four-fold rates against pump power");
  scan_cmd->add_option("--powers", scan.powers, "pump powers in mW");
  scan_cmd->add_option("--duration", scan.config.duration_s, "integration time per power (s)")->capture_default_str();
  scan_cmd->add_option("--pair-probability", scan.config.pair_probability_per_mw, "pair probability per pulse per mW");
  scan_cmd->add_option("--rep-rate", scan.config.repetition_rate_hz, "pump repetition rate (Hz)");
  scan_cmd->add_option("--singles-efficiency", scan.config.singles_efficiency);
  scan_cmd->add_option("--fourfold-efficiency", scan.config.fourfold_efficiency);
  scan_cmd->add_option("--background", scan.config.background_fraction, "uncorrelated four-fold fraction");

  PipelineArgs tomo;
  auto* tomo_cmd = app.add_subcommand("tomo", "simulate tomography counts and reconstruct rho");
  tomo.noise.add(tomo_cmd);
  tomo_cmd->add_option("--gain", tomo.gain);
  tomo_cmd->add_option("--events", tomo.events, "expected four-folds over all 1296 settings")->capture_default_str();
  tomo_cmd->add_flag("--noiseless-counts", tomo.noiseless_counts, "use expected counts instead of Poisson draws");
  tomo_cmd->add_option("--restarts", tomo.restarts, "MLE starts")->capture_default_str();
  tomo_cmd->add_option("--input", tomo.input, "reconstruct from a counts CSV instead of simulating");

  PipelineArgs wit;
  auto* wit_cmd = app.add_subcommand("witness", "entanglement witnesses, raw and optimized over local unitaries");
  wit.noise.add(wit_cmd);
  wit_cmd->add_option("--gain", wit.gain);
  wit_cmd->add_option("--events", wit.events)->capture_default_str();
  wit_cmd->add_flag("--noiseless-counts", wit.noiseless_counts);
  wit_cmd->add_option("--restarts", wit.restarts)->capture_default_str();
  wit_cmd->add_option("--starts", wit.starts, "optimizer starts")->capture_default_str();
  wit_cmd->add_option("--input", wit.input, "density matrix JSON to analyse instead of simulating");

  CrystalArgs crystal;
  auto* crystal_cmd = app.add_subcommand("crystal", "group-velocity walk-off of pump and downconverted pulses");
  crystal_cmd->add_option("--delta-ng", crystal.delta_ng, "group index difference")->capture_default_str();
  crystal_cmd->add_option("--pulse-ps", crystal.pulse_ps, "pulse duration (ps)")->capture_default_str();

  auto* repro = app.add_subcommand("reproduce", "figure and number presets");
  repro->require_subcommand(1);
  auto* fig2 = repro->add_subcommand("fig2", "pump-power scan");
  auto* fig3 = repro->add_subcommand("fig3", "correlation tables");
  auto* fig4 = repro->add_subcommand("fig4", "reconstructed density matrix");
  auto* witnesses = repro->add_subcommand("witnesses", "witness values on three simulated data sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*state_cmd) run_state(g, state);
    else if (*corr_cmd) run_correlations(g, corr, "");
    else if (*scan_cmd) run_powerscan(g, scan, "");
    else if (*tomo_cmd) run_tomo(g, tomo, "");
    else if (*wit_cmd) run_witness(g, wit, "");
    else if (*crystal_cmd) run_crystal(g, crystal);
    else if (*fig2) run_powerscan(g, PowerScanArgs{}, "fig2_");
    else if (*fig3) reproduce_fig3(g);
    else if (*fig4) reproduce_fig4(g);
    else if (*witnesses) reproduce_witnesses(g);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
