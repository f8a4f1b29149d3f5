#include "oam4/pipeline.hpp"

#include "oam4/error.hpp"
#include "oam4/mode_optics.hpp"
#include "oam4/spdc.hpp"

namespace oam4 {

namespace {

// Probabilities of any state summed over the 6^4 product settings.
constexpr double kMubProbabilityMass = 81.0;

constexpr WitnessId kWitnesses[] = {WitnessId::CollectiveSpin, WitnessId::DickeFidelity, WitnessId::I24};

}  // namespace

PureState4 detector_state(double gain) {
  const PostSelectionResult r = split_to_detectors(four_photon_state({gain, 1, false, 2}));
  return r.state;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  if (!(config.total_events > 0.0)) throw ValidationError("total events must be positive");
  if (config.witness_starts < 0) throw ValidationError("witness starts must be non-negative");
  PipelineResult out;
  out.ideal = detector_state(config.gain);
  out.truth = apply_noise(out.ideal, config.noise);

  const auto settings = full_mub_settings();
  const double rate = config.total_events / kMubProbabilityMass;
  const MleOptions mle_options{config.seed, config.mle_restarts};
  if (config.sample_counts) {
    out.records = simulate_dataset(out.truth, settings, rate, 1.0, config.seed);
    out.mle = reconstruct_mle(TomographyDataset{out.records, ProjectorSetId::FullMub1296}, mle_options);
  } else {
    out.mle = reconstruct_mle(expected_observations(out.truth, settings, rate, 1.0), mle_options);
  }
  out.fidelity_to_truth = fidelity(out.mle.rho, out.truth);

  OptimizeOptions opt;
  opt.n_starts = config.witness_starts;
  opt.seed = config.seed;
  for (WitnessId id : kWitnesses) {
    out.raw.push_back(evaluate_witness(id, out.mle.rho));
    out.optimized.push_back(optimize_witness(out.mle.rho, id, opt));
  }
  return out;
}

nlohmann::json to_json(const PipelineConfig& config) {
  return {{"gain", config.gain},
          {"background_fraction", config.noise.background_fraction},
          {"white_noise", config.noise.white_noise},
          {"misalignment_sigma", config.noise.misalignment_sigma},
          {"noise_seed", config.noise.seed},
          {"total_events", config.total_events},
          {"sample_counts", config.sample_counts},
          {"mle_restarts", config.mle_restarts},
          {"witness_starts", config.witness_starts},
          {"seed", config.seed}};
}

nlohmann::json witness_summary_json(const PipelineResult& result) {
  nlohmann::json raw = nlohmann::json::array(), optimized = nlohmann::json::array();
  for (const auto& r : result.raw) raw.push_back(to_json(r));
  for (const auto& r : result.optimized) optimized.push_back(to_json(r));
  return {{"fidelity_to_truth", result.fidelity_to_truth},
          {"log_likelihood", result.mle.log_likelihood},
          {"iterations", result.mle.iterations},
          {"raw", raw},
          {"optimized", optimized}};
}

}  // namespace oam4
