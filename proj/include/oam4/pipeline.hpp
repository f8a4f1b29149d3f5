#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "oam4/correlations.hpp"
#include "oam4/tomography.hpp"
#include "oam4/witnesses.hpp"

namespace oam4 {

/// Source -> splitters -> noisy detection -> counts -> MLE -> witnesses.
struct PipelineConfig {
  double gain = 0.1;
  NoiseModel noise;
  /// Expected four-folds summed over all 1296 settings.
  double total_events = 1e5;
  /// false: feed expected counts straight into the MLE.
  bool sample_counts = true;
  int mle_restarts = 2;
  int witness_starts = 8;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  PureState4 ideal;
  DensityMatrix truth;
  std::vector<CountRecord> records;  // empty when counts are not sampled
  MleResult mle;
  double fidelity_to_truth = 0.0;
  std::vector<WitnessReport> raw;        // collective spin, Dicke fidelity, I24 on rho_mle
  std::vector<WitnessReport> optimized;  // same order, after local-unitary optimization
};

/// Post-selected detector state of the L_max = 1 double-pair source.
PureState4 detector_state(double gain);

PipelineResult run_pipeline(const PipelineConfig& config);

nlohmann::json to_json(const PipelineConfig& config);
nlohmann::json witness_summary_json(const PipelineResult& result);

}  // namespace oam4
