// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oam4/correlations.hpp"
#include "oam4/crystal.hpp"
#include "oam4/mode_optics.hpp"
#include "oam4/pipeline.hpp"
#include "oam4/spdc.hpp"
#include "oam4/tomography.hpp"
#include "oam4/witnesses.hpp"
#include "oracles/dense_fock.hpp"
#include "oracles/projection.hpp"
#include "oracles/states.hpp"

using namespace oam4;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LocalUnitaryParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  LocalUnitaryParams p;
  for (double& v : p.values) v = angle(rng);
  return p;
}

Outcome double_pair_structure() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SpdcParams params{0.1, 3, false, 2};
  const FockState four = four_photon_state(params);
  const double elapsed = seconds_since(t0);

  const auto dense = oracle::expand(3, false, 0.1, 2);
  const double dense_norm = std::sqrt(oracle::sector_norm2(dense, 4));
  const double dev = oracle::max_sector_deviation(dense, 1.0 / dense_norm, four, 1.0, 4);
  o.require(dev <= 1e-12, "vs K^2|0> oracle " + fmt("%.1e", dev));

  const auto literal = oracle::double_pair_literal(3);
  const double literal_norm = std::sqrt(oracle::sector_norm2(literal, 4));
  const double lit = oracle::max_sector_deviation(literal, 1.0 / literal_norm, four, 1.0, 4);
  o.require(lit <= 1e-12, "vs written double-pair sum " + fmt("%.1e", lit));

  o.require(elapsed < 1.0, "runtime " + fmt("%.3f s", elapsed));
  return o;
}

Outcome detector_dicke() {
  Outcome o;
  const PostSelectionResult r = split_to_detectors(FockState::basis(ModeSpace(1, false), {2, 2}));
  const double f = std::norm(r.state.dot(dicke_4_2()));
  o.require(f >= 1.0 - 1e-12, "fidelity 1 - " + fmt("%.1e", 1.0 - f));
  return o;
}

Outcome correlation_tables() {
  Outcome o;
  const DensityMatrix rho = projector(dicke_4_2());
  const char* names[] = {"RL", "HV", "DA"};
  for (int b = 0; b < 3; ++b) {
    const auto table = probability_table(rho, kAllBases[b]);
    const auto brute = oracle::table(rho, b);
    const auto expected = oracle::dicke_table(b);
    double worst = 0.0, sum = 0.0;
    for (int k = 0; k < 16; ++k) {
      worst = std::max({worst, std::abs(table[k] - expected[k]), std::abs(table[k] - brute[k])});
      sum += table[k];
    }
    o.require(worst <= 1e-12 && std::abs(sum - 1.0) <= 1e-12,
              std::string(names[b]) + " max dev " + fmt("%.1e", worst) + " sum-1 " + fmt("%.1e", sum - 1.0));
  }
  return o;
}

Outcome spin_anchors() {
  Outcome o;
  const WitnessReport d = collective_spin_witness(projector(dicke_4_2()));
  o.require(std::abs(d.value - 6.0) <= 1e-10 && d.verdict == Verdict::Gme, "Dicke " + fmt("%.12f", d.value) + " " + to_string(d.verdict));
  const WitnessReport h = collective_spin_witness(projector(PureState4(PureState4::Constant(0.25))));
  o.require(std::abs(h.value - 5.0) <= 1e-10 && h.verdict == Verdict::None, "HHHH " + fmt("%.12f", h.value) + " " + to_string(h.verdict));
  const WitnessReport m = collective_spin_witness(DensityMatrix::Identity() / 16.0);
  o.require(std::abs(m.value - 2.0) <= 1e-10, "1/16 " + fmt("%.12f", m.value));
  o.require(std::abs(gme_spin_bound() - (3.5 + std::sqrt(3.0))) <= 1e-10 && kSeparableSpinBound == 5.0, "thresholds 5, 7/2+sqrt3");
  return o;
}

Outcome i24_anchors() {
  Outcome o;
  const DensityMatrix dicke = projector(dicke_4_2());
  const double ideal = i24_value(dicke);
  o.require(std::abs(ideal - 1.0) <= 1e-12, "Dicke " + fmt("%.12f", ideal));

  std::mt19937_64 rng(2024);
  double worst_product = -1e9;
  for (int t = 0; t < 1000; ++t) worst_product = std::max(worst_product, i24_value(projector(oracle::random_product(rng))));
  o.require(worst_product <= 1e-12, "max on 1000 products " + fmt("%.2e", worst_product));

  double worst_mix = -1e9;
  for (int t = 0; t < 1000; ++t) {
    DensityMatrix rho = DensityMatrix::Zero();
    const int terms = 1 + t % 4;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double total = 0.0;
    for (int k = 0; k < terms; ++k) {
      const double w = u(rng);
      rho += w * projector(oracle::random_biseparable(rng, oracle::kBipartitions[(t + k) % 7]));
      total += w;
    }
    worst_mix = std::max(worst_mix, i24_value(rho / total));
  }
  o.require(worst_mix <= 1e-12, "max on 1000 biseparable mixtures " + fmt("%.2e", worst_mix));

  const Matrix16 v = local_unitary(random_params(rng));
  OptimizeOptions opt;
  opt.n_starts = 32;
  opt.seed = 5;
  const WitnessReport r = optimize_witness(v * dicke * v.adjoint(), WitnessId::I24, opt);
  o.require(std::abs(r.value - 1.0) <= 1e-3, "planted rotation recovered " + fmt("%.6f", r.value));
  return o;
}

Outcome tomography_round_trip() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const DensityMatrix truth = projector(dicke_4_2());
  const auto settings = full_mub_settings();
  const MleResult exact = reconstruct_mle(expected_observations(truth, settings, 100.0, 1.0), {});
  const double f0 = fidelity(exact.rho, truth);
  o.require(f0 >= 1.0 - 1e-6, "noiseless 1 - " + fmt("%.1e", 1.0 - f0));

  const double events = 1e4;
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto records = simulate_dataset(truth, settings, events / 81.0, 1.0, seed);
    mean += fidelity(reconstruct_mle(TomographyDataset{records, ProjectorSetId::FullMub1296}, {seed}).rho, truth) / 10.0;
  }
  o.require(mean >= 0.98, "Poisson 1e4 events mean fidelity " + fmt("%.4f", mean));

  const auto records = simulate_dataset(apply_noise(dicke_4_2(), NoiseModel::calibrated(1)), settings, events / 81.0, 1.0, 99);
  const PoissonLikelihood like(to_observations(records));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> p(kCholeskyParams), grad(kCholeskyParams);
    for (double& x : p) x = g(rng);
    like.log_likelihood(p, grad);
    double diff2 = 0.0, norm2 = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < kCholeskyParams; ++k) {
      const double saved = p[k];
      p[k] = saved + h;
      const double up = like.log_likelihood(p);
      p[k] = saved - h;
      const double down = like.log_likelihood(p);
      p[k] = saved;
      const double numeric = (up - down) / (2 * h);
      diff2 += (grad[k] - numeric) * (grad[k] - numeric);
      norm2 += grad[k] * grad[k];
    }
    worst = std::max(worst, std::sqrt(diff2 / norm2));
  }
  o.require(worst <= 1e-6, "gradient rel. error " + fmt("%.1e", worst));
  o.require(true, "runtime " + fmt("%.1f s", seconds_since(t0)));
  return o;
}

Outcome power_scaling() {
  Outcome o;
  PowerScanConfig config;
  config.seed = 1;
  const auto powers = default_scan_powers();
  const auto rows = power_scan(powers, config);
  std::vector<double> singles, fourfold;
  for (const auto& r : rows) {
    singles.push_back(r.singles_rate);
    fourfold.push_back(r.fourfold_rate);
  }
  const double e1 = fit_power_law(powers, singles).exponent;
  const double e2 = fit_power_law(powers, fourfold).exponent;
  const double ratio = delayed_ratio(rows);
  o.require(std::abs(e1 - 1.0) <= 0.05, "singles exponent " + fmt("%.4f", e1));
  o.require(std::abs(e2 - 2.0) <= 0.05, "four-fold exponent " + fmt("%.4f", e2));
  o.require(std::abs(ratio - 0.10) <= 0.02, "delayed ratio " + fmt("%.4f", ratio));
  return o;
}

Outcome calibrated_pipeline() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    PipelineConfig config;
    config.noise = NoiseModel::calibrated(seed);
    config.seed = seed;
    const PipelineResult r = run_pipeline(config);
    const double spin = r.raw[0].value;
    const double i24 = r.optimized[2].value;
    o.require(spin >= 5.0 && spin <= 5.3, "seed " + std::to_string(seed) + " spin " + fmt("%.3f", spin));
    o.require(i24 >= 0.1 && i24 <= 0.6, "I24 " + fmt("%.3f", i24));
  }
  return o;
}

Outcome crystal() {
  Outcome o;
  const WalkOff w = group_velocity_walkoff(0.456, 2.0);
  o.require(w.dispersion_ps_per_mm >= 1.5 && w.dispersion_ps_per_mm <= 1.55, "D " + fmt("%.4f ps/mm", w.dispersion_ps_per_mm));
  o.require(w.walkoff_length_mm >= 1.3 && w.walkoff_length_mm <= 1.35, "L_gv " + fmt("%.4f mm", w.walkoff_length_mm));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 double-pair state at L_max=3", double_pair_structure},
      {"2 splitter tree gives Dicke(4,2)", detector_dicke},
      {"3 theory correlation tables", correlation_tables},
      {"4 collective-spin anchors", spin_anchors},
      {"5 I24 anchors and planted recovery", i24_anchors},
      {"6 tomography round trip", tomography_round_trip},
      {"7 power scaling", power_scaling},
      {"8 calibrated noise pipeline", calibrated_pipeline},
      {"9 crystal walk-off", crystal},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s  %s  (%s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
