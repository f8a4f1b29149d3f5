#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oam4/correlations.hpp"
#include "oam4/error.hpp"
#include "oam4/mode_optics.hpp"
#include "oam4/witnesses.hpp"
#include "oracles/states.hpp"

using namespace oam4;

namespace {

const DensityMatrix kMixed = DensityMatrix::Identity() / 16.0;

DensityMatrix dicke_rho() { return projector(dicke_4_2()); }

LocalUnitaryParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  LocalUnitaryParams p;
  for (double& v : p.values) v = angle(rng);
  return p;
}

PureState4 hhhh() {
  PureState4 psi = PureState4::Constant(0.25);
  return psi;
}

}  // namespace

TEST_CASE("collective spin operators") {
  const CollectiveSpin& j = collective_spin();
  const cd i(0.0, 1.0);
  CHECK((j.jx - j.jx.adjoint()).norm() == 0.0);
  CHECK((j.jy - j.jy.adjoint()).norm() == 0.0);
  CHECK((j.jz - j.jz.adjoint()).norm() == 0.0);
  CHECK((j.jx * j.jy - j.jy * j.jx - i * j.jz).norm() < 1e-12);
  CHECK((j.jy * j.jz - j.jz * j.jy - i * j.jx).norm() < 1e-12);
  // Jz counts R photons minus L photons over two.
  CHECK(j.jz(0, 0) == cd(2.0));
  CHECK(j.jz(15, 15) == cd(-2.0));
}

TEST_CASE("collective spin anchors") {
  const WitnessReport d = collective_spin_witness(dicke_rho());
  CHECK(std::abs(d.value - 6.0) < 1e-10);
  CHECK(d.verdict == Verdict::Gme);

  const WitnessReport h = collective_spin_witness(projector(hhhh()));
  CHECK(std::abs(h.value - 5.0) < 1e-10);
  CHECK(h.verdict == Verdict::None);

  const WitnessReport m = collective_spin_witness(kMixed);
  CHECK(std::abs(m.value - 2.0) < 1e-10);
  CHECK(m.verdict == Verdict::None);

  CHECK(std::abs(gme_spin_bound() - (3.5 + std::sqrt(3.0))) < 1e-15);
  REQUIRE(d.thresholds.size() == 2);
  CHECK(d.thresholds[0].value == 5.0);
  CHECK(d.thresholds[1].value == gme_spin_bound());
}

TEST_CASE("collective spin verdict boundaries") {
  // Mix Dicke with |HHHH> to hit values just around both thresholds.
  const DensityMatrix d = dicke_rho();
  const DensityMatrix h = projector(hhhh());
  auto at = [&](double value) {
    const double w = value - 5.0;  // value is linear in the Dicke weight: 5 + w
    return collective_spin_witness((w * d + (1.0 - w) * h).eval());
  };
  CHECK(at(5.0 + 1e-6).verdict == Verdict::Entangled);
  CHECK(at(gme_spin_bound() - 1e-6).verdict == Verdict::Entangled);
  CHECK(at(gme_spin_bound() + 1e-6).verdict == Verdict::Gme);
}

TEST_CASE("total spin bound") {
  const CollectiveSpin& j = collective_spin();
  const Matrix16 j2 = j.jx * j.jx + j.jy * j.jy + j.jz * j.jz;
  for (int k = 0; k <= 4; ++k) {
    const PureState4 psi = dicke_state(4, k);
    CHECK(std::abs((psi.adjoint() * j2 * psi)(0, 0) - 6.0) < 1e-12);
  }
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXcd c = oracle::random_ket(rng, 5);
    PureState4 sym = PureState4::Zero();
    for (int k = 0; k <= 4; ++k) sym += c(k) * PureState4(dicke_state(4, k));
    CHECK(std::abs((sym.adjoint() * j2 * sym)(0, 0) - 6.0) < 1e-12);
    const PureState4 any = oracle::random_ket(rng, 16);
    CHECK((any.adjoint() * j2 * any)(0, 0).real() <= 6.0 + 1e-12);
  }
}

TEST_CASE("separable mixtures stay below 5") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    DensityMatrix rho = DensityMatrix::Zero();
    const int terms = 1 + trial % 4;
    for (int t = 0; t < terms; ++t) rho += projector(oracle::random_product(rng)) / terms;
    CHECK(collective_spin_value(rho) <= 5.0 + 1e-12);
  }
}

TEST_CASE("dicke fidelity witness") {
  CHECK(std::abs(dicke_fidelity_bound() - 2.0 / 3.0) < 1e-12);
  const WitnessReport d = fidelity_witness_dicke(dicke_rho());
  CHECK(std::abs(d.value - 1.0) < 1e-12);
  CHECK(d.verdict == Verdict::Gme);
  const WitnessReport m = fidelity_witness_dicke(kMixed);
  CHECK(std::abs(m.value - 1.0 / 16.0) < 1e-12);
  CHECK(m.verdict == Verdict::None);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int mask = oracle::kBipartitions[trial % 7];
    const DensityMatrix rho = projector(oracle::random_biseparable(rng, mask));
    CHECK(dicke_fidelity_value(rho) <= 2.0 / 3.0 + 1e-12);
  }
}

TEST_CASE("i24 anchors") {
  const WitnessReport d = i24_witness(dicke_rho());
  CHECK(std::abs(d.value - 1.0) < 1e-12);
  CHECK(d.verdict == Verdict::Gme);
  CHECK(i24_witness(kMixed).value <= 0.0);
  CHECK(i24_witness(kMixed).verdict == Verdict::None);

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 1000; ++trial) CHECK(i24_value(projector(oracle::random_product(rng))) <= 1e-12);
  for (int trial = 0; trial < 700; ++trial) {
    const int mask = oracle::kBipartitions[trial % 7];
    CHECK(i24_value(projector(oracle::random_biseparable(rng, mask))) <= 1e-12);
  }
}

TEST_CASE("i24 on noisy Dicke states") {
  const DensityMatrix d = dicke_rho();
  double previous = 2.0;
  for (double p : {1.0, 0.9, 0.7, 0.5}) {
    const double v = i24_value(p * d + (1 - p) * kMixed);
    CHECK(v < previous);
    previous = v;
  }
  CHECK(i24_value(0.9 * d + 0.1 * kMixed) > 0.0);
}

TEST_CASE("local unitaries") {
  CHECK((local_unitary({}) - Matrix16::Identity()).norm() == 0.0);

  const Eigen::Matrix2cd flip = single_qubit_unitary(0, 0, 0, std::numbers::pi / 2);
  CHECK(std::abs(flip(0, 0)) < 1e-15);
  CHECK(std::abs(flip(1, 1)) < 1e-15);
  CHECK(std::abs(flip(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(flip(1, 0) + 1.0) < 1e-15);

  LocalUnitaryParams all_flip;
  for (int q = 0; q < 4; ++q) all_flip.values[4 * q + 3] = std::numbers::pi / 2;
  const Matrix16 u = local_unitary(all_flip);
  CHECK(std::abs(std::abs(u(15, 0)) - 1.0) < 1e-12);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix16 v = local_unitary(random_params(rng));
    CHECK((v.adjoint() * v - Matrix16::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("witness values are invariant or bounded under local unitaries") {
  std::mt19937_64 rng(8);
  const Matrix16 v = local_unitary(random_params(rng));
  const DensityMatrix rotated = v * dicke_rho() * v.adjoint();
  CHECK(std::abs(fidelity_witness_dicke(rotated).value - 1.0) > 1e-3);
  CHECK(collective_spin_value(rotated) <= 6.0 + 1e-12);
}

TEST_CASE("density matrix validation") {
  DensityMatrix bad_trace = dicke_rho() * 1.01;
  CHECK_THROWS_AS(collective_spin_witness(bad_trace), ValidationError);
  DensityMatrix non_hermitian = dicke_rho();
  non_hermitian(0, 1) += 0.1;
  CHECK_THROWS_AS(i24_witness(non_hermitian), ValidationError);
  DensityMatrix negative = DensityMatrix::Zero();
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(fidelity_witness_dicke(negative), ValidationError);

  DensityMatrix tiny = dicke_rho();
  tiny(0, 0) -= 5e-10;
  tiny(1, 1) += 5e-10;
  CHECK_NOTHROW(validate_density_matrix(tiny));
  const DensityMatrix clipped = validate_density_matrix(tiny);
  CHECK(clipped(0, 0).real() >= -1e-15);
}

TEST_CASE("optimizer recovers planted rotations") {
  std::mt19937_64 rng(41);
  const Matrix16 v = local_unitary(random_params(rng));
  const DensityMatrix rho = v * dicke_rho() * v.adjoint();
  OptimizeOptions options;
  options.seed = 7;
  const WitnessReport i24 = optimize_witness(rho, WitnessId::I24, options);
  CHECK(std::abs(i24.value - 1.0) < 1e-3);
  CHECK(i24.verdict == Verdict::Gme);
  REQUIRE(i24.optimal_params.has_value());
  const Matrix16 u = local_unitary(*i24.optimal_params);
  CHECK(std::abs(i24_value(u * rho * u.adjoint()) - i24.value) < 1e-12);

  const WitnessReport spin = optimize_witness(rho, WitnessId::CollectiveSpin, options);
  CHECK(std::abs(spin.value - 6.0) < 1e-3);
}

TEST_CASE("optimizer on the maximally mixed state") {
  OptimizeOptions options;
  options.n_starts = 4;
  options.seed = 1;
  for (WitnessId id : {WitnessId::CollectiveSpin, WitnessId::DickeFidelity, WitnessId::I24}) {
    const WitnessReport r = optimize_witness(kMixed, id, options);
    CHECK(std::abs(r.value - witness_value(id, kMixed)) < 1e-12);
  }
}

TEST_CASE("optimizer is deterministic and monotone in the number of starts") {
  const DensityMatrix rho = apply_noise(dicke_4_2(), {0.1, 0.2, 0.3, 4});
  const double unrotated = i24_value(rho);
  double previous = -1e9;
  for (int n : {0, 1, 3, 6}) {
    OptimizeOptions options;
    options.n_starts = n;
    options.seed = 11;
    const WitnessReport r = optimize_witness(rho, WitnessId::I24, options);
    CHECK(r.value >= unrotated);
    CHECK(r.value >= previous);
    previous = r.value;
    const WitnessReport again = optimize_witness(rho, WitnessId::I24, options);
    CHECK(again.value == r.value);
  }
}

TEST_CASE("optimized verdict is invariant under qubit permutations") {
  const DensityMatrix rho = apply_noise(dicke_4_2(), {0.1, 0.1, 0.2, 2});
  OptimizeOptions options;
  options.n_starts = 4;
  options.seed = 3;
  const Verdict reference = optimize_witness(rho, WitnessId::I24, options).verdict;
  CHECK(reference == Verdict::Gme);
  for (const std::array<int, 4>& perm : {std::array<int, 4>{1, 0, 2, 3}, std::array<int, 4>{3, 2, 1, 0}, std::array<int, 4>{2, 0, 3, 1}}) {
    const DensityMatrix permuted = oracle::permute_qubits(rho, perm);
    CHECK(optimize_witness(permuted, WitnessId::I24, options).verdict == reference);
  }
}

TEST_CASE("names and json") {
  CHECK(parse_witness_id("i24") == WitnessId::I24);
  CHECK(parse_witness_id(to_string(WitnessId::DickeFidelity)) == WitnessId::DickeFidelity);
  CHECK_THROWS_AS(parse_witness_id("nope"), ValidationError);
  CHECK(to_string(Verdict::Gme) == "GME");

  const auto j = to_json(collective_spin_witness(dicke_rho()));
  CHECK(j["witness"] == "collective_spin");
  CHECK(j["verdict"] == "GME");
  CHECK(j["thresholds"].size() == 2);
  CHECK(j["optimal_params"].is_null());

  OptimizeOptions options;
  options.n_starts = 1;
  const auto k = to_json(optimize_witness(dicke_rho(), WitnessId::I24, options));
  CHECK(k["optimal_params"].size() == 16);
}
