#include "oam4/witnesses.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "oam4/error.hpp"
#include "oam4/mode_optics.hpp"

namespace oam4 {

namespace {

Matrix16 single_site(const Eigen::Matrix2cd& op, int site) {
  std::array<Eigen::Matrix2cd, 4> factors;
  factors.fill(Eigen::Matrix2cd::Identity());
  factors[site] = op;
  return kron4(factors);
}

CollectiveSpin build_collective_spin() {
  const cd i{0.0, 1.0};
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  CollectiveSpin j{Matrix16::Zero(), Matrix16::Zero(), Matrix16::Zero()};
  for (int k = 0; k < 4; ++k) {
    j.jx += 0.5 * single_site(sx, k);
    j.jy += 0.5 * single_site(sy, k);
    j.jz += 0.5 * single_site(sz, k);
  }
  return j;
}

// Pairs of two-excitation kets that differ by moving a single excitation.
struct DickeNeighbour {
  int a, b;
  int upper;  // a | b, three excitations
  int lower;  // a & b, one excitation
};

std::vector<DickeNeighbour> build_neighbours() {
  std::vector<int> kets;
  for (int s = 0; s < 16; ++s)
    if (std::popcount(static_cast<unsigned>(s)) == 2) kets.push_back(s);
  std::vector<DickeNeighbour> out;
  for (std::size_t x = 0; x < kets.size(); ++x)
    for (std::size_t y = x + 1; y < kets.size(); ++y)
      if (std::popcount(static_cast<unsigned>(kets[x] ^ kets[y])) == 2)
        out.push_back({kets[x], kets[y], kets[x] | kets[y], kets[x] & kets[y]});
  return out;
}

const std::vector<DickeNeighbour>& neighbours() {
  static const std::vector<DickeNeighbour> n = build_neighbours();
  return n;
}

std::mt19937_64 start_stream(std::uint64_t seed, std::uint64_t start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(start >> 32), 0x77u};
  return std::mt19937_64(seq);
}

struct Objective {
  const DensityMatrix* rho;
  WitnessId id;
};

double rotated_value(const LocalUnitaryParams& p, const DensityMatrix& rho, WitnessId id) {
  const Matrix16 u = local_unitary(p);
  const DensityMatrix rotated = u * rho * u.adjoint();
  return witness_value(id, rotated);
}

double gsl_objective(const gsl_vector* x, void* data) {
  const auto* obj = static_cast<const Objective*>(data);
  LocalUnitaryParams p;
  for (std::size_t k = 0; k < 16; ++k) p.values[k] = gsl_vector_get(x, k);
  return -rotated_value(p, *obj->rho, obj->id);
}

// One Nelder-Mead descent from `start`; returns the best point and value.
std::pair<LocalUnitaryParams, double> nelder_mead(const Objective& obj, const LocalUnitaryParams& start, double step,
                                                  int max_iterations) {
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;
  gsl_multimin_function f{&gsl_objective, 16, const_cast<Objective*>(&obj)};
  gsl_vector* x = gsl_vector_alloc(16);
  gsl_vector* steps = gsl_vector_alloc(16);
  for (std::size_t k = 0; k < 16; ++k) gsl_vector_set(x, k, start.values[k]);
  gsl_vector_set_all(steps, step);

  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 16);
  gsl_multimin_fminimizer_set(s, &f, x, steps);
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
  }
  LocalUnitaryParams best;
  for (std::size_t k = 0; k < 16; ++k) best.values[k] = gsl_vector_get(s->x, k);
  const double value = -s->fval;

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(steps);
  gsl_vector_free(x);
  return {best, value};
}

Verdict spin_verdict(double value) {
  if (value > gme_spin_bound() + kVerdictMargin) return Verdict::Gme;
  if (value > kSeparableSpinBound + kVerdictMargin) return Verdict::Entangled;
  return Verdict::None;
}

WitnessReport make_report(WitnessId id, double value) {
  WitnessReport r;
  r.id = id;
  r.value = value;
  switch (id) {
    case WitnessId::CollectiveSpin:
      r.thresholds = {{"separable", kSeparableSpinBound}, {"biseparable", gme_spin_bound()}};
      r.verdict = spin_verdict(value);
      break;
    case WitnessId::DickeFidelity:
      r.thresholds = {{"biseparable", dicke_fidelity_bound()}};
      r.verdict = value > dicke_fidelity_bound() + kVerdictMargin ? Verdict::Gme : Verdict::None;
      break;
    case WitnessId::I24:
      r.thresholds = {{"biseparable", 0.0}};
      r.verdict = value > kVerdictMargin ? Verdict::Gme : Verdict::None;
      break;
  }
  return r;
}

}  // namespace

const CollectiveSpin& collective_spin() {
  static const CollectiveSpin j = build_collective_spin();
  return j;
}

Eigen::Matrix2cd single_qubit_unitary(double alpha, double beta, double delta, double gamma) {
  const cd i{0.0, 1.0};
  Eigen::Matrix2cd u;
  u << std::exp(i * alpha) * std::cos(gamma), std::exp(i * beta) * std::sin(gamma),
      -std::exp(i * (alpha - delta)) * std::sin(gamma), std::exp(i * (beta - delta)) * std::cos(gamma);
  return u;
}

Matrix16 local_unitary(const LocalUnitaryParams& params) {
  std::array<Eigen::Matrix2cd, 4> factors;
  for (int q = 0; q < 4; ++q)
    factors[q] = single_qubit_unitary(params.alpha(q), params.beta(q), params.delta(q), params.gamma(q));
  return kron4(factors);
}

std::string to_string(WitnessId id) {
  switch (id) {
    case WitnessId::CollectiveSpin: return "collective_spin";
    case WitnessId::DickeFidelity: return "dicke_fidelity";
    case WitnessId::I24: return "i24";
  }
  return "?";
}

WitnessId parse_witness_id(const std::string& text) {
  if (text == "collective_spin") return WitnessId::CollectiveSpin;
  if (text == "dicke_fidelity") return WitnessId::DickeFidelity;
  if (text == "i24") return WitnessId::I24;
  throw ValidationError("unknown witness '" + text + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::None: return "none";
    case Verdict::Entangled: return "entangled";
    case Verdict::Gme: return "GME";
  }
  return "?";
}

double gme_spin_bound() { return 3.5 + std::numbers::sqrt3; }

DensityMatrix validate_density_matrix(const DensityMatrix& rho) {
  constexpr double kTol = 1e-9;
  if (!rho.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTol) throw ValidationError("density matrix is not Hermitian");
  const cd tr = rho.trace();
  if (std::abs(tr - 1.0) > kTol) throw ValidationError("density matrix trace is not 1");
  const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(herm);
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() < -kTol) throw ValidationError("density matrix is not positive semidefinite");
  if (values.minCoeff() >= 0.0) return herm;
  const Eigen::Matrix<double, 16, 1> clipped = values.cwiseMax(0.0);
  DensityMatrix out = eig.eigenvectors() * clipped.cast<cd>().asDiagonal() * eig.eigenvectors().adjoint();
  return out / out.trace().real();
}

double collective_spin_value(const DensityMatrix& rho) {
  const auto& j = collective_spin();
  static const Matrix16 op = j.jx * j.jx + j.jy * j.jy;
  return (rho * op).trace().real();
}

double dicke_fidelity_value(const DensityMatrix& rho) {
  static const PureState4 d = dicke_4_2();
  return (d.adjoint() * rho * d)(0, 0).real();
}

double i24_value(const DensityMatrix& rho) {
  double value = 0.0;
  for (const auto& n : neighbours()) {
    const double upper = std::max(0.0, rho(n.upper, n.upper).real());
    const double lower = std::max(0.0, rho(n.lower, n.lower).real());
    value += std::abs(rho(n.a, n.b)) - std::sqrt(upper * lower);
  }
  // m (n - m - 1) / 2 with n = 4 qubits, m = 2 excitations.
  constexpr double kDiagonalWeight = 1.0;
  double diagonal = 0.0;
  for (int s = 0; s < 16; ++s)
    if (std::popcount(static_cast<unsigned>(s)) == 2) diagonal += rho(s, s).real();
  return value - kDiagonalWeight * diagonal;
}

double witness_value(WitnessId id, const DensityMatrix& rho) {
  switch (id) {
    case WitnessId::CollectiveSpin: return collective_spin_value(rho);
    case WitnessId::DickeFidelity: return dicke_fidelity_value(rho);
    case WitnessId::I24: return i24_value(rho);
  }
  throw ValidationError("unknown witness");
}

double dicke_fidelity_bound() {
  static const double bound = [] {
    const PureState4 d = dicke_4_2();
    double best = 0.0;
    // Subsets of arms containing arm A cover every bipartition once.
    for (unsigned subset = 1; subset < 16; ++subset) {
      if (!(subset & 8u) || subset == 15u) continue;
      const int k = std::popcount(subset);
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1 << k, 1 << (4 - k));
      for (int s = 0; s < 16; ++s) {
        int row = 0, col = 0;
        for (int q = 0; q < 4; ++q) {
          const int bit = (s >> (3 - q)) & 1;
          if (subset & (8u >> q)) row = (row << 1) | bit;
          else col = (col << 1) | bit;
        }
        m(row, col) = d(s);
      }
      const double sigma = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
      best = std::max(best, sigma * sigma);
    }
    return best;
  }();
  return bound;
}

WitnessReport collective_spin_witness(const DensityMatrix& rho) {
  return make_report(WitnessId::CollectiveSpin, collective_spin_value(validate_density_matrix(rho)));
}

WitnessReport fidelity_witness_dicke(const DensityMatrix& rho) {
  return make_report(WitnessId::DickeFidelity, dicke_fidelity_value(validate_density_matrix(rho)));
}

WitnessReport i24_witness(const DensityMatrix& rho) {
  return make_report(WitnessId::I24, i24_value(validate_density_matrix(rho)));
}

WitnessReport evaluate_witness(WitnessId id, const DensityMatrix& rho) {
  return make_report(id, witness_value(id, validate_density_matrix(rho)));
}

WitnessReport optimize_witness(const DensityMatrix& rho_in, WitnessId id, const OptimizeOptions& options) {
  if (options.n_starts < 0) throw ValidationError("number of starts must be non-negative");
  const DensityMatrix rho = validate_density_matrix(rho_in);
  const Objective obj{&rho, id};

  LocalUnitaryParams best_params;  // identity
  double best_value = witness_value(id, rho);

  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int start = 0; start < options.n_starts; ++start) {
    auto rng = start_stream(options.seed, static_cast<std::uint64_t>(start));
    LocalUnitaryParams p;
    for (double& v : p.values) v = angle(rng);

    double value = rotated_value(p, rho, id);
    double step = 0.5;
    for (int restart = 0; restart < 20; ++restart) {
      auto [next, next_value] = nelder_mead(obj, p, step, options.max_iterations);
      const bool improved = next_value > value + options.restart_tolerance;
      if (next_value > value) {
        p = next;
        value = next_value;
      }
      if (!improved) break;
      step = 0.1;
    }
    if (value > best_value) {
      best_value = value;
      best_params = p;
    }
  }

  WitnessReport report = make_report(id, best_value);
  report.optimal_params = best_params;
  return report;
}

nlohmann::json to_json(const WitnessReport& report) {
  nlohmann::json thresholds = nlohmann::json::array();
  for (const auto& t : report.thresholds) thresholds.push_back({{"name", t.name}, {"value", t.value}});
  nlohmann::json j = {{"witness", to_string(report.id)},
                      {"value", report.value},
                      {"thresholds", thresholds},
                      {"verdict", to_string(report.verdict)}};
  if (report.optimal_params) j["optimal_params"] = report.optimal_params->values;
  else j["optimal_params"] = nullptr;
  return j;
}

}  // namespace oam4
