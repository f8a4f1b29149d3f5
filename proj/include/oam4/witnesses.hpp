#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oam4/types.hpp"

namespace oam4 {

/// J_i = (1/2) sum_k sigma_i^(k) on four qubits.
struct CollectiveSpin {
  Matrix16 jx, jy, jz;
};
const CollectiveSpin& collective_spin();

/// Sixteen angles, four per qubit, laid out (alpha, beta, delta, gamma) for
/// qubit A, then B, C, D.
struct LocalUnitaryParams {
  std::array<double, 16> values{};

  double alpha(int q) const { return values[4 * q + 0]; }
  double beta(int q) const { return values[4 * q + 1]; }
  double delta(int q) const { return values[4 * q + 2]; }
  double gamma(int q) const { return values[4 * q + 3]; }
};

/// [[e^{i a} cos g, e^{i b} sin g], [-e^{i(a-d)} sin g, e^{i(b-d)} cos g]].
Eigen::Matrix2cd single_qubit_unitary(double alpha, double beta, double delta, double gamma);
/// U_A x U_B x U_C x U_D.
Matrix16 local_unitary(const LocalUnitaryParams& params);

enum class WitnessId { CollectiveSpin, DickeFidelity, I24 };
enum class Verdict { None, Entangled, Gme };

std::string to_string(WitnessId id);
WitnessId parse_witness_id(const std::string& text);
std::string to_string(Verdict v);

struct Threshold {
  std::string name;
  double value = 0.0;
};

struct WitnessReport {
  WitnessId id = WitnessId::CollectiveSpin;
  double value = 0.0;
  std::vector<Threshold> thresholds;
  Verdict verdict = Verdict::None;
  std::optional<LocalUnitaryParams> optimal_params;
};

/// A value must exceed a threshold by this much to count as crossing it.
inline constexpr double kVerdictMargin = 1e-10;

inline constexpr double kSeparableSpinBound = 5.0;
/// 7/2 + sqrt(3).
double gme_spin_bound();

/// Checks Hermiticity, unit trace and positivity (all within 1e-9) and
/// returns a copy with slightly negative eigenvalues clipped to zero.
/// Throws ValidationError otherwise.
DensityMatrix validate_density_matrix(const DensityMatrix& rho);

// Raw witness values; no validation.
double collective_spin_value(const DensityMatrix& rho);
double dicke_fidelity_value(const DensityMatrix& rho);
double i24_value(const DensityMatrix& rho);
double witness_value(WitnessId id, const DensityMatrix& rho);

/// Largest squared Schmidt coefficient of Dicke(4,2) over all bipartitions.
double dicke_fidelity_bound();

WitnessReport collective_spin_witness(const DensityMatrix& rho);
WitnessReport fidelity_witness_dicke(const DensityMatrix& rho);
/// Genuine-multipartite criterion tailored to Dicke(4,2): positive values
/// certify GME; 1 on the ideal state.
WitnessReport i24_witness(const DensityMatrix& rho);
WitnessReport evaluate_witness(WitnessId id, const DensityMatrix& rho);

struct OptimizeOptions {
  int n_starts = 32;
  std::uint64_t seed = 0;
  int max_iterations = 20000;
  /// Nelder-Mead is restarted from its best point until a restart gains less than this.
  double restart_tolerance = 1e-12;
};

/// Maximizes witness(U rho U^dag) over local unitaries by multi-start
/// Nelder-Mead. Start i draws its initial point from its own stream
/// (seed, i); the best value wins, ties going to the lowest start index.
/// Never worse than the unrotated value.
WitnessReport optimize_witness(const DensityMatrix& rho, WitnessId id, const OptimizeOptions& options);

nlohmann::json to_json(const WitnessReport& report);

}  // namespace oam4
