#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "oam4/correlations.hpp"
#include "oam4/types.hpp"

namespace oam4 {

enum class ProjectorSetId { FullMub1296, Custom };

struct TomographyDataset {
  std::vector<CountRecord> records;
  ProjectorSetId projector_set = ProjectorSetId::FullMub1296;
};

/// All 6^4 product settings over {H,V,D,A,R,L}, arm A varying slowest.
std::vector<MeasurementSetting> full_mub_settings();

/// True if the settings' projectors span the 256-dimensional space of
/// Hermitian 16x16 operators.
bool is_informationally_complete(std::span<const MeasurementSetting> settings);

/// One likelihood term. `counts` may be fractional (noiseless expected-count data).
struct Observation {
  MeasurementSetting setting;
  double duration = 0.0;
  double counts = 0.0;
};

std::vector<Observation> to_observations(std::span<const CountRecord> records);
/// Expected counts rate_scale * duration * p, without sampling.
std::vector<Observation> expected_observations(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                               double rate_scale, double duration);

inline constexpr int kCholeskyParams = 256;

/// Lower-triangular T from 256 reals: 16 real diagonal entries, then the
/// real and imaginary parts of the 120 strictly-lower entries row by row.
Matrix16 cholesky_factor(std::span<const double> params);
/// T^dag T / Tr(T^dag T).
DensityMatrix density_from_cholesky(std::span<const double> params);

/// Poisson log-likelihood sum_s [n_s log mu_s - mu_s] with mu_s = eta
/// t_s Tr(rho P_s), where the scale eta is set to its maximizing value
/// for the current rho. Terms constant in rho and eta are dropped
/// (log n_s!).
class PoissonLikelihood {
 public:
  explicit PoissonLikelihood(std::vector<Observation> observations);

  std::size_t size() const { return counts_.size(); }
  double total_counts() const { return total_counts_; }

  double log_likelihood(std::span<const double> params) const;
  /// Value and gradient with respect to the 256 Cholesky parameters.
  double log_likelihood(std::span<const double> params, std::span<double> gradient) const;
  double log_likelihood(const DensityMatrix& rho) const;
  /// Maximizing scale eta for rho.
  double optimal_scale(const DensityMatrix& rho) const;

 private:
  Eigen::Matrix<cd, 16, Eigen::Dynamic> phi_;  // one product ket per column
  std::vector<double> durations_;
  std::vector<double> counts_;
  double total_counts_ = 0.0;
};

struct MleOptions {
  std::uint64_t seed = 0;
  /// Start 0 is the maximally mixed state; later starts are random perturbations of it.
  int restarts = 2;
  int max_iterations = 5000;
  /// Relative log-likelihood change at which a start stops.
  double tolerance = 1e-10;
};

struct MleResult {
  DensityMatrix rho;
  double log_likelihood = 0.0;
  double scale = 0.0;
  int iterations = 0;
  /// Log-likelihood after every accepted iteration of the winning start.
  std::vector<double> trace;
};

/// Maximum-likelihood density matrix. Throws ValidationError for an
/// incomplete projector set or all-zero counts.
MleResult reconstruct_mle(const TomographyDataset& data, const MleOptions& options);
MleResult reconstruct_mle(std::span<const Observation> observations, const MleOptions& options);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double purity(const DensityMatrix& rho);

nlohmann::json density_matrix_json(const DensityMatrix& rho, const nlohmann::json& metadata = nlohmann::json::object());
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

}  // namespace oam4
