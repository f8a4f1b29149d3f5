#include "oam4/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "oam4/error.hpp"

namespace oam4 {

namespace {

constexpr double kMinProbability = 1e-300;

PureState4 setting_ket(const MeasurementSetting& setting) {
  if (!setting.is_qubit_setting()) throw ValidationError("tomography needs qubit projectors, got " + setting.label());
  std::array<Eigen::Matrix2cd, 4> cols;
  for (int k = 0; k < 4; ++k) {
    cols[k].setZero();
    cols[k].col(0) = projector_vector(setting.arms[k]);
  }
  return kron4(cols).col(0);
}

// Real coordinates of a Hermitian operator: diagonal, then Re/Im of the upper triangle.
Eigen::VectorXd hermitian_coordinates(const DensityMatrix& m) {
  Eigen::VectorXd v(256);
  int k = 0;
  for (int i = 0; i < 16; ++i) v(k++) = m(i, i).real();
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) {
      v(k++) = m(i, j).real();
      v(k++) = m(i, j).imag();
    }
  return v;
}

class NegLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  explicit NegLogLikelihood(const PoissonLikelihood& model) : model_(model) {}
  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const std::span<const double> p(parameters, kCholeskyParams);
    if (gradient) {
      std::span<double> g(gradient, kCholeskyParams);
      *cost = -model_.log_likelihood(p, g);
      for (double& x : g) x = -x;
    } else {
      *cost = -model_.log_likelihood(p);
    }
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return kCholeskyParams; }

 private:
  const PoissonLikelihood& model_;
};

class TraceRecorder final : public ceres::IterationCallback {
 public:
  ceres::CallbackReturnType operator()(const ceres::IterationSummary& summary) override {
    trace.push_back(-summary.cost);
    return ceres::SOLVER_CONTINUE;
  }
  std::vector<double> trace;
};

std::vector<double> identity_params() {
  std::vector<double> p(kCholeskyParams, 0.0);
  for (int i = 0; i < 16; ++i) p[i] = 1.0;
  return p;
}

constexpr double kSupportCutoff = 1e-13;

}  // namespace

std::vector<MeasurementSetting> full_mub_settings() {
  constexpr Projector kModes[6] = {Projector::H, Projector::V, Projector::D, Projector::A, Projector::R, Projector::L};
  std::vector<MeasurementSetting> out;
  out.reserve(1296);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int c = 0; c < 6; ++c)
        for (int d = 0; d < 6; ++d) out.push_back({{kModes[a], kModes[b], kModes[c], kModes[d]}});
  return out;
}

bool is_informationally_complete(std::span<const MeasurementSetting> settings) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(256, 256);
  for (const auto& s : settings) {
    const auto v = hermitian_coordinates(projector(setting_ket(s)));
    gram.noalias() += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const auto& values = eig.eigenvalues();
  return values.maxCoeff() > 0.0 && values.minCoeff() > 1e-9 * values.maxCoeff();
}

std::vector<Observation> to_observations(std::span<const CountRecord> records) {
  std::vector<Observation> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.setting, r.duration, static_cast<double>(r.count)});
  return out;
}

std::vector<Observation> expected_observations(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                               double rate_scale, double duration) {
  std::vector<Observation> out;
  out.reserve(settings.size());
  for (const auto& s : settings)
    out.push_back({s, duration, rate_scale * duration * std::max(0.0, joint_probability(rho, s))});
  return out;
}

Matrix16 cholesky_factor(std::span<const double> params) {
  if (params.size() != kCholeskyParams) throw ValidationError("Cholesky parameterization needs 256 reals");
  Matrix16 t = Matrix16::Zero();
  int k = 16;
  for (int i = 0; i < 16; ++i) {
    t(i, i) = params[i];
    for (int j = 0; j < i; ++j, k += 2) t(i, j) = cd(params[k], params[k + 1]);
  }
  return t;
}

DensityMatrix density_from_cholesky(std::span<const double> params) {
  const Matrix16 t = cholesky_factor(params);
  const DensityMatrix m = t.adjoint() * t;
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw NumericalError("Cholesky factor is zero");
  return m / tr;
}

PoissonLikelihood::PoissonLikelihood(std::vector<Observation> observations) {
  for (const auto& o : observations) {
    if (o.counts < 0.0) throw ValidationError("counts must be non-negative");
    if (!(o.duration > 0.0)) throw ValidationError("durations must be positive");
    durations_.push_back(o.duration);
    counts_.push_back(o.counts);
    total_counts_ += o.counts;
  }
  if (!(total_counts_ > 0.0)) throw ValidationError("dataset has no counts");
  phi_.resize(16, static_cast<Eigen::Index>(observations.size()));
  for (std::size_t s = 0; s < observations.size(); ++s)
    phi_.col(static_cast<Eigen::Index>(s)) = setting_ket(observations[s].setting);
}

double PoissonLikelihood::log_likelihood(std::span<const double> params) const {
  return log_likelihood(density_from_cholesky(params));
}

double PoissonLikelihood::log_likelihood(const DensityMatrix& rho) const {
  // With eta at its optimum: L = sum_s n_s log(N t_s q_s / S) - N, S = sum_s t_s q_s.
  const Eigen::VectorXd q = (phi_.conjugate().cwiseProduct(rho * phi_)).colwise().sum().real().transpose().cwiseMax(kMinProbability);
  double s_total = 0.0;
  for (std::size_t s = 0; s < size(); ++s) s_total += durations_[s] * q(static_cast<Eigen::Index>(s));
  double value = -total_counts_;
  for (std::size_t s = 0; s < size(); ++s)
    if (counts_[s] > 0.0)
      value += counts_[s] * std::log(total_counts_ * durations_[s] * q(static_cast<Eigen::Index>(s)) / s_total);
  return value;
}

double PoissonLikelihood::log_likelihood(std::span<const double> params, std::span<double> gradient) const {
  if (gradient.size() != kCholeskyParams) throw ValidationError("gradient buffer must hold 256 values");
  const Matrix16 t = cholesky_factor(params);

  // q_s = |T phi_s|^2 is Tr(T^dag T P_s) without the trace normalization,
  // which cancels in the profiled likelihood.
  const std::size_t n = size();
  const Eigen::Matrix<cd, 16, Eigen::Dynamic> t_phi = t * phi_;

  Eigen::VectorXd q = t_phi.colwise().squaredNorm().transpose().cwiseMax(kMinProbability);
  double s_total = 0.0;
  for (std::size_t s = 0; s < n; ++s) s_total += durations_[s] * q(static_cast<Eigen::Index>(s));

  double value = -total_counts_;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    w(i) = -total_counts_ * durations_[s] / s_total;
    if (counts_[s] > 0.0) {
      value += counts_[s] * std::log(total_counts_ * durations_[s] * q(i) / s_total);
      w(i) += counts_[s] / q(i);
    }
  }

  // dL = Tr(G dM) with G = sum_s w_s P_s and M = T^dag T, so
  // dL/dRe T_ij = 2 Re (T G)_ij and dL/dIm T_ij = 2 Im (T G)_ij.
  const Matrix16 tg = t_phi * w.cast<cd>().asDiagonal() * phi_.adjoint();
  int k = 16;
  for (int i = 0; i < 16; ++i) {
    gradient[i] = 2.0 * tg(i, i).real();
    for (int j = 0; j < i; ++j, k += 2) {
      gradient[k] = 2.0 * tg(i, j).real();
      gradient[k + 1] = 2.0 * tg(i, j).imag();
    }
  }
  return value;
}

double PoissonLikelihood::optimal_scale(const DensityMatrix& rho) const {
  double s_total = 0.0;
  const Eigen::VectorXd q = (phi_.conjugate().cwiseProduct(rho * phi_)).colwise().sum().real().transpose().cwiseMax(0.0);
  for (std::size_t s = 0; s < size(); ++s) s_total += durations_[s] * q(static_cast<Eigen::Index>(s));
  if (!(s_total > 0.0)) throw NumericalError("state predicts no counts");
  return total_counts_ / s_total;
}

MleResult reconstruct_mle(const TomographyDataset& data, const MleOptions& options) {
  if (data.projector_set == ProjectorSetId::FullMub1296) {
    const auto expected = full_mub_settings();
    std::vector<bool> seen(expected.size(), false);
    for (const auto& r : data.records) {
      const auto it = std::find(expected.begin(), expected.end(), r.setting);
      if (it == expected.end()) throw ValidationError("setting " + r.setting.label() + " is not in the MUB set");
      seen[static_cast<std::size_t>(it - expected.begin())] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ValidationError("dataset does not cover all 1296 MUB settings");
  }
  const auto observations = to_observations(data.records);
  return reconstruct_mle(observations, options);
}

MleResult reconstruct_mle(std::span<const Observation> observations, const MleOptions& options) {
  std::vector<MeasurementSetting> settings;
  settings.reserve(observations.size());
  for (const auto& o : observations) settings.push_back(o.setting);
  if (!is_informationally_complete(settings)) throw ValidationError("projector set is not informationally complete");
  if (options.restarts < 1) throw ValidationError("need at least one start");

  const PoissonLikelihood model({observations.begin(), observations.end()});

  ceres::GradientProblemSolver::Options solver_options;
  solver_options.line_search_direction_type = ceres::LBFGS;
  solver_options.max_num_iterations = options.max_iterations;
  solver_options.function_tolerance = options.tolerance;
  solver_options.gradient_tolerance = 1e-14;
  solver_options.parameter_tolerance = 1e-14;
  solver_options.logging_type = ceres::SILENT;
  solver_options.update_state_every_iteration = false;

  MleResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < options.restarts; ++start) {
    std::vector<double> params = identity_params();
    if (start > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(start), 0x746fu};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, 0.3);
      for (double& p : params) p += normal(rng);
    }

    TraceRecorder recorder;
    solver_options.callbacks = {&recorder};
    ceres::GradientProblem problem(new NegLogLikelihood(model));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(solver_options, problem, params.data(), &summary);
    if (summary.termination_type == ceres::FAILURE)
      throw NumericalError("likelihood maximization failed: " + summary.message);

    const DensityMatrix rho = density_from_cholesky(params);
    const double ll = model.log_likelihood(rho);
    if (ll > best.log_likelihood) {
      best.rho = rho;
      best.log_likelihood = ll;
      best.iterations = static_cast<int>(summary.iterations.size()) - 1;
      best.trace = std::move(recorder.trace);
    }
  }
  best.scale = model.optimal_scale(best.rho);
  return best;
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  // Work on the support of the lower-rank argument; sqrt of round-off
  // eigenvalues would otherwise add ~1e-8 errors for pure states.
  Eigen::SelfAdjointEigenSolver<DensityMatrix> er(0.5 * (rho + rho.adjoint()));
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(0.5 * (sigma + sigma.adjoint()));
  auto rank = [](const auto& eig) { return (eig.eigenvalues().array() > kSupportCutoff).count(); };
  const bool use_rho = rank(er) <= rank(es);
  const auto& outer = use_rho ? er : es;
  const DensityMatrix& other = use_rho ? sigma : rho;

  std::vector<int> support;
  for (int i = 0; i < kDim; ++i)
    if (outer.eigenvalues()(i) > kSupportCutoff) support.push_back(i);
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd m(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      const int i = support[a], j = support[b];
      m(a, b) = std::sqrt(outer.eigenvalues()(i) * outer.eigenvalues()(j)) *
                outer.eigenvectors().col(i).dot(other * outer.eigenvectors().col(j));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const double f = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f * f, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) { return (rho * rho).trace().real(); }

nlohmann::json density_matrix_json(const DensityMatrix& rho, const nlohmann::json& metadata) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < 16; ++i) {
    nlohmann::json r = nlohmann::json::array(), m = nlohmann::json::array();
    for (int j = 0; j < 16; ++j) {
      r.push_back(rho(i, j).real());
      m.push_back(rho(i, j).imag());
    }
    re.push_back(r);
    im.push_back(m);
  }
  return {{"dim", 16}, {"re", re}, {"im", im}, {"metadata", metadata}};
}

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  try {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != 16 || im.size() != 16) throw ValidationError("density matrix JSON must be 16x16");
    DensityMatrix rho;
    for (int i = 0; i < 16; ++i) {
      if (re[i].size() != 16 || im[i].size() != 16) throw ValidationError("density matrix JSON must be 16x16");
      for (int k = 0; k < 16; ++k) rho(i, k) = cd(re[i][k].get<double>(), im[i][k].get<double>());
    }
    return rho;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed density matrix JSON: ") + e.what());
  }
}

}  // namespace oam4
