#include "oam4/correlations.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "oam4/error.hpp"
#include "oam4/spdc.hpp"

namespace oam4 {

namespace {

PureState4 product_ket(const MeasurementSetting& setting) {
  Eigen::VectorXcd ket = Eigen::VectorXcd::Ones(1);
  for (Projector p : setting.arms) {
    const Qubit q = projector_vector(p);
    Eigen::VectorXcd next(ket.size() * 2);
    for (Eigen::Index i = 0; i < ket.size(); ++i) next.segment<2>(2 * i) = ket(i) * q;
    ket = std::move(next);
  }
  return ket;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t channel = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(channel)};
  return std::mt19937_64(seq);
}

std::uint64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

Eigen::Matrix2cd rotation(const Eigen::Vector3d& theta) {
  const double angle = theta.norm();
  if (angle == 0.0) return Eigen::Matrix2cd::Identity();
  const Eigen::Vector3d n = theta / angle;
  const cd i{0.0, 1.0};
  Eigen::Matrix2cd n_sigma;
  n_sigma << n.z(), cd(n.x(), -n.y()), cd(n.x(), n.y()), -n.z();
  return std::cos(angle / 2) * Eigen::Matrix2cd::Identity() - i * std::sin(angle / 2) * n_sigma;
}

}  // namespace

std::string MeasurementSetting::label() const {
  std::string s;
  for (Projector p : arms) s += to_char(p);
  return s;
}

MeasurementSetting MeasurementSetting::parse(const std::string& label) {
  if (label.size() != 4) throw ValidationError("measurement setting needs exactly 4 modes, got '" + label + "'");
  MeasurementSetting s;
  for (std::size_t k = 0; k < 4; ++k) s.arms[k] = parse_projector(label[k]);
  return s;
}

bool MeasurementSetting::is_qubit_setting() const {
  for (Projector p : arms)
    if (p == Projector::G) return false;
  return true;
}

MeasurementSetting MeasurementSetting::from_outcome(Basis basis, unsigned outcome) {
  MeasurementSetting s;
  for (int k = 0; k < 4; ++k) s.arms[k] = projector_for(basis, static_cast<int>((outcome >> (3 - k)) & 1u));
  return s;
}

void NoiseModel::validate() const {
  if (background_fraction < 0.0 || background_fraction > 1.0) throw ValidationError("background fraction must be in [0,1]");
  if (white_noise < 0.0 || white_noise > 1.0) throw ValidationError("white noise must be in [0,1]");
  if (background_fraction + white_noise > 1.0) throw ValidationError("background fraction + white noise must not exceed 1");
  if (misalignment_sigma < 0.0) throw ValidationError("misalignment sigma must be non-negative");
}

NoiseModel NoiseModel::calibrated(std::uint64_t seed) { return {0.10, 0.16, 0.06, seed}; }

double joint_probability(const DensityMatrix& rho, const MeasurementSetting& setting) {
  if (!setting.is_qubit_setting()) throw ValidationError("joint probability needs qubit projectors, got " + setting.label());
  const PureState4 phi = product_ket(setting);
  return (phi.adjoint() * rho * phi)(0, 0).real();
}

double joint_probability(const PureState4& psi, const MeasurementSetting& setting) {
  if (!setting.is_qubit_setting()) throw ValidationError("joint probability needs qubit projectors, got " + setting.label());
  return std::norm(product_ket(setting).dot(psi));
}

std::array<double, 16> probability_table(const DensityMatrix& rho, Basis basis) {
  std::array<double, 16> table{};
  for (unsigned s = 0; s < 16; ++s) table[s] = joint_probability(rho, MeasurementSetting::from_outcome(basis, s));
  return table;
}

DensityMatrix background_state() {
  const ModeSpace space(1, false);
  const FockState pair = FockState::basis(space, {1, 1});
  const cd t = 1.0 / std::sqrt(2.0);
  const std::array<cd, 2> splitter{t, cd{0.0, 1.0} * t};
  const Eigen::Vector4cd pair_state = route_to_arms(pair, splitter).state;

  // Arms (0,1) hold one pair and (2,3) the other, for each pairing.
  constexpr std::array<std::array<int, 4>, 3> kPairings = {{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
  DensityMatrix rho = DensityMatrix::Zero();
  for (const auto& arms : kPairings) {
    PureState4 psi = PureState4::Zero();
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const int bits[4] = {a >> 1, a & 1, b >> 1, b & 1};
        int ket = 0;
        for (int k = 0; k < 4; ++k) ket |= bits[k] << (3 - arms[k]);
        psi(ket) += pair_state(a) * pair_state(b);
      }
    }
    rho += projector(psi) / 3.0;
  }
  return rho;
}

std::array<Eigen::Matrix2cd, 4> misalignment_rotations(double sigma, std::uint64_t seed) {
  std::array<Eigen::Matrix2cd, 4> out;
  if (sigma == 0.0) {
    out.fill(Eigen::Matrix2cd::Identity());
    return out;
  }
  auto rng = stream(seed, 0, 0x6d6973);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& u : out) {
    Eigen::Vector3d theta;
    for (int k = 0; k < 3; ++k) theta(k) = normal(rng);
    u = rotation(theta);
  }
  return out;
}

DensityMatrix apply_noise(const PureState4& psi, const NoiseModel& noise) {
  noise.validate();
  const auto rotations = misalignment_rotations(noise.misalignment_sigma, noise.seed);
  const PureState4 rotated = kron4(rotations) * psi;
  const double f = noise.background_fraction;
  const double lambda = noise.white_noise;
  DensityMatrix rho = (1.0 - f - lambda) * projector(rotated);
  if (f > 0.0) rho += f * background_state();
  if (lambda > 0.0) rho += lambda * DensityMatrix::Identity() / 16.0;
  return rho;
}

CountRecord simulate_counts(const DensityMatrix& rho, const MeasurementSetting& setting, double rate_scale,
                            double duration, std::uint64_t seed) {
  if (!(rate_scale > 0.0)) throw ValidationError("rate scale must be positive");
  if (duration < 0.0) throw ValidationError("duration must be non-negative");
  auto rng = stream(seed, 0);
  const double p = std::max(0.0, joint_probability(rho, setting));
  return {setting, duration, poisson(rng, rate_scale * p * duration)};
}

std::vector<CountRecord> simulate_dataset(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                          double rate_scale, double duration, std::uint64_t seed) {
  if (!(rate_scale > 0.0)) throw ValidationError("rate scale must be positive");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    auto rng = stream(seed, i + 1);
    const double p = std::max(0.0, joint_probability(rho, settings[i]));
    out.push_back({settings[i], duration, poisson(rng, rate_scale * p * duration)});
  }
  return out;
}

std::vector<double> default_scan_powers() { return {10, 20, 30, 40, 50, 60, 70}; }

ExpectedRates expected_rates(double power_mw, const PowerScanConfig& config) {
  if (!(power_mw > 0.0)) throw ValidationError("pump power must be positive");
  const double pair_probability = config.pair_probability_per_mw * power_mw;
  SpdcParams params{std::sqrt(pair_probability), config.max_ell, false, 1};
  const double photons_per_pulse = mean_photon_number(expand_vacuum(params));
  params.order = 2;
  const double double_pairs_per_pulse = sector_weight(expand_vacuum(params), 4);

  ExpectedRates r;
  r.singles = config.repetition_rate_hz * config.singles_efficiency * photons_per_pulse / 4.0;
  r.fourfold_correlated = config.repetition_rate_hz * config.fourfold_efficiency * double_pairs_per_pulse;
  const double f = config.background_fraction;
  r.fourfold_accidental = r.fourfold_correlated * f / (1.0 - f);
  return r;
}

std::vector<PowerScanRow> power_scan(std::span<const double> powers_mw, const PowerScanConfig& config) {
  if (config.background_fraction < 0.0 || config.background_fraction >= 1.0)
    throw ValidationError("background fraction must be in [0,1)");
  if (!(config.duration_s > 0.0)) throw ValidationError("duration must be positive");
  std::vector<PowerScanRow> rows;
  for (std::size_t i = 0; i < powers_mw.size(); ++i) {
    const ExpectedRates r = expected_rates(powers_mw[i], config);
    const double t = config.duration_s;
    auto singles_rng = stream(config.seed, i, 1);
    auto zero_rng = stream(config.seed, i, 2);
    auto delayed_rng = stream(config.seed, i, 3);
    PowerScanRow row;
    row.power_mw = powers_mw[i];
    row.singles_rate = static_cast<double>(poisson(singles_rng, r.singles * t)) / t;
    row.fourfold_rate =
        static_cast<double>(poisson(zero_rng, (r.fourfold_correlated + r.fourfold_accidental) * t)) / t;
    row.fourfold_delayed_rate = static_cast<double>(poisson(delayed_rng, r.fourfold_accidental * t)) / t;
    rows.push_back(row);
  }
  return rows;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit needs equally many x and y values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double det = n * sxx - sx * sx;
  if (n < 2 || det <= 0.0) throw NumericalError("power-law fit needs at least two distinct positive points");
  const double slope = (n * sxy - sx * sy) / det;
  return {slope, std::exp((sy - slope * sx) / n)};
}

double delayed_ratio(std::span<const PowerScanRow> rows) {
  double delayed = 0.0, zero = 0.0;
  for (const auto& r : rows) {
    delayed += r.fourfold_delayed_rate;
    zero += r.fourfold_rate;
  }
  if (zero <= 0.0) throw NumericalError("no zero-delay four-fold events");
  return delayed / zero;
}

void write_counts_csv(std::ostream& out, std::span<const CountRecord> records) {
  out << "setting,duration,count\n";
  out.precision(17);
  for (const auto& r : records) out << r.setting.label() << ',' << r.duration << ',' << r.count << '\n';
}

std::vector<CountRecord> read_counts_csv(std::istream& in) {
  std::vector<CountRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line.rfind("setting", 0) == 0)) continue;
    std::stringstream ss(line);
    std::string label, duration, count;
    if (!std::getline(ss, label, ',') || !std::getline(ss, duration, ',') || !std::getline(ss, count))
      throw ValidationError("counts CSV line " + std::to_string(line_no) + ": expected setting,duration,count");
    CountRecord r;
    r.setting = MeasurementSetting::parse(label);
    try {
      r.duration = std::stod(duration);
      if (count.find('-') != std::string::npos) throw ValidationError("negative count");
      r.count = std::stoull(count);
    } catch (const std::logic_error&) {
      throw ValidationError("counts CSV line " + std::to_string(line_no) + ": bad number");
    }
    if (r.duration < 0.0) throw ValidationError("counts CSV line " + std::to_string(line_no) + ": negative duration");
    records.push_back(r);
  }
  return records;
}

void write_power_scan_csv(std::ostream& out, std::span<const PowerScanRow> rows) {
  out << "power_mw,singles_rate,fourfold_rate,fourfold_delayed_rate\n";
  out.precision(10);
  for (const auto& r : rows)
    out << r.power_mw << ',' << r.singles_rate << ',' << r.fourfold_rate << ',' << r.fourfold_delayed_rate << '\n';
}

nlohmann::json probability_table_json(const std::array<double, 16>& table, Basis basis) {
  nlohmann::json entries = nlohmann::json::array();
  for (unsigned s = 0; s < 16; ++s)
    entries.push_back({{"outcome", MeasurementSetting::from_outcome(basis, s).label()}, {"p", table[s]}});
  return {{"basis", to_string(basis)}, {"entries", entries}};
}

}  // namespace oam4
