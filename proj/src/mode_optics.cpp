#include "oam4/mode_optics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "oam4/error.hpp"

namespace oam4 {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

std::string to_string(Basis basis) {
  switch (basis) {
    case Basis::Z_RL: return "Z_RL";
    case Basis::X_HV: return "X_HV";
    case Basis::Y_DA: return "Y_DA";
  }
  return "?";
}

Basis parse_basis(const std::string& text) {
  if (text == "Z_RL" || text == "RL") return Basis::Z_RL;
  if (text == "X_HV" || text == "HV") return Basis::X_HV;
  if (text == "Y_DA" || text == "DA") return Basis::Y_DA;
  throw ValidationError("unknown basis '" + text + "'");
}

char to_char(Projector p) {
  static constexpr char kNames[] = {'H', 'V', 'D', 'A', 'R', 'L', 'G'};
  return kNames[static_cast<int>(p)];
}

Projector parse_projector(char c) {
  switch (c) {
    case 'H': return Projector::H;
    case 'V': return Projector::V;
    case 'D': return Projector::D;
    case 'A': return Projector::A;
    case 'R': return Projector::R;
    case 'L': return Projector::L;
    case 'G': return Projector::G;
    default: throw ValidationError(std::string("unknown detection mode '") + c + "'");
  }
}

Projector projector_for(Basis basis, int outcome) {
  if (outcome != 0 && outcome != 1) throw ValidationError("qubit outcome must be 0 or 1");
  switch (basis) {
    case Basis::Z_RL: return outcome == 0 ? Projector::R : Projector::L;
    case Basis::X_HV: return outcome == 0 ? Projector::H : Projector::V;
    case Basis::Y_DA: return outcome == 0 ? Projector::D : Projector::A;
  }
  throw ValidationError("unknown basis");
}

Qubit mub_projector(Basis basis, int outcome) { return projector_vector(projector_for(basis, outcome)); }

Qubit projector_vector(Projector p) {
  const cd i{0.0, 1.0};
  switch (p) {
    case Projector::R: return Qubit(1.0, 0.0);
    case Projector::L: return Qubit(0.0, 1.0);
    case Projector::H: return Qubit(kInvSqrt2, kInvSqrt2);
    case Projector::V: return Qubit(kInvSqrt2, -kInvSqrt2);
    case Projector::D: return Qubit(kInvSqrt2, i * kInvSqrt2);
    case Projector::A: return Qubit(kInvSqrt2, -i * kInvSqrt2);
    case Projector::G: break;
  }
  throw ValidationError("Gaussian mode is not a first-order qubit projector");
}

Eigen::VectorXcd dicke_state(int n, int k) {
  if (n < 1 || n > 20 || k < 0 || k > n) throw ValidationError("Dicke state needs 0 <= k <= n, 1 <= n <= 20");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    if (std::popcount(static_cast<unsigned long>(s)) == k) psi(s) = 1.0;
  return psi / psi.norm();
}

PureState4 dicke_4_2() { return dicke_state(4, 2); }

std::array<cd, 4> splitter_tree_amplitudes() {
  const cd t = kInvSqrt2;
  const cd r = cd{0.0, kInvSqrt2};
  return {t * t, t * r, r * t, r * r};
}

PostSelectionResult route_to_arms(const FockState& source, std::span<const cd> arm_amplitudes) {
  const std::size_t arms = arm_amplitudes.size();
  if (arms == 0 || arms > 12) throw ValidationError("arm count must be between 1 and 12");

  const ModeSpace& space = source.space();
  const ModeLabel plus = ModeLabel::oam(1);
  const ModeLabel minus = ModeLabel::oam(-1);
  if (!space.contains(plus)) throw ValidationError("routing needs the ell = +-1 modes");
  const std::size_t i_plus = space.index_of(plus);
  const std::size_t i_minus = space.index_of(minus);

  if (source.is_zero()) throw ValidationError("cannot route the zero state");
  const double input_norm2 = source.norm_squared();

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << arms);
  std::vector<std::size_t> perm(arms);
  for (const auto& [occ, amp] : source.terms()) {
    for (std::size_t k = 0; k < occ.size(); ++k)
      if (occ[k] != 0 && k != i_plus && k != i_minus)
        throw ValidationError("routing accepts only photons in modes +1 and -1");
    if (total_photons(occ) != arms) throw ValidationError("photon number must equal the number of arms");

    // Photon p carries qubit value 0 (R, +1) for the first n_plus photons, 1 (L, -1) after.
    const unsigned n_plus = occ[i_plus];
    const cd weight = amp / std::sqrt(factorial(occ[i_plus]) * factorial(occ[i_minus]));

    // perm[p] is the arm receiving photon p; distinct arms = one photon per arm.
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      cd a = weight;
      Eigen::Index ket = 0;
      for (std::size_t p = 0; p < arms; ++p) {
        a *= arm_amplitudes[perm[p]];
        if (p >= n_plus) ket |= Eigen::Index{1} << (arms - 1 - perm[p]);
      }
      out(ket) += a;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  const double kept = out.squaredNorm();
  if (kept <= 1e-300) throw NumericalError("post-selection has zero success probability");
  return {out / std::sqrt(kept), kept / input_norm2};
}

PostSelectionResult split_to_detectors(const FockState& source) {
  const auto amps = splitter_tree_amplitudes();
  return route_to_arms(source, amps);
}

}  // namespace oam4
