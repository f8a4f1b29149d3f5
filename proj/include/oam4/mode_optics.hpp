#pragma once

#include <array>
#include <span>
#include <string>

#include <Eigen/Core>

#include "oam4/fock.hpp"
#include "oam4/types.hpp"

namespace oam4 {

/// The three mutually unbiased bases of the first-order mode qubit.
/// Z_RL is the computational basis: R = LG ell=+1 -> |0>, L = LG ell=-1 -> |1>.
/// H = (R+L)/sqrt2, V = (R-L)/sqrt2, D = (R+iL)/sqrt2, A = (R-iL)/sqrt2.
enum class Basis { Z_RL, X_HV, Y_DA };

/// Single-photon detection mode of one arm. G (fundamental Gaussian) lies
/// outside the qubit and is only meaningful for rate simulation.
enum class Projector { H, V, D, A, R, L, G };

inline constexpr std::array<Basis, 3> kAllBases = {Basis::Z_RL, Basis::X_HV, Basis::Y_DA};

std::string to_string(Basis basis);
Basis parse_basis(const std::string& text);
char to_char(Projector p);
Projector parse_projector(char c);

/// Projector for outcome 0 or 1 of `basis`.
Projector projector_for(Basis basis, int outcome);

/// Qubit vector of basis element `outcome` (0 or 1).
Qubit mub_projector(Basis basis, int outcome);
/// Qubit vector of a detection mode; throws ValidationError for G.
Qubit projector_vector(Projector p);

/// Symmetric Dicke state of n qubits with k excitations, dimension 2^n.
Eigen::VectorXcd dicke_state(int n, int k);
PureState4 dicke_4_2();

struct PostSelectionResult {
  /// Normalized conditional state of the arms (arm 0 is the most significant qubit).
  Eigen::VectorXcd state;
  double success_probability = 0.0;
};

/// Amplitudes of the balanced 1->4 splitter tree: transmission 1/sqrt2 and
/// reflection i/sqrt2 at each splitter; arms (A,B,C,D) = (tt, tr, rt, rr).
std::array<cd, 4> splitter_tree_amplitudes();

/// Sends every photon of `source` (modes +1/-1 only) independently through a
/// linear splitter with the given arm amplitudes and keeps the events with
/// exactly one photon per arm. The photon number of every term must equal
/// the number of arms.
PostSelectionResult route_to_arms(const FockState& source, std::span<const cd> arm_amplitudes);

/// route_to_arms through the four-arm splitter tree.
PostSelectionResult split_to_detectors(const FockState& source);

}  // namespace oam4
