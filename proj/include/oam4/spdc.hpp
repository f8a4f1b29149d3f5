#pragma once

#include "oam4/fock.hpp"

namespace oam4 {

/// Source parameters. `gain` is the single-pass amplitude gain; the coupling
/// constant, interaction time and hbar only ever enter through it.
struct SpdcParams {
  double gain = 0.1;
  int max_ell = 1;
  bool include_gaussian = false;
  /// Number of pair-creation steps kept in the exponential series (1..3).
  int order = 2;

  void validate() const;
  ModeSpace mode_space() const { return {max_ell, include_gaussian}; }
};

/// K = (1/2) sum_{ell=-L..L} (a_ell^dag a_-ell^dag - a_ell a_-ell), the
/// downconversion Hamiltonian with the i*kappa*hbar prefactor stripped. The
/// ell = 0 term acts on the Gaussian mode and is present only if enabled.
FockState apply_hamiltonian(const FockState& state, const SpdcParams& params);

/// sum_{k=0}^{order} gain^k K^k |0> / k!, unnormalized.
FockState expand_vacuum(const SpdcParams& params);

/// Normalized four-photon component of expand_vacuum. Requires order >= 2.
FockState four_photon_state(const SpdcParams& params);

}  // namespace oam4
