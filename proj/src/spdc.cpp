#include "oam4/spdc.hpp"

#include "oam4/error.hpp"

namespace oam4 {

void SpdcParams::validate() const {
  if (!(gain > 0.0)) throw ValidationError("gain must be positive");
  if (max_ell < 1 && !include_gaussian) throw ValidationError("empty mode set: cutoff 0 without the Gaussian mode");
  if (max_ell < 0) throw ValidationError("OAM cutoff must be non-negative");
  if (order < 1 || order > 3) throw ValidationError("series order must be 1, 2 or 3");
}

FockState apply_hamiltonian(const FockState& state, const SpdcParams& params) {
  const ModeSpace space = params.mode_space();
  if (!(state.space() == space)) throw ValidationError("state cutoff does not match source parameters");

  FockState out(space, state.prune_threshold());
  for (const ModeLabel& mode : space.modes()) {
    const ModeLabel partner = mode.partner();
    out += create(create(state, partner), mode).scaled(0.5);
    out -= annihilate(annihilate(state, partner), mode).scaled(0.5);
  }
  return out;
}

FockState expand_vacuum(const SpdcParams& params) {
  params.validate();
  FockState term = FockState::vacuum(params.mode_space());
  FockState total = term;
  for (int k = 1; k <= params.order; ++k) {
    term = apply_hamiltonian(term, params).scaled(params.gain / k);
    total += term;
  }
  return total;
}

FockState four_photon_state(const SpdcParams& params) {
  params.validate();
  if (params.order < 2) throw ValidationError("four-photon state needs series order >= 2");
  return normalize(project_photon_number(expand_vacuum(params), 4));
}

}  // namespace oam4
