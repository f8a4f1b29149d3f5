#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oam4/types.hpp"

namespace oam4 {

/// Transverse mode of a single photon: the fundamental Gaussian mode or an
/// OAM mode carrying ell*hbar. ell = 0 is only ever the Gaussian kind.
struct ModeLabel {
  enum class Kind { Gaussian, Oam };

  Kind kind = Kind::Gaussian;
  int ell = 0;

  static ModeLabel gaussian() { return {Kind::Gaussian, 0}; }
  static ModeLabel oam(int ell);

  /// Partner mode with opposite OAM; the Gaussian mode is its own partner.
  ModeLabel partner() const { return kind == Kind::Gaussian ? *this : ModeLabel{Kind::Oam, -ell}; }

  std::string str() const;
  static ModeLabel parse(const std::string& text);

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

/// Truncated mode set with a fixed canonical order: Gaussian (if present),
/// then ell = -max_ell ... -1, +1 ... +max_ell.
class ModeSpace {
 public:
  ModeSpace(int max_ell, bool include_gaussian);

  int max_ell() const { return max_ell_; }
  bool has_gaussian() const { return gaussian_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<ModeLabel>& modes() const { return modes_; }

  bool contains(const ModeLabel& mode) const;
  /// Position of `mode` in the canonical order; throws ValidationError when
  /// the mode is outside the cutoff.
  std::size_t index_of(const ModeLabel& mode) const;

  friend bool operator==(const ModeSpace& a, const ModeSpace& b) {
    return a.max_ell_ == b.max_ell_ && a.gaussian_ == b.gaussian_;
  }

 private:
  int max_ell_;
  bool gaussian_;
  std::vector<ModeLabel> modes_;
};

/// Photon counts per mode, in the canonical order of a ModeSpace.
using Occupation = std::vector<unsigned>;

unsigned total_photons(const Occupation& occ);

/// Sparse superposition of Fock basis states. Values are immutable once
/// built; every operation below returns a new state.
class FockState {
 public:
  using Terms = std::map<Occupation, cd>;

  static constexpr double kDefaultPrune = 1e-15;

  explicit FockState(ModeSpace space, double prune_threshold = kDefaultPrune);

  static FockState vacuum(const ModeSpace& space);
  /// Single basis ket |occupation> with the given amplitude.
  static FockState basis(const ModeSpace& space, Occupation occupation, cd amplitude = 1.0);

  const ModeSpace& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  double prune_threshold() const { return prune_; }
  bool is_zero() const { return terms_.empty(); }

  /// Amplitude of a basis ket (0 if absent).
  cd amplitude(const Occupation& occ) const;

  double norm_squared() const;

  /// Adds `amplitude` to the coefficient of |occ>. Only used while building.
  void accumulate(const Occupation& occ, cd amplitude);
  /// Drops coefficients with modulus below the prune threshold.
  void prune();

  FockState scaled(cd factor) const;
  FockState& operator+=(const FockState& other);
  FockState& operator-=(const FockState& other) { return *this += other.scaled(-1.0); }

 private:
  ModeSpace space_;
  double prune_;
  Terms terms_;
};

FockState operator+(FockState a, const FockState& b);
FockState operator-(FockState a, const FockState& b);

/// Bosonic creation operator a^dagger on `mode`.
FockState create(const FockState& state, const ModeLabel& mode);
/// Bosonic annihilation operator a on `mode`; the vacuum maps to the zero state.
FockState annihilate(const FockState& state, const ModeLabel& mode);
/// <a|b>, conjugate-linear in `a`.
cd inner_product(const FockState& a, const FockState& b);
/// Keeps only terms with exactly `n` photons. Not renormalized.
FockState project_photon_number(const FockState& state, unsigned n);
FockState normalize(const FockState& state);

/// Unnormalized expectation value <psi|N|psi> of the total photon number.
double mean_photon_number(const FockState& state);
/// Squared norm of the n-photon component.
double sector_weight(const FockState& state, unsigned n);
/// Sum over modes of n_mode * ell; Gaussian photons carry no OAM.
int total_oam(const ModeSpace& space, const Occupation& occ);

nlohmann::json to_json(const FockState& state);
FockState fock_state_from_json(const nlohmann::json& j);

}  // namespace oam4
