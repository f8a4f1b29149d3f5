#include "oam4/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oam4/error.hpp"

namespace oam4 {

ModeLabel ModeLabel::oam(int ell) {
  if (ell == 0) throw ValidationError("OAM mode label requires ell != 0; use the Gaussian mode");
  return {Kind::Oam, ell};
}

std::string ModeLabel::str() const {
  if (kind == Kind::Gaussian) return "G";
  return (ell > 0 ? "+" : "") + std::to_string(ell);
}

ModeLabel ModeLabel::parse(const std::string& text) {
  if (text == "G") return gaussian();
  try {
    std::size_t used = 0;
    const int ell = std::stoi(text, &used);
    if (used != text.size()) throw ValidationError("bad mode label '" + text + "'");
    return oam(ell);
  } catch (const std::logic_error&) {
    throw ValidationError("bad mode label '" + text + "'");
  }
}

ModeSpace::ModeSpace(int max_ell, bool include_gaussian) : max_ell_(max_ell), gaussian_(include_gaussian) {
  if (max_ell < 0) throw ValidationError("OAM cutoff must be non-negative");
  if (max_ell == 0 && !include_gaussian) throw ValidationError("empty mode set: cutoff 0 without the Gaussian mode");
  if (gaussian_) modes_.push_back(ModeLabel::gaussian());
  for (int ell = -max_ell; ell <= -1; ++ell) modes_.push_back(ModeLabel::oam(ell));
  for (int ell = 1; ell <= max_ell; ++ell) modes_.push_back(ModeLabel::oam(ell));
}

bool ModeSpace::contains(const ModeLabel& mode) const {
  if (mode.kind == ModeLabel::Kind::Gaussian) return gaussian_;
  return mode.ell != 0 && std::abs(mode.ell) <= max_ell_;
}

std::size_t ModeSpace::index_of(const ModeLabel& mode) const {
  if (!contains(mode)) {
    throw ValidationError("mode " + mode.str() + " outside cutoff (max |ell| = " + std::to_string(max_ell_) +
                          (gaussian_ ? ", with Gaussian)" : ", no Gaussian)"));
  }
  const std::size_t offset = gaussian_ ? 1 : 0;
  if (mode.kind == ModeLabel::Kind::Gaussian) return 0;
  if (mode.ell < 0) return offset + static_cast<std::size_t>(mode.ell + max_ell_);
  return offset + static_cast<std::size_t>(max_ell_ + mode.ell - 1);
}

unsigned total_photons(const Occupation& occ) { return std::accumulate(occ.begin(), occ.end(), 0u); }

FockState::FockState(ModeSpace space, double prune_threshold) : space_(std::move(space)), prune_(prune_threshold) {}

FockState FockState::vacuum(const ModeSpace& space) {
  return basis(space, Occupation(space.size(), 0u));
}

FockState FockState::basis(const ModeSpace& space, Occupation occupation, cd amplitude) {
  if (occupation.size() != space.size()) throw ValidationError("occupation vector length does not match mode set");
  FockState s(space);
  s.accumulate(occupation, amplitude);
  s.prune();
  return s;
}

cd FockState::amplitude(const Occupation& occ) const {
  const auto it = terms_.find(occ);
  return it == terms_.end() ? cd{} : it->second;
}

double FockState::norm_squared() const {
  double sum = 0.0;
  for (const auto& [occ, amp] : terms_) sum += std::norm(amp);
  return sum;
}

void FockState::accumulate(const Occupation& occ, cd amplitude) { terms_[occ] += amplitude; }

void FockState::prune() {
  std::erase_if(terms_, [this](const auto& kv) { return std::abs(kv.second) < prune_; });
}

FockState FockState::scaled(cd factor) const {
  FockState out(space_, prune_);
  for (const auto& [occ, amp] : terms_) out.terms_.emplace(occ, amp * factor);
  out.prune();
  return out;
}

FockState& FockState::operator+=(const FockState& other) {
  if (!(space_ == other.space_)) throw ValidationError("cannot add Fock states over different mode sets");
  for (const auto& [occ, amp] : other.terms_) terms_[occ] += amp;
  prune();
  return *this;
}

FockState operator+(FockState a, const FockState& b) { return a += b; }
FockState operator-(FockState a, const FockState& b) { return a += b.scaled(-1.0); }

FockState create(const FockState& state, const ModeLabel& mode) {
  const std::size_t k = state.space().index_of(mode);
  FockState out(state.space(), state.prune_threshold());
  for (const auto& [occ, amp] : state.terms()) {
    Occupation next = occ;
    next[k] += 1;
    out.accumulate(next, amp * std::sqrt(static_cast<double>(next[k])));
  }
  out.prune();
  return out;
}

FockState annihilate(const FockState& state, const ModeLabel& mode) {
  const std::size_t k = state.space().index_of(mode);
  FockState out(state.space(), state.prune_threshold());
  for (const auto& [occ, amp] : state.terms()) {
    if (occ[k] == 0) continue;
    Occupation next = occ;
    next[k] -= 1;
    out.accumulate(next, amp * std::sqrt(static_cast<double>(occ[k])));
  }
  out.prune();
  return out;
}

cd inner_product(const FockState& a, const FockState& b) {
  if (!(a.space() == b.space())) throw ValidationError("inner product of states with mismatched cutoffs");
  cd sum{};
  for (const auto& [occ, amp] : a.terms()) sum += std::conj(amp) * b.amplitude(occ);
  return sum;
}

FockState project_photon_number(const FockState& state, unsigned n) {
  FockState out(state.space(), state.prune_threshold());
  for (const auto& [occ, amp] : state.terms())
    if (total_photons(occ) == n) out.accumulate(occ, amp);
  return out;
}

FockState normalize(const FockState& state) {
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw NumericalError("cannot normalize the zero state");
  return state.scaled(1.0 / std::sqrt(norm2));
}

double mean_photon_number(const FockState& state) {
  double sum = 0.0;
  for (const auto& [occ, amp] : state.terms()) sum += std::norm(amp) * total_photons(occ);
  return sum;
}

double sector_weight(const FockState& state, unsigned n) {
  double sum = 0.0;
  for (const auto& [occ, amp] : state.terms())
    if (total_photons(occ) == n) sum += std::norm(amp);
  return sum;
}

int total_oam(const ModeSpace& space, const Occupation& occ) {
  int ell = 0;
  for (std::size_t k = 0; k < occ.size(); ++k) ell += static_cast<int>(occ[k]) * space.modes()[k].ell;
  return ell;
}

nlohmann::json to_json(const FockState& state) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : state.space().modes()) modes.push_back(m.str());
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [occ, amp] : state.terms())
    terms.push_back({{"occupation", occ}, {"re", amp.real()}, {"im", amp.imag()}});
  return {{"modes", modes},
          {"max_ell", state.space().max_ell()},
          {"gaussian", state.space().has_gaussian()},
          {"terms", terms}};
}

FockState fock_state_from_json(const nlohmann::json& j) {
  try {
    const ModeSpace space(j.at("max_ell").get<int>(), j.at("gaussian").get<bool>());
    const auto& modes = j.at("modes");
    if (modes.size() != space.size()) throw ValidationError("mode header does not match cutoff");
    for (std::size_t k = 0; k < space.size(); ++k)
      if (!(ModeLabel::parse(modes[k].get<std::string>()) == space.modes()[k]))
        throw ValidationError("mode header is not in canonical order");
    FockState state(space);
    for (const auto& t : j.at("terms")) {
      auto occ = t.at("occupation").get<Occupation>();
      if (occ.size() != space.size()) throw ValidationError("occupation vector length does not match mode set");
      state.accumulate(occ, {t.at("re").get<double>(), t.at("im").get<double>()});
    }
    state.prune();
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed Fock state JSON: ") + e.what());
  }
}

}  // namespace oam4
