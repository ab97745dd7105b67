#include "qubus/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qubus {

void DetectorParams::validate() const {
  if (!(eta_D >= 0.0 && eta_D <= 1.0)) {
    throw std::domain_error("detector efficiency must lie in [0,1]");
  }
  if (!(lambda_dark >= 0.0) || !std::isfinite(lambda_dark)) {
    throw std::domain_error("dark count mean must be finite and >= 0");
  }
}

namespace {

template <typename F>
std::vector<BranchTerm> map_labels(std::vector<BranchTerm> terms, F&& f) {
  for (auto& t : terms) f(t);
  return terms;
}

struct PhaseShift {
  std::size_t mode;
  Complex factor;
  void operator()(BranchTerm& t) const { t.bus[mode] *= factor; }
};

struct BeamSplit {
  std::size_t first;
  std::size_t second;
  void operator()(BranchTerm& t) const {
    const Complex a = t.bus[first];
    const Complex b = t.bus[second];
    t.bus[first] = (a - b) * (1.0 / std::numbers::sqrt2);
    t.bus[second] = (a + b) * (1.0 / std::numbers::sqrt2);
  }
};

struct CrossPhase {
  std::size_t photon;
  std::size_t bus;
  Complex factor;
  void operator()(BranchTerm& t) const {
    if (t.pattern.occupied(photon)) t.bus[bus] *= factor;
  }
};

BeamSplit make_beam_split(const ModeRegistry& reg, std::string_view m1,
                          std::string_view m2) {
  BeamSplit bs{reg.bus_index(m1), reg.bus_index(m2)};
  if (bs.first == bs.second) throw RegistryError("beam_split needs two distinct modes");
  return bs;
}

}  // namespace

HybridKet phase_shift(const HybridKet& state, std::string_view bus_mode, double phi) {
  PhaseShift op{state.registry()->bus_index(bus_mode), std::polar(1.0, phi)};
  return HybridKet(state.registry(), map_labels(state.terms(), op));
}

BranchedDensity phase_shift(const BranchedDensity& state, std::string_view bus_mode,
                            double phi) {
  PhaseShift op{state.registry()->bus_index(bus_mode), std::polar(1.0, phi)};
  return state.with_branches(map_labels(state.branches(), op));
}

HybridKet beam_split(const HybridKet& state, std::string_view mode_1,
                     std::string_view mode_2) {
  auto op = make_beam_split(*state.registry(), mode_1, mode_2);
  return HybridKet(state.registry(), map_labels(state.terms(), op));
}

BranchedDensity beam_split(const BranchedDensity& state, std::string_view mode_1,
                           std::string_view mode_2) {
  auto op = make_beam_split(*state.registry(), mode_1, mode_2);
  return state.with_branches(map_labels(state.branches(), op));
}

HybridKet xpm(const HybridKet& state, std::string_view photon_mode,
              std::string_view bus_mode, double theta) {
  const auto& reg = *state.registry();
  CrossPhase op{reg.photon_index(photon_mode), reg.bus_index(bus_mode),
                std::polar(1.0, theta)};
  return HybridKet(state.registry(), map_labels(state.terms(), op));
}

BranchedDensity xpm(const BranchedDensity& state, std::string_view photon_mode,
                    std::string_view bus_mode, double theta) {
  const auto& reg = *state.registry();
  CrossPhase op{reg.photon_index(photon_mode), reg.bus_index(bus_mode),
                std::polar(1.0, theta)};
  return state.with_branches(map_labels(state.branches(), op));
}

double click_probability(Complex beta, const DetectorParams& det) {
  det.validate();
  return -std::expm1(-det.lambda_dark - det.eta_D * std::norm(beta));
}

BusEffect no_click_effect(const DetectorParams& det) {
  det.validate();
  // Pi_0 = e^{-lambda} sum_n (1 - eta_D)^n |n><n|
  return BusEffect([det](Complex bra, Complex ket) {
    return std::exp(-det.lambda_dark - 0.5 * std::norm(bra) - 0.5 * std::norm(ket) +
                    (1.0 - det.eta_D) * std::conj(bra) * ket);
  });
}

BusEffect click_effect(const DetectorParams& det) {
  auto none = no_click_effect(det);
  return BusEffect([none](Complex bra, Complex ket) {
    return coherent_overlap(bra, ket) - none.element(bra, ket);
  });
}

}  // namespace qubus
