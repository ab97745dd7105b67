#pragma once

// Unitary optical elements on coherent bus labels and the threshold
// detector model. Every element acts on HybridKet and on BranchedDensity;
// for the latter the environment Gram matrix is untouched.

#include <string_view>

#include "qubus/hybrid_state.hpp"

namespace qubus {

struct DetectorParams {
  double eta_D = 1.0;        // detection efficiency
  double lambda_dark = 0.0;  // mean dark count per window

  void validate() const;
};

HybridKet phase_shift(const HybridKet& state, std::string_view bus_mode, double phi);
BranchedDensity phase_shift(const BranchedDensity& state, std::string_view bus_mode,
                            double phi);

/// 50/50 beam splitter: (a, b) -> ((a - b)/sqrt2, (a + b)/sqrt2).
HybridKet beam_split(const HybridKet& state, std::string_view mode_1,
                     std::string_view mode_2);
BranchedDensity beam_split(const BranchedDensity& state, std::string_view mode_1,
                           std::string_view mode_2);

/// Cross-phase modulation: branches with a photon in `photon_mode` pick up
/// exp(i theta) on `bus_mode`.
HybridKet xpm(const HybridKet& state, std::string_view photon_mode,
              std::string_view bus_mode, double theta);
BranchedDensity xpm(const BranchedDensity& state, std::string_view photon_mode,
                    std::string_view bus_mode, double theta);

/// Probability that the threshold detector fires on |beta>:
/// 1 - exp(-lambda) exp(-eta_D |beta|^2).
double click_probability(Complex beta, const DetectorParams& det);

/// Threshold POVM elements as bus effects.
BusEffect no_click_effect(const DetectorParams& det);
BusEffect click_effect(const DetectorParams& det);

}  // namespace qubus
