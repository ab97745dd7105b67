#pragma once

// QND comparison modules: a coherent probe picks up an XPM phase when a
// photon is present, a 50/50 beam splitter compares it with a reference
// beam, and a threshold photodiode watches the difference port.

#include <array>
#include <string>

#include "qubus/hybrid_state.hpp"
#include "qubus/optics.hpp"
#include "qubus/parity_circuit.hpp"

namespace qubus {

struct SourceState {
  double p_s = 1.0;  // probability of |1> versus |0>
  void validate() const;
};

struct QndParams {
  Complex alpha0;
  double theta = 0.0;
  DetectorParams det;
};

/// Amplitude of the difference port: (alpha0 - alpha0 e^{i theta}) / sqrt2.
Complex difference_amplitude(Complex alpha0, double theta);

/// Ideal-detector success probability of the beam comparison,
/// 1 - exp(-|alpha0 - alpha0 e^{i theta}|^2 / 2).
double comparison_success(const QndParams& q);
double comparison_error(const QndParams& q);

struct PurifyResult {
  double click_prob = 0.0;
  double conditional_fidelity = 0.0;
};

/// Heralded purification of p_s|1><1| + (1-p_s)|0><0|.
/// Throws std::domain_error when the detector can never fire.
PurifyResult purify_source(const SourceState& src, const QndParams& q);

/// Amplitude magnitude for which |x (e^{i theta} - 1)|^2 / 2 equals
/// `exponent` (vacuum overlap e^{-exponent}). Used for the default probe
/// beams of the M module and the port-discrimination modules.
double default_probe_amplitude(double theta, double exponent = 20.0);

struct MModuleResult {
  double click_prob = 0.0;
  double vacuum_prob = 0.0;       // exp(-|w|^2)
  double multi_photon_prob = 0.0; // P(k >= 2) of the weak beam, ~ |w|^4 / 2
};

/// Indirect detection of a weak beam |w>: its non-vacuum part imprints
/// theta on a bright beam gamma, which a comparison module then detects.
/// All k >= 1 components are treated as k = 1.
MModuleResult m_module(Complex weak_amplitude, Complex gamma, double theta,
                       const DetectorParams& det);
double m_module_outcome(Complex weak_amplitude, Complex gamma, double theta,
                        const DetectorParams& det);

/// Click probability of the bright comparison beam when the weak beam was
/// not vacuum, and when it was.
double m_module_bright_click(Complex gamma, double theta, const DetectorParams& det);
double m_module_dark_click(const DetectorParams& det);

struct PortOutcome {
  PortPair port;
  bool a_click = false;
  bool b_click = false;
  double probability = 0.0;
  HybridKet projected;  // unnormalized photonic component on the port pair
};

struct PortDiscrimination {
  std::array<PortOutcome, 4> outcomes;  // indexed like kAllPortPairs
  double residual_overlap = 0.0;        // |<0|(delta e^{i theta} - delta)/sqrt2>|
  bool warning = false;                 // residual_overlap >= 1e-4
  std::string message;
};

/// One QND module per location, each coupling a delta beam to both K-port
/// tracks. `state` is a which-path HybridKet from to_hybrid_ket().
PortDiscrimination port_discriminate(const HybridKet& state, Complex delta,
                                     double theta, const DetectorParams& det);

}  // namespace qubus
