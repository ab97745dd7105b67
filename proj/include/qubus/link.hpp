#pragma once

// Elementary-link generation over one fiber segment: closed forms for the
// per-attempt success probability and fidelity, and a seeded simulation of
// the full optical pipeline (port discrimination, qubus XPM at B, fiber
// loss, XPM at A, phase shifters + beam splitter, indirect M-module
// detection).

#include <array>
#include <cstdint>
#include <vector>

#include "qubus/hybrid_state.hpp"
#include "qubus/optics.hpp"
#include "qubus/parity_circuit.hpp"
#include "qubus/rng.hpp"

namespace qubus {

struct LinkParams {
  double alpha = 3.1622776601683795;  // |alpha theta|^2 = 1e-3 at theta = 0.01
  double theta = 0.01;
  double L0_km = 75.0;
  double atten_km = 25.0;
  double f_hz = 40e3;
  double c_km_s = 2e5;
  DetectorParams det;
  /// Probe amplitudes of the M module and the port QND modules; 0 picks
  /// default_probe_amplitude(theta).
  double gamma = 0.0;
  double delta = 0.0;

  void validate() const;
  double eta() const;
  double gamma_or_default() const;
  double delta_or_default() const;
};

/// chi = <sqrt(1-eta) alpha e^{i theta} | sqrt(1-eta) alpha>.
Complex link_chi(const LinkParams& p);

/// 1/2 (1 - exp(-2 eta |alpha sin theta|^2)), sin taken exactly.
double p_g_exact(const LinkParams& p);

/// Small-angle companion 1/2 (1 - (2F - 1)^{2 eta / (1 - eta)}).
double p_g_from_fidelity(double F, double eta);

/// (1 + |chi|^2) / 2.
double link_fidelity(const LinkParams& p);

/// tau / P_g + L0 / c, tau = 1/f.
double mean_link_time(double f_hz, double p_g, double L0_km, double c_km_s = 2e5);
double mean_link_time(const LinkParams& p);

struct Fig3Row {
  double L0_km;
  double F;
  double P_g;
};

std::vector<double> default_fig3_distances();
std::vector<double> default_fig3_fidelities();

/// Rows ordered by distance, then fidelity.
std::vector<Fig3Row> fig3_sweep(const std::vector<double>& distances_km,
                                const std::vector<double>& F_grid,
                                double atten_km = 25.0);

/// Bell state heralded on a port pair: Psi- for K_A K_B and R_A R_B,
/// Psi+ for the crossed pairs.
Bell target_bell(PortPair port);

/// Result of the qubus entangling stage for one normalized port block.
struct EntanglingStage {
  double success_prob = 0.0;       // M-module click probability
  double vacuum_prob = 0.0;        // weak beam in vacuum
  double multi_photon_prob = 0.0;  // weak beam k >= 2, not propagated
  PhotonicDensity posterior;       // normalized, photon modes A.H A.V B.H B.V
  double fidelity = 0.0;           // with target_bell(port)
};

EntanglingStage entangle_block(const Matrix2c& block, PortPair port,
                               const LinkParams& p);

struct LinkOutcome {
  bool success = false;
  PortPair port = PortPair::KaKb;
  Bell target = Bell::PsiMinus;
  PhotonicDensity posterior;
  double fidelity_target = 0.0;
  double elapsed_s = 0.0;
};

struct LinkBatch {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::array<std::uint64_t, 4> port_counts{};
  std::array<std::uint64_t, 4> port_successes{};
  double mean_fidelity = 0.0;  // over successes
  double success_rate() const {
    return attempts ? static_cast<double>(successes) / static_cast<double>(attempts)
                    : 0.0;
  }
};

/// Precomputes the pipeline for every (input eigencomponent, port pair) so
/// repeated attempts only draw random numbers.
class LinkSimulator {
 public:
  /// `input` is a 4x4 density matrix in the HH, HV, VH, VV basis.
  LinkSimulator(const Matrix4c& input, const LinkParams& p);

  static Matrix4c pure_input(const Vector4c& ket);

  LinkOutcome attempt(Rng& rng) const;
  LinkBatch run(std::uint64_t attempts, std::uint64_t seed) const;

  /// Exact per-attempt success probability implied by the pipeline.
  double success_probability() const;
  /// Exact port-pair distribution (sums to 1 with ideal port detectors).
  std::array<double, 4> port_probabilities() const;

  struct Branch {
    double port_prob = 0.0;
    EntanglingStage stage;
  };
  struct Component {
    double weight = 0.0;
    std::array<Branch, 4> ports;
  };
  const std::vector<Component>& components() const { return components_; }
  const LinkParams& params() const { return params_; }

 private:
  LinkParams params_;
  std::vector<Component> components_;
};

/// One attempt from scratch. Throws std::invalid_argument on a
/// non-normalized input.
LinkOutcome simulate_attempt(const Matrix4c& input, const LinkParams& p,
                             std::uint64_t seed);

}  // namespace qubus
