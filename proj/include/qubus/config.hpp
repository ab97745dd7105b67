#pragma once

// Flat "key = value" run configuration shared by every CLI subcommand.
// Lines starting with '#' are comments; list values are comma separated.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubus/chain.hpp"
#include "qubus/link.hpp"
#include "qubus/qnd.hpp"

namespace qubus {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // link / shared physics
  double alpha = 3.1622776601683795;
  double theta = 0.01;
  double L0_km = 75.0;
  double atten_km = 25.0;
  double f_hz = 40e3;
  double c_km_s = 2e5;
  double eta_D = 1.0;
  double lambda_dark = 0.0;
  double gamma = 0.0;  // 0 = default probe amplitude
  double delta = 0.0;
  std::string input_state = "HH";

  // chain
  double L_km = 1200.0;
  double P_g = 5e-5;
  double P_c = 0.5;
  double tau0_s = 0.0;
  std::optional<double> tauD_s;
  double eta_M = 1.0;
  double F_link = 0.9995;
  std::optional<std::int64_t> memory_modes;

  // qnd source purification
  std::optional<double> alpha0;  // unset: |alpha0 theta| = 2 sqrt5
  double p_s = 0.9;
  std::vector<double> lambda_sweep;

  // sweeps
  std::vector<double> fig3_L0_km{15, 27, 50, 75, 100};
  std::vector<double> fig3_F;  // empty: default grid
  std::vector<double> table_f_hz{1.33e3, 40e3, 1e6, 10e6, 100e6};
  std::vector<double> fig4_L_km{150, 300, 600, 1200, 2400};
  std::vector<double> fig4_f_hz{40e3, 40e3, 1e6};
  std::vector<double> fig4_P_c{0.5, 1.0, 0.5};

  // monte carlo
  std::string mc_mode = "both";  // link | chain | both
  std::uint64_t link_attempts = 1000000;
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  std::string output_path;

  LinkParams link_params() const;
  ChainParams chain_params() const;
  QndParams qnd_params() const;
  /// 4x4 density matrix of input_state.
  Matrix4c input_density() const;

  /// Throws ConfigError on any violated physical constraint.
  void validate() const;
};

/// Parses and validates. Any rejected line raises ConfigError naming it.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Every key the parser accepts, in declaration order.
const std::vector<std::string>& config_keys();

}  // namespace qubus
