#pragma once

// Entanglement connection over a repeater chain of 2^n segments: closed-form
// schedule quantities plus a seeded discrete-event Monte Carlo of
// the generate / swap / notify strategy.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qubus {

struct ChainParams {
  double L0_km = 75.0;
  double L_km = 1200.0;
  double f_hz = 40e3;
  double P_g = 5e-5;
  double P_c = 0.5;
  double tau0_s = 0.0;
  std::optional<double> tauD_s;
  double c_km_s = 2e5;
  double eta_D = 1.0;
  double eta_M = 1.0;
  double F_link = 0.9995;
  /// Memory modes per half station for the MC; unset means memory_space().
  std::optional<std::int64_t> memory_modes;

  void validate() const;
};

/// log2(L / L0). Throws std::invalid_argument unless the ratio is 2^n.
int levels(const ChainParams& p);

/// ceil(1 / P_c).
std::uint64_t redundancy(double P_c);

/// Average distribution time, summed term by term.
double t_tot(const ChainParams& p);

/// Same quantity through the geometric-series form (r >= 2), or the direct
/// sum when r = 1.
double t_tot_closed(const ChainParams& p);

enum class MemoryMode { RateLimited, DeadtimeLimited };

/// Memory modes per half station. Rate-limited reports 2 at the minimal
/// rate f <= c / (2 L0) * (1 + 1%); deadtime-limited needs tauD_s.
std::int64_t memory_space(const ChainParams& p, MemoryMode mode = MemoryMode::RateLimited);

/// 4 ceil(L0 f / c) without the minimal-rate override.
std::int64_t memory_space_formula(const ChainParams& p);

/// F^(L/L0).
double final_fidelity(double F, double L_km, double L0_km);

/// eta_D^2 eta_M^2.
double pc_from_efficiencies(double eta_D, double eta_M);

struct ScheduleResult {
  double t_tot_s = 0.0;
  std::int64_t m_e = 0;
  double F_final = 0.0;
  int n_levels = 0;
  std::uint64_t links_required = 0;  // per segment, ceil(1/P_c)^n
};

ScheduleResult schedule(const ChainParams& p);

// ---------------------------------------------------------------------------
// Monte Carlo

enum class EventKind {
  Attempt,
  LinkSuccess,
  Swap,
  ClassicalMsg,
  MemoryStore,
  MemoryRelease,
  AttemptBlocked
};

std::string to_string(EventKind k);

struct Event {
  double time_s = 0.0;
  int station = 0;
  EventKind kind = EventKind::Attempt;
  int level = 0;              // 0 for elementary links
  std::uint64_t count = 1;    // attempts aggregated in one record
  double distance_km = 0.0;   // classical messages only
  double cause_time_s = 0.0;  // classical messages only: emission time
  bool success = true;        // swaps only
};

struct EventLog {
  std::vector<Event> events;  // time ordered
  void write(std::ostream& os) const;
};

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::uint64_t> counts;
};

struct McResult {
  std::uint64_t trials = 0;
  double mean_time_s = 0.0;
  double stderr_time_s = 0.0;
  double min_time_s = 0.0;
  double max_time_s = 0.0;
  Histogram histogram;
  /// Mean and standard error of the first link-success time per segment.
  double first_link_mean_s = 0.0;
  double first_link_stderr_s = 0.0;
  /// Fraction of level-k connection units that produced no pair, k = 1..n.
  std::vector<double> residual_failure;
  double connected_fraction = 0.0;
  std::uint64_t blocked_attempts = 0;  // summed over trials
  std::int64_t memory_modes = 0;
  EventLog sample_log;  // trial 0
};

McResult mc_distribute(const ChainParams& p, std::uint64_t seed, std::uint64_t trials,
                       int histogram_bins = 50);

}  // namespace qubus
