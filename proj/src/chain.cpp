#include "qubus/chain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "qubus/format.hpp"
#include "qubus/rng.hpp"

namespace qubus {

void ChainParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error(std::string(name) + " must be positive and finite");
    }
  };
  positive(L0_km, "L0_km");
  positive(L_km, "L_km");
  positive(f_hz, "f_hz");
  positive(c_km_s, "c_km_s");
  if (!(P_g > 0.0 && P_g <= 1.0)) throw std::domain_error("P_g must lie in (0,1]");
  if (!(P_c > 0.0 && P_c <= 1.0)) throw std::domain_error("P_c must lie in (0,1]");
  if (!(tau0_s >= 0.0) || !std::isfinite(tau0_s)) throw std::domain_error("tau0_s must be >= 0");
  if (tauD_s) positive(*tauD_s, "tauD_s");
  if (!(eta_D >= 0.0 && eta_D <= 1.0)) throw std::domain_error("eta_D must lie in [0,1]");
  if (!(eta_M >= 0.0 && eta_M <= 1.0)) throw std::domain_error("eta_M must lie in [0,1]");
  if (!(F_link > 0.0 && F_link <= 1.0)) throw std::domain_error("F_link must lie in (0,1]");
  if (memory_modes && *memory_modes < 2) throw std::domain_error("memory_modes must be >= 2");
  levels(*this);
}

int levels(const ChainParams& p) {
  const double ratio = p.L_km / p.L0_km;
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw std::invalid_argument("L/L0 must be a power of 2");
  }
  const int n = static_cast<int>(std::lround(std::log2(ratio)));
  if (std::abs(ratio - std::ldexp(1.0, n)) > 1e-9 * ratio) {
    throw std::invalid_argument("L/L0 must be a power of 2");
  }
  return n;
}

std::uint64_t redundancy(double P_c) {
  if (!(P_c > 0.0 && P_c <= 1.0)) throw std::domain_error("P_c must lie in (0,1]");
  return static_cast<std::uint64_t>(std::ceil(1.0 / P_c - 1e-12));
}

double t_tot(const ChainParams& p) {
  p.validate();
  const int n = levels(p);
  const double r = static_cast<double>(redundancy(p.P_c));
  const double hop = p.L0_km / p.c_km_s;
  const double T0 = hop + (1.0 / p.f_hz) / p.P_g;
  double total = T0 * std::pow(r, n);
  for (int k = 1; k <= n; ++k) total += std::ldexp(1.0, k - 1) * hop;
  for (int k = 0; k < n; ++k) total += std::pow(r, n - k) * p.tau0_s;
  return total + hop;
}

double t_tot_closed(const ChainParams& p) {
  p.validate();
  const int n = levels(p);
  const double r = static_cast<double>(redundancy(p.P_c));
  const double T0 = p.L0_km / p.c_km_s + (1.0 / p.f_hz) / p.P_g;
  const double swaps = r >= 2.0 ? (std::pow(r, n + 1) - r) / (r - 1.0) : n;
  return T0 * std::pow(r, n) + swaps * p.tau0_s + p.L_km / p.c_km_s;
}

std::int64_t memory_space_formula(const ChainParams& p) {
  const double x = p.L0_km * p.f_hz / p.c_km_s;
  return 4 * static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12)));
}

std::int64_t memory_space(const ChainParams& p, MemoryMode mode) {
  p.validate();
  if (mode == MemoryMode::DeadtimeLimited) {
    if (!p.tauD_s) throw std::invalid_argument("deadtime-limited memory needs tauD_s");
    const double x = p.L0_km / (p.c_km_s * *p.tauD_s);
    return 4 * static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12)));
  }
  const double minimal_rate = p.c_km_s / (2.0 * p.L0_km);
  if (p.f_hz <= minimal_rate * 1.01) return 2;
  return memory_space_formula(p);
}

double final_fidelity(double F, double L_km, double L0_km) {
  if (!(F > 0.0 && F <= 1.0)) throw std::domain_error("F must lie in (0,1]");
  if (!(L0_km > 0.0 && L_km > 0.0)) throw std::domain_error("lengths must be positive");
  const double ratio = L_km / L0_km;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * ratio) {
    throw std::domain_error("L/L0 must be a positive integer");
  }
  return std::pow(F, k);
}

double pc_from_efficiencies(double eta_D, double eta_M) {
  if (!(eta_D >= 0.0 && eta_D <= 1.0 && eta_M >= 0.0 && eta_M <= 1.0)) {
    throw std::domain_error("efficiencies must lie in [0,1]");
  }
  return eta_D * eta_D * eta_M * eta_M;
}

ScheduleResult schedule(const ChainParams& p) {
  ScheduleResult s;
  s.t_tot_s = t_tot(p);
  s.m_e = memory_space(p);
  s.n_levels = levels(p);
  s.F_final = final_fidelity(p.F_link, p.L_km, p.L0_km);
  s.links_required = 1;
  for (int k = 0; k < s.n_levels; ++k) s.links_required *= redundancy(p.P_c);
  return s;
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Attempt: return "attempt";
    case EventKind::LinkSuccess: return "link-success";
    case EventKind::Swap: return "swap";
    case EventKind::ClassicalMsg: return "classical-msg";
    case EventKind::MemoryStore: return "memory-store";
    case EventKind::MemoryRelease: return "memory-release";
    case EventKind::AttemptBlocked: return "attempt-blocked";
  }
  return "unknown";
}

void EventLog::write(std::ostream& os) const {
  os << "# qubus chain event log, one record per line\n";
  for (const Event& e : events) {
    os << "event = time_s=" << fmt17(e.time_s) << " station=" << e.station
       << " kind=" << to_string(e.kind) << " level=" << e.level << " count=" << e.count;
    if (e.kind == EventKind::ClassicalMsg) {
      os << " distance_km=" << fmt17(e.distance_km) << " cause_time_s=" << fmt17(e.cause_time_s);
    }
    if (e.kind == EventKind::Swap) os << " success=" << (e.success ? 1 : 0);
    os << '\n';
  }
}

namespace {

struct TrialOut {
  double time = 0.0;
  std::vector<double> first_links;
  std::vector<std::uint64_t> failed_units;  // per level 1..n
  bool connected = false;
  std::uint64_t blocked = 0;
};

struct Unit {
  double done = 0.0;
  std::uint64_t pairs = 0;
};

class TrialRunner {
 public:
  TrialRunner(const ChainParams& p, std::int64_t memory_modes)
      : p_(p),
        n_(levels(p)),
        r_(redundancy(p.P_c)),
        hop_(p.L0_km / p.c_km_s),
        tau_(1.0 / p.f_hz) {
    links_ = 1;
    for (int k = 0; k < n_; ++k) links_ *= r_;
    capacity_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(memory_modes / 2));
    window_slots_ = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(2.0 * hop_ / tau_ - 1e-9)));
  }

  TrialOut run(Rng& rng, EventLog* log) const {
    TrialOut out;
    const std::size_t segments = std::size_t{1} << n_;
    std::vector<Unit> units(segments);

    for (std::size_t s = 0; s < segments; ++s) {
      std::uint64_t accepted = 0;
      double last = 0.0;
      for (std::uint64_t k = 0; k < links_; ++k) {
        const std::uint64_t first = accepted;
        accepted += rng.geometric(p_.P_g);
        last = hop_ + static_cast<double>(slot(accepted - 1) + 1) * tau_;
        if (k == 0) out.first_links.push_back(last);
        if (log) log_link(*log, static_cast<int>(s), first, accepted - first, last);
      }
      const std::uint64_t blocked = slot(accepted - 1) + 1 - accepted;
      out.blocked += blocked;
      if (log && blocked > 0) {
        log->events.push_back({last, static_cast<int>(s), EventKind::AttemptBlocked, 0, blocked});
      }
      units[s] = {last, links_};
    }

    out.failed_units.assign(static_cast<std::size_t>(n_), 0);
    for (int k = 1; k <= n_; ++k) {
      const double notify_km = std::ldexp(p_.L0_km, k - 1);
      std::vector<Unit> next(units.size() / 2);
      for (std::size_t i = 0; i < next.size(); ++i) {
        const Unit& a = units[2 * i];
        const Unit& b = units[2 * i + 1];
        const double start = std::max(a.done, b.done);
        const std::uint64_t attempts = std::min(a.pairs, b.pairs);
        const int station = static_cast<int>((2 * i + 1) << (k - 1));
        std::uint64_t made = 0;
        for (std::uint64_t q = 0; q < attempts; ++q) {
          const bool ok = rng.bernoulli(p_.P_c);
          made += ok ? 1 : 0;
          if (log) {
            const double t = start + static_cast<double>(q + 1) * p_.tau0_s;
            Event swap{t, station, EventKind::Swap, k};
            swap.success = ok;
            log->events.push_back(swap);
            log->events.push_back({t, station, EventKind::MemoryRelease, k, 2});
          }
        }
        const double sent = start + static_cast<double>(attempts) * p_.tau0_s;
        const double done = sent + notify_km / p_.c_km_s;
        if (log) {
          const int half = 1 << (k - 1);
          for (int end : {station - half, station + half}) {
            Event msg{done, end, EventKind::ClassicalMsg, k};
            msg.distance_km = notify_km;
            msg.cause_time_s = sent;
            log->events.push_back(msg);
          }
        }
        if (made == 0) ++out.failed_units[static_cast<std::size_t>(k - 1)];
        next[i] = {done, made};
      }
      units = std::move(next);
    }

    out.time = units[0].done + hop_;
    out.connected = units[0].pairs > 0;
    if (log) {
      Event msg{out.time, 0, EventKind::ClassicalMsg, n_};
      msg.distance_km = p_.L0_km;
      msg.cause_time_s = units[0].done;
      log->events.push_back(msg);
      std::stable_sort(log->events.begin(), log->events.end(),
                       [](const Event& x, const Event& y) { return x.time_s < y.time_s; });
    }
    return out;
  }

 private:
  // Pulse slot of the j-th accepted attempt. When fewer than one window of
  // attempts fit in memory, the stream stalls until slots free up.
  std::uint64_t slot(std::uint64_t j) const {
    if (capacity_ >= window_slots_) return j;
    return (j / capacity_) * window_slots_ + j % capacity_;
  }

  void log_link(EventLog& log, int segment, std::uint64_t first, std::uint64_t attempts,
                double herald) const {
    log.events.push_back({static_cast<double>(slot(first)) * tau_, segment,
                          EventKind::Attempt, 0, attempts});
    log.events.push_back({herald, segment + 1, EventKind::LinkSuccess, 0});
    log.events.push_back({herald, segment + 1, EventKind::MemoryStore, 0});
    Event msg{herald + hop_, segment, EventKind::ClassicalMsg, 0};
    msg.distance_km = p_.L0_km;
    msg.cause_time_s = herald;
    log.events.push_back(msg);
    log.events.push_back({herald + hop_, segment, EventKind::MemoryStore, 0});
  }

  ChainParams p_;
  int n_;
  std::uint64_t r_;
  double hop_;
  double tau_;
  std::uint64_t links_ = 1;
  std::uint64_t capacity_ = 1;
  std::uint64_t window_slots_ = 1;
};

}  // namespace

McResult mc_distribute(const ChainParams& p, std::uint64_t seed, std::uint64_t trials,
                       int histogram_bins) {
  p.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");

  McResult res;
  res.trials = trials;
  res.memory_modes = p.memory_modes ? *p.memory_modes : memory_space(p);
  const TrialRunner runner(p, res.memory_modes);

  std::vector<TrialOut> outs(trials);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(std::min<std::uint64_t>(trials, 64))));
  auto work = [&](unsigned w) {
    for (std::uint64_t t = w; t < trials; t += workers) {
      Rng rng(seed, t);
      outs[t] = runner.run(rng, t == 0 ? &res.sample_log : nullptr);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  const int n = levels(p);
  const double N = static_cast<double>(trials);
  double sum = 0.0, sum2 = 0.0, fl = 0.0, fl2 = 0.0;
  std::uint64_t fl_count = 0, connected = 0;
  std::vector<std::uint64_t> failed(static_cast<std::size_t>(n), 0);
  res.min_time_s = outs[0].time;
  res.max_time_s = outs[0].time;
  for (const TrialOut& o : outs) {
    sum += o.time;
    sum2 += o.time * o.time;
    res.min_time_s = std::min(res.min_time_s, o.time);
    res.max_time_s = std::max(res.max_time_s, o.time);
    for (double x : o.first_links) {
      fl += x;
      fl2 += x * x;
      ++fl_count;
    }
    for (std::size_t k = 0; k < failed.size(); ++k) failed[k] += o.failed_units[k];
    connected += o.connected ? 1 : 0;
    res.blocked_attempts += o.blocked;
  }
  res.mean_time_s = sum / N;
  res.stderr_time_s =
      trials > 1 ? std::sqrt(std::max(0.0, (sum2 - N * res.mean_time_s * res.mean_time_s) / (N - 1.0)) / N)
                 : 0.0;
  const double M = static_cast<double>(fl_count);
  res.first_link_mean_s = fl / M;
  res.first_link_stderr_s =
      fl_count > 1 ? std::sqrt(std::max(0.0, (fl2 - M * res.first_link_mean_s * res.first_link_mean_s) / (M - 1.0)) / M)
                   : 0.0;
  for (int k = 1; k <= n; ++k) {
    const double units = std::ldexp(1.0, n - k) * N;
    res.residual_failure.push_back(static_cast<double>(failed[static_cast<std::size_t>(k - 1)]) / units);
  }
  res.connected_fraction = static_cast<double>(connected) / N;

  Histogram& h = res.histogram;
  h.lo = res.min_time_s;
  h.width = (res.max_time_s - res.min_time_s) / histogram_bins;
  h.counts.assign(static_cast<std::size_t>(histogram_bins), 0);
  for (const TrialOut& o : outs) {
    std::size_t b = 0;
    if (h.width > 0.0) {
      b = std::min(static_cast<std::size_t>((o.time - h.lo) / h.width),
                   static_cast<std::size_t>(histogram_bins - 1));
    }
    ++h.counts[b];
  }
  return res;
}

}  // namespace qubus
