#include "qubus/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qubus/chain.hpp"
#include "qubus/format.hpp"
#include "qubus/link.hpp"
#include "qubus/qnd.hpp"

namespace qubus {

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
  }
  CsvWriter& cell(double v) { return raw(fmt17(v)); }
  CsvWriter& cell(std::int64_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::uint64_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(const std::string& v) { return raw(v); }
  void end_row() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  CsvWriter& raw(const std::string& s) {
    os_ << (fresh_ ? "" : ",") << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool fresh_ = true;
};

}  // namespace

CommandResult cmd_purify(const RunConfig& cfg) {
  CommandResult res;
  CsvWriter csv({"lambda_dark", "p_s", "P_S", "P_E", "click_prob", "conditional_fidelity"});
  std::vector<double> lambdas = cfg.lambda_sweep;
  if (lambdas.empty()) lambdas.push_back(cfg.lambda_dark);
  std::ostringstream rep;
  QndParams q = cfg.qnd_params();
  rep << "source purification, |alpha0 theta| = " << fmt17(std::abs(q.alpha0) * std::abs(q.theta))
      << ", eta_D = " << fmt17(q.det.eta_D) << "\n";
  for (double lam : lambdas) {
    q.det.lambda_dark = lam;
    const PurifyResult r = purify_source(SourceState{cfg.p_s}, q);
    const double ps = comparison_success(q);
    const double pe = comparison_error(q);
    csv.cell(lam).cell(cfg.p_s).cell(ps).cell(pe).cell(r.click_prob).cell(r.conditional_fidelity);
    csv.end_row();
    rep << "  lambda " << fmt17(lam) << ": P_E " << fmt17(pe) << ", click "
        << fmt17(r.click_prob) << ", fidelity " << fmt17(r.conditional_fidelity) << "\n";
  }
  res.csv = csv.str();
  res.report = rep.str();
  return res;
}

CommandResult cmd_fig3(const RunConfig& cfg) {
  CommandResult res;
  const auto F = cfg.fig3_F.empty() ? default_fig3_fidelities() : cfg.fig3_F;
  CsvWriter csv({"L0_km", "F", "P_g"});
  for (const Fig3Row& row : fig3_sweep(cfg.fig3_L0_km, F, cfg.atten_km)) {
    csv.cell(row.L0_km).cell(row.F).cell(row.P_g);
    csv.end_row();
  }
  res.csv = csv.str();
  res.report = "fig3: " + std::to_string(cfg.fig3_L0_km.size() * F.size()) + " rows\n";
  return res;
}

CommandResult cmd_table(const RunConfig& cfg) {
  CommandResult res;
  CsvWriter csv({"f_hz", "T_tot_s", "M_E", "m_e_formula", "n_levels", "links_required"});
  std::ostringstream rep;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%12s  %14s  %10s  %10s\n", "f [Hz]", "T_tot [s]", "M_E",
                "4ceil(L0f/c)");
  rep << "L0 = " << fmt17(cfg.L0_km) << " km, L = " << fmt17(cfg.L_km) << " km, P_g = "
      << fmt17(cfg.P_g) << ", P_c = " << fmt17(cfg.P_c) << "\n"
      << buf;
  for (double f : cfg.table_f_hz) {
    ChainParams p = cfg.chain_params();
    p.f_hz = f;
    const ScheduleResult s = schedule(p);
    const std::int64_t formula = memory_space_formula(p);
    csv.cell(f).cell(s.t_tot_s).cell(s.m_e).cell(formula).cell(static_cast<std::int64_t>(s.n_levels))
        .cell(s.links_required);
    csv.end_row();
    std::snprintf(buf, sizeof buf, "%12.4g  %14.4g  %10lld  %10lld\n", f, s.t_tot_s,
                  static_cast<long long>(s.m_e), static_cast<long long>(formula));
    rep << buf;
  }
  res.csv = csv.str();
  res.report = rep.str();
  return res;
}

CommandResult cmd_fig4(const RunConfig& cfg) {
  CommandResult res;
  CsvWriter csv({"L_km", "f_hz", "P_c", "T_tot_s", "L_over_c_s"});
  for (std::size_t i = 0; i < cfg.fig4_f_hz.size(); ++i) {
    for (double L : cfg.fig4_L_km) {
      ChainParams p = cfg.chain_params();
      p.L_km = L;
      p.f_hz = cfg.fig4_f_hz[i];
      p.P_c = cfg.fig4_P_c[i];
      csv.cell(L).cell(p.f_hz).cell(p.P_c).cell(t_tot(p)).cell(L / p.c_km_s);
      csv.end_row();
    }
  }
  res.csv = csv.str();
  res.report = "fig4: " + std::to_string(cfg.fig4_f_hz.size() * cfg.fig4_L_km.size()) + " rows\n";
  return res;
}

CommandResult cmd_verify_circuit(const std::optional<std::array<LocalUnitary, 4>>& unitaries) {
  CommandResult res;
  const CircuitReport report = verify_circuit(unitaries ? *unitaries : build_unitaries());
  CsvWriter csv({"check", "residual", "passed"});
  std::ostringstream rep;
  for (const CircuitCheck& c : report.checks) {
    csv.cell(c.name).cell(c.residual).cell(static_cast<std::int64_t>(c.passed ? 1 : 0));
    csv.end_row();
    rep << (c.passed ? "ok    " : "FAILED") << "  " << c.name << "  residual " << fmt17(c.residual)
        << "\n";
  }
  rep << "\nport blocks per Bell input:\n";
  for (const std::string& line : report.block_table) rep << "  " << line << "\n";
  res.exit_code = report.all_passed() ? kExitOk : kExitVerify;
  res.csv = csv.str();
  res.report = rep.str();
  return res;
}

CommandResult cmd_mc(const RunConfig& cfg) {
  CommandResult res;
  CsvWriter csv({"metric", "value"});
  std::ostringstream rep;
  auto put = [&csv](const std::string& name, auto v) {
    csv.cell(name).cell(v);
    csv.end_row();
  };

  if (cfg.mc_mode != "chain") {
    const LinkParams lp = cfg.link_params();
    const LinkSimulator sim(cfg.input_density(), lp);
    const LinkBatch batch = sim.run(cfg.link_attempts, cfg.seed);
    const double p = p_g_exact(lp);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(batch.attempts));
    const double z = sigma > 0.0 ? (batch.success_rate() - p) / sigma : 0.0;
    put("link_attempts", batch.attempts);
    put("link_successes", batch.successes);
    put("link_success_rate", batch.success_rate());
    put("link_p_g_exact", p);
    put("link_pipeline_success_prob", sim.success_probability());
    put("link_binomial_sigma", sigma);
    put("link_z_score", z);
    put("link_mean_fidelity", batch.mean_fidelity);
    put("link_fidelity_closed_form", link_fidelity(lp));
    for (std::size_t k = 0; k < 4; ++k) {
      std::string port = to_string(kAllPortPairs[k]);
      std::replace(port.begin(), port.end(), ' ', '_');
      put("link_port_" + port + "_count", batch.port_counts[k]);
      put("link_port_" + port + "_successes", batch.port_successes[k]);
    }
    rep << "link: " << batch.successes << "/" << batch.attempts << " successes, rate "
        << fmt17(batch.success_rate()) << " vs P_g " << fmt17(p) << " (z = " << fmt17(z)
        << "), mean fidelity " << fmt17(batch.mean_fidelity) << "\n";
  }

  if (cfg.mc_mode != "link") {
    const ChainParams cp = cfg.chain_params();
    const McResult mc = mc_distribute(cp, cfg.seed, cfg.trials);
    const double hop = cp.L0_km / cp.c_km_s;
    put("chain_trials", mc.trials);
    put("chain_mean_time_s", mc.mean_time_s);
    put("chain_stderr_time_s", mc.stderr_time_s);
    put("chain_min_time_s", mc.min_time_s);
    put("chain_max_time_s", mc.max_time_s);
    put("chain_t_tot_s", t_tot(cp));
    put("chain_L_over_c_s", cp.L_km / cp.c_km_s);
    put("chain_first_link_mean_s", mc.first_link_mean_s);
    put("chain_first_link_stderr_s", mc.first_link_stderr_s);
    put("chain_first_link_expected_s", (1.0 / cp.f_hz) / cp.P_g + hop);
    put("chain_connected_fraction", mc.connected_fraction);
    for (std::size_t k = 0; k < mc.residual_failure.size(); ++k) {
      put("chain_residual_failure_level_" + std::to_string(k + 1), mc.residual_failure[k]);
    }
    put("chain_memory_modes", mc.memory_modes);
    put("chain_blocked_attempts", mc.blocked_attempts);
    put("chain_histogram_lo_s", mc.histogram.lo);
    put("chain_histogram_width_s", mc.histogram.width);
    for (std::size_t b = 0; b < mc.histogram.counts.size(); ++b) {
      put("chain_histogram_bin_" + std::to_string(b), mc.histogram.counts[b]);
    }
    std::ostringstream log;
    mc.sample_log.write(log);
    res.event_log = log.str();
    rep << "chain: mean " << fmt17(mc.mean_time_s) << " s +- " << fmt17(mc.stderr_time_s)
        << " over " << mc.trials << " trials, closed form " << fmt17(t_tot(cp))
        << " s, connected fraction " << fmt17(mc.connected_fraction) << "\n";
    if (mc.blocked_attempts > 0) {
      rep << "chain: " << mc.blocked_attempts
          << " attempts blocked by memory capacity (blocked-attempt accounting)\n";
    }
  }
  res.csv = csv.str();
  res.report = rep.str();
  return res;
}

}  // namespace qubus
