// qubus: command-line front end for the repeater-protocol simulator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qubus/commands.hpp"
#include "qubus/config.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out;
  std::vector<double> lambda_sweep;
  std::string mc_mode;
  bool flip_u2_sign = false;
};

qubus::RunConfig resolve_config(const Options& o) {
  qubus::RunConfig cfg = o.config_path.empty() ? qubus::RunConfig{} : qubus::load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (!o.out.empty()) cfg.output_path = o.out;
  if (!o.lambda_sweep.empty()) cfg.lambda_sweep = o.lambda_sweep;
  if (!o.mc_mode.empty()) cfg.mc_mode = o.mc_mode;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

int emit(const qubus::CommandResult& r, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << r.csv;
    std::cerr << r.report;
  } else {
    write_file(out_path, r.csv);
    std::cout << r.report;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubus repeater-protocol simulator"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--out", o.out, "CSV output path (stdout if omitted)");
  app.add_option("--trials", o.trials, "Monte Carlo trials for mc");

  auto* purify = app.add_subcommand("purify", "single-photon source purification report");
  purify->add_option("--lambda-sweep", o.lambda_sweep, "dark-count means to sweep")
      ->delimiter(',');
  auto* fig3 = app.add_subcommand("fig3", "P_g versus link fidelity per segment length");
  auto* table = app.add_subcommand("table", "distribution time and memory per repetition rate");
  auto* fig4 = app.add_subcommand("fig4", "distribution time versus total distance");
  auto* verify = app.add_subcommand("verify-circuit", "parity-circuit invariant suite");
  verify->add_flag("--flip-u2-sign", o.flip_u2_sign, "negate one U2 entry (fault injection)");
  auto* mc = app.add_subcommand("mc", "link and chain Monte Carlo");
  mc->add_option("--mode", o.mc_mode, "link, chain or both")
      ->check(CLI::IsMember({"link", "chain", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qubus::kExitConfig;
  }

  try {
    if (*verify) {
      std::optional<std::array<qubus::LocalUnitary, 4>> u;
      if (o.flip_u2_sign) {
        u = qubus::build_unitaries();
        auto& m = (*u)[1].matrix;
        for (int c = 0; c < 8; ++c) {
          if (std::abs(m(2, c)) > 0.5) {
            m(2, c) = -m(2, c);
            break;
          }
        }
      }
      return emit(qubus::cmd_verify_circuit(u), o.out);
    }

    const qubus::RunConfig cfg = resolve_config(o);
    if (*purify) return emit(qubus::cmd_purify(cfg), cfg.output_path);
    if (*fig3) return emit(qubus::cmd_fig3(cfg), cfg.output_path);
    if (*table) return emit(qubus::cmd_table(cfg), cfg.output_path);
    if (*fig4) return emit(qubus::cmd_fig4(cfg), cfg.output_path);
    if (*mc) {
      const qubus::CommandResult r = qubus::cmd_mc(cfg);
      if (!r.event_log.empty()) {
        const std::string base = cfg.output_path.empty() ? "qubus_mc" : cfg.output_path;
        write_file(base + ".events", r.event_log);
      }
      return emit(r, cfg.output_path);
    }
  } catch (const qubus::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return qubus::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qubus::kExitRuntime;
  }
  return qubus::kExitRuntime;
}
