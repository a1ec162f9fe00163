// covertsim: batch front end for the covert random-access link library.
// Subcommands: bounds, simulate, sweep, verify.
// Exit codes: 0 success, 1 oracle/inequality failure, 2 usage or config error.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "covertsim/io.hpp"
#include "covertsim/verify.hpp"

namespace {

using namespace covertsim;

void log_start(const std::string& subcommand) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::cerr << "covertsim " << subcommand << " v" << kToolVersion << " started " << buf << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunManifest make_manifest(const std::string& subcommand, const std::string& config_path,
                          const std::string& out_dir, std::uint64_t seed, std::int64_t trials) {
  RunManifest man;
  man.subcommand = subcommand;
  man.config_path = config_path;
  man.out_dir = out_dir;
  man.master_seed = seed;
  man.trials = trials;
  man.config_hash = content_hash(slurp(config_path));
  return man;
}

nlohmann::json row_json(const SweepRow& row) {
  nlohmann::json j;
  j["n"] = row.n;
  j["m"] = row.m;
  j["l"] = row.l;
  j["t_n"] = row.t_n;
  j["beta_n"] = row.beta_n;
  j["p_lb"] = row.p_lb;
  j["mc_success"] = row.mc_success;
  j["mc_ci"] = row.mc_ci;
  j["kl_acs"] = row.kl_acs;
  j["kl_nm"] = row.kl_nm;
  j["kl_numeric"] = row.kl_numeric;
  j["tv_pinsker"] = row.tv_pinsker;
  j["tv_numeric"] = row.tv_numeric;
  j["eps_sum_energy"] = row.eps_sum_energy;
  j["eps_sum_lrt"] = row.eps_sum_lrt;
  return j;
}

int cmd_bounds(const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = load_config(config_path);
  const BoundReport report = compute_bound_report(cfg.proto, cfg.channel);
  const RunManifest man = make_manifest("bounds", config_path, out_dir, cfg.seed, 0);
  nlohmann::json j = bound_report_json(report);
  j["manifest"] = manifest_json(man);
  const std::string body = j.dump(2) + "\n";
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/bounds.json", body);
  std::cout << body;
  return 0;
}

ProtocolConfig sweep_proto(const SweepSpec& sw, std::int64_t n) {
  return sw.literal ? scaling_family_literal(n, sw.c) : scaling_family(n, sw.c);
}

std::vector<SweepRow> rows_for_config(const RunConfig& cfg, std::int64_t trials,
                                      std::int64_t det_trials, std::uint64_t seed, int threads) {
  std::vector<SweepRow> rows;
  if (cfg.sweep) {
    for (std::int64_t n : cfg.sweep->n_grid) {
      const ProtocolConfig proto = sweep_proto(*cfg.sweep, n);
      const ChannelParams channel = replicate_gains(cfg.channel, proto.m);
      rows.push_back(simulate_row({proto, channel}, trials, det_trials, seed, threads));
    }
  } else {
    rows.push_back(simulate_row({cfg.proto, cfg.channel}, trials, det_trials, seed, threads));
  }
  return rows;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::int64_t trials,
                 std::int64_t det_trials, std::uint64_t seed_flag, bool seed_set, int threads) {
  const RunConfig cfg = load_config(config_path);
  const std::uint64_t seed = seed_set ? seed_flag : cfg.seed;
  const auto rows = rows_for_config(cfg, trials, det_trials, seed, threads);
  const RunManifest man = make_manifest("simulate", config_path, out_dir, seed, trials);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/simulate.csv", sweep_csv(rows, man));
  std::cout << out_dir << "/simulate.csv (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, std::int64_t trials,
              std::int64_t det_trials, std::uint64_t seed_flag, bool seed_set, int threads) {
  const RunConfig cfg = load_config(config_path);
  if (!cfg.sweep) throw ConfigError("config: sweep subcommand needs a sweep block");
  const std::uint64_t seed = seed_set ? seed_flag : cfg.seed;
  const auto rows = rows_for_config(cfg, trials, det_trials, seed, threads);
  const RunManifest man = make_manifest("sweep", config_path, out_dir, seed, trials);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/sweep.csv", sweep_csv(rows, man));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::int64_t n = rows[i].n;
    const ProtocolConfig proto = sweep_proto(*cfg.sweep, n);
    const ChannelParams channel = replicate_gains(cfg.channel, proto.m);
    nlohmann::json j = bound_report_json(compute_bound_report(proto, channel));
    const auto cond = asymptotic_conditions(channel, proto);
    j["conditions"] = {{"cond_bzi2", cond.cond_bzi2},
                       {"cond_nca", cond.cond_nca},
                       {"cond_bzi", cond.cond_bzi},
                       {"cond_ncae", {cond.cond_ncae_1, cond.cond_ncae_2}}};
    j["row"] = row_json(rows[i]);
    j["manifest"] = manifest_json(man);
    write_text_file(out_dir + "/row_" + std::to_string(n) + ".json", j.dump(2) + "\n");
  }
  std::cout << out_dir << "/sweep.csv (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_verify() {
  const auto checks = run_verification();
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << "  observed=" << format_g17(c.observed)
              << " tol=" << format_g17(c.tolerance) << "\n";
    if (!c.pass) ++failed;
  }
  std::cout << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size()
            << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covert random-access link simulator and analytic-bound verifier"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::int64_t trials = 1000, det_trials = 1000;
  std::uint64_t seed = 1;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "JSON config path");
    if (needs_config) c->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--det-trials", det_trials, "paired detection trials");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--threads", threads, "worker threads (0 = hardware count)");
  };

  auto* sub_bounds = app.add_subcommand("bounds", "evaluate every analytic bound for one config");
  add_common(sub_bounds, true);
  auto* sub_sim = app.add_subcommand("simulate", "Monte Carlo columns next to the bounds");
  add_common(sub_sim, true);
  auto* sub_sweep = app.add_subcommand("sweep", "scaling-family sweep over an n grid");
  add_common(sub_sweep, true);
  app.add_subcommand("verify", "run the oracle cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string sub = chosen->get_name();
  const bool seed_set = sub != "verify" && chosen->count("--seed") > 0;
  log_start(sub);
  try {
    if (sub == "bounds") return cmd_bounds(config_path, out_dir);
    if (sub == "simulate")
      return cmd_simulate(config_path, out_dir, trials, det_trials, seed, seed_set, threads);
    if (sub == "sweep")
      return cmd_sweep(config_path, out_dir, trials, det_trials, seed, seed_set, threads);
    if (sub == "verify") return cmd_verify();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
