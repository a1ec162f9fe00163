#pragma once
// Config ingestion and result emission: JSON in, BoundReport JSON and sweep
// CSV out. Every data file carries a deterministic manifest header; floats
// print with 17 significant digits so files round-trip exactly.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertsim/bounds.hpp"
#include "covertsim/params.hpp"
#include "covertsim/simulation.hpp"

namespace covertsim {

inline constexpr const char* kToolVersion = "1.0.0";

inline constexpr const char* kSweepCsvHeader =
    "n,m,l,t_n,beta_n,p_lb,mc_success,mc_ci,kl_acs,kl_nm,kl_numeric,tv_pinsker,tv_numeric,"
    "eps_sum_energy,eps_sum_lrt";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::vector<std::int64_t> n_grid;
  double c = 1.0;
  bool literal = false;  // opt into the l = round(c n log n) family
};

struct RunConfig {
  ProtocolConfig proto;
  ChannelParams channel;
  std::uint64_t seed = 1;
  std::optional<SweepSpec> sweep;
};

inline RunConfig parse_config(const nlohmann::json& j) {
  const auto need = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
    return j.at(key);
  };
  RunConfig cfg;
  try {
    cfg.proto.n = need("n").get<std::int64_t>();
    cfg.proto.m = need("m").get<std::int64_t>();
    cfg.proto.l = need("l").get<std::int64_t>();
    cfg.proto.t_n = need("t_n").get<double>();
    cfg.proto.bits_per_sender = j.value("bits_per_sender", std::int64_t{1});
    cfg.channel.bob_gains = need("bob_gains").get<std::vector<double>>();
    cfg.channel.willie_gains = need("willie_gains").get<std::vector<double>>();
    cfg.channel.v_bob = need("v_bob").get<double>();
    cfg.channel.v_willie = need("v_willie").get<double>();
    const auto vi = need("v_interval").get<std::vector<double>>();
    if (vi.size() != 2) throw ConfigError("config: v_interval must be [lo, hi]");
    cfg.channel.v_lo = vi[0];
    cfg.channel.v_hi = vi[1];
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("sweep")) {
      SweepSpec sw;
      sw.n_grid = j.at("sweep").at("n_grid").get<std::vector<std::int64_t>>();
      sw.c = j.at("sweep").value("c", 1.0);
      sw.literal = j.at("sweep").value("literal", false);
      cfg.sweep = sw;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto vr = validate(cfg.channel, cfg.proto);
  if (!vr.ok()) throw ConfigError("config: invalid field '" + vr.field + "'");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(j);
}

// 17 significant digits: enough for exact double round-trips.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// FNV-1a 64-bit content hash; stands in for a timestamp in the manifest so
// identical runs produce identical files.
inline std::uint64_t content_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  std::string tool_version = kToolVersion;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  std::int64_t trials = 0;
};

inline std::string manifest_comment_block(const RunManifest& man) {
  std::ostringstream os;
  os << "# covertsim " << man.subcommand << "\n";
  os << "# version: " << man.tool_version << "\n";
  os << "# config: " << man.config_path << "\n";
  os << "# config_hash: " << std::hex << man.config_hash << std::dec << "\n";
  os << "# seed: " << man.master_seed << "\n";
  os << "# trials: " << man.trials << "\n";
  return os.str();
}

inline nlohmann::json manifest_json(const RunManifest& man) {
  nlohmann::json j;
  j["subcommand"] = man.subcommand;
  j["version"] = man.tool_version;
  j["config"] = man.config_path;
  j["config_hash"] = man.config_hash;
  j["seed"] = man.master_seed;
  j["trials"] = man.trials;
  return j;
}

inline nlohmann::json bound_report_json(const BoundReport& r) {
  nlohmann::json j;
  j["beta_n"] = r.beta_n;
  j["beta_n_leading"] = r.beta_n_leading;
  j["p_correct_lb"] = r.p_correct_lb;
  j["p_correct_vacuous"] = r.p_correct_vacuous;
  j["log_log_bound"] = r.log_log_bound;
  j["v_prime"] = r.v_prime;
  j["alpha4"] = r.alpha4;
  j["chi2_exact"] = r.chi2_exact;
  if (std::isnan(r.kl_equal_fading))
    j["kl_equal_fading"] = nullptr;  // equal-fading route not applicable
  else
    j["kl_equal_fading"] = r.kl_equal_fading;
  j["kl_unequal_fading"] = r.kl_unequal_fading;
  j["tv_pinsker"] = r.tv_pinsker;
  j["poincare_lb"] = r.poincare_lb;
  return j;
}

inline std::string sweep_row_csv(const SweepRow& row) {
  std::ostringstream os;
  os << row.n << ',' << row.m << ',' << row.l << ',' << format_g17(row.t_n) << ','
     << format_g17(row.beta_n) << ',' << format_g17(row.p_lb) << ','
     << format_g17(row.mc_success) << ',' << format_g17(row.mc_ci) << ','
     << format_g17(row.kl_acs) << ',' << format_g17(row.kl_nm) << ','
     << format_g17(row.kl_numeric) << ',' << format_g17(row.tv_pinsker) << ','
     << format_g17(row.tv_numeric) << ',' << format_g17(row.eps_sum_energy) << ','
     << format_g17(row.eps_sum_lrt);
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, const RunManifest& man) {
  std::ostringstream os;
  os << manifest_comment_block(man);
  os << kSweepCsvHeader << "\n";
  for (const auto& row : rows) os << sweep_row_csv(row) << "\n";
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
}

}  // namespace covertsim
