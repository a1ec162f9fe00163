#pragma once
// Monte Carlo estimation of Bob's block-decoding success and Willie's
// detection error sums, plus the sweep driver that lines empirical columns
// up against the analytic bounds. Trials draw from counter-derived streams,
// so results are identical for any thread count; the only shared state is a
// reduction of integer counts.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "covertsim/bounds.hpp"
#include "covertsim/channel.hpp"
#include "covertsim/numerics.hpp"
#include "covertsim/params.hpp"
#include "covertsim/protocol.hpp"
#include "covertsim/rng.hpp"

namespace covertsim {

inline constexpr double k95TwoSided = 1.959963984540054;   // two-sided 95% normal quantile
inline constexpr double k95OneSided = 1.6448536269514722;  // 95th percentile

namespace detail {

inline double log_binom_coeff(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

// P(X <= k) for X ~ Binomial(trials, p); only used with k <= 4.
inline double binom_cdf_le(std::int64_t k, std::int64_t trials, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= trials ? 1.0 : 0.0;
  double acc = 0.0;
  for (std::int64_t i = 0; i <= k; ++i)
    acc += std::exp(log_binom_coeff(trials, i) + static_cast<double>(i) * std::log(p) +
                    static_cast<double>(trials - i) * std::log1p(-p));
  return acc;
}

inline double clopper_pearson_halfwidth(std::int64_t k, std::int64_t trials) {
  if (k > trials - k) return clopper_pearson_halfwidth(trials - k, trials);
  constexpr double kAlpha = 0.05;
  const auto solve = [&](std::int64_t kk, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (binom_cdf_le(kk, trials, mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double p_lo = (k == 0) ? 0.0 : solve(k - 1, 1.0 - kAlpha / 2.0);
  const double p_hi = (k == trials) ? 1.0 : solve(k, kAlpha / 2.0);
  return 0.5 * (p_hi - p_lo);
}

}  // namespace detail

// 95% halfwidth for a binomial proportion; exact (Clopper-Pearson) when
// either count is below 5, normal approximation otherwise.
inline double proportion_ci_halfwidth(std::int64_t k, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("proportion_ci_halfwidth: zero trials");
  if (std::min(k, trials - k) < 5) return detail::clopper_pearson_halfwidth(k, trials);
  const double p = static_cast<double>(k) / static_cast<double>(trials);
  return k95TwoSided * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

struct Scenario {
  ProtocolConfig proto;
  ChannelParams channel;
};

enum class MessageMode { fixed, uniform_random };

struct TrialPlan {
  std::int64_t trials = 1000;
  std::uint64_t master_seed = 1;
  Scenario scenario;
  MessageMode message_mode = MessageMode::uniform_random;
  int threads = 0;  // 0: hardware count; result-invariant either way
};

struct DecodeEstimate {
  double success_rate = 0.0;
  double ci_halfwidth = 0.0;
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  // per-sender 3x3 counts indexed [truth*3 + verdict] with the Verdict order
  std::vector<std::array<std::int64_t, 9>> confusion;
};

namespace detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// One decode trial; arithmetic mirrors the modular
// encode_random_access / bob_receive / decision_statistic path exactly so the
// fused loop is bit-identical to the module-level pipeline.
struct DecodeWorkspace {
  ChipMatrix chips;
  std::vector<double> y;
  std::vector<std::uint8_t> msgs;
};

inline bool decode_trial(const TrialPlan& plan, std::int64_t trial, DecodeWorkspace& ws,
                         std::array<std::int64_t, 9>* confusion,
                         std::vector<double>* stats_out = nullptr) {
  const auto& proto = plan.scenario.proto;
  const auto& channel = plan.scenario.channel;
  const std::int64_t m = proto.m, n = proto.n, l = proto.l;

  gen_chips_into(ws.chips, m, n, 1, RngStream::derive(plan.master_seed, trial, Substream::chips));

  ws.msgs.assign(static_cast<std::size_t>(l), 0);
  if (plan.message_mode == MessageMode::uniform_random) {
    RngStream mrng = RngStream::derive(plan.master_seed, trial, Substream::messages);
    for (auto& b : ws.msgs) b = static_cast<std::uint8_t>(mrng.next_u64() & 1u);
  }

  ws.y.resize(static_cast<std::size_t>(n));
  {
    RngStream nrng = RngStream::derive(plan.master_seed, trial, Substream::bob_noise);
    const double sd = std::sqrt(channel.v_bob);
    for (auto& v : ws.y) v = sd * nrng.next_gaussian();
  }
  const double amp = proto.amplitude();
  for (std::int64_t k = 0; k < l; ++k) {
    const double a = channel.bob_gains[static_cast<std::size_t>(k)];
    const double rowval = amp * (ws.msgs[static_cast<std::size_t>(k)] ? -1.0 : 1.0);
    const std::uint8_t* chip = ws.chips.bits.data() + static_cast<std::size_t>(k * n);
    double* y = ws.y.data();
    for (std::int64_t j = 0; j < n; ++j) y[j] += a * (chip[j] ? -rowval : rowval);
  }

  const double theta = decision_threshold(proto, channel);
  if (stats_out) stats_out->assign(static_cast<std::size_t>(m), 0.0);
  bool all_correct = true;
  for (std::int64_t i = 0; i < m; ++i) {
    const std::uint8_t* chip = ws.chips.bits.data() + static_cast<std::size_t>(i * n);
    const double* y = ws.y.data();
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += chip[j] ? -y[j] : y[j];
    if (stats_out) (*stats_out)[static_cast<std::size_t>(i)] = acc;
    Verdict v;
    if (acc >= theta)
      v = Verdict::bit0;
    else if (acc <= -theta)
      v = Verdict::bit1;
    else
      v = Verdict::silent;
    Verdict truth;
    if (i < l)
      truth = ws.msgs[static_cast<std::size_t>(i)] ? Verdict::bit1 : Verdict::bit0;
    else
      truth = Verdict::silent;
    if (confusion)
      ++confusion[i][static_cast<std::size_t>(truth) * 3 + static_cast<std::size_t>(v)];
    all_correct = all_correct && (v == truth);
  }
  return all_correct;
}

}  // namespace detail

// Fraction of trials in which all m verdicts are simultaneously correct.
inline DecodeEstimate estimate_decode_success(const TrialPlan& plan) {
  if (plan.trials <= 0) throw std::invalid_argument("estimate_decode_success: zero trials");
  const auto vr = validate(plan.scenario.channel, plan.scenario.proto);
  if (!vr.ok()) throw std::invalid_argument("estimate_decode_success: invalid scenario: " + vr.field);
  if (static_cast<std::int64_t>(plan.scenario.channel.bob_gains.size()) < plan.scenario.proto.m)
    throw std::invalid_argument("estimate_decode_success: bob_gains shorter than m");

  const int threads = detail::resolve_threads(plan.threads);
  const std::int64_t m = plan.scenario.proto.m;
  std::vector<std::int64_t> chunk_success(static_cast<std::size_t>(threads), 0);
  std::vector<std::vector<std::array<std::int64_t, 9>>> chunk_conf(
      static_cast<std::size_t>(threads),
      std::vector<std::array<std::int64_t, 9>>(static_cast<std::size_t>(m),
                                               std::array<std::int64_t, 9>{}));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      detail::DecodeWorkspace ws;
      const std::int64_t lo = plan.trials * t / threads;
      const std::int64_t hi = plan.trials * (t + 1) / threads;
      for (std::int64_t trial = lo; trial < hi; ++trial)
        if (detail::decode_trial(plan, trial, ws, chunk_conf[static_cast<std::size_t>(t)].data()))
          ++chunk_success[static_cast<std::size_t>(t)];
    });
  }
  for (auto& th : pool) th.join();

  DecodeEstimate est;
  est.trials = plan.trials;
  est.confusion.assign(static_cast<std::size_t>(m), std::array<std::int64_t, 9>{});
  for (int t = 0; t < threads; ++t) {
    est.successes += chunk_success[static_cast<std::size_t>(t)];
    for (std::int64_t i = 0; i < m; ++i)
      for (int c = 0; c < 9; ++c)
        est.confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] +=
            chunk_conf[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(c)];
  }
  est.success_rate = static_cast<double>(est.successes) / static_cast<double>(est.trials);
  est.ci_halfwidth = proportion_ci_halfwidth(est.successes, est.trials);
  return est;
}

// Radiometer: flag communication when the empirical power exceeds the
// worst-case silent level v_hi by gamma standard deviations of the silent
// power estimate. gamma defaults to the 95% false-alarm calibration.
inline bool willie_energy_detector(std::span<const double> samples, double v_hi,
                                   double gamma = k95OneSided) {
  double ms = 0.0;
  for (double z : samples) ms += z * z;
  ms /= static_cast<double>(samples.size());
  return ms > v_hi + gamma * std::sqrt(2.0 / static_cast<double>(samples.size())) * v_hi;
}

// Genie-aided likelihood-ratio test of mixture^n vs G_{v_ref}^n at threshold
// 1. Log-likelihood ratios come from a dense table with linear
// interpolation; points outside the table window fall back to exact
// evaluation. Any measurable test obeys eps1+eps2 >= 1 - d_V, so the
// tabulated detector stays inside the theory it is checked against.
class LrtDetector {
 public:
  LrtDetector(GaussianMixture mix, double v_ref, std::size_t table_points = std::size_t{1} << 17)
      : mix_(std::move(mix)), v_ref_(v_ref) {
    check_mixture(mix_);
    const double sd = std::sqrt(std::max(mix_.variance, v_ref_));
    lo_ = mix_.min_mean() - 12.0 * sd;
    hi_ = mix_.max_mean() + 12.0 * sd;
    table_.resize(table_points);
    const double dx = (hi_ - lo_) / static_cast<double>(table_points - 1);
    for (std::size_t i = 0; i < table_points; ++i) table_[i] = llr_exact(lo_ + dx * static_cast<double>(i));
    inv_dx_ = 1.0 / dx;
  }

  double llr(double z) const {
    if (z < lo_ || z > hi_) return llr_exact(z);
    const double u = (z - lo_) * inv_dx_;
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= table_.size()) return table_.back();
    const double frac = u - static_cast<double>(i);
    return table_[i] + frac * (table_[i + 1] - table_[i]);
  }

  bool communicating(std::span<const double> samples) const {
    double s = 0.0;
    for (double z : samples) s += llr(z);
    return s > 0.0;
  }

 private:
  double llr_exact(double z) const { return mix_.log_pdf(z) - normal_log_pdf(z, v_ref_); }

  GaussianMixture mix_;
  double v_ref_;
  double lo_ = 0.0, hi_ = 0.0, inv_dx_ = 0.0;
  std::vector<double> table_;
};

enum class DetectorId { energy, lrt };

struct DetectionResult {
  double eps1 = 0.0;  // decide "communicating" in the silent world
  double eps2 = 0.0;  // decide "silent" in the communicating world
  double ci_halfwidth = 0.0;
  DetectorId detector = DetectorId::energy;
  double eps_sum_floor = 0.0;  // 1 - n*tv_per_symbol - 3*ci
};

// Paired silent-world / communicating-world simulation. Checks the detection
// inequality eps1+eps2 >= 1 - n*d_V(per symbol vs G_{v_W}) - 3*CI and throws
// if the empirical sum lands below it.
inline DetectionResult estimate_detection_error_sum(const TrialPlan& plan, DetectorId id,
                                                    const QuadratureSpec& quad = {}) {
  if (plan.trials <= 0) throw std::invalid_argument("estimate_detection_error_sum: zero trials");
  const auto vr = validate(plan.scenario.channel, plan.scenario.proto);
  if (!vr.ok())
    throw std::invalid_argument("estimate_detection_error_sum: invalid scenario: " + vr.field);

  const auto& proto = plan.scenario.proto;
  const auto& channel = plan.scenario.channel;
  const std::int64_t n = proto.n, l = proto.l;
  // separate master so detection randomness never aliases the decode plan's
  const std::uint64_t master = mix64(plan.master_seed ^ 0xde7ec7cf5a11e5ULL);

  const GaussianMixture mix = willie_symbol_mixture(proto, channel);
  std::optional<LrtDetector> lrt;
  if (id == DetectorId::lrt) lrt.emplace(mix, channel.v_willie);

  const int threads = detail::resolve_threads(plan.threads);
  std::vector<std::int64_t> fp(static_cast<std::size_t>(threads), 0);  // eps1 counts
  std::vector<std::int64_t> fn(static_cast<std::size_t>(threads), 0);  // eps2 counts
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      std::vector<double> z(static_cast<std::size_t>(n));
      std::vector<std::uint8_t> msgs(static_cast<std::size_t>(l));
      ChipMatrix chips;
      const double sd = std::sqrt(channel.v_willie);
      const double amp = proto.amplitude();
      const std::int64_t lo = plan.trials * t / threads;
      const std::int64_t hi = plan.trials * (t + 1) / threads;
      for (std::int64_t trial = lo; trial < hi; ++trial) {
        // silent world
        {
          RngStream rng = RngStream::derive(master, trial, Substream::willie_silent);
          for (auto& v : z) v = sd * rng.next_gaussian();
          const bool say_comm = (id == DetectorId::energy)
                                    ? willie_energy_detector(z, channel.v_hi)
                                    : lrt->communicating(z);
          if (say_comm) ++fp[static_cast<std::size_t>(t)];
        }
        // communicating world: real encoder path (secret chips + messages)
        {
          RngStream rng = RngStream::derive(master, trial, Substream::willie_noise);
          for (auto& v : z) v = sd * rng.next_gaussian();
          gen_chips_into(chips, l, n, 1, RngStream::derive(master, trial, Substream::chips));
          if (plan.message_mode == MessageMode::uniform_random) {
            RngStream mrng = RngStream::derive(master, trial, Substream::messages);
            for (auto& b : msgs) b = static_cast<std::uint8_t>(mrng.next_u64() & 1u);
          } else {
            for (auto& b : msgs) b = 0;
          }
          for (std::int64_t k = 0; k < l; ++k) {
            const double b = channel.willie_gains[static_cast<std::size_t>(k)];
            const double rowval = amp * (msgs[static_cast<std::size_t>(k)] ? -1.0 : 1.0);
            const std::uint8_t* chip = chips.bits.data() + static_cast<std::size_t>(k * n);
            for (std::int64_t j = 0; j < n; ++j)
              z[static_cast<std::size_t>(j)] += b * (chip[j] ? -rowval : rowval);
          }
          const bool say_comm = (id == DetectorId::energy)
                                    ? willie_energy_detector(z, channel.v_hi)
                                    : lrt->communicating(z);
          if (!say_comm) ++fn[static_cast<std::size_t>(t)];
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  std::int64_t fp_total = 0, fn_total = 0;
  for (int t = 0; t < threads; ++t) {
    fp_total += fp[static_cast<std::size_t>(t)];
    fn_total += fn[static_cast<std::size_t>(t)];
  }
  DetectionResult res;
  res.detector = id;
  res.eps1 = static_cast<double>(fp_total) / static_cast<double>(plan.trials);
  res.eps2 = static_cast<double>(fn_total) / static_cast<double>(plan.trials);
  const double c1 = proportion_ci_halfwidth(fp_total, plan.trials);
  const double c2 = proportion_ci_halfwidth(fn_total, plan.trials);
  res.ci_halfwidth = std::sqrt(c1 * c1 + c2 * c2);

  const double tv_sym = tv_quadrature(mix, channel.v_willie, quad);
  res.eps_sum_floor = 1.0 - static_cast<double>(n) * tv_sym - 3.0 * res.ci_halfwidth;
  if (res.eps1 + res.eps2 < res.eps_sum_floor)
    throw std::runtime_error("estimate_detection_error_sum: detection inequality violated");
  return res;
}

// One row of the sweep table; column order matches the CSV contract.
struct SweepRow {
  std::int64_t n = 0, m = 0, l = 0;
  double t_n = 0.0;
  double beta_n = 0.0;
  double p_lb = 0.0;
  double mc_success = 0.0;
  double mc_ci = 0.0;
  double kl_acs = 0.0;
  double kl_nm = 0.0;
  double kl_numeric = 0.0;
  double tv_pinsker = 0.0;
  double tv_numeric = 0.0;
  double eps_sum_energy = 0.0;
  double eps_sum_lrt = 0.0;
};

// Cyclic replication of the configured base gains out to m senders.
inline ChannelParams replicate_gains(const ChannelParams& base, std::int64_t m) {
  ChannelParams c = base;
  c.bob_gains.resize(static_cast<std::size_t>(m));
  c.willie_gains.resize(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    c.bob_gains[static_cast<std::size_t>(i)] =
        base.bob_gains[static_cast<std::size_t>(i) % base.bob_gains.size()];
    c.willie_gains[static_cast<std::size_t>(i)] =
        base.willie_gains[static_cast<std::size_t>(i) % base.willie_gains.size()];
  }
  return c;
}

// Fill every column for one scenario. trials == 0 skips the Monte Carlo
// columns (NaN); detection_trials == 0 skips the detector columns.
inline SweepRow simulate_row(const Scenario& scenario, std::int64_t trials,
                             std::int64_t detection_trials, std::uint64_t master_seed, int threads,
                             MessageMode mode = MessageMode::uniform_random,
                             const QuadratureSpec& quad = {}) {
  const auto& proto = scenario.proto;
  const auto& channel = scenario.channel;
  SweepRow row;
  row.n = proto.n;
  row.m = proto.m;
  row.l = proto.l;
  row.t_n = proto.t_n;
  row.beta_n = beta_n(proto, channel);
  row.p_lb = p_correct_lower_bound(proto, channel).value;

  const auto tvb = covertness_tv_bound(proto, channel);
  row.kl_acs = tvb.equal_path ? tvb.kl : std::numeric_limits<double>::quiet_NaN();
  row.kl_nm = kl_block_bound_unequal_fading(detail::effective_gains(proto, channel),
                                            static_cast<double>(proto.n), channel.v_willie);
  row.tv_pinsker = tvb.tv;

  const GaussianMixture mix = willie_symbol_mixture(proto, channel);
  const double vp = willie_signal_variance(proto, channel);
  row.kl_numeric =
      static_cast<double>(proto.n) * kl_mixture_vs_gaussian(mix, channel.v_willie + vp, quad);
  // subadditive lift of the per-symbol minimum; values past the trivial
  // bound d_V <= 1 carry no information
  row.tv_numeric = std::min(
      1.0, static_cast<double>(proto.n) *
               min_tv_over_gaussian(mix, channel.v_lo, channel.v_hi, quad).tv_star);

  TrialPlan plan{trials, master_seed, scenario, mode, threads};
  if (trials > 0) {
    const auto est = estimate_decode_success(plan);
    row.mc_success = est.success_rate;
    row.mc_ci = est.ci_halfwidth;
  } else {
    row.mc_success = std::numeric_limits<double>::quiet_NaN();
    row.mc_ci = std::numeric_limits<double>::quiet_NaN();
  }
  if (detection_trials > 0) {
    plan.trials = detection_trials;
    const auto de = estimate_detection_error_sum(plan, DetectorId::energy, quad);
    const auto dl = estimate_detection_error_sum(plan, DetectorId::lrt, quad);
    row.eps_sum_energy = de.eps1 + de.eps2;
    row.eps_sum_lrt = dl.eps1 + dl.eps2;
  } else {
    row.eps_sum_energy = std::numeric_limits<double>::quiet_NaN();
    row.eps_sum_lrt = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

struct SweepFamily {
  std::vector<std::int64_t> n_grid;
  double c = 1.0;
  bool literal_scaling = false;  // l = round(c n log n) instead of round(c n / log n)
  ChannelParams base_channel;
  std::int64_t trials = 1000;
  std::int64_t detection_trials = 1000;
  std::uint64_t master_seed = 1;
  int threads = 0;
  MessageMode message_mode = MessageMode::uniform_random;
};

inline std::vector<SweepRow> run_sweep(const SweepFamily& family, const QuadratureSpec& quad = {}) {
  std::vector<SweepRow> rows;
  rows.reserve(family.n_grid.size());
  for (std::int64_t n : family.n_grid) {
    const ProtocolConfig proto =
        family.literal_scaling ? scaling_family_literal(n, family.c) : scaling_family(n, family.c);
    const ChannelParams channel = replicate_gains(family.base_channel, proto.m);
    rows.push_back(simulate_row({proto, channel}, family.trials, family.detection_trials,
                                family.master_seed, family.threads, family.message_mode, quad));
  }
  return rows;
}

}  // namespace covertsim
