#pragma once
// Protocol and channel parameter sets, validation, and the finite-n margins
// of the admissibility conditions that drive every reliability bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace covertsim {

// Fixed per-block fading gains and noise powers for both receivers.
// (v_lo, v_hi) is the open uncertainty interval for the adversary's noise
// power; v_willie must lie strictly inside it.
struct ChannelParams {
  std::vector<double> bob_gains;     // a_i > 0
  std::vector<double> willie_gains;  // b_i > 0
  double v_bob = 1.0;
  double v_willie = 1.0;
  double v_lo = 0.5;
  double v_hi = 2.0;

  double a_min() const { return *std::min_element(bob_gains.begin(), bob_gains.end()); }
  double a_max() const { return *std::max_element(bob_gains.begin(), bob_gains.end()); }
  double b_min() const { return *std::min_element(willie_gains.begin(), willie_gains.end()); }
  double b_max() const { return *std::max_element(willie_gains.begin(), willie_gains.end()); }
};

struct ProtocolConfig {
  std::int64_t n = 0;           // channel uses per block
  std::int64_t m = 0;           // total senders
  std::int64_t l = 0;           // active senders
  double t_n = 0.0;             // per-sender energy scale; per-use power t_n/n
  std::int64_t bits_per_sender = 1;

  double amplitude() const { return std::sqrt(t_n / static_cast<double>(n)); }
};

// Bob's silent/bit decision threshold on the despread statistic.
inline double decision_threshold(const ProtocolConfig& proto, const ChannelParams& channel) {
  return std::sqrt(static_cast<double>(proto.n) * proto.t_n) * channel.a_min() / 2.0;
}

// Signed finite-n margins of the admissibility conditions. cond_bzi > 0 and
// cond_bzi2, cond_nca small indicate the instance sits inside the regime
// where the reliability bound bites.
struct ConditionReport {
  double cond_bzi2 = 0.0;   // n / l^2
  double cond_nca = 0.0;    // l / n
  double cond_bzi = 0.0;    // n a_min^2 / (8 l (v_B + a_max^2)) - log m
  double cond_ncae_1 = 0.0; // n / l^2
  double cond_ncae_2 = 0.0; // l^2 / n^3
};

enum class ValidationError {
  none,
  non_positive_parameter,
  variance_outside_interval,
  active_exceeds_total,
};

struct ValidationResult {
  ValidationError code = ValidationError::none;
  std::string field;

  bool ok() const { return code == ValidationError::none; }
};

inline ValidationResult validate(const ChannelParams& channel, const ProtocolConfig& proto) {
  const auto bad = [](ValidationError c, std::string f) { return ValidationResult{c, std::move(f)}; };
  if (proto.n < 1) return bad(ValidationError::non_positive_parameter, "n");
  if (proto.m < 1) return bad(ValidationError::non_positive_parameter, "m");
  if (proto.l < 1) return bad(ValidationError::non_positive_parameter, "l");
  if (proto.bits_per_sender < 1) return bad(ValidationError::non_positive_parameter, "bits_per_sender");
  if (!(proto.t_n > 0.0)) return bad(ValidationError::non_positive_parameter, "t_n");
  if (proto.l > proto.m) return bad(ValidationError::active_exceeds_total, "l");
  if (channel.bob_gains.empty()) return bad(ValidationError::non_positive_parameter, "bob_gains");
  if (channel.willie_gains.empty()) return bad(ValidationError::non_positive_parameter, "willie_gains");
  for (double a : channel.bob_gains)
    if (!(a > 0.0)) return bad(ValidationError::non_positive_parameter, "bob_gains");
  for (double b : channel.willie_gains)
    if (!(b > 0.0)) return bad(ValidationError::non_positive_parameter, "willie_gains");
  if (!(channel.v_bob > 0.0)) return bad(ValidationError::non_positive_parameter, "v_bob");
  if (!(channel.v_willie > 0.0)) return bad(ValidationError::non_positive_parameter, "v_willie");
  if (!(channel.v_lo > 0.0)) return bad(ValidationError::non_positive_parameter, "v_interval");
  if (!(channel.v_lo < channel.v_hi)) return bad(ValidationError::variance_outside_interval, "v_interval");
  // open interval: the endpoints themselves are excluded
  if (!(channel.v_lo < channel.v_willie && channel.v_willie < channel.v_hi))
    return bad(ValidationError::variance_outside_interval, "v_willie");
  return {};
}

inline ConditionReport asymptotic_conditions(const ChannelParams& channel, const ProtocolConfig& proto) {
  const double n = static_cast<double>(proto.n);
  const double l = static_cast<double>(proto.l);
  const double m = static_cast<double>(proto.m);
  ConditionReport r;
  r.cond_bzi2 = n / (l * l);
  r.cond_nca = l / n;
  const double a_lo = channel.a_min();
  const double a_hi = channel.a_max();
  r.cond_bzi = n * a_lo * a_lo / (8.0 * l * (channel.v_bob + a_hi * a_hi)) - std::log(m);
  r.cond_ncae_1 = n / (l * l);
  r.cond_ncae_2 = l * l / (n * n * n);
  return r;
}

// Admissible scaling sweep: l = round(c*n/log n) clamped to >= 1, t_n = n/l,
// m defaults to l (point-to-point style).
inline ProtocolConfig scaling_family(std::int64_t n, double c, std::int64_t m = 0) {
  if (n < 3) throw std::invalid_argument("scaling_family: n must be >= 3");
  const double ln = std::log(static_cast<double>(n));
  auto l = static_cast<std::int64_t>(std::llround(c * static_cast<double>(n) / ln));
  l = std::max<std::int64_t>(l, 1);
  ProtocolConfig p;
  p.n = n;
  p.l = l;
  p.m = (m > 0) ? m : l;
  p.t_n = static_cast<double>(n) / static_cast<double>(l);
  return p;
}

// Literal prose variant (l = c*n*log n); kept only for comparison sweeps.
inline ProtocolConfig scaling_family_literal(std::int64_t n, double c, std::int64_t m = 0) {
  if (n < 3) throw std::invalid_argument("scaling_family_literal: n must be >= 3");
  const double ln = std::log(static_cast<double>(n));
  auto l = static_cast<std::int64_t>(std::llround(c * static_cast<double>(n) * ln));
  l = std::max<std::int64_t>(l, 1);
  ProtocolConfig p;
  p.n = n;
  p.l = l;
  p.m = (m > 0) ? m : l;
  p.t_n = static_cast<double>(n) / static_cast<double>(l);
  return p;
}

}  // namespace covertsim
