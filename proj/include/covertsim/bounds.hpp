#pragma once
// Closed-form and semi-closed-form reliability and covertness bounds:
// Chernoff exponent of the despread statistic, block decoding probability,
// exact chi^2 between the masked BPSK per-symbol law and the best Gaussian,
// Poincare-constant machinery, and the per-block KL bounds feeding the
// Pinsker total-variation bound.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covertsim/numerics.hpp"
#include "covertsim/params.hpp"

namespace covertsim {

// log((e^s + e^-s)/2); evaluated as |s| - log 2 + log1p(e^-2|s|) so large |s|
// does not overflow.
inline double cumulant_binary(double s) {
  const double a = std::abs(s);
  return a - 0.69314718055994530941723212145818 + std::log1p(std::exp(-2.0 * a));
}

inline double cumulant_gauss(double s, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("cumulant_gauss: v must be positive");
  return v * s * s / 2.0;
}

// Dominating cumulant of the interference-plus-noise term:
// phi_n(s) = phi_{g, n v_B}(s) + l n phi_b(a_max s sqrt(t_n/n)).
inline double phi_n_raw(double s, std::int64_t n, std::int64_t l, double t_n, double a_max,
                        double v_bob) {
  const double nn = static_cast<double>(n);
  double v = cumulant_gauss(s, nn * v_bob);
  if (l > 0)
    v += static_cast<double>(l) * nn * cumulant_binary(a_max * s * std::sqrt(t_n / nn));
  return v;
}

inline double phi_n(double s, const ProtocolConfig& proto, const ChannelParams& channel) {
  return phi_n_raw(s, proto.n, proto.l, proto.t_n, channel.a_max(), channel.v_bob);
}

// Leading term of the Chernoff exponent: t_n a_min^2 / (8 (v_B + a_max^2)).
inline double beta_n_leading(double t_n, double a_min, double a_max, double v_bob) {
  return t_n * a_min * a_min / (8.0 * (v_bob + a_max * a_max));
}

namespace detail {

inline double beta_objective(double s, double theta, std::int64_t n, std::int64_t l, double t_n,
                             double a_max, double v_bob) {
  return theta * s - phi_n_raw(s, n, l, t_n, a_max, v_bob);
}

}  // namespace detail

// beta_n = sup_s [ s sqrt(n t_n) a_min/2 - phi_n(s) ]. The objective is
// concave (linear minus a convex cumulant); the maximizer is bracketed by
// the quadratic-relaxation stationary point and theta/(n v_B), then located
// by golden section.
inline double beta_n_raw(std::int64_t n, std::int64_t l, double t_n, double a_min, double a_max,
                         double v_bob) {
  if (!(t_n > 0.0)) throw std::invalid_argument("beta_n: t_n must be positive");
  if (!(v_bob > 0.0)) throw std::invalid_argument("beta_n: v_bob must be positive");
  const double nn = static_cast<double>(n);
  const double theta = std::sqrt(nn * t_n) * a_min / 2.0;
  const auto g = [&](double s) { return detail::beta_objective(s, theta, n, l, t_n, a_max, v_bob); };
  double a = theta / (nn * v_bob + static_cast<double>(l) * a_max * a_max * t_n);
  double b = theta / (nn * v_bob);
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * b; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = g(x2);
    }
  }
  return std::max({g(0.5 * (a + b)), f1, f2});
}

inline double beta_n(const ProtocolConfig& proto, const ChannelParams& channel) {
  return beta_n_raw(proto.n, proto.l, proto.t_n, channel.a_min(), channel.a_max(), channel.v_bob);
}

// Dense-grid evaluation of the same objective; the independent oracle the
// optimizer is checked against.
inline double beta_n_grid_oracle(std::int64_t n, std::int64_t l, double t_n, double a_min,
                                 double a_max, double v_bob, std::int64_t points) {
  const double nn = static_cast<double>(n);
  const double theta = std::sqrt(nn * t_n) * a_min / 2.0;
  const double s_hi = 1.05 * theta / (nn * v_bob);
  double best = 0.0;
  for (std::int64_t i = 0; i <= points; ++i) {
    const double s = s_hi * static_cast<double>(i) / static_cast<double>(points);
    best = std::max(best, detail::beta_objective(s, theta, n, l, t_n, a_max, v_bob));
  }
  return best;
}

struct PCorrectBound {
  double value = 0.0;
  bool vacuous = false;  // 2 e^-beta >= 1: the bound says nothing
};

// All-sender correct-decoding probability bound (1 - 2 e^-beta_n)^m.
inline PCorrectBound p_correct_lower_bound(const ProtocolConfig& proto, const ChannelParams& channel) {
  const double beta = beta_n(proto, channel);
  const double x = 2.0 * std::exp(-beta);
  PCorrectBound out;
  if (x >= 1.0) {
    out.value = 0.0;
    out.vacuous = true;
    return out;
  }
  out.value = std::exp(static_cast<double>(proto.m) * std::log1p(-x));
  return out;
}

// Convergence-speed bound on log(-log P_n):
// -n a_min^2/(8 l (v_B + a_max^2)) + log m + log 2.
inline double log_log_bound_raw(std::int64_t n, std::int64_t l, std::int64_t m, double a_min,
                                double a_max, double v_bob) {
  return -static_cast<double>(n) * a_min * a_min /
             (8.0 * static_cast<double>(l) * (v_bob + a_max * a_max)) +
         std::log(static_cast<double>(m)) + 0.69314718055994530941723212145818;
}

inline double log_log_bound(const ProtocolConfig& proto, const ChannelParams& channel) {
  return log_log_bound_raw(proto.n, proto.l, proto.m, channel.a_min(), channel.a_max(),
                           channel.v_bob);
}

// Exact chi^2 distance between the unit-variance masked-BPSK law P_{v,vp}
// and the standard normal:
// (v+vp)(e^{vp/(v+2vp)} + e^{-vp/v}) / (2 sqrt(v(v+2vp))) - 1.
// Evaluated in the rearranged form
//   [S (1+r) + 2 r^2/(sqrt(1+2r)+1+r)] / (2 sqrt(1+2r)),
//   S = expm1(r/(1+2r)) + expm1(-r),  r = vp/v,
// which is algebraically identical but avoids the catastrophic cancellation
// of the direct "big - 1" evaluation (the value itself is O(r^4)).
inline double chi2_binary_gauss_exact(double v, double vp) {
  if (!(v > 0.0) || vp < 0.0) throw std::invalid_argument("chi2_binary_gauss_exact: need v > 0, vp >= 0");
  if (vp == 0.0) return 0.0;
  const double r = vp / v;
  const double root = std::sqrt(1.0 + 2.0 * r);
  const double s = std::expm1(r / (1.0 + 2.0 * r)) + std::expm1(-r);
  return (s * (1.0 + r) + 2.0 * r * r / (root + 1.0 + r)) / (2.0 * root);
}

// Cubic reference term (1/6)(vp/v)^3.
// Note: the exact chi^2 above expands as (1/6)(vp/v)^4 - (2/3)(vp/v)^5 +
// O((vp/v)^6) - the cubic terms cancel - so this form overstates the
// distance by a factor ~ v/vp for small ratios. chi2_series_leading carries
// the true leading term.
inline double chi2_taylor_leading(double v, double vp) {
  const double r = vp / v;
  return r * r * r / 6.0;
}

// True fourth-order leading term of chi2_binary_gauss_exact: (1/6)(vp/v)^4.
inline double chi2_series_leading(double v, double vp) {
  const double r = vp / v;
  return r * r * r * r / 6.0;
}

struct DivergenceChain {
  double d_upper_by_d2 = 0.0;  // upper bound on D(P||Q) via the Renyi-2 chain
  double d2 = 0.0;             // D_2(P||Q) = log(1 + chi^2)
  double log1p_chi2 = 0.0;
  double chi2 = 0.0;
};

inline DivergenceChain divergence_chain(double v, double vp) {
  DivergenceChain c;
  c.chi2 = chi2_binary_gauss_exact(v, vp);
  c.log1p_chi2 = std::log1p(c.chi2);
  c.d2 = c.log1p_chi2;
  c.d_upper_by_d2 = c.d2;
  if (c.log1p_chi2 > c.chi2 + 1e-15)
    throw std::runtime_error("divergence_chain: log(1+x) <= x violated");
  return c;
}

// Fourth moment of the standardized per-sender law: 3 - 2 vp^2/(v_w+vp)^2.
inline double alpha4(double v_w, double vp) {
  if (!(v_w > 0.0) || vp < 0.0) throw std::invalid_argument("alpha4: need v_w > 0, vp >= 0");
  const double q = vp / (v_w + vp);
  return 3.0 - 2.0 * q * q;
}

// Equal-fading per-block KL leading term: b^8 / (6 n t_n^2 (v_W + b^2/t_n)^4).
// Asymptotic form; omits the O(t_n^3/n^2) correction. Assumes l = n/t_n.
inline double kl_block_bound_equal_fading(double n, double t_n, double b, double v_w) {
  if (!(n > 0.0) || !(t_n > 0.0) || !(v_w > 0.0) || b < 0.0)
    throw std::invalid_argument("kl_block_bound_equal_fading: non-positive parameter");
  const double vp = b * b / t_n;
  const double b4 = b * b * b * b;
  const double d = v_w + vp;
  return b4 * b4 / (6.0 * n * t_n * t_n * d * d * d * d);
}

// Unequal-fading per-block KL bound (Poincare route), exact quotient with
// v' = sum b^2 / n:
//   [ (1/(n v'^2)) sum b^4 * chi2(v_W, v') ]
//   / [ C/2 + (1 - C/2) (1/(n^2 v'^2)) sum b^4 ],  C = e^{-(v'+v_W)/(2 v_W)}.
inline double kl_block_bound_unequal_fading(const std::vector<double>& b_list, double n, double v_w) {
  if (b_list.empty()) throw std::invalid_argument("kl_block_bound_unequal_fading: empty gains");
  if (!(n > 0.0) || !(v_w > 0.0))
    throw std::invalid_argument("kl_block_bound_unequal_fading: non-positive parameter");
  double s2 = 0.0, s4 = 0.0;
  for (double b : b_list) {
    if (!(b > 0.0)) throw std::invalid_argument("kl_block_bound_unequal_fading: zero gain");
    s2 += b * b;
    s4 += b * b * b * b;
  }
  const double vp = s2 / n;
  const double chi2 = chi2_binary_gauss_exact(v_w, vp);
  const double c = std::exp(-(vp + v_w) / (2.0 * v_w));
  const double num = s4 / (n * vp * vp) * chi2;
  const double den = c / 2.0 + (1.0 - c / 2.0) * s4 / (n * n * vp * vp);
  return num / den;
}

// Poincare constant lower bound for P_{v,vp}: e^{-(vp+v)/(2v)}.
inline double poincare_lower_bound(double v, double vp) {
  if (!(v > 0.0) || vp < 0.0) throw std::invalid_argument("poincare_lower_bound: need v > 0, vp >= 0");
  return std::exp(-(vp + v) / (2.0 * v));
}

// KL contraction under a weighted sum of iid symmetric variables:
// D <= L/(C/2 + (1-C/2)L) * D_single with L = sum alpha^4, sum alpha^2 = 1.
inline double kl_weighted_sum_bound(const std::vector<double>& alphas, double kl_single,
                                    double poincare_c) {
  double s2 = 0.0, s4 = 0.0;
  for (double a : alphas) {
    s2 += a * a;
    s4 += a * a * a * a;
  }
  if (std::abs(s2 - 1.0) > 1e-12)
    throw std::invalid_argument("kl_weighted_sum_bound: weights must satisfy sum alpha^2 = 1");
  return s4 / (poincare_c / 2.0 + (1.0 - poincare_c / 2.0) * s4) * kl_single;
}

struct TvBound {
  double tv = 0.0;
  double kl = 0.0;         // the selected per-block KL bound
  bool equal_path = true;  // equal-fading route vs Poincare route
};

namespace detail {

// Physical lift of the normalized bound formulas: effective gains
// b~ = sqrt(t_n) b make v' = (t_n/n) sum b^2 the actual per-symbol signal
// variance of the simulated mixture; both bound derivations are covariant
// under this substitution.
inline std::vector<double> effective_gains(const ProtocolConfig& proto, const ChannelParams& channel) {
  std::vector<double> bs(static_cast<std::size_t>(proto.l));
  const double scale = std::sqrt(proto.t_n);
  for (std::int64_t k = 0; k < proto.l; ++k)
    bs[static_cast<std::size_t>(k)] = scale * channel.willie_gains[static_cast<std::size_t>(k)];
  return bs;
}

}  // namespace detail

// Pinsker total-variation bound sqrt(KL/2) on the covertness measure, with
// the per-block KL taken from the equal-fading route when the active gains
// coincide and from the Poincare route otherwise. The message-independence
// half of the decomposition, d_V(P_{Z,M}, P_Z x P_M) = 0, holds by
// construction of the one-time pad (uniform chips make the transmitted signs
// independent of the message), so only the silent-vs-communicating term is
// bounded here.
inline TvBound covertness_tv_bound(const ProtocolConfig& proto, const ChannelParams& channel) {
  if (static_cast<std::int64_t>(channel.willie_gains.size()) < proto.l)
    throw std::invalid_argument("covertness_tv_bound: gains shorter than l");
  TvBound out;
  const double b0 = channel.willie_gains[0];
  out.equal_path = true;
  for (std::int64_t k = 1; k < proto.l; ++k)
    if (channel.willie_gains[static_cast<std::size_t>(k)] != b0) {
      out.equal_path = false;
      break;
    }
  const auto bs = detail::effective_gains(proto, channel);
  if (out.equal_path) {
    const double t_eff = static_cast<double>(proto.n) / static_cast<double>(proto.l);
    out.kl = kl_block_bound_equal_fading(static_cast<double>(proto.n), t_eff, bs[0],
                                         channel.v_willie);
  } else {
    out.kl = kl_block_bound_unequal_fading(bs, static_cast<double>(proto.n), channel.v_willie);
  }
  out.tv = std::sqrt(out.kl / 2.0);
  return out;
}

// Every analytic quantity for one configuration. kl_equal_fading is NaN when
// the active adversary gains differ (the equal-fading route does not apply).
struct BoundReport {
  double beta_n = 0.0;
  double beta_n_leading = 0.0;
  double p_correct_lb = 0.0;
  bool p_correct_vacuous = false;
  double log_log_bound = 0.0;
  double v_prime = 0.0;
  double alpha4 = 0.0;
  double chi2_exact = 0.0;
  double kl_equal_fading = 0.0;
  double kl_unequal_fading = 0.0;
  double tv_pinsker = 0.0;
  double poincare_lb = 0.0;
};

inline BoundReport compute_bound_report(const ProtocolConfig& proto, const ChannelParams& channel) {
  BoundReport r;
  r.beta_n = beta_n(proto, channel);
  r.beta_n_leading = beta_n_leading(proto.t_n, channel.a_min(), channel.a_max(), channel.v_bob);
  const auto pc = p_correct_lower_bound(proto, channel);
  r.p_correct_lb = pc.value;
  r.p_correct_vacuous = pc.vacuous;
  r.log_log_bound = covertsim::log_log_bound(proto, channel);
  r.v_prime = willie_signal_variance(proto, channel);
  r.alpha4 = alpha4(channel.v_willie, r.v_prime);
  r.chi2_exact = chi2_binary_gauss_exact(channel.v_willie, r.v_prime);
  r.poincare_lb = poincare_lower_bound(channel.v_willie, r.v_prime);
  const auto tvb = covertness_tv_bound(proto, channel);
  const auto bs = detail::effective_gains(proto, channel);
  r.kl_unequal_fading = kl_block_bound_unequal_fading(bs, static_cast<double>(proto.n),
                                                      channel.v_willie);
  if (tvb.equal_path) {
    r.kl_equal_fading = tvb.kl;
  } else {
    r.kl_equal_fading = std::numeric_limits<double>::quiet_NaN();
  }
  r.tv_pinsker = tvb.tv;
  return r;
}

}  // namespace covertsim
