#pragma once
// Exact per-symbol output laws as equal-variance Gaussian mixtures plus the
// numerical machinery: adaptive Gauss-Kronrod quadrature for KL / chi^2 /
// total-variation integrals, best-Gaussian minimization over the adversary's
// variance interval, and the density-ratio extrema backing the Poincare
// argument.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covertsim/params.hpp"

namespace covertsim {

inline double normal_pdf(double x, double variance) {
  return std::exp(-x * x / (2.0 * variance)) / std::sqrt(6.283185307179586476925286766559 * variance);
}

inline double normal_log_pdf(double x, double variance) {
  return -x * x / (2.0 * variance) -
         0.5 * std::log(6.283185307179586476925286766559 * variance);
}

// Finite mixture of Gaussians with a common variance.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  double variance = 1.0;

  double pdf(double x) const {
    const double inv2v = 1.0 / (2.0 * variance);
    const double norm = 1.0 / std::sqrt(6.283185307179586476925286766559 * variance);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double d = x - means[i];
      acc += weights[i] * std::exp(-d * d * inv2v);
    }
    return acc * norm;
  }

  // log density via log-sum-exp; finite even where pdf() underflows.
  double log_pdf(double x) const {
    const double inv2v = 1.0 / (2.0 * variance);
    double emax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double d = x - means[i];
      emax = std::max(emax, -d * d * inv2v);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double d = x - means[i];
      acc += weights[i] * std::exp(-d * d * inv2v - emax);
    }
    return emax + std::log(acc) -
           0.5 * std::log(6.283185307179586476925286766559 * variance);
  }

  double mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * means[i];
    return acc;
  }

  double second_moment() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * means[i] * means[i];
    return acc + variance;
  }

  double min_mean() const { return *std::min_element(means.begin(), means.end()); }
  double max_mean() const { return *std::max_element(means.begin(), means.end()); }
};

inline void check_mixture(const GaussianMixture& mix) {
  if (mix.weights.size() != mix.means.size() || mix.weights.empty())
    throw std::invalid_argument("mixture: weights/means size mismatch");
  if (!(mix.variance > 0.0)) throw std::invalid_argument("mixture: variance must be positive");
  double sum = 0.0;
  for (double w : mix.weights) {
    if (w < 0.0) throw std::invalid_argument("mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
}

// Per-symbol signal variance seen by the adversary: (t_n/n) * sum b_k^2 over
// the l active senders.
inline double willie_signal_variance(const ProtocolConfig& proto, const ChannelParams& channel) {
  double s2 = 0.0;
  for (std::int64_t k = 0; k < proto.l; ++k) {
    const double b = channel.willie_gains[static_cast<std::size_t>(k)];
    s2 += b * b;
  }
  return s2 * proto.t_n / static_cast<double>(proto.n);
}

// Adversary's per-symbol output law under communication: component means are
// the sign combinations of sqrt(t_n/n)*b_k, component variance v_W. Equal
// gains collapse to a binomial mixture with l+1 components; unequal gains
// enumerate all 2^l patterns (l <= 20). Mixture mean is 0 and total variance
// is exactly v_W + v'.
inline GaussianMixture willie_symbol_mixture(const ProtocolConfig& proto, const ChannelParams& channel) {
  const std::int64_t l = proto.l;
  if (l < 1) throw std::invalid_argument("willie_symbol_mixture: l must be >= 1");
  if (static_cast<std::int64_t>(channel.willie_gains.size()) < l)
    throw std::invalid_argument("willie_symbol_mixture: gains shorter than l");
  const double amp = proto.amplitude();
  GaussianMixture mix;
  mix.variance = channel.v_willie;

  bool equal = true;
  const double b0 = channel.willie_gains[0];
  for (std::int64_t k = 1; k < l; ++k)
    if (channel.willie_gains[static_cast<std::size_t>(k)] != b0) {
      equal = false;
      break;
    }

  if (equal) {
    // binomial collapse; long double recurrence keeps weights accurate and
    // avoids 2^-l underflow up to very large l
    std::vector<long double> w(static_cast<std::size_t>(l + 1));
    w[0] = std::pow(0.5L, static_cast<long double>(l));
    for (std::int64_t k = 0; k < l; ++k)
      w[static_cast<std::size_t>(k + 1)] =
          w[static_cast<std::size_t>(k)] * static_cast<long double>(l - k) / static_cast<long double>(k + 1);
    const long double wmax = *std::max_element(w.begin(), w.end());
    for (std::int64_t k = 0; k <= l; ++k) {
      const auto wk = static_cast<double>(w[static_cast<std::size_t>(k)]);
      if (wk < static_cast<double>(wmax) * 1e-20) continue;  // negligible tail components
      mix.weights.push_back(wk);
      mix.means.push_back(amp * b0 * static_cast<double>(l - 2 * k));
    }
  } else {
    if (l > 20) throw std::invalid_argument("willie_symbol_mixture: unequal gains need l <= 20");
    const std::size_t count = std::size_t{1} << l;
    const double w = 1.0 / static_cast<double>(count);
    mix.weights.assign(count, w);
    mix.means.resize(count);
    for (std::size_t pattern = 0; pattern < count; ++pattern) {
      double s = 0.0;
      for (std::int64_t k = 0; k < l; ++k) {
        const double b = channel.willie_gains[static_cast<std::size_t>(k)];
        s += (pattern >> k) & 1u ? -b : b;
      }
      mix.means[pattern] = amp * s;
    }
  }
  return mix;
}

// Density of sqrt(vp/(vp+v)) * ((-1)^X + sqrt(v/vp) N): a symmetric
// two-component unit-variance mixture; vp = 0 degenerates to the standard
// normal.
inline double density_p_vv(double x, double v, double vp) {
  if (!(v > 0.0) || vp < 0.0) throw std::invalid_argument("density_p_vv: need v > 0, vp >= 0");
  if (vp == 0.0) return normal_pdf(x, 1.0);
  const double mu = std::sqrt(vp / (vp + v));
  const double cv = v / (vp + v);
  return 0.5 * (normal_pdf(x - mu, cv) + normal_pdf(x + mu, cv));
}

struct QuadratureSpec {
  double half_width_sigmas = 12.0;
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1,1].
inline constexpr double kGk15Nodes[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double kGk15Weights[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318921,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double kG7Weights[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

template <class F>
void gk15(const F& f, double a, double b, double& integral, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_k = kGk15Weights[7] * fc;
  double res_g = kG7Weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kGk15Nodes[i];
    const double fsum = f(c - x) + f(c + x);
    res_k += kGk15Weights[i] * fsum;
    if (i % 2 == 1) res_g += kG7Weights[i / 2] * fsum;
  }
  integral = res_k * h;
  error = std::abs((res_k - res_g) * h);
}

struct Segment {
  double a, b, integral, error;
};

// Globally adaptive integration; fully deterministic (worst segment chosen
// by error with index tie-break, final sum in segment-creation order).
// Seeded with 32 uniform segments so narrow mixture components cannot slip
// between the nodes of a single Kronrod panel.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec) {
  constexpr int kInitialSegments = 32;
  std::vector<Segment> segs;
  segs.reserve(64);
  for (int i = 0; i < kInitialSegments; ++i) {
    Segment s{a + (b - a) * i / kInitialSegments, a + (b - a) * (i + 1) / kInitialSegments, 0.0,
              0.0};
    gk15(f, s.a, s.b, s.integral, s.error);
    segs.push_back(s);
  }
  for (int iter = 0; iter < spec.max_subdivisions; ++iter) {
    double total = 0.0, err = 0.0;
    for (const auto& sg : segs) {
      total += sg.integral;
      err += sg.error;
    }
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
      double sum = 0.0, comp = 0.0;  // Kahan
      for (const auto& sg : segs) {
        const double y = sg.integral - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      return sum;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].error > segs[worst].error) worst = i;
    const Segment w = segs[worst];
    const double mid = 0.5 * (w.a + w.b);
    Segment left{w.a, mid, 0.0, 0.0}, right{mid, w.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.integral, left.error);
    gk15(f, right.a, right.b, right.integral, right.error);
    segs[worst] = left;
    segs.push_back(right);
  }
  throw std::runtime_error("quadrature: no convergence within max subdivisions");
}

inline void integration_window(const GaussianMixture& mix, double v_ref, const QuadratureSpec& spec,
                               double& lo, double& hi) {
  const double sd = std::sqrt(std::max(mix.variance, v_ref));
  lo = mix.min_mean() - spec.half_width_sigmas * sd;
  hi = mix.max_mean() + spec.half_width_sigmas * sd;
}

}  // namespace detail

// D(mix || G_v_ref) by adaptive quadrature.
inline double kl_mixture_vs_gaussian(const GaussianMixture& mix, double v_ref,
                                     const QuadratureSpec& spec = {}) {
  check_mixture(mix);
  if (!(v_ref > 0.0)) throw std::invalid_argument("kl_mixture_vs_gaussian: v_ref must be positive");
  double lo, hi;
  detail::integration_window(mix, v_ref, spec, lo, hi);
  const auto f = [&](double x) {
    const double p = mix.pdf(x);
    if (p <= 0.0) return 0.0;
    return p * (std::log(p) - std::log(normal_pdf(x, v_ref)));
  };
  return detail::integrate(f, lo, hi, spec);
}

// chi^2(mix, G_v_ref) = int (p-g)^2/g.
inline double chi2_quadrature(const GaussianMixture& mix, double v_ref,
                              const QuadratureSpec& spec = {}) {
  check_mixture(mix);
  if (!(v_ref > 0.0)) throw std::invalid_argument("chi2_quadrature: v_ref must be positive");
  double lo, hi;
  detail::integration_window(mix, v_ref, spec, lo, hi);
  const auto f = [&](double x) {
    const double g = normal_pdf(x, v_ref);
    const double d = mix.pdf(x) - g;
    return d * d / g;
  };
  return detail::integrate(f, lo, hi, spec);
}

// d_V(mix, G_v_ref) = (1/2) int |p-g|.
inline double tv_quadrature(const GaussianMixture& mix, double v_ref,
                            const QuadratureSpec& spec = {}) {
  check_mixture(mix);
  if (!(v_ref > 0.0)) throw std::invalid_argument("tv_quadrature: v_ref must be positive");
  double lo, hi;
  detail::integration_window(mix, v_ref, spec, lo, hi);
  const auto f = [&](double x) { return std::abs(mix.pdf(x) - normal_pdf(x, v_ref)); };
  return 0.5 * detail::integrate(f, lo, hi, spec);
}

// Quadrature normalization check, used by oracles: int p over the window.
inline double mixture_mass(const GaussianMixture& mix, const QuadratureSpec& spec = {}) {
  double lo, hi;
  detail::integration_window(mix, mix.variance, spec, lo, hi);
  return detail::integrate([&](double x) { return mix.pdf(x); }, lo, hi, spec);
}

struct MinTvResult {
  double v_star = 0.0;
  double tv_star = 0.0;
};

// Covertness measure: min over v in the open interval (v_lo, v_hi) of
// d_V(mix, G_v^1). Coarse scan plus golden-section refinement, confined to
// [v_lo+eps, v_hi-eps].
inline MinTvResult min_tv_over_gaussian(const GaussianMixture& mix, double v_lo, double v_hi,
                                        const QuadratureSpec& spec = {}) {
  const double eps = 1e-6 * (v_hi - v_lo);
  const double lo = v_lo + eps, hi = v_hi - eps;
  if (!(v_hi > v_lo) || !(lo < hi))
    throw std::invalid_argument("min_tv_over_gaussian: interval too narrow");
  const auto tv = [&](double v) { return tv_quadrature(mix, v, spec); };

  constexpr int kScan = 33;
  double best_v = lo, best_tv = tv(lo);
  for (int i = 1; i < kScan; ++i) {
    const double v = lo + (hi - lo) * i / (kScan - 1);
    const double t = tv(v);
    if (t < best_tv) {
      best_tv = t;
      best_v = v;
    }
  }
  const double step = (hi - lo) / (kScan - 1);
  double a = std::max(lo, best_v - step), b = std::min(hi, best_v + step);
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = tv(x1), f2 = tv(x2);
  for (int it = 0; it < 60 && (b - a) > 1e-12 * (v_hi - v_lo); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = tv(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = tv(x2);
    }
  }
  const double vm = 0.5 * (a + b);
  const double fm = tv(vm);
  MinTvResult r{vm, fm};
  if (f1 < r.tv_star) r = {x1, f1};
  if (f2 < r.tv_star) r = {x2, f2};
  if (best_tv < r.tv_star) r = {best_v, best_tv};
  return r;
}

struct DensityRatioExtrema {
  double f_min = 1.0;
  double f_max = 1.0;
  double x_argmax = 0.0;
};

// Extrema of f(x) = p_{v,vp}(x)/phi(x) on x >= 0. The minimum sits at x = 0
// with value sqrt((vp+v)/v) e^{-vp/(2v)}; the maximum is attained at a unique
// interior point below sqrt((vp+v)/vp) and never exceeds
// sqrt((vp+v)/v) e^{1/2}. Violations of those identities indicate a numeric
// failure and throw.
inline DensityRatioExtrema density_ratio_extrema(double v, double vp) {
  if (!(v > 0.0) || vp < 0.0) throw std::invalid_argument("density_ratio_extrema: need v > 0, vp >= 0");
  if (vp == 0.0) return {1.0, 1.0, 0.0};
  const auto f = [&](double x) { return density_p_vv(x, v, vp) / normal_pdf(x, 1.0); };

  const double x_hi = std::sqrt((vp + v) / vp);
  constexpr int kGrid = 20000;
  double fmax = f(0.0);
  int imax = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double x = x_hi * i / kGrid;
    const double fx = f(x);
    if (fx > fmax) {
      fmax = fx;
      imax = i;
    }
  }
  // golden refinement around the grid argmax
  double a = x_hi * std::max(0, imax - 1) / kGrid;
  double b = x_hi * std::min(kGrid, imax + 1) / kGrid;
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-13 * x_hi; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  DensityRatioExtrema r;
  r.x_argmax = 0.5 * (a + b);
  r.f_max = std::max({f(r.x_argmax), f1, f2, fmax});
  r.f_min = f(0.0);

  const double f0_closed = std::sqrt((vp + v) / v) * std::exp(-vp / (2.0 * v));
  const double fmax_cap = std::sqrt((vp + v) / v) * std::exp(0.5);
  if (std::abs(r.f_min - f0_closed) > 1e-8 * f0_closed)
    throw std::runtime_error("density_ratio_extrema: minimum deviates from closed form");
  if (r.f_max > fmax_cap * (1.0 + 1e-12))
    throw std::runtime_error("density_ratio_extrema: maximum exceeds analytic cap");
  if (r.f_min / r.f_max < std::exp(-(vp + v) / (2.0 * v)) * (1.0 - 1e-12))
    throw std::runtime_error("density_ratio_extrema: ratio below analytic floor");
  return r;
}

}  // namespace covertsim
