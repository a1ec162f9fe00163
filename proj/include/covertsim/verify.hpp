#pragma once
// Self-contained oracle suite behind `covertsim verify`: every closed form
// is re-derived by an independent route (quadrature, dense grids, direct
// enumeration) and compared at a pinned tolerance. The chi^2 closed form is
// injectable so tests can prove the suite catches a perturbed formula.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "covertsim/bounds.hpp"
#include "covertsim/numerics.hpp"
#include "covertsim/params.hpp"

namespace covertsim {

struct VerifyCheck {
  std::string name;
  double tolerance = 0.0;
  double observed = 0.0;  // pass iff observed <= tolerance
  bool pass = false;
};

struct VerifyHooks {
  std::function<double(double, double)> chi2_exact = [](double v, double vp) {
    return chi2_binary_gauss_exact(v, vp);
  };
};

namespace detail {

inline GaussianMixture p_vv_mixture(double v, double vp) {
  GaussianMixture mix;
  const double mu = std::sqrt(vp / (vp + v));
  mix.weights = {0.5, 0.5};
  mix.means = {mu, -mu};
  mix.variance = v / (vp + v);
  return mix;
}

inline VerifyCheck make_check(std::string name, double tol, double observed) {
  VerifyCheck c{std::move(name), tol, observed, observed <= tol};
  return c;
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verification(const VerifyHooks& hooks = {}) {
  std::vector<VerifyCheck> checks;
  const QuadratureSpec quad{12.0, 1e-14, 1e-11, 4000};
  const std::vector<double> vs = {0.5, 1.0, 2.0};
  const std::vector<double> vps = {0.01, 0.05, 0.1, 0.3, 0.5};

  {  // closed-form chi^2 against direct quadrature of the density
    double worst = 0.0;
    for (double v : vs)
      for (double vp : vps) {
        const double closed = hooks.chi2_exact(v, vp);
        const double numeric = chi2_quadrature(detail::p_vv_mixture(v, vp), 1.0, quad);
        worst = std::max(worst, std::abs(closed - numeric) / numeric);
      }
    checks.push_back(detail::make_check("chi2_closed_vs_quadrature", 1e-6, worst));
  }
  {  // chi^2 depends on vp/v only
    double worst = 0.0;
    for (double v : vs)
      for (double vp : vps) {
        const double a = hooks.chi2_exact(v, vp);
        const double b = hooks.chi2_exact(1.0, vp / v);
        worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
      }
    checks.push_back(detail::make_check("chi2_scale_invariance", 1e-12, worst));
  }
  {  // true small-ratio series: chi2 = r^4/6 - (2/3) r^5 + O(r^6)
    double worst = 0.0;
    for (double r = 1e-3; r <= 1.01e-2; r *= std::pow(10.0, 0.25)) {
      const double q5 = (hooks.chi2_exact(1.0, r) - r * r * r * r / 6.0) / (r * r * r * r * r);
      worst = std::max(worst, std::abs(q5 + 2.0 / 3.0));
    }
    checks.push_back(detail::make_check("chi2_series_order", 0.1, worst));
  }
  {  // divergence chain: KL <= log(1+chi2) <= chi2, slack >= -1e-9
    double worst = 0.0;
    for (double v : vs)
      for (double vp : vps) {
        const double c2 = hooks.chi2_exact(v, vp);
        const double kl = kl_mixture_vs_gaussian(detail::p_vv_mixture(v, vp), 1.0, quad);
        worst = std::max(worst, kl - std::log1p(c2));
        worst = std::max(worst, std::log1p(c2) - c2);
      }
    checks.push_back(detail::make_check("divergence_chain_order", 1e-9, worst));
  }
  {  // golden-section Chernoff exponent vs dense grid
    double worst = 0.0;
    const std::int64_t grid_points = 100000;
    const std::int64_t cfgs[][3] = {{1024, 16, 64}, {4096, 4, 1024}, {2048, 32, 64}};
    for (const auto& c : cfgs) {
      const double opt = beta_n_raw(c[0], c[1], static_cast<double>(c[2]), 1.0, 1.0, 1.0);
      const double grid =
          beta_n_grid_oracle(c[0], c[1], static_cast<double>(c[2]), 1.0, 1.0, 1.0, grid_points);
      worst = std::max(worst, std::abs(opt - grid) / grid);
    }
    checks.push_back(detail::make_check("beta_optimizer_vs_grid", 1e-8, worst));
  }
  {  // interference-free exponent has an exact quadratic answer
    const double opt = beta_n_raw(1024, 0, 64.0, 1.0, 1.0, 1.0);
    const double closed = 64.0 / 8.0;
    checks.push_back(
        detail::make_check("beta_gaussian_closed_form", 1e-12, std::abs(opt - closed) / closed));
  }
  {  // mixture mean/variance identities and binomial-vs-enumeration collapse
    double worst = 0.0;
    ProtocolConfig proto{256, 6, 6, 4.0, 1};
    ChannelParams eq{{1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}, 1.0, 1.0, 0.5, 2.5};
    ChannelParams uneq{{1, 1, 1, 1, 1, 1}, {0.8, 1.2, 0.9, 1.1, 1.0, 1.3}, 1.0, 1.0, 0.5, 2.5};
    for (const auto& ch : {eq, uneq}) {
      const auto mix = willie_symbol_mixture(proto, ch);
      const double vp = willie_signal_variance(proto, ch);
      worst = std::max(worst, std::abs(mix.mean()));
      worst = std::max(worst, std::abs(mix.second_moment() - (ch.v_willie + vp)));
    }
    {
      // binomial collapse vs explicit 2^l sign-pattern enumeration
      const auto mix = willie_symbol_mixture(proto, eq);
      GaussianMixture enumerated;
      enumerated.variance = eq.v_willie;
      const double amp = proto.amplitude();
      const std::size_t count = std::size_t{1} << proto.l;
      enumerated.weights.assign(count, 1.0 / static_cast<double>(count));
      enumerated.means.resize(count);
      for (std::size_t pattern = 0; pattern < count; ++pattern) {
        double s = 0.0;
        for (std::int64_t k = 0; k < proto.l; ++k) s += (pattern >> k) & 1u ? -1.0 : 1.0;
        enumerated.means[pattern] = amp * s;
      }
      for (double x : {-1.5, -0.3, 0.0, 0.7, 2.0})
        worst = std::max(worst, std::abs(mix.pdf(x) - enumerated.pdf(x)) / enumerated.pdf(x));
    }
    checks.push_back(detail::make_check("mixture_moments_and_collapse", 1e-12, worst));
  }
  {  // p_{v,v'} normalization and unit variance by quadrature
    double worst = 0.0;
    for (double v : vs)
      for (double vp : {0.1, 0.5}) {
        const auto mix = detail::p_vv_mixture(v, vp);
        worst = std::max(worst, std::abs(mixture_mass(mix, quad) - 1.0));
        worst = std::max(worst, std::abs(mix.second_moment() - 1.0));
      }
    checks.push_back(detail::make_check("p_vv_normalization", 1e-9, worst));
  }
  {  // Gaussian-vs-Gaussian KL closed form reproduced by quadrature
    GaussianMixture g;
    g.weights = {1.0};
    g.means = {0.0};
    g.variance = 1.5;
    const double numeric = kl_mixture_vs_gaussian(g, 1.0, quad);
    const double closed = 0.5 * (1.5 - 1.0 - std::log(1.5));
    checks.push_back(
        detail::make_check("kl_gaussian_closed_form", 1e-10, std::abs(numeric - closed) / closed));
  }
  {  // density-ratio extrema identities (throws internally on violation)
    double worst = 0.0;
    for (const auto& pr : {std::pair{1.0, 0.2}, {1.0, 1.0}, {2.0, 0.5}}) {
      const auto ex = density_ratio_extrema(pr.first, pr.second);
      const double f0 = std::sqrt((pr.second + pr.first) / pr.first) *
                        std::exp(-pr.second / (2.0 * pr.first));
      worst = std::max(worst, std::abs(ex.f_min - f0) / f0);
    }
    checks.push_back(detail::make_check("density_ratio_extrema", 1e-8, worst));
  }
  {  // Pinsker consistency on the quadrature side
    double worst = 0.0;
    for (double vp : {0.1, 0.5, 1.0}) {
      const auto mix = detail::p_vv_mixture(1.0, vp);
      const double tv = tv_quadrature(mix, 1.0, quad);
      const double kl = kl_mixture_vs_gaussian(mix, 1.0, quad);
      worst = std::max(worst, tv - std::sqrt(kl / 2.0));
    }
    checks.push_back(detail::make_check("pinsker_consistency", 1e-9, worst));
  }
  {  // Poincare-route block bound dominates n x quadrature KL
    double worst = 0.0;
    const std::vector<std::vector<double>> gain_sets = {
        {1.0, 1.3, 0.7}, {0.9, 1.1, 1.0, 1.2, 0.8}, {1.5, 0.6}};
    for (const auto& bs : gain_sets) {
      const double n = 128.0;
      const double v_w = 1.0;
      double s2 = 0.0;
      for (double b : bs) s2 += b * b;
      const double vp = s2 / n;
      ProtocolConfig proto{128, static_cast<std::int64_t>(bs.size()),
                           static_cast<std::int64_t>(bs.size()), 1.0, 1};
      ChannelParams ch{std::vector<double>(bs.size(), 1.0), bs, 1.0, v_w, 0.5, 2.5};
      const auto mix = willie_symbol_mixture(proto, ch);
      const double kl = kl_mixture_vs_gaussian(mix, v_w + vp, quad);
      const double nm = kl_block_bound_unequal_fading(bs, n, v_w);
      worst = std::max(worst, n * kl / nm);
    }
    checks.push_back(detail::make_check("nm_bound_soundness", 1.0, worst));
  }
  {  // weighted-sum KL quotient is monotone in L on (0,1]
    double worst = 0.0;
    for (double c : {0.3, 0.8, 1.5}) {
      double prev = 0.0;
      for (double inv_l = 1.0; inv_l >= 0.02; inv_l *= 0.5) {
        const double q = inv_l / (c / 2.0 + (1.0 - c / 2.0) * inv_l);
        if (prev > 0.0) worst = std::max(worst, q - prev);  // decreasing L must decrease q
        prev = q;
      }
    }
    checks.push_back(detail::make_check("prop2_quotient_monotone", 0.0, worst));
  }
  {  // equal-fading bound equals n (alpha4-3)^2/(24 l^2) with l = n/t_n
    double worst = 0.0;
    for (const auto& cfg : {std::pair{1024.0, 8.0}, {4096.0, 16.0}}) {
      const double n = cfg.first, t = cfg.second, b = 1.2, v_w = 0.9;
      const double vp = b * b / t;
      const double l = n / t;
      const double via_alpha = n * std::pow(alpha4(v_w, vp) - 3.0, 2) / (24.0 * l * l);
      const double direct = kl_block_bound_equal_fading(n, t, b, v_w);
      worst = std::max(worst, std::abs(via_alpha - direct) / direct);
    }
    checks.push_back(detail::make_check("acs_alpha4_identity", 1e-12, worst));
  }
  {  // minimizer over the variance interval dominates the feasible point
    ProtocolConfig proto{64, 2, 2, 1.0, 1};
    ChannelParams ch{{1, 1}, {1, 1}, 1.0, 1.0, 0.5, 2.5};
    const auto mix = willie_symbol_mixture(proto, ch);
    const double vp = willie_signal_variance(proto, ch);
    const auto r = min_tv_over_gaussian(mix, ch.v_lo, ch.v_hi, quad);
    const double feasible = tv_quadrature(mix, ch.v_willie + vp, quad);
    checks.push_back(detail::make_check("min_tv_dominance", 1e-12, r.tv_star - feasible));
  }
  return checks;
}

inline bool all_passed(const std::vector<VerifyCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace covertsim
