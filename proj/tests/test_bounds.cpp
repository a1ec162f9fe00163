#include <catch_amalgamated.hpp>

#include "covertsim/bounds.hpp"
#include "covertsim/rng.hpp"

using namespace covertsim;
using Catch::Approx;

namespace {

ChannelParams unit_channel(int m) {
  return ChannelParams{std::vector<double>(m, 1.0), std::vector<double>(m, 1.0), 1.0, 1.0, 0.5, 2.5};
}

}  // namespace

TEST_CASE("binary cumulant: exact values and asymptote") {
  REQUIRE(cumulant_binary(0.0) == 0.0);
  REQUIRE(cumulant_binary(1.0) == Approx(0.4337808304830272).epsilon(1e-14));
  REQUIRE(std::abs(cumulant_binary(50.0) - (50.0 - std::log(2.0))) < 1e-12);
  REQUIRE(cumulant_binary(-3.7) == Approx(cumulant_binary(3.7)));
  for (double s : {0.1, 0.7, 2.0, 9.0}) REQUIRE(cumulant_binary(s) <= s * s / 2.0);
}

TEST_CASE("gaussian cumulant: exact quadratic") {
  REQUIRE(cumulant_gauss(0.0, 3.0) == 0.0);
  REQUIRE(cumulant_gauss(2.0, 3.0) == Approx(6.0));
  REQUIRE(cumulant_gauss(2.0 * 1.3, 2.0) == Approx(4.0 * cumulant_gauss(1.3, 2.0)));
  REQUIRE_THROWS_AS(cumulant_gauss(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("phi_n: zero at the origin, Gaussian when l=0, quadratic for small s") {
  REQUIRE(phi_n_raw(0.0, 1024, 16, 64.0, 1.0, 1.0) == 0.0);
  REQUIRE(phi_n_raw(0.3, 1024, 0, 64.0, 1.0, 1.0) == Approx(cumulant_gauss(0.3, 1024.0)));
  // quadratic coefficient (n v_B + l a_max^2 t_n)/2 via small-s evaluation
  const double s = 1e-5;
  const double coeff = phi_n_raw(s, 1024, 16, 64.0, 1.0, 1.0) / (s * s);
  REQUIRE(coeff == Approx((1024.0 + 16.0 * 64.0) / 2.0).epsilon(1e-3));
}

TEST_CASE("beta_n: interference-free case is the exact quadratic maximum") {
  REQUIRE(beta_n_raw(1024, 0, 64.0, 1.0, 1.0, 1.0) == Approx(64.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("beta_n matches high-precision frozen references") {
  REQUIRE(beta_n_raw(1024, 16, 64.0, 1.0, 1.0, 1.0) ==
          Approx(4.0000813815327886).epsilon(1e-9));
  REQUIRE(beta_n_raw(4096, 4, 1024.0, 1.0, 1.0, 1.0) ==
          Approx(64.020838752616085).epsilon(1e-9));
  REQUIRE(beta_n_raw(16384, 8, 2048.0, 1.0, 1.0, 1.0) ==
          Approx(128.01041734464577).epsilon(1e-9));
  REQUIRE(beta_n_raw(4096, 4, 1024.0, 0.8, 1.2, 1.0) ==
          Approx(33.581760321396835).epsilon(1e-9));
}

TEST_CASE("beta_n decreases in the noise power and dominates grid points") {
  const double lo = beta_n_raw(1024, 16, 64.0, 1.0, 1.0, 1.0);
  const double hi = beta_n_raw(1024, 16, 64.0, 1.0, 1.0, 2.0);
  REQUIRE(hi < lo);
  // supremum property: no sampled s beats the optimizer
  const double theta = std::sqrt(1024.0 * 64.0) / 2.0;
  RngStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.next_unit() * theta / 1024.0 * 2.0;
    const double val = theta * s - phi_n_raw(s, 1024, 16, 64.0, 1.0, 1.0);
    REQUIRE(val <= lo + 1e-10);
  }
  REQUIRE(lo >= beta_n_raw(1024, 16, 64.0, 1.0, 1.0, 1.0) - 1e-12);
  // optimizer vs dense grid oracle
  const double grid = beta_n_grid_oracle(1024, 16, 64.0, 1.0, 1.0, 1.0, 200000);
  REQUIRE(std::abs(lo - grid) / grid < 1e-8);
  // dominance over the matched-variance Gaussian relaxation: since the
  // binary cumulant never exceeds s^2/2, beta_n >= theta^2/(2(n v_B + l a^2 t))
  const double quad = (1024.0 * 64.0 / 4.0) / (2.0 * (1024.0 + 16.0 * 64.0));
  REQUIRE(lo >= quad - 1e-12);
}

TEST_CASE("p_correct bound: near one for large beta, vacuous for small") {
  const auto strong = p_correct_lower_bound(ProtocolConfig{4096, 8, 4, 1024.0, 1}, unit_channel(8));
  REQUIRE_FALSE(strong.vacuous);
  REQUIRE(strong.value == Approx(1.0).margin(1e-12));

  // beta ~ t_n/16 is far below log 2 here, so 2 e^-beta > 1
  const auto weak = p_correct_lower_bound(ProtocolConfig{16, 10, 2, 1.0, 1}, unit_channel(10));
  REQUIRE(weak.vacuous);
  REQUIRE(weak.value == 0.0);
}

TEST_CASE("p_correct identity (1 - 2e^-beta)^m at beta = log(2m)") {
  // the formula itself, evaluated the way the bound evaluates it
  const double beta = std::log(2.0 * 10.0);
  const double direct = std::exp(10.0 * std::log1p(-2.0 * std::exp(-beta)));
  REQUIRE(direct == Approx(std::pow(0.9, 10)).epsilon(1e-14));
  REQUIRE(direct == Approx(0.34867844010000004).epsilon(1e-12));
}

TEST_CASE("log_log_bound: frozen spot values and the condition-margin identity") {
  REQUIRE(log_log_bound_raw(1024, 32, 64, 1.0, 1.0, 1.0) ==
          Approx(2.8520302639196172).epsilon(1e-14));
  REQUIRE(log_log_bound_raw(4096, 64, 64, 1.0, 1.0, 1.0) ==
          Approx(0.8520302639196172).epsilon(1e-13));
  const auto ch = unit_channel(64);
  const ProtocolConfig p{1024, 64, 32, 32.0, 1};
  const auto cond = asymptotic_conditions(ch, p);
  REQUIRE(log_log_bound(p, ch) ==
          Approx(-cond.cond_bzi + std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("chi2 exact closed form") {
  REQUIRE(chi2_binary_gauss_exact(1.0, 0.0) == 0.0);
  REQUIRE(chi2_binary_gauss_exact(1.0, 0.3) == Approx(5.3003054400245448e-4).epsilon(1e-12));
  REQUIRE(chi2_binary_gauss_exact(0.5, 0.5) == Approx(1.8152503697501530e-2).epsilon(1e-12));
  // depends only on vp/v
  REQUIRE(chi2_binary_gauss_exact(2.0, 0.6) ==
          Approx(chi2_binary_gauss_exact(1.0, 0.3)).epsilon(1e-12));
  REQUIRE(chi2_binary_gauss_exact(1.0, 0.3) >= 0.0);
}

TEST_CASE("cubic reference term is exact arithmetic") {
  REQUIRE(chi2_taylor_leading(1.0, 0.1) == Approx(1.6666666666666666e-4).epsilon(1e-15));
  REQUIRE(chi2_taylor_leading(2.0, 0.2) == Approx(chi2_taylor_leading(1.0, 0.1)));
  REQUIRE(chi2_taylor_leading(1.0, 0.0) == 0.0);
}

TEST_CASE("exact chi2 series starts at fourth order") {
  // exact / ((1/6) r^4) = 1 - 4r + (182/15) r^2 - (164/5) r^3 + O(r^4)
  for (double r = 1e-3; r <= 0.011; r *= std::sqrt(10.0)) {
    const double exact = chi2_binary_gauss_exact(1.0, r);
    const double quartic = chi2_series_leading(1.0, r);
    REQUIRE(exact / quartic == Approx(1.0 - 4.0 * r).margin(14.0 * r * r));
    // remainder beyond the quartic term is fifth order with coefficient 2/3
    REQUIRE((exact - quartic) / (r * r * r * r * r) == Approx(-2.0 / 3.0).margin(0.05));
  }
  // consequence: the cubic form overstates the exact value by ~ 1/r
  for (double r = 1e-3; r <= 0.011; r *= std::sqrt(10.0)) {
    const double exact = chi2_binary_gauss_exact(1.0, r);
    const double cubic = chi2_taylor_leading(1.0, r);
    REQUIRE(std::abs(exact - cubic) / cubic == Approx(1.0).margin(6.0 * r));
  }
}

TEST_CASE("divergence chain orders KL, Renyi-2, and chi2") {
  const auto zero = divergence_chain(1.0, 0.0);
  REQUIRE(zero.chi2 == 0.0);
  REQUIRE(zero.log1p_chi2 == 0.0);
  for (double v : {0.5, 1.0, 2.0})
    for (double vp : {0.01, 0.1, 0.3, 0.5}) {
      const auto c = divergence_chain(v, vp);
      REQUIRE(c.log1p_chi2 <= c.chi2 + 1e-15);
      REQUIRE(c.d2 == c.log1p_chi2);
      const double mu = std::sqrt(vp / (vp + v));
      GaussianMixture mix{{0.5, 0.5}, {mu, -mu}, v / (vp + v)};
      REQUIRE(kl_mixture_vs_gaussian(mix, 1.0) <= c.log1p_chi2 + 1e-9);
    }
}

TEST_CASE("alpha4: Gaussian limit, heavy-shift limit, and midpoint") {
  REQUIRE(alpha4(1.0, 0.0) == 3.0);
  REQUIRE(alpha4(1.0, 1.0) == Approx(2.5));
  REQUIRE(alpha4(1.0, 1e9) == Approx(1.0).margin(1e-8));
  for (double vp : {0.0, 0.3, 2.0, 50.0}) {
    REQUIRE(alpha4(1.0, vp) > 1.0);
    REQUIRE(alpha4(1.0, vp) <= 3.0);
  }
}

TEST_CASE("equal-fading block KL bound") {
  REQUIRE(kl_block_bound_equal_fading(1e4, 10.0, 0.0, 1.0) == 0.0);
  REQUIRE(kl_block_bound_equal_fading(1e4, 10.0, 1.0, 1.0) ==
          Approx(1.1383557589417845e-7).epsilon(1e-12));
  // identity with n (alpha4-3)^2 / (24 l^2) at l = n/t_n, vp = b^2/t_n
  const double n = 2048.0, t = 16.0, b = 1.3, vw = 0.9;
  const double vp = b * b / t;
  const double l = n / t;
  REQUIRE(kl_block_bound_equal_fading(n, t, b, vw) ==
          Approx(n * std::pow(alpha4(vw, vp) - 3.0, 2) / (24.0 * l * l)).epsilon(1e-12));
}

TEST_CASE("unequal-fading block KL bound: equal gains recover the Prop-2 quotient") {
  const double n = 256.0, vw = 1.1, b = 0.9;
  const std::int64_t l = 8;
  const std::vector<double> bs(l, b);
  const double vp = l * b * b / n;
  const std::vector<double> alphas(l, 1.0 / std::sqrt(static_cast<double>(l)));
  const double via_prop2 =
      n * kl_weighted_sum_bound(alphas, chi2_binary_gauss_exact(vw, vp),
                                poincare_lower_bound(vw, vp));
  // last-bit differences in v' pass through the chi^2 cancellation, so the
  // two routes agree to ~1e-10 rather than machine precision
  REQUIRE(kl_block_bound_unequal_fading(bs, n, vw) == Approx(via_prop2).epsilon(1e-9));
}

TEST_CASE("unequal-fading bound is monotone in sum b^4 at fixed v'") {
  // equal sum of squares (same v'), different fourth moments
  const std::vector<double> flat = {1.0, 1.0, 1.0, 1.0};
  const double s = std::sqrt(0.5);
  const std::vector<double> spread = {std::sqrt(2.0 - 0.5), s, s, std::sqrt(1.5)};
  double s2a = 0, s2b = 0;
  for (double b : flat) s2a += b * b;
  for (double b : spread) s2b += b * b;
  REQUIRE(s2a == Approx(s2b));
  REQUIRE(kl_block_bound_unequal_fading(spread, 256.0, 1.0) >
          kl_block_bound_unequal_fading(flat, 256.0, 1.0));
}

TEST_CASE("unequal-fading bound: single-sender value and zero-gain rejection") {
  // l=1, b=1, n=100: L = 1 so the bound is chi2/(n v'^2) = 100 chi2(1, 0.01)
  const double bound = kl_block_bound_unequal_fading({1.0}, 100.0, 1.0);
  REQUIRE(bound == Approx(100.0 * chi2_binary_gauss_exact(1.0, 0.01)).epsilon(1e-12));
  REQUIRE(bound == Approx(1.6019688967996968e-7).epsilon(1e-9));
  REQUIRE_THROWS_AS(kl_block_bound_unequal_fading({1.0, 0.0}, 100.0, 1.0), std::invalid_argument);
}

TEST_CASE("poincare lower bound values and monotonicity") {
  REQUIRE(poincare_lower_bound(1.0, 0.0) == Approx(0.6065306597126334).epsilon(1e-14));
  REQUIRE(poincare_lower_bound(1.0, 1.0) == Approx(0.36787944117144233).epsilon(1e-14));
  REQUIRE(poincare_lower_bound(1.0, 0.5) < poincare_lower_bound(1.0, 0.2));
}

TEST_CASE("weighted-sum KL quotient") {
  REQUIRE(kl_weighted_sum_bound({1.0}, 0.37, 0.5) == Approx(0.37));
  const std::vector<double> eq4(4, 0.5);  // sum alpha^2 = 1, L = 1/4
  const double c = 0.8;
  REQUIRE(kl_weighted_sum_bound(eq4, 1.0, c) ==
          Approx(0.25 / (c / 2.0 + (1.0 - c / 2.0) * 0.25)).epsilon(1e-14));
  REQUIRE_THROWS_AS(kl_weighted_sum_bound({0.9, 0.9}, 1.0, 0.5), std::invalid_argument);
  // monotone increasing in L on (0,1]
  double prev = 0.0;
  for (double inv : {0.05, 0.1, 0.25, 0.5, 1.0}) {
    const double q = inv / (c / 2.0 + (1.0 - c / 2.0) * inv);
    REQUIRE(q > prev);
    prev = q;
  }
}

TEST_CASE("covertness tv bound selects the equal-fading path and obeys Pinsker shape") {
  ProtocolConfig p{4096, 4, 4, 4.0, 1};
  auto ch = ChannelParams{{1, 1, 1, 1}, {1, 1, 1, 1}, 1.0, 1.0, 0.5, 2.5};
  const auto eq = covertness_tv_bound(p, ch);
  REQUIRE(eq.equal_path);
  REQUIRE(eq.tv == Approx(std::sqrt(eq.kl / 2.0)));

  ch.willie_gains = {1.0, 1.1, 0.9, 1.0};
  const auto uneq = covertness_tv_bound(p, ch);
  REQUIRE_FALSE(uneq.equal_path);
  REQUIRE(uneq.tv == Approx(std::sqrt(uneq.kl / 2.0)));

  // monotone in the underlying KL
  REQUIRE(std::sqrt(2.0 * eq.kl / 2.0) >= std::sqrt(eq.kl / 2.0));
}

TEST_CASE("bound report populates every field consistently") {
  ProtocolConfig p{4096, 8, 4, 16.0, 1};
  const auto ch = unit_channel(8);
  const auto r = compute_bound_report(p, ch);
  REQUIRE(r.beta_n >= r.beta_n_leading - 1e-12);
  REQUIRE(r.p_correct_lb >= 0.0);
  REQUIRE(r.p_correct_lb <= 1.0);
  REQUIRE(r.v_prime == Approx(16.0 / 4096.0 * 4.0));
  REQUIRE(r.alpha4 == Approx(alpha4(1.0, r.v_prime)));
  REQUIRE(r.chi2_exact == Approx(chi2_binary_gauss_exact(1.0, r.v_prime)));
  REQUIRE(r.tv_pinsker == Approx(std::sqrt(r.kl_equal_fading / 2.0)));
  REQUIRE(r.kl_unequal_fading > 0.0);
  REQUIRE(r.poincare_lb == Approx(poincare_lower_bound(1.0, r.v_prime)));
  REQUIRE_FALSE(r.p_correct_vacuous);

  auto uneq = ch;
  uneq.willie_gains[1] = 1.2;
  const auto r2 = compute_bound_report(p, uneq);
  REQUIRE(std::isnan(r2.kl_equal_fading));
  REQUIRE(r2.tv_pinsker == Approx(std::sqrt(r2.kl_unequal_fading / 2.0)));
}
