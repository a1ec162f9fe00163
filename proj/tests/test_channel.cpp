#include <catch_amalgamated.hpp>

#include "covertsim/channel.hpp"

using namespace covertsim;
using Catch::Approx;

namespace {

TransmitBlock single_sender_block(std::int64_t n, double t_n, std::uint64_t chip_seed) {
  ProtocolConfig p{n, 1, 1, t_n, 1};
  const auto chips = gen_chips(1, n, 1, chip_seed);
  return encode_random_access(p, chips, {0}, {{0}});
}

}  // namespace

TEST_CASE("zero noise variance gives the deterministic channel") {
  const auto blk = single_sender_block(16, 4.0, 3);
  ChannelParams ch{{1.5}, {1.0}, 1.0, 1.0, 0.5, 2.5};
  const auto y = bob_receive(blk, ch, {0.0, 9});
  for (int j = 0; j < 16; ++j) REQUIRE(y[j] == Approx(1.5 * blk.at(0, j)));
}

TEST_CASE("silent block yields pure Gaussian noise with the right variance") {
  TransmitBlock blk;
  blk.m = 1;
  blk.n = 100000;
  blk.signals.assign(100000, 0.0);
  ChannelParams ch{{1.0}, {1.0}, 1.7, 0.9, 0.5, 2.5};
  const auto y = bob_receive(blk, ch, {ch.v_bob, 1234});
  double mean = 0.0, sq = 0.0;
  for (double v : y) {
    mean += v;
    sq += v * v;
  }
  mean /= y.size();
  const double var = sq / y.size() - mean * mean;
  const double n = static_cast<double>(y.size());
  REQUIRE(std::abs(mean) < 4.0 * std::sqrt(ch.v_bob / n));
  REQUIRE(std::abs(var - ch.v_bob) < 4.0 * ch.v_bob * std::sqrt(2.0 / n));  // chi^2 concentration

  const auto z = willie_receive(blk, ch, {ch.v_willie, 77});
  double zsq = 0.0;
  for (double v : z) zsq += v * v;
  REQUIRE(std::abs(zsq / n - ch.v_willie) < 4.0 * ch.v_willie * std::sqrt(2.0 / n));
}

TEST_CASE("received signal is linear in the gain") {
  const auto blk = single_sender_block(64, 16.0, 5);
  ChannelParams ch1{{1.0}, {1.0}, 1.0, 1.0, 0.5, 2.5};
  ChannelParams ch2{{2.0}, {2.0}, 1.0, 1.0, 0.5, 2.5};
  const auto y1 = bob_receive(blk, ch1, {0.0, 0});
  const auto y2 = bob_receive(blk, ch2, {0.0, 0});
  for (int j = 0; j < 64; ++j) REQUIRE(y2[j] == Approx(2.0 * y1[j]));
  const auto z1 = willie_receive(blk, ch1, {0.0, 0});
  const auto z2 = willie_receive(blk, ch2, {0.0, 0});
  for (int j = 0; j < 64; ++j) REQUIRE(z2[j] == Approx(2.0 * z1[j]));
}

TEST_CASE("noise is reproducible from its seed") {
  const auto blk = single_sender_block(32, 4.0, 5);
  ChannelParams ch{{1.0}, {1.0}, 1.0, 1.0, 0.5, 2.5};
  const auto a = willie_receive(blk, ch, {1.0, 42});
  const auto b = willie_receive(blk, ch, {1.0, 42});
  REQUIRE(a == b);
}

TEST_CASE("independently seeded streams are uncorrelated") {
  TransmitBlock blk;
  blk.m = 1;
  blk.n = 50000;
  blk.signals.assign(50000, 0.0);
  ChannelParams ch{{1.0}, {1.0}, 1.0, 1.0, 0.5, 2.5};
  const auto a = bob_receive(blk, ch, {1.0, derive_seed(9, 0, Substream::bob_noise)});
  const auto b = willie_receive(blk, ch, {1.0, derive_seed(9, 0, Substream::willie_noise)});
  double cross = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) cross += a[j] * b[j];
  cross /= static_cast<double>(a.size());
  REQUIRE(std::abs(cross) < 4.0 / std::sqrt(static_cast<double>(a.size())));
}

TEST_CASE("noise is memoryless across channel uses") {
  TransmitBlock blk;
  blk.m = 1;
  blk.n = 50000;
  blk.signals.assign(50000, 0.0);
  ChannelParams ch{{1.0}, {1.0}, 1.0, 1.0, 0.5, 2.5};
  const auto y = bob_receive(blk, ch, {1.0, 31337});
  double lag1 = 0.0;
  for (std::size_t j = 0; j + 1 < y.size(); ++j) lag1 += y[j] * y[j + 1];
  lag1 /= static_cast<double>(y.size() - 1);
  REQUIRE(std::abs(lag1) < 4.0 / std::sqrt(static_cast<double>(y.size())));
}

TEST_CASE("receive validates dimensions") {
  const auto blk = single_sender_block(8, 1.0, 2);
  ChannelParams ch{{}, {}, 1.0, 1.0, 0.5, 2.5};  // gains shorter than m
  REQUIRE_THROWS_AS(bob_receive(blk, ch, {1.0, 0}), std::invalid_argument);
}
