#pragma once
// Memoryless AWGN multi-sender channel with fixed per-block gains.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "covertsim/params.hpp"
#include "covertsim/protocol.hpp"
#include "covertsim/rng.hpp"

namespace covertsim {

// variance == 0 selects the exact zero-noise mode (deterministic channel).
struct NoiseSpec {
  double variance = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> receive(const TransmitBlock& block, const std::vector<double>& gains,
                                   const NoiseSpec& noise) {
  if (static_cast<std::int64_t>(gains.size()) < block.m)
    throw std::invalid_argument("receive: gains shorter than sender count");
  std::vector<double> y(static_cast<std::size_t>(block.n), 0.0);
  if (noise.variance > 0.0) {
    RngStream rng(noise.seed);
    const double sd = std::sqrt(noise.variance);
    for (auto& v : y) v = sd * rng.next_gaussian();
  } else if (noise.variance < 0.0) {
    throw std::invalid_argument("receive: negative noise variance");
  }
  for (std::int64_t i : block.active_set) {
    const double g = gains[static_cast<std::size_t>(i)];
    auto row = block.sender_row(i);
    for (std::int64_t j = 0; j < block.n; ++j)
      y[static_cast<std::size_t>(j)] += g * row[static_cast<std::size_t>(j)];
  }
  return y;
}

}  // namespace detail

inline std::vector<double> bob_receive(const TransmitBlock& block, const ChannelParams& channel,
                                       const NoiseSpec& noise) {
  return detail::receive(block, channel.bob_gains, noise);
}

inline std::vector<double> willie_receive(const TransmitBlock& block, const ChannelParams& channel,
                                          const NoiseSpec& noise) {
  return detail::receive(block, channel.willie_gains, noise);
}

}  // namespace covertsim
