#pragma once
// Secret-chip generation and the BPSK one-time-pad encoder/decoder pair.
// Chips are stored per message bit contiguously: row i holds u blocks of n
// bits, so the multibit encoder is a strided sum over blocks.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "covertsim/params.hpp"
#include "covertsim/rng.hpp"

namespace covertsim {

struct ChipMatrix {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t u = 1;
  std::vector<std::uint8_t> bits;  // m rows of u*n entries, each 0 or 1

  std::uint8_t at(std::int64_t sender, std::int64_t msg_bit, std::int64_t j) const {
    return bits[static_cast<std::size_t>((sender * u + msg_bit) * n + j)];
  }
  std::span<const std::uint8_t> row(std::int64_t sender, std::int64_t msg_bit = 0) const {
    return {bits.data() + static_cast<std::size_t>((sender * u + msg_bit) * n),
            static_cast<std::size_t>(n)};
  }
};

// In-place variant so hot Monte Carlo loops can reuse the bit buffer.
inline void gen_chips_into(ChipMatrix& c, std::int64_t m, std::int64_t n, std::int64_t u,
                           RngStream rng) {
  if (m < 1 || n < 1 || u < 1) throw std::invalid_argument("gen_chips: dimensions must be >= 1");
  c.m = m;
  c.n = n;
  c.u = u;
  c.bits.resize(static_cast<std::size_t>(m * u * n));
  std::uint64_t word = 0;
  int left = 0;
  for (auto& b : c.bits) {
    if (left == 0) {
      word = rng.next_u64();
      left = 64;
    }
    b = static_cast<std::uint8_t>(word & 1u);
    word >>= 1;
    --left;
  }
}

inline ChipMatrix gen_chips(std::int64_t m, std::int64_t n, std::int64_t u, std::uint64_t seed) {
  ChipMatrix c;
  gen_chips_into(c, m, n, u, RngStream(seed));
  return c;
}

struct TransmitBlock {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::vector<double> signals;  // m x n row-major; silent rows identically zero
  std::vector<std::int64_t> active_set;
  std::vector<std::vector<std::uint8_t>> messages;  // one vector of bits per active sender

  double at(std::int64_t sender, std::int64_t j) const {
    return signals[static_cast<std::size_t>(sender * n + j)];
  }
  std::span<const double> sender_row(std::int64_t sender) const {
    return {signals.data() + static_cast<std::size_t>(sender * n), static_cast<std::size_t>(n)};
  }
};

namespace detail {

inline void check_active(const ProtocolConfig& proto,
                         const std::vector<std::int64_t>& active_set,
                         const std::vector<std::vector<std::uint8_t>>& messages,
                         std::int64_t bits_per_sender) {
  if (active_set.size() != messages.size())
    throw std::invalid_argument("encode: active sender without message");
  for (std::int64_t i : active_set)
    if (i < 0 || i >= proto.m) throw std::invalid_argument("encode: active index out of range");
  for (const auto& msg : messages)
    if (static_cast<std::int64_t>(msg.size()) != bits_per_sender)
      throw std::invalid_argument("encode: message length mismatch");
}

}  // namespace detail

// X_{i,j} = sqrt(t_n/n) * (-1)^(M_i + S_{i,j}) on active rows, zero elsewhere.
inline TransmitBlock encode_random_access(const ProtocolConfig& proto, const ChipMatrix& chips,
                                          const std::vector<std::int64_t>& active_set,
                                          const std::vector<std::vector<std::uint8_t>>& messages) {
  detail::check_active(proto, active_set, messages, 1);
  if (chips.m < proto.m || chips.n != proto.n)
    throw std::invalid_argument("encode_random_access: chip matrix shape mismatch");
  TransmitBlock b;
  b.m = proto.m;
  b.n = proto.n;
  b.signals.assign(static_cast<std::size_t>(proto.m * proto.n), 0.0);
  b.active_set = active_set;
  b.messages = messages;
  const double amp = proto.amplitude();
  for (std::size_t k = 0; k < active_set.size(); ++k) {
    const std::int64_t i = active_set[k];
    const int msign = messages[k][0] ? -1 : 1;
    auto row = chips.row(i, 0);
    double* out = b.signals.data() + static_cast<std::size_t>(i * proto.n);
    for (std::int64_t j = 0; j < proto.n; ++j)
      out[j] = amp * msign * (row[static_cast<std::size_t>(j)] ? -1.0 : 1.0);
  }
  return b;
}

// Multibit rows superpose u one-time-pad layers, so each entry is
// sqrt(t_n/n) * (u - 2A) with A the number of mismatched layers.
inline TransmitBlock encode_multibit(const ProtocolConfig& proto, const ChipMatrix& chips,
                                     const std::vector<std::int64_t>& active_set,
                                     const std::vector<std::vector<std::uint8_t>>& messages) {
  detail::check_active(proto, active_set, messages, proto.bits_per_sender);
  if (chips.m < proto.m || chips.n != proto.n || chips.u != proto.bits_per_sender)
    throw std::invalid_argument("encode_multibit: chip matrix shape mismatch");
  TransmitBlock b;
  b.m = proto.m;
  b.n = proto.n;
  b.signals.assign(static_cast<std::size_t>(proto.m * proto.n), 0.0);
  b.active_set = active_set;
  b.messages = messages;
  const double amp = proto.amplitude();
  for (std::size_t k = 0; k < active_set.size(); ++k) {
    const std::int64_t i = active_set[k];
    double* out = b.signals.data() + static_cast<std::size_t>(i * proto.n);
    for (std::int64_t jp = 0; jp < proto.bits_per_sender; ++jp) {
      const int msign = messages[k][static_cast<std::size_t>(jp)] ? -1 : 1;
      auto row = chips.row(i, jp);
      for (std::int64_t j = 0; j < proto.n; ++j)
        out[j] += amp * msign * (row[static_cast<std::size_t>(j)] ? -1.0 : 1.0);
    }
  }
  return b;
}

// Point-to-point: one physical sender superposes all l bit layers; the chip
// matrix must have l rows. Returns the length-n input sequence.
inline std::vector<double> encode_p2p(const ProtocolConfig& proto, const ChipMatrix& chips,
                                      const std::vector<std::uint8_t>& messages) {
  const auto l = static_cast<std::int64_t>(messages.size());
  if (chips.m < l || chips.n != proto.n)
    throw std::invalid_argument("encode_p2p: chip matrix shape mismatch");
  std::vector<double> x(static_cast<std::size_t>(proto.n), 0.0);
  const double amp = proto.amplitude();
  for (std::int64_t i = 0; i < l; ++i) {
    const int msign = messages[static_cast<std::size_t>(i)] ? -1 : 1;
    auto row = chips.row(i, 0);
    for (std::int64_t j = 0; j < proto.n; ++j)
      x[static_cast<std::size_t>(j)] += amp * msign * (row[static_cast<std::size_t>(j)] ? -1.0 : 1.0);
  }
  return x;
}

// Despread correlation sum(j) (-1)^S_j * Y_j.
inline double decision_statistic(std::span<const double> received,
                                 std::span<const std::uint8_t> chip_row) {
  if (received.size() != chip_row.size())
    throw std::invalid_argument("decision_statistic: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < received.size(); ++j)
    acc += chip_row[j] ? -received[j] : received[j];
  return acc;
}

enum class Verdict : std::uint8_t { silent = 0, bit0 = 1, bit1 = 2 };

struct DecodeOutcome {
  std::vector<Verdict> verdicts;
  std::vector<double> stats;
};

// Three-way rule: |Ybar| < theta -> silent, ties at the threshold go to the
// bit verdicts (<= / >= on the bit sides).
inline DecodeOutcome decode_random_access(std::vector<double> stats, const ProtocolConfig& proto,
                                          const ChannelParams& channel) {
  const double theta = decision_threshold(proto, channel);
  DecodeOutcome out;
  out.verdicts.resize(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double y = stats[i];
    if (y >= theta)
      out.verdicts[i] = Verdict::bit0;
    else if (y <= -theta)
      out.verdicts[i] = Verdict::bit1;
    else
      out.verdicts[i] = Verdict::silent;
  }
  out.stats = std::move(stats);
  return out;
}

// Sign rule with ties to 1: Ybar <= 0 decodes as bit 1.
inline std::vector<std::uint8_t> decode_p2p(const std::vector<double>& stats) {
  std::vector<std::uint8_t> bits(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) bits[i] = stats[i] <= 0.0 ? 1 : 0;
  return bits;
}

}  // namespace covertsim
