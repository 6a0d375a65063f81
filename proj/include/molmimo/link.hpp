#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "molmimo/geometry.hpp"
#include "molmimo/rng.hpp"

namespace molmimo {

using Bit = std::uint8_t;
using BitSequence = std::vector<Bit>;
using Count = std::int64_t;

/// OOK symbols: N molecules for a 1 bit, none for a 0 bit.
std::vector<Count> ook_map(std::span<const Bit> bits, Count N);

/// Per-antenna, per-slot emission counts.
struct TransmitMatrix {
  Count N = 0;
  std::vector<std::vector<Count>> x;  // [tx antenna][slot]
  bool padded = false;                // a trailing 0 symbol was appended

  std::size_t n_tx() const { return x.size(); }
  std::size_t n_slots() const { return x.empty() ? 0 : x.front().size(); }
};

TransmitMatrix encode_siso(std::span<const Count> symbols, Count N);

/// Both antennas emit s_k in slot k.
TransmitMatrix encode_repetition(std::span<const Count> symbols, Count N);

/// Alamouti-type pairs: slot k sends (s_k, s_{k+1}), slot k+1 sends
/// (N - s_{k+1}, s_k). An odd-length input gets a trailing 0 symbol.
TransmitMatrix encode_alamouti(std::span<const Count> symbols, Count N);

/// Appends `slots` silent slots to every antenna.
void append_silence(TransmitMatrix& x, int slots);

/// Received molecule counts per receive antenna.
struct RxSeries {
  std::vector<std::vector<Count>> y;  // [rx antenna][slot]

  std::size_t n_rx() const { return y.size(); }
  std::size_t n_slots() const { return y.empty() ? 0 : y.front().size(); }
};

/// y_j[k] = sum_i sum_l Binomial(x_i[k-l], h_{j,i}[l]); emissions before slot 0
/// are zero. Draws come from `eng` in a fixed (k, j, i, l) order.
RxSeries channel_transmit(const TransmitMatrix& x, const TapSet& taps, Engine& eng);

/// Seeded convenience overload.
RxSeries channel_transmit(const TransmitMatrix& x, const TapSet& taps, std::uint64_t seed);

/// E[y_j[k]] without noise.
std::vector<std::vector<double>> channel_expectation(const TransmitMatrix& x, const TapSet& taps);

/// Noise-free stand-in for channel_transmit: expectations rounded to the
/// nearest integer. Only meant for detector checks.
RxSeries channel_expected_counts(const TransmitMatrix& x, const TapSet& taps);

/// Equal-gain combining y[k] = y_1[k] + y_2[k]. A single-antenna series is
/// returned unchanged.
std::vector<Count> egc_combine(const RxSeries& y);

}  // namespace molmimo
