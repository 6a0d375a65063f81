#include "molmimo/link.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace molmimo {

std::vector<Count> ook_map(std::span<const Bit> bits, Count N) {
  if (N < 1) throw std::invalid_argument("ook_map: N must be at least 1");
  std::vector<Count> s(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) s[k] = bits[k] ? N : 0;
  return s;
}

TransmitMatrix encode_siso(std::span<const Count> symbols, Count N) {
  return {N, {std::vector<Count>(symbols.begin(), symbols.end())}, false};
}

TransmitMatrix encode_repetition(std::span<const Count> symbols, Count N) {
  std::vector<Count> row(symbols.begin(), symbols.end());
  return {N, {row, row}, false};
}

TransmitMatrix encode_alamouti(std::span<const Count> symbols, Count N) {
  std::vector<Count> s(symbols.begin(), symbols.end());
  const bool padded = s.size() % 2 != 0;
  if (padded) s.push_back(0);
  TransmitMatrix m{N, {std::vector<Count>(s.size()), std::vector<Count>(s.size())}, padded};
  for (std::size_t k = 0; k < s.size(); k += 2) {
    if (s[k] < 0 || s[k] > N || s[k + 1] < 0 || s[k + 1] > N)
      throw std::invalid_argument("encode_alamouti: symbols must lie in [0, N]");
    m.x[0][k] = s[k];
    m.x[1][k] = s[k + 1];
    m.x[0][k + 1] = N - s[k + 1];
    m.x[1][k + 1] = s[k];
  }
  return m;
}

void append_silence(TransmitMatrix& x, int slots) {
  if (slots < 0) throw std::invalid_argument("append_silence: negative slot count");
  for (auto& row : x.x) row.resize(row.size() + static_cast<std::size_t>(slots), 0);
}

namespace {

void check_compat(const TransmitMatrix& x, const TapSet& taps) {
  if (x.n_tx() == 0) throw std::invalid_argument("channel: empty transmit matrix");
  if (static_cast<int>(x.n_tx()) != taps.n_tx())
    throw std::invalid_argument("channel: taps do not cover every transmit antenna");
  for (const auto& row : x.x) {
    if (row.size() != x.n_slots()) throw std::invalid_argument("channel: ragged transmit matrix");
    for (auto v : row)
      if (v < 0) throw std::invalid_argument("channel: negative emission count");
  }
  for (int j = 1; j <= taps.n_rx(); ++j)
    for (int i = 1; i <= taps.n_tx(); ++i)
      for (int l = 0; l <= taps.L(); ++l) {
        const double h = taps.at(j, i, l);
        if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("channel: tap probability outside [0,1]");
      }
}

// Binomial sampler that keeps one distribution per (subchannel, lag, trial
// count); OOK only ever produces a couple of distinct trial counts.
class BinomialBank {
 public:
  explicit BinomialBank(const TapSet& taps) : taps_(taps) {
    slots_.resize(static_cast<std::size_t>(taps.n_rx() * taps.n_tx() * (taps.L() + 1)));
  }

  Count draw(int rx, int tx, int lag, Count trials, Engine& eng) {
    const double p = taps_.at(rx, tx, lag);
    if (trials == 0 || p == 0.0) return 0;
    if (p == 1.0) return trials;
    auto& cache = slots_[static_cast<std::size_t>(((rx - 1) * taps_.n_tx() + (tx - 1)) * (taps_.L() + 1) + lag)];
    for (auto& [n, dist] : cache)
      if (n == trials) return dist(eng);
    cache.emplace_back(trials, std::binomial_distribution<Count>(trials, p));
    return cache.back().second(eng);
  }

 private:
  const TapSet& taps_;
  std::vector<std::vector<std::pair<Count, std::binomial_distribution<Count>>>> slots_;
};

}  // namespace

RxSeries channel_transmit(const TransmitMatrix& x, const TapSet& taps, Engine& eng) {
  check_compat(x, taps);
  const std::size_t K = x.n_slots();
  const int L = taps.L();
  RxSeries out{std::vector<std::vector<Count>>(static_cast<std::size_t>(taps.n_rx()), std::vector<Count>(K, 0))};
  BinomialBank bank(taps);
  for (std::size_t k = 0; k < K; ++k) {
    for (int j = 1; j <= taps.n_rx(); ++j) {
      Count sum = 0;
      for (int i = 1; i <= taps.n_tx(); ++i) {
        const auto& row = x.x[static_cast<std::size_t>(i - 1)];
        for (int l = 0; l <= L && static_cast<std::size_t>(l) <= k; ++l)
          sum += bank.draw(j, i, l, row[k - static_cast<std::size_t>(l)], eng);
      }
      out.y[static_cast<std::size_t>(j - 1)][k] = sum;
    }
  }
  return out;
}

RxSeries channel_transmit(const TransmitMatrix& x, const TapSet& taps, std::uint64_t seed) {
  Engine eng = stream_engine(seed, domain::channel, 0);
  return channel_transmit(x, taps, eng);
}

std::vector<std::vector<double>> channel_expectation(const TransmitMatrix& x, const TapSet& taps) {
  check_compat(x, taps);
  const std::size_t K = x.n_slots();
  std::vector<std::vector<double>> mean(static_cast<std::size_t>(taps.n_rx()), std::vector<double>(K, 0.0));
  for (std::size_t k = 0; k < K; ++k)
    for (int j = 1; j <= taps.n_rx(); ++j) {
      double acc = 0.0;
      for (int i = 1; i <= taps.n_tx(); ++i)
        for (int l = 0; l <= taps.L() && static_cast<std::size_t>(l) <= k; ++l)
          acc += taps.at(j, i, l) * static_cast<double>(x.x[static_cast<std::size_t>(i - 1)][k - static_cast<std::size_t>(l)]);
      mean[static_cast<std::size_t>(j - 1)][k] = acc;
    }
  return mean;
}

RxSeries channel_expected_counts(const TransmitMatrix& x, const TapSet& taps) {
  const auto mean = channel_expectation(x, taps);
  RxSeries out;
  for (const auto& row : mean) {
    std::vector<Count> counts(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) counts[k] = std::llround(row[k]);
    out.y.push_back(std::move(counts));
  }
  return out;
}

std::vector<Count> egc_combine(const RxSeries& y) {
  if (y.n_rx() == 0) throw std::invalid_argument("egc_combine: no receive antennas");
  std::vector<Count> out = y.y.front();
  for (std::size_t j = 1; j < y.n_rx(); ++j) {
    if (y.y[j].size() != out.size()) throw std::invalid_argument("egc_combine: antenna series length mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += y.y[j][k];
  }
  return out;
}

}  // namespace molmimo
