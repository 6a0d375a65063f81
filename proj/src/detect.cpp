#include "molmimo/detect.hpp"

#include <limits>
#include <stdexcept>

namespace molmimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_channel(const EffectiveChannel& ch) {
  if (ch.taps.empty()) throw std::invalid_argument("effective channel: no taps");
  if (ch.L() > 16) throw std::invalid_argument("effective channel: memory too long for a full trellis");
}

// Shared by every metric evaluation so Viterbi and exhaustive search add the
// same terms in the same order.
inline double weighted(const EffectiveChannel& ch, int lag, double level) { return ch.N * ch.taps[static_cast<std::size_t>(lag)] * level; }

inline double squared_error(double y, double recon) {
  const double e = y - recon;
  return e * e;
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

EffectiveChannel siso_channel(const TapSet& taps, double N) {
  if (!taps.is_siso()) throw std::invalid_argument("siso_channel: expected a 1x1 tap set");
  return {taps.row(1, 1), N};
}

EffectiveChannel repetition_channel(const TapSet& taps, double N) {
  if (taps.n_rx() != 2 || taps.n_tx() != 2) throw std::invalid_argument("repetition_channel: expected a 2x2 tap set");
  EffectiveChannel ch{std::vector<double>(static_cast<std::size_t>(taps.L() + 1)), N};
  for (int l = 0; l <= taps.L(); ++l) ch.taps[static_cast<std::size_t>(l)] = 2.0 * (taps.at(1, 1, l) + taps.at(1, 2, l));
  return ch;
}

EffectiveChannel alamouti_channel(const TapSet& taps, double N) {
  if (taps.n_rx() != 2 || taps.n_tx() != 2) throw std::invalid_argument("alamouti_channel: expected a 2x2 tap set");
  EffectiveChannel ch{std::vector<double>(static_cast<std::size_t>(taps.L() + 1)), N};
  for (int l = 0; l <= taps.L(); ++l) ch.taps[static_cast<std::size_t>(l)] = taps.at(1, 1, l) + taps.at(1, 2, l);
  return ch;
}

BitSequence atd_detect(std::span<const double> y) {
  BitSequence u(y.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    u[k] = y[k] > prev ? 1 : 0;
    prev = y[k];
  }
  return u;
}

double mlse_branch_metric(double y_k, std::span<const Bit> window, const EffectiveChannel& ch) {
  check_channel(ch);
  if (window.size() != ch.taps.size()) throw std::invalid_argument("mlse_branch_metric: window must hold L+1 bits");
  double recon = 0.0;
  for (int l = 0; l <= ch.L(); ++l) recon += weighted(ch, l, window[static_cast<std::size_t>(l)]);
  return squared_error(y_k, recon);
}

double mlse_path_metric(std::span<const double> y, std::span<const Bit> bits, const EffectiveChannel& ch) {
  check_channel(ch);
  if (bits.size() != y.size()) throw std::invalid_argument("mlse_path_metric: length mismatch");
  const int L = ch.L();
  BitSequence window(static_cast<std::size_t>(L + 1));
  double path = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (int l = 0; l <= L; ++l)
      window[static_cast<std::size_t>(l)] = static_cast<std::size_t>(l) <= k ? bits[k - static_cast<std::size_t>(l)] : 0;
    path += mlse_branch_metric(y[k], window, ch);
  }
  return path;
}

BitSequence mlse_detect(std::span<const double> y, const EffectiveChannel& ch) {
  check_channel(ch);
  const int L = ch.L();
  const std::size_t K = y.size();
  const std::size_t n_states = std::size_t{1} << L;
  const std::size_t n_ext = n_states << 1;
  if (K == 0) return {};

  // Extended state e holds (u_k, ..., u_{k-L}) with u_k as bit L. The state
  // after the slot is e >> 1, the state before it is e & (n_states - 1).
  std::vector<double> recon(n_ext);
  for (std::size_t e = 0; e < n_ext; ++e) {
    double acc = 0.0;
    for (int l = 0; l <= L; ++l) acc += weighted(ch, l, static_cast<double>((e >> (L - l)) & 1u));
    recon[e] = acc;
  }

  std::vector<double> metric(n_states, kInf), next(n_states);
  metric[0] = 0.0;
  std::vector<std::uint8_t> dropped(K * n_states);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t s = 0; s < n_states; ++s) {
      double best = kInf;
      std::uint8_t pick = 0;
      for (std::uint8_t b = 0; b < 2; ++b) {
        const std::size_t e = (s << 1) | b;
        const double prev = metric[e & (n_states - 1)];
        if (prev == kInf) continue;
        const double cand = prev + squared_error(y[k], recon[e]);
        if (cand < best) {
          best = cand;
          pick = b;
        }
      }
      next[s] = best;
      dropped[k * n_states + s] = pick;
    }
    metric.swap(next);
  }

  std::size_t s = 0;
  for (std::size_t t = 1; t < n_states; ++t)
    if (metric[t] < metric[s]) s = t;

  BitSequence u(K);
  for (std::size_t k = K; k-- > 0;) {
    const std::size_t e = (s << 1) | dropped[k * n_states + s];
    u[k] = static_cast<Bit>((e >> L) & 1u);
    s = e & (n_states - 1);
  }
  return u;
}

BitSequence mlse_bruteforce(std::span<const double> y, const EffectiveChannel& ch) {
  check_channel(ch);
  const std::size_t K = y.size();
  if (K > 20) throw std::invalid_argument("mlse_bruteforce: sequence length above 20");
  BitSequence cand(K), best(K);
  double best_metric = kInf;
  // Index bit k is u_k, so increasing index order prefers 0 at the latest
  // differing bit; keeping the first strict minimum applies that tie rule.
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << K); ++idx) {
    for (std::size_t k = 0; k < K; ++k) cand[k] = static_cast<Bit>((idx >> k) & 1u);
    const double m = mlse_path_metric(y, cand, ch);
    if (m < best_metric) {
      best_metric = m;
      best = cand;
    }
  }
  return best;
}

namespace {

// Summed emission (units of N) of pair symbol q = 2 u_k + u_{k+1}; symbol 4
// stands for the silence before the first pair.
constexpr int kSilence = 4;
constexpr std::size_t kDigits = 5;

inline double pair_level(int q, int slot) {
  if (q == kSilence) return 0.0;
  const int a = q >> 1, b = q & 1;
  return slot == 0 ? a + b : (1 - b) + a;
}

}  // namespace

BitSequence alamouti_mlse_detect(std::span<const double> y, const EffectiveChannel& ch) {
  check_channel(ch);
  if (y.size() % 2 != 0) throw std::invalid_argument("alamouti_mlse_detect: slot count must be even");
  const int L = ch.L();
  const int P = (L + 1) / 2;  // pairs of history needed
  const std::size_t n_states = ipow(kDigits, P);
  const std::size_t n_ext = n_states * kDigits;
  const std::size_t top = n_states;  // weight of the newest digit in an extended state
  const std::size_t M = y.size() / 2;
  if (M == 0) return {};

  // Extended state E = q_new * 5^P + state; digit 0 is the oldest pair.
  std::vector<double> recon0(n_ext), recon1(n_ext);
  std::vector<double> z(static_cast<std::size_t>(2 * P + 2));
  for (std::size_t E = 0; E < n_ext; ++E) {
    std::size_t rest = E;
    for (int m = 0; m <= P; ++m) {
      const int q = static_cast<int>(rest % kDigits);
      rest /= kDigits;
      z[static_cast<std::size_t>(2 * m)] = pair_level(q, 0);
      z[static_cast<std::size_t>(2 * m + 1)] = pair_level(q, 1);
    }
    double r0 = 0.0, r1 = 0.0;
    for (int l = 0; l <= L; ++l) {
      r0 += weighted(ch, l, z[static_cast<std::size_t>(2 * P - l)]);
      r1 += weighted(ch, l, z[static_cast<std::size_t>(2 * P + 1 - l)]);
    }
    recon0[E] = r0;
    recon1[E] = r1;
  }

  std::vector<double> metric(n_states, kInf), next(n_states);
  metric[n_states - 1] = 0.0;  // all-silence history
  std::vector<std::uint8_t> dropped(M * n_states);
  for (std::size_t m = 0; m < M; ++m) {
    const double y0 = y[2 * m], y1 = y[2 * m + 1];
    for (std::size_t s = 0; s < n_states; ++s) {
      double best = kInf;
      std::uint8_t pick = 0;
      for (std::uint8_t dig = 0; dig < kDigits; ++dig) {
        const std::size_t E = s * kDigits + dig;
        if (E / top == kSilence) continue;  // the new pair is always data
        const double prev = metric[E % n_states];
        if (prev == kInf) continue;
        const double cand = prev + (squared_error(y0, recon0[E]) + squared_error(y1, recon1[E]));
        if (cand < best) {
          best = cand;
          pick = dig;
        }
      }
      next[s] = best;
      dropped[m * n_states + s] = pick;
    }
    metric.swap(next);
  }

  std::size_t s = 0;
  for (std::size_t t = 1; t < n_states; ++t)
    if (metric[t] < metric[s]) s = t;

  BitSequence u(2 * M);
  for (std::size_t m = M; m-- > 0;) {
    const std::size_t E = s * kDigits + dropped[m * n_states + s];
    const int q = static_cast<int>(E / top);
    u[2 * m] = static_cast<Bit>(q >> 1);
    u[2 * m + 1] = static_cast<Bit>(q & 1);
    s = E % n_states;
  }
  return u;
}

double alamouti_path_metric(std::span<const double> y, std::span<const Bit> bits, const EffectiveChannel& ch) {
  check_channel(ch);
  if (y.size() % 2 != 0 || bits.size() != y.size())
    throw std::invalid_argument("alamouti_path_metric: need matching even lengths");
  std::vector<double> z(y.size());
  for (std::size_t k = 0; k < y.size(); k += 2) {
    const int q = (bits[k] << 1) | bits[k + 1];
    z[k] = pair_level(q, 0);
    z[k + 1] = pair_level(q, 1);
  }
  auto recon = [&](std::size_t j) {
    double acc = 0.0;
    for (int l = 0; l <= ch.L(); ++l)
      acc += weighted(ch, l, static_cast<std::size_t>(l) <= j ? z[j - static_cast<std::size_t>(l)] : 0.0);
    return acc;
  };
  double path = 0.0;
  for (std::size_t k = 0; k < y.size(); k += 2)
    path += squared_error(y[k], recon(k)) + squared_error(y[k + 1], recon(k + 1));
  return path;
}

}  // namespace molmimo
