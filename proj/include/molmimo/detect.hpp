#pragma once

#include <span>
#include <vector>

#include "molmimo/geometry.hpp"
#include "molmimo/link.hpp"

namespace molmimo {

/// Taps the sequence detectors assume, together with the molecules per ON
/// symbol. The reconstruction of slot k is sum_l N * taps[l] * u[k-l].
struct EffectiveChannel {
  std::vector<double> taps;
  double N = 0.0;

  int L() const { return static_cast<int>(taps.size()) - 1; }
};

/// SISO: the single subchannel itself.
EffectiveChannel siso_channel(const TapSet& taps, double N);
/// Repetition with EGC: 2 (h11 + h12).
EffectiveChannel repetition_channel(const TapSet& taps, double N);
/// Alamouti-type with EGC: h11 + h12, applied to z = x1 + x2.
EffectiveChannel alamouti_channel(const TapSet& taps, double N);

/// Decides 1 when a slot's count exceeds the previous slot's (y[-1] = 0).
BitSequence atd_detect(std::span<const double> y);

/// (y_k - sum_l N h[l] u_{k-l})^2 for window = (u_k, u_{k-1}, ..., u_{k-L}).
double mlse_branch_metric(double y_k, std::span<const Bit> window, const EffectiveChannel& ch);

/// Sum of branch metrics of a candidate sequence, zeros before slot 0.
double mlse_path_metric(std::span<const double> y, std::span<const Bit> bits, const EffectiveChannel& ch);

/// Viterbi search over 2^L states for the sequence minimising the path
/// metric. Free end, cold start. Ties go to the sequence whose latest
/// differing bit is 0.
BitSequence mlse_detect(std::span<const double> y, const EffectiveChannel& ch);

/// Exhaustive search with the same metric and tie rule, K <= 20.
BitSequence mlse_bruteforce(std::span<const double> y, const EffectiveChannel& ch);

/// Joint two-slot MLSE for the Alamouti-type code. Each trellis branch is a
/// data-bit pair (u_k, u_{k+1}) that emits the summed sequence
/// z = (u_k + u_{k+1}, 1 - u_{k+1} + u_k) in units of N. The state holds the
/// last ceil(L/2) pairs. Ties go to the smaller pair symbol 2 u_k + u_{k+1}
/// at the latest differing pair. Needs an even slot count.
BitSequence alamouti_mlse_detect(std::span<const double> y, const EffectiveChannel& ch);

/// Path metric of a bit sequence under the Alamouti-type emission rule,
/// accumulated pair by pair.
double alamouti_path_metric(std::span<const double> y, std::span<const Bit> bits, const EffectiveChannel& ch);

}  // namespace molmimo
