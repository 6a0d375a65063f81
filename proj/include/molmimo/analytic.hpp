#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "molmimo/geometry.hpp"

namespace molmimo {

/// Raised when a sampled CDF decreases by more than the tap tolerance.
class MalformedCdfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability that a molecule released at distance d from the center of an
/// absorbing sphere of radius r has been absorbed by time t:
///   F(t) = (r/d) erfc((d - r) / sqrt(4 D t)),  F(0) = 0.
double hitting_cdf_siso(const Geometry& g, double t);

/// Fitted aligned-link response b1 (r/d) erfc((d - r) / ((4D)^b2 t^b3)).
/// t = 0 returns 0; t < 0 throws.
double fitted_cdf_direct(const Geometry& g, const FitParams& p, double t);

/// Fitted cross-link response, same family with d' = sqrt(d^2 + a^2) and
/// coefficients b4..b6.
double fitted_cdf_cross(const Geometry& g, const FitParams& p, double t);

/// Slot-wise differences h[l] = F((l+1) Ts) - F(l Ts) for l = 0..L.
/// Negative differences below -1e-12 raise MalformedCdfError; smaller ones
/// are clamped to zero.
std::vector<double> taps_from_cdf(const std::function<double(double)>& cdf, double Ts, int L);

/// Single-antenna taps from the closed-form CDF.
TapSet siso_taps(const Geometry& g);

/// Full symmetric 2x2 tap set: h11 = h22 from the direct response,
/// h12 = h21 from the cross response.
TapSet symmetric_mimo_taps(const Geometry& g, const FitParams& p);

}  // namespace molmimo
