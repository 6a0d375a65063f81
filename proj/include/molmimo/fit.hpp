#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "molmimo/geometry.hpp"
#include "molmimo/particle.hpp"

namespace molmimo {

struct CdfPoint {
  double t = 0.0;
  double p = 0.0;
};

/// Cumulative first-arrival fraction of one absorber (0-based) at the bin
/// edges t = w, 2w, ... of the histogram.
std::vector<CdfPoint> empirical_cdf(const HitHistogram& hist, std::size_t absorber);

/// One three-parameter response curve: scale * (r/dist) erfc((dist - r) / ((4D)^diff_exp t^time_exp)).
struct CurveParams {
  double scale = 1.0;
  double diff_exp = 0.5;
  double time_exp = 0.5;
};

struct CurveFit {
  CurveParams params;
  double residual_norm = 0.0;
  int iterations = 0;
  /// Residual norm after the start point and after every accepted step.
  std::vector<double> residual_trace;
};

struct FitOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-10;
  double jacobian_step = 1e-6;  // relative central-difference step
};

/// Raised when the iteration cap is hit; carries the best point found.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, CurveFit best) : std::runtime_error(what), best_(std::move(best)) {}
  const CurveFit& best() const { return best_; }

 private:
  CurveFit best_;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) fit of one response curve at
/// distance `dist` to the points, started from (1, 0.5, 0.5).
CurveFit fit_curve(double dist, double r, double D, std::span<const CdfPoint> points,
                   const FitOptions& options = {});

struct ResponseFit {
  FitParams params;
  CurveFit direct;
  CurveFit cross;
};

/// Fits the aligned response (b1..b3) and the cross response (b4..b6) as two
/// independent least-squares problems. Each CDF needs at least 4 points.
ResponseFit fit_response(const Geometry& g, std::span<const CdfPoint> direct_cdf,
                         std::span<const CdfPoint> cross_cdf, const FitOptions& options = {});

struct FitTableEntry {
  Geometry geometry;
  FitParams params;
};

class ExtrapolationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multilinear interpolation of each b_i over a rectilinear grid in
/// (d, a, r, D). Axes with a single value must be matched exactly. Ts and L
/// of the query are ignored; the responses are continuous-time.
FitParams interpolate_params(std::span<const FitTableEntry> table, const Geometry& query);

}  // namespace molmimo
