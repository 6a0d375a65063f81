#include "molmimo/analytic.hpp"

#include <cmath>

namespace molmimo {

namespace {

// erfc-family response with the diffusion and time scalings split out so that
// (b_scale, b_diff, b_time) = (1, 0.5, 0.5) collapses to sqrt(4 D t).
double erfc_response(double dist, double r, double D, double scale, double diff_exp,
                     double time_exp, double t) {
  if (t < 0.0) throw std::invalid_argument("response: t must be non-negative");
  if (t == 0.0) return 0.0;
  const double spread = std::pow(4.0 * D, diff_exp) * std::pow(t, time_exp);
  return scale * (r / dist) * std::erfc((dist - r) / spread);
}

}  // namespace

double hitting_cdf_siso(const Geometry& g, double t) {
  if (t < 0.0) throw std::invalid_argument("hitting_cdf_siso: t must be non-negative");
  if (t == 0.0) return 0.0;
  return (g.r / g.d) * std::erfc((g.d - g.r) / std::sqrt(4.0 * g.D * t));
}

double fitted_cdf_direct(const Geometry& g, const FitParams& p, double t) {
  return erfc_response(g.d, g.r, g.D, p.b1, p.b2, p.b3, t);
}

double fitted_cdf_cross(const Geometry& g, const FitParams& p, double t) {
  const double dc = g.cross_distance();
  if (!(dc > g.r)) throw std::invalid_argument("fitted_cdf_cross: cross distance must exceed r");
  return erfc_response(dc, g.r, g.D, p.b4, p.b5, p.b6, t);
}

std::vector<double> taps_from_cdf(const std::function<double(double)>& cdf, double Ts, int L) {
  if (!(Ts > 0.0)) throw std::invalid_argument("taps_from_cdf: Ts must be positive");
  if (L < 0) throw std::invalid_argument("taps_from_cdf: L must be non-negative");
  std::vector<double> taps(static_cast<std::size_t>(L + 1));
  double prev = cdf(0.0);
  for (int l = 0; l <= L; ++l) {
    const double next = cdf((l + 1) * Ts);
    double h = next - prev;
    if (h < 0.0) {
      if (h < -1e-12) throw MalformedCdfError("taps_from_cdf: CDF decreases at lag " + std::to_string(l));
      h = 0.0;
    }
    taps[static_cast<std::size_t>(l)] = h;
    prev = next;
  }
  return taps;
}

TapSet siso_taps(const Geometry& g) {
  g.validate();
  TapSet taps(1, 1, g.L);
  taps.set_row(1, 1, taps_from_cdf([&](double t) { return hitting_cdf_siso(g, t); }, g.Ts, g.L));
  return taps;
}

TapSet symmetric_mimo_taps(const Geometry& g, const FitParams& p) {
  g.validate();
  p.validate();
  const auto direct = taps_from_cdf([&](double t) { return fitted_cdf_direct(g, p, t); }, g.Ts, g.L);
  const auto cross = taps_from_cdf([&](double t) { return fitted_cdf_cross(g, p, t); }, g.Ts, g.L);
  TapSet taps(2, 2, g.L);
  taps.set_row(1, 1, direct);
  taps.set_row(2, 2, direct);
  taps.set_row(1, 2, cross);
  taps.set_row(2, 1, cross);
  taps.validate();
  return taps;
}

}  // namespace molmimo
