#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "molmimo/analytic.hpp"
#include "molmimo/fit.hpp"

using namespace molmimo;

namespace {

// Samples scale (r/dist) erfc((dist - r)/((4D)^de t^te)) at t = 0.12, 0.24, ..., written
// out here rather than going through the library's response functions.
std::vector<CdfPoint> synthetic(double dist, double r, double D, double scale, double de, double te, int n = 20) {
  std::vector<CdfPoint> pts;
  for (int i = 1; i <= n; ++i) {
    const double t = 0.12 * i;
    pts.push_back({t, scale * (r / dist) * std::erfc((dist - r) / (std::pow(4.0 * D, de) * std::pow(t, te)))});
  }
  return pts;
}

}  // namespace

TEST_CASE("empirical_cdf") {
  HitHistogram h;
  h.bin_width = 0.6;
  h.released = 1000;
  h.counts = {{100, 50, 25}, {0, 0, 0}};
  const auto cdf = empirical_cdf(h, 0);
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0].t == doctest::Approx(0.6));
  CHECK(cdf[2].t == doctest::Approx(1.8));
  CHECK(cdf[0].p == doctest::Approx(0.100));
  CHECK(cdf[1].p == doctest::Approx(0.150));
  CHECK(cdf[2].p == doctest::Approx(0.175));
  for (const auto& pt : empirical_cdf(h, 1)) CHECK(pt.p == 0.0);
  CHECK_THROWS_AS(empirical_cdf(h, 2), std::invalid_argument);
  CHECK_THROWS_AS(empirical_cdf(HitHistogram{}, 0), std::invalid_argument);
}

TEST_CASE("fit recovers parameters of data generated from the model family") {
  const Geometry g;
  SUBCASE("aligned response") {
    const auto pts = synthetic(g.d, g.r, g.D, 0.93, 0.48, 0.55);
    const auto fit = fit_curve(g.d, g.r, g.D, pts);
    CHECK(std::abs(fit.params.scale - 0.93) < 1e-3);
    CHECK(std::abs(fit.params.diff_exp - 0.48) < 1e-3);
    CHECK(std::abs(fit.params.time_exp - 0.55) < 1e-3);
  }
  SUBCASE("cross response through fit_response") {
    const double dc = g.cross_distance();
    const auto direct = synthetic(g.d, g.r, g.D, 0.77, 0.51, 0.51);
    const auto cross = synthetic(dc, g.r, g.D, 0.72, 0.50, 0.45);
    const auto fit = fit_response(g, direct, cross);
    CHECK(std::abs(fit.params.b1 - 0.77) < 1e-3);
    CHECK(std::abs(fit.params.b2 - 0.51) < 1e-3);
    CHECK(std::abs(fit.params.b3 - 0.51) < 1e-3);
    CHECK(std::abs(fit.params.b4 - 0.72) < 1e-3);
    CHECK(std::abs(fit.params.b5 - 0.50) < 1e-3);
    CHECK(std::abs(fit.params.b6 - 0.45) < 1e-3);
  }
  SUBCASE("closed-form data returns the reduction point") {
    std::vector<CdfPoint> pts;
    for (int i = 1; i <= 16; ++i) pts.push_back({0.15 * i, hitting_cdf_siso(g, 0.15 * i)});
    const auto fit = fit_curve(g.d, g.r, g.D, pts);
    CHECK(std::abs(fit.params.scale - 1.0) < 1e-6);
    CHECK(std::abs(fit.params.diff_exp - 0.5) < 1e-6);
    CHECK(std::abs(fit.params.time_exp - 0.5) < 1e-6);
  }
}

TEST_CASE("accepted iterations never raise the residual") {
  const Geometry g;
  for (auto [s, de, te] : {std::tuple{0.6, 0.55, 0.40}, {1.3, 0.45, 0.70}, {0.93, 0.48, 0.55}}) {
    const auto fit = fit_curve(g.d, g.r, g.D, synthetic(g.d, g.r, g.D, s, de, te));
    REQUIRE(fit.residual_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.residual_trace.size(); ++i)
      CHECK(fit.residual_trace[i] <= fit.residual_trace[i - 1]);
    CHECK(fit.residual_norm == fit.residual_trace.back());
  }
}

TEST_CASE("fit errors") {
  const Geometry g;
  const auto pts = synthetic(g.d, g.r, g.D, 0.6, 0.55, 0.40);
  CHECK_THROWS_AS(fit_curve(g.d, g.r, g.D, std::span(pts).first(3)), std::invalid_argument);

  auto bad = pts;
  bad[2].p = 1.2;
  CHECK_THROWS_AS(fit_curve(g.d, g.r, g.D, bad), std::invalid_argument);

  FitOptions capped;
  capped.max_iterations = 2;
  try {
    fit_curve(g.d, g.r, g.D, pts, capped);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    // Best-so-far is carried and is no worse than the start point.
    CHECK(e.best().iterations == 2);
    CHECK(e.best().residual_norm <= e.best().residual_trace.front());
  }
}

TEST_CASE("particle CDF fits with a small residual") {
  const Geometry g;
  const auto hist = simulate_hits(mimo_scene(g, 1e-4), 0, 100000, g.Ts / 10, 4242);
  const auto fit = fit_response(g, empirical_cdf(hist, 0), empirical_cdf(hist, 1));
  CHECK(fit.direct.residual_norm < 0.01);
  CHECK(fit.cross.residual_norm < 0.01);
  CHECK_NOTHROW(fit.params.validate());
  // Competition from the second sphere pulls the aligned scale below 1.
  CHECK(fit.params.b1 < 1.0);
}

TEST_CASE("interpolate_params") {
  auto entry = [](double a, double D, double base) {
    FitTableEntry e;
    e.geometry.a = a;
    e.geometry.D = D;
    e.params = {base, 0.5, 0.5, base / 2, 0.4 + base / 10, 0.45};
    return e;
  };
  const std::vector<FitTableEntry> table = {entry(11, 50, 0.7), entry(17, 50, 0.9), entry(11, 200, 0.6),
                                            entry(17, 200, 0.8), entry(14, 50, 0.85), entry(14, 200, 0.75)};

  SUBCASE("exact on nodes") {
    for (const auto& e : table) {
      const auto p = interpolate_params(table, e.geometry);
      CHECK(p.b1 == e.params.b1);
      CHECK(p.b4 == e.params.b4);
      CHECK(p.b5 == e.params.b5);
    }
  }
  SUBCASE("midpoint along one axis is the mean") {
    Geometry q;
    q.a = 12.5;
    q.D = 50;
    const auto p = interpolate_params(table, q);
    CHECK(p.b1 == doctest::Approx((0.7 + 0.85) / 2));
    CHECK(p.b4 == doctest::Approx((0.35 + 0.425) / 2));
  }
  SUBCASE("continuous across cell boundaries") {
    Geometry lo, hi;
    lo.a = 14 - 1e-9;
    hi.a = 14 + 1e-9;
    lo.D = hi.D = 120;
    CHECK(std::abs(interpolate_params(table, lo).b1 - interpolate_params(table, hi).b1) < 1e-8);
  }
  SUBCASE("outside the grid is refused") {
    Geometry q;
    q.a = 18;
    q.D = 100;
    CHECK_THROWS_AS(interpolate_params(table, q), ExtrapolationError);
    q.a = 12;
    q.d = 25;  // single-valued axis must match
    CHECK_THROWS_AS(interpolate_params(table, q), ExtrapolationError);
  }
  SUBCASE("incomplete grid is rejected") {
    auto holes = table;
    holes.pop_back();
    CHECK_THROWS_AS(interpolate_params(holes, table.front().geometry), std::invalid_argument);
  }
}

TEST_CASE("interpolated taps predict a held-out geometry") {
  // Fit at a = 11 and a = 17, interpolate at a = 14, compare against a fresh
  // particle estimate there.
  const std::uint64_t n = 100000;
  auto fitted = [&](double a, std::uint64_t seed) {
    Geometry g;
    g.a = a;
    const auto hist = simulate_hits(mimo_scene(g, 1e-4), 0, n, g.Ts / 10, seed);
    return FitTableEntry{g, fit_response(g, empirical_cdf(hist, 0), empirical_cdf(hist, 1)).params};
  };
  const std::vector<FitTableEntry> table = {fitted(11, 101), fitted(17, 102)};
  Geometry held;
  held.a = 14;
  const auto predicted = symmetric_mimo_taps(held, interpolate_params(table, held));
  const auto hist = simulate_hits(mimo_scene(held, 1e-4), 0, n, held.Ts, 103);
  for (int l = 0; l <= held.L; ++l) {
    for (int rx = 1; rx <= 2; ++rx) {
      const double emp = static_cast<double>(hist.counts[static_cast<std::size_t>(rx - 1)][static_cast<std::size_t>(l)]) / n;
      CAPTURE(l);
      CAPTURE(rx);
      CHECK(std::abs(predicted.at(rx, 1, l) - emp) < 0.10 * emp);
    }
  }
}
