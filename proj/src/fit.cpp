#include "molmimo/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

namespace molmimo {

std::vector<CdfPoint> empirical_cdf(const HitHistogram& hist, std::size_t absorber) {
  if (hist.n_bins() == 0 || hist.released == 0) throw std::invalid_argument("empirical_cdf: empty histogram");
  if (absorber >= hist.n_absorbers()) throw std::invalid_argument("empirical_cdf: absorber index out of range");
  std::vector<CdfPoint> cdf;
  cdf.reserve(hist.n_bins());
  std::uint64_t running = 0;
  const double n = static_cast<double>(hist.released);
  for (std::size_t b = 0; b < hist.n_bins(); ++b) {
    running += hist.counts[absorber][b];
    cdf.push_back({static_cast<double>(b + 1) * hist.bin_width, static_cast<double>(running) / n});
  }
  return cdf;
}

namespace {

using Vec = std::array<double, 3>;
using Mat = std::array<Vec, 3>;

Vec to_vec(const CurveParams& p) { return {p.scale, p.diff_exp, p.time_exp}; }
CurveParams to_params(const Vec& v) { return {v[0], v[1], v[2]}; }

bool admissible(const Vec& v) {
  return v[0] > 0.0 && std::isfinite(v[1]) && v[2] > 0.0 && v[2] < 1.5;
}

struct Model {
  double dist, r, D;
  double operator()(const Vec& v, double t) const {
    if (t <= 0.0) return 0.0;
    return v[0] * (r / dist) * std::erfc((dist - r) / (std::pow(4.0 * D, v[1]) * std::pow(t, v[2])));
  }
};

double cost(const Model& model, const Vec& v, std::span<const CdfPoint> pts) {
  double s = 0.0;
  for (const auto& pt : pts) {
    const double e = model(v, pt.t) - pt.p;
    s += e * e;
  }
  return s;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::optional<Vec> solve3(Mat A, Vec b) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-300) return std::nullopt;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 3; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace

CurveFit fit_curve(double dist, double r, double D, std::span<const CdfPoint> points,
                   const FitOptions& options) {
  if (points.size() < 4) throw std::invalid_argument("fit_curve: need at least 4 CDF points");
  for (const auto& pt : points) {
    if (!(pt.p >= 0.0 && pt.p <= 1.0)) throw std::invalid_argument("fit_curve: CDF values must lie in [0,1]");
    if (!(pt.t > 0.0)) throw std::invalid_argument("fit_curve: sample times must be positive");
  }
  const Model model{dist, r, D};
  const std::size_t m = points.size();

  Vec theta = to_vec(CurveParams{});
  double f = cost(model, theta, points);
  double lambda = 1e-3;
  CurveFit out;
  out.residual_trace.push_back(std::sqrt(f));

  std::vector<double> resid(m);
  std::vector<Vec> jac(m);
  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    for (std::size_t i = 0; i < m; ++i) resid[i] = model(theta, points[i].t) - points[i].p;
    for (int k = 0; k < 3; ++k) {
      const double h = options.jacobian_step * std::max(std::abs(theta[k]), 1.0);
      Vec up = theta, dn = theta;
      up[k] += h;
      dn[k] -= h;
      for (std::size_t i = 0; i < m; ++i)
        jac[i][k] = (model(up, points[i].t) - model(dn, points[i].t)) / (2.0 * h);
    }
    Mat JtJ{};
    Vec Jtr{};
    for (std::size_t i = 0; i < m; ++i) {
      for (int a = 0; a < 3; ++a) {
        Jtr[a] += jac[i][a] * resid[i];
        for (int b = 0; b < 3; ++b) JtJ[a][b] += jac[i][a] * jac[i][b];
      }
    }

    // Inner loop: raise damping until a step improves the objective or
    // becomes smaller than the tolerance.
    while (true) {
      Mat A = JtJ;
      for (int a = 0; a < 3; ++a) A[a][a] += lambda * std::max(JtJ[a][a], 1e-12);
      const auto step = solve3(A, {-Jtr[0], -Jtr[1], -Jtr[2]});
      double step_size = std::numeric_limits<double>::infinity();
      if (step) step_size = std::max({std::abs((*step)[0]), std::abs((*step)[1]), std::abs((*step)[2])});
      if (step && step_size < options.step_tolerance) {
        out.params = to_params(theta);
        out.residual_norm = std::sqrt(f);
        return out;
      }
      if (step) {
        const Vec cand{theta[0] + (*step)[0], theta[1] + (*step)[1], theta[2] + (*step)[2]};
        if (admissible(cand)) {
          const double fc = cost(model, cand, points);
          if (fc < f) {
            theta = cand;
            f = fc;
            lambda = std::max(lambda / 10.0, 1e-12);
            out.residual_trace.push_back(std::sqrt(f));
            break;
          }
        }
      }
      lambda *= 10.0;
      if (lambda > 1e30) {
        // Steps shrink like 1/lambda; reaching this means the gradient
        // vanished at machine precision.
        out.params = to_params(theta);
        out.residual_norm = std::sqrt(f);
        return out;
      }
    }
  }
  out.params = to_params(theta);
  out.residual_norm = std::sqrt(f);
  throw FitError("fit_curve: no convergence within " + std::to_string(options.max_iterations) + " iterations",
                 out);
}

ResponseFit fit_response(const Geometry& g, std::span<const CdfPoint> direct_cdf,
                         std::span<const CdfPoint> cross_cdf, const FitOptions& options) {
  g.validate();
  ResponseFit fit;
  fit.direct = fit_curve(g.d, g.r, g.D, direct_cdf, options);
  fit.cross = fit_curve(g.cross_distance(), g.r, g.D, cross_cdf, options);
  fit.params = {fit.direct.params.scale, fit.direct.params.diff_exp, fit.direct.params.time_exp,
                fit.cross.params.scale,  fit.cross.params.diff_exp,  fit.cross.params.time_exp};
  return fit;
}

namespace {

constexpr int kAxes = 4;

std::array<double, kAxes> coords(const Geometry& g) { return {g.d, g.a, g.r, g.D}; }

std::array<double, 6> as_array(const FitParams& p) { return {p.b1, p.b2, p.b3, p.b4, p.b5, p.b6}; }

}  // namespace

FitParams interpolate_params(std::span<const FitTableEntry> table, const Geometry& query) {
  if (table.empty()) throw std::invalid_argument("interpolate_params: empty table");
  std::array<std::vector<double>, kAxes> axes;
  for (const auto& e : table) {
    const auto c = coords(e.geometry);
    for (int k = 0; k < kAxes; ++k) axes[k].push_back(c[k]);
  }
  std::size_t cells = 1;
  for (auto& ax : axes) {
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    cells *= ax.size();
  }
  std::map<std::array<std::size_t, kAxes>, std::size_t> node;
  for (std::size_t n = 0; n < table.size(); ++n) {
    const auto c = coords(table[n].geometry);
    std::array<std::size_t, kAxes> idx{};
    for (int k = 0; k < kAxes; ++k)
      idx[k] = static_cast<std::size_t>(std::lower_bound(axes[k].begin(), axes[k].end(), c[k]) - axes[k].begin());
    if (!node.emplace(idx, n).second) throw std::invalid_argument("interpolate_params: duplicate grid node");
  }
  if (node.size() != cells) throw std::invalid_argument("interpolate_params: table is not a rectilinear grid");

  // Per axis: lower node index and weight of the upper node.
  std::array<std::size_t, kAxes> lo{};
  std::array<double, kAxes> w{};
  const auto q = coords(query);
  for (int k = 0; k < kAxes; ++k) {
    const auto& ax = axes[k];
    if (q[k] < ax.front() || q[k] > ax.back())
      throw ExtrapolationError("interpolate_params: query outside the table grid");
    if (ax.size() == 1) {
      lo[k] = 0;
      w[k] = 0.0;
      continue;
    }
    std::size_t i = static_cast<std::size_t>(std::upper_bound(ax.begin(), ax.end(), q[k]) - ax.begin());
    i = std::clamp<std::size_t>(i, 1, ax.size() - 1) - 1;
    lo[k] = i;
    w[k] = (q[k] - ax[i]) / (ax[i + 1] - ax[i]);
  }

  std::array<double, 6> acc{};
  for (unsigned corner = 0; corner < (1u << kAxes); ++corner) {
    double weight = 1.0;
    std::array<std::size_t, kAxes> idx{};
    bool skip = false;
    for (int k = 0; k < kAxes; ++k) {
      const bool upper = (corner >> k) & 1u;
      if (upper && axes[k].size() == 1) {
        skip = true;
        break;
      }
      idx[k] = lo[k] + (upper ? 1 : 0);
      weight *= upper ? w[k] : 1.0 - w[k];
    }
    if (skip || weight == 0.0) continue;
    const auto p = as_array(table[node.at(idx)].params);
    for (int b = 0; b < 6; ++b) acc[b] += weight * p[b];
  }
  return {acc[0], acc[1], acc[2], acc[3], acc[4], acc[5]};
}

}  // namespace molmimo
