#include "molmimo/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace molmimo {

double distance(const Vec3& p, const Vec3& q) {
  const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void Scene::validate() const {
  if (emitters.empty()) throw std::invalid_argument("scene: no emitters");
  if (!(D > 0.0)) throw std::invalid_argument("scene: D must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("scene: dt must be positive");
  if (!(horizon >= dt)) throw std::invalid_argument("scene: horizon must be at least dt");
  for (std::size_t i = 0; i < absorbers.size(); ++i) {
    if (!(absorbers[i].radius > 0.0)) throw std::invalid_argument("scene: absorber radius must be positive");
    for (std::size_t j = i + 1; j < absorbers.size(); ++j) {
      if (distance(absorbers[i].center, absorbers[j].center) < absorbers[i].radius + absorbers[j].radius)
        throw std::invalid_argument("scene: absorbers overlap");
    }
    for (const auto& e : emitters) {
      if (distance(e, absorbers[i].center) <= absorbers[i].radius)
        throw std::invalid_argument("scene: emitter inside an absorber");
    }
  }
}

Scene mimo_scene(const Geometry& g, double dt) {
  g.validate();
  Scene s;
  s.emitters = {{0.0, 0.0, 0.0}, {0.0, g.a, 0.0}};
  s.absorbers = {{{g.d, 0.0, 0.0}, g.r}, {{g.d, g.a, 0.0}, g.r}};
  s.D = g.D;
  s.dt = dt;
  s.horizon = (g.L + 1) * g.Ts;
  return s;
}

Scene siso_scene(const Geometry& g, double dt) {
  g.validate();
  Scene s;
  s.emitters = {{0.0, 0.0, 0.0}};
  s.absorbers = {{{g.d, 0.0, 0.0}, g.r}};
  s.D = g.D;
  s.dt = dt;
  s.horizon = (g.L + 1) * g.Ts;
  return s;
}

std::uint64_t HitHistogram::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

namespace {

// Clearance of a jump expressed in per-axis standard deviations of the jump.
constexpr double kJumpSigmas = 7.0;

struct Binning {
  std::uint64_t steps_per_bin = 0;
  std::uint64_t total_steps = 0;
  std::size_t n_bins = 0;
};

Binning make_binning(const Scene& scene, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("simulate_hits: bin width must be positive");
  const double ratio = bin_width / scene.dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
    throw std::invalid_argument("simulate_hits: bin width must be an integer multiple of dt");
  Binning b;
  b.steps_per_bin = static_cast<std::uint64_t>(rounded);
  b.total_steps = static_cast<std::uint64_t>(std::llround(scene.horizon / scene.dt));
  b.n_bins = static_cast<std::size_t>((b.total_steps + b.steps_per_bin - 1) / b.steps_per_bin);
  return b;
}

struct Arrival {
  std::size_t absorber;
  std::size_t bin;
};

// Walks one molecule to absorption or to the horizon.
class Walker {
 public:
  Walker(const Scene& scene, const Binning& binning, const WalkOptions& options)
      : scene_(scene),
        binning_(binning),
        options_(options),
        sigma_(std::sqrt(2.0 * scene.D * scene.dt)),
        jump_scale_(kJumpSigmas * std::sqrt(3.0) * sigma_) {}

  std::optional<Arrival> run(Vec3 pos, Engine& eng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uint64_t step = 0;
    while (step < binning_.total_steps) {
      const std::uint64_t remaining = binning_.total_steps - step;
      std::uint64_t m = 1;
      if (options_.far_field_jumps && !scene_.absorbers.empty()) {
        const double ratio = clearance(pos) / jump_scale_;
        const double allowed = ratio * ratio;
        if (allowed >= 2.0)
          m = std::min<std::uint64_t>(remaining, static_cast<std::uint64_t>(std::min(allowed, 1e15)));
      } else if (scene_.absorbers.empty()) {
        m = remaining;  // nothing to hit
      }
      const double width = sigma_ * std::sqrt(static_cast<double>(m));
      const Vec3 prev = pos;
      pos.x += width * normal(eng);
      pos.y += width * normal(eng);
      pos.z += width * normal(eng);
      step += m;

      for (std::size_t k = 0; k < scene_.absorbers.size(); ++k) {
        const auto& sph = scene_.absorbers[k];
        const double end_gap = distance(pos, sph.center) - sph.radius;
        bool hit = end_gap <= 0.0;
        if (!hit && m == 1 && options_.crossing == CrossingCheck::bridge) {
          const double start_gap = distance(prev, sph.center) - sph.radius;
          // Planar approximation of the sphere surface; negligible beyond ~6 sigma.
          const double exponent = 2.0 * start_gap * end_gap / (sigma_ * sigma_);
          if (exponent < 40.0) hit = uniform(eng) < std::exp(-exponent);
        }
        if (hit) return Arrival{k, static_cast<std::size_t>((step - 1) / binning_.steps_per_bin)};
      }
    }
    return std::nullopt;
  }

 private:
  double clearance(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sph : scene_.absorbers) best = std::min(best, distance(p, sph.center) - sph.radius);
    return best;
  }

  const Scene& scene_;
  const Binning& binning_;
  const WalkOptions& options_;
  double sigma_;
  double jump_scale_;
};

HitHistogram empty_histogram(const Scene& scene, const Binning& binning, double bin_width,
                             std::uint64_t n_molecules) {
  HitHistogram h;
  h.bin_width = bin_width;
  h.released = n_molecules;
  h.counts.assign(scene.absorbers.size(), std::vector<std::uint64_t>(binning.n_bins, 0));
  return h;
}

void check_inputs(const Scene& scene, std::size_t source, std::uint64_t n_molecules) {
  scene.validate();
  if (source >= scene.emitters.size()) throw std::invalid_argument("simulate_hits: source index out of range");
  if (n_molecules < 1) throw std::invalid_argument("simulate_hits: need at least one molecule");
}

}  // namespace

HitHistogram simulate_hits_serial(const Scene& scene, std::size_t source, std::uint64_t n_molecules,
                                  double bin_width, std::uint64_t seed, const WalkOptions& options) {
  check_inputs(scene, source, n_molecules);
  const Binning binning = make_binning(scene, bin_width);
  HitHistogram hist = empty_histogram(scene, binning, bin_width, n_molecules);
  const Walker walker(scene, binning, options);
  for (std::uint64_t i = 0; i < n_molecules; ++i) {
    Engine eng = stream_engine(seed, domain::molecule, i);
    if (auto hit = walker.run(scene.emitters[source], eng)) ++hist.counts[hit->absorber][hit->bin];
  }
  return hist;
}

HitHistogram simulate_hits(const Scene& scene, std::size_t source, std::uint64_t n_molecules,
                           double bin_width, std::uint64_t seed, const WalkOptions& options) {
  check_inputs(scene, source, n_molecules);
  const Binning binning = make_binning(scene, bin_width);
  HitHistogram hist = empty_histogram(scene, binning, bin_width, n_molecules);
  const Walker walker(scene, binning, options);
  const auto n = static_cast<std::int64_t>(n_molecules);

#pragma omp parallel
  {
    auto local = hist.counts;
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) {
      Engine eng = stream_engine(seed, domain::molecule, static_cast<std::uint64_t>(i));
      if (auto hit = walker.run(scene.emitters[source], eng)) ++local[hit->absorber][hit->bin];
    }
#pragma omp critical(molmimo_hist_merge)
    for (std::size_t k = 0; k < local.size(); ++k)
      for (std::size_t b = 0; b < local[k].size(); ++b) hist.counts[k][b] += local[k][b];
  }
  return hist;
}

TapEstimate estimate_mimo_taps(const Geometry& g, std::uint64_t n_molecules, double dt,
                               std::uint64_t seed, const WalkOptions& options) {
  if (n_molecules < 10000) throw std::invalid_argument("estimate_mimo_taps: need at least 1e4 molecules");
  const Scene scene = mimo_scene(g, dt);
  TapEstimate est{TapSet(2, 2, g.L), TapSet(2, 2, g.L), n_molecules};
  const double n = static_cast<double>(n_molecules);
  for (std::size_t tx = 0; tx < 2; ++tx) {
    const auto hist = simulate_hits(scene, tx, n_molecules, g.Ts, mix_seed(seed, domain::emitter + tx), options);
    for (std::size_t rx = 0; rx < 2; ++rx) {
      for (int l = 0; l <= g.L; ++l) {
        const double h = static_cast<double>(hist.counts[rx][static_cast<std::size_t>(l)]) / n;
        const int j = static_cast<int>(rx) + 1, i = static_cast<int>(tx) + 1;
        est.taps.at(j, i, l) = h;
        est.std_error.at(j, i, l) = std::sqrt(h * (1.0 - h) / n);
      }
    }
  }
  return est;
}

}  // namespace molmimo
