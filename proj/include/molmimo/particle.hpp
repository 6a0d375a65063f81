#pragma once

#include <cstdint>
#include <vector>

#include "molmimo/geometry.hpp"
#include "molmimo/rng.hpp"

namespace molmimo {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

double distance(const Vec3& p, const Vec3& q);

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

/// Unbounded homogeneous medium with point emitters and perfectly absorbing
/// spheres. Receivers are free-standing; there is no reflecting body.
struct Scene {
  std::vector<Vec3> emitters;
  std::vector<Sphere> absorbers;
  double D = 100.0;        // um^2/s
  double dt = 1e-4;        // s
  double horizon = 2.4;    // s

  /// Non-empty emitters, positive radii, non-overlapping absorbers, no
  /// emitter inside an absorber, dt > 0, horizon >= dt.
  void validate() const;
};

/// Tx1 at the origin, Rx1 at (d,0,0), Tx2 at (0,a,0), Rx2 at (d,a,0);
/// horizon (L+1) Ts.
Scene mimo_scene(const Geometry& g, double dt);

/// One emitter at the origin and one absorber at (d,0,0).
Scene siso_scene(const Geometry& g, double dt);

/// How a walker decides that it crossed into an absorber during a step.
enum class CrossingCheck {
  end_of_step,  // only the end position is tested
  bridge,       // end position plus the Brownian-bridge crossing probability
};

struct WalkOptions {
  CrossingCheck crossing = CrossingCheck::bridge;
  /// Far from every absorber, aggregate m unit steps into one Gaussian jump
  /// whose width stays below 1/(7 sqrt 3) of the clearance.
  bool far_field_jumps = true;
};

/// First-arrival counts per absorber and per bin of width `bin_width`.
struct HitHistogram {
  double bin_width = 0.0;
  std::uint64_t released = 0;
  std::vector<std::vector<std::uint64_t>> counts;  // [absorber][bin]

  std::size_t n_absorbers() const { return counts.size(); }
  std::size_t n_bins() const { return counts.empty() ? 0 : counts.front().size(); }
  std::uint64_t total() const;
  bool operator==(const HitHistogram&) const = default;
};

/// Releases `n_molecules` from emitter `source` and records where and when
/// each one is first absorbed. Every molecule draws from its own stream keyed
/// by (seed, molecule index), so the result is bit-identical for any number
/// of OpenMP threads. `bin_width` must be an integer multiple of scene.dt.
HitHistogram simulate_hits(const Scene& scene, std::size_t source, std::uint64_t n_molecules,
                           double bin_width, std::uint64_t seed, const WalkOptions& options = {});

/// Single-threaded reference for simulate_hits; same result bit for bit.
HitHistogram simulate_hits_serial(const Scene& scene, std::size_t source,
                                  std::uint64_t n_molecules, double bin_width,
                                  std::uint64_t seed, const WalkOptions& options = {});

struct TapEstimate {
  TapSet taps;
  TapSet std_error;  // binomial sqrt(h (1 - h) / n) per tap
  std::uint64_t n_molecules = 0;
};

/// Empirical 2x2 taps for the symmetric scene, one simulation per emitter.
/// Requires n_molecules >= 1e4.
TapEstimate estimate_mimo_taps(const Geometry& g, std::uint64_t n_molecules, double dt,
                               std::uint64_t seed, const WalkOptions& options = {});

}  // namespace molmimo
