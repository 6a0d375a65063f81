#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "molmimo/geometry.hpp"
#include "molmimo/link.hpp"

namespace molmimo {

enum class Scheme { siso, repetition, alamouti };
enum class Detector { atd, mlse };
enum class TapProvenance { analytic, fitted, particle };

std::string_view to_string(Scheme s);
std::string_view to_string(Detector d);
std::string_view to_string(TapProvenance p);
Scheme parse_scheme(std::string_view s);
Detector parse_detector(std::string_view s);
TapProvenance parse_provenance(std::string_view s);

struct ExperimentConfig {
  Scheme scheme = Scheme::repetition;
  Detector detector = Detector::mlse;
  Geometry geometry;
  Count N = 1000;            // molecules per ON symbol and antenna (MIMO reference)
  std::int64_t K = 10000;    // bits per realization
  std::int64_t R = 100;      // realizations
  std::uint64_t seed = 1;
  /// SISO emits 2N so that it spends the same energy as two MIMO antennas.
  bool power_normalization = true;
  /// Replace binomial draws by rounded expectations (detector checks only).
  bool expectation_mode = false;
  TapProvenance provenance = TapProvenance::analytic;

  /// Molecules per ON symbol actually emitted by each antenna.
  Count emitted_N() const;
  void validate() const;
};

struct BerRecord {
  ExperimentConfig config;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double wall_seconds = 0.0;
};

/// Wilson score interval for errors/trials at the given normal quantile.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials,
                                          double z = 1.959963984540054);

/// Bit errors of one realization: draw K bits, encode, send through the
/// channel followed by L silent slots, combine and detect. The realization
/// owns the stream (seed, r), so its outcome does not depend on scheduling.
std::uint64_t run_realization(const ExperimentConfig& cfg, const TapSet& taps, std::int64_t r);

/// Runs all realizations in parallel (OpenMP) and aggregates the counts.
BerRecord run_experiment(const ExperimentConfig& cfg, const TapSet& taps);

/// Single-threaded reference for run_experiment.
BerRecord run_experiment_serial(const ExperimentConfig& cfg, const TapSet& taps);

enum class SweepAxis { N, a, D };
SweepAxis parse_axis(std::string_view s);
std::string_view to_string(SweepAxis a);

/// Supplies the taps for a geometry and scheme (1x1 for SISO, 2x2 otherwise).
using TapProvider = std::function<TapSet(const Geometry&, Scheme)>;

/// SISO taps from the closed form; MIMO taps from the given provider.
TapProvider analytic_siso_or(std::function<TapSet(const Geometry&)> mimo);

/// For each value, in order, runs every (scheme, detector) combination.
/// Taps are requested again whenever a or D changes.
std::vector<BerRecord> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values,
                             const std::vector<std::pair<Scheme, Detector>>& combos, const TapProvider& taps);

}  // namespace molmimo
