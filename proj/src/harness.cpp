#include "molmimo/harness.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "molmimo/analytic.hpp"
#include "molmimo/detect.hpp"
#include "molmimo/rng.hpp"

namespace molmimo {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::siso: return "siso";
    case Scheme::repetition: return "repetition";
    case Scheme::alamouti: return "alamouti";
  }
  return "?";
}

std::string_view to_string(Detector d) { return d == Detector::atd ? "atd" : "mlse"; }

std::string_view to_string(TapProvenance p) {
  switch (p) {
    case TapProvenance::analytic: return "analytic";
    case TapProvenance::fitted: return "fitted";
    case TapProvenance::particle: return "particle";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "siso") return Scheme::siso;
  if (s == "repetition") return Scheme::repetition;
  if (s == "alamouti") return Scheme::alamouti;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

Detector parse_detector(std::string_view s) {
  if (s == "atd") return Detector::atd;
  if (s == "mlse") return Detector::mlse;
  throw std::invalid_argument("unknown detector '" + std::string(s) + "'");
}

TapProvenance parse_provenance(std::string_view s) {
  if (s == "analytic") return TapProvenance::analytic;
  if (s == "fitted") return TapProvenance::fitted;
  if (s == "particle") return TapProvenance::particle;
  throw std::invalid_argument("unknown tap model '" + std::string(s) + "'");
}

SweepAxis parse_axis(std::string_view s) {
  if (s == "N") return SweepAxis::N;
  if (s == "a") return SweepAxis::a;
  if (s == "D") return SweepAxis::D;
  throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::N: return "N";
    case SweepAxis::a: return "a";
    case SweepAxis::D: return "D";
  }
  return "?";
}

Count ExperimentConfig::emitted_N() const {
  return scheme == Scheme::siso && power_normalization ? 2 * N : N;
}

void ExperimentConfig::validate() const {
  geometry.validate();
  if (N < 1) throw std::invalid_argument("experiment: N must be at least 1");
  if (K < geometry.L + 1) throw std::invalid_argument("experiment: K must be at least L+1");
  if (R < 1) throw std::invalid_argument("experiment: R must be at least 1");
  if (scheme == Scheme::alamouti && detector == Detector::atd)
    throw std::invalid_argument("experiment: the Alamouti-type code is only detected by MLSE");
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = errors == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

namespace {

void check_taps(const ExperimentConfig& cfg, const TapSet& taps) {
  const bool want_siso = cfg.scheme == Scheme::siso;
  if (want_siso != taps.is_siso() || (!want_siso && (taps.n_rx() != 2 || taps.n_tx() != 2)))
    throw std::invalid_argument("experiment: tap set shape does not match the scheme");
  if (taps.L() != cfg.geometry.L) throw std::invalid_argument("experiment: tap memory does not match L");
  taps.validate();
}

std::vector<double> as_doubles(const std::vector<Count>& v, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<double>(v[k]);
  return out;
}

BerRecord finish(const ExperimentConfig& cfg, std::uint64_t errors, double seconds) {
  BerRecord rec;
  rec.config = cfg;
  rec.bits = static_cast<std::uint64_t>(cfg.K) * static_cast<std::uint64_t>(cfg.R);
  rec.errors = errors;
  rec.ber = static_cast<double>(errors) / static_cast<double>(rec.bits);
  std::tie(rec.ci_low, rec.ci_high) = wilson_interval(errors, rec.bits);
  rec.wall_seconds = seconds;
  return rec;
}

}  // namespace

std::uint64_t run_realization(const ExperimentConfig& cfg, const TapSet& taps, std::int64_t r) {
  Engine eng = stream_engine(cfg.seed, domain::realization, static_cast<std::uint64_t>(r));
  const auto K = static_cast<std::size_t>(cfg.K);
  const int L = cfg.geometry.L;
  const Count n_on = cfg.emitted_N();

  BitSequence bits(K);
  for (auto& b : bits) b = static_cast<Bit>(eng() >> 63);
  const auto symbols = ook_map(bits, n_on);

  TransmitMatrix x;
  switch (cfg.scheme) {
    case Scheme::siso: x = encode_siso(symbols, n_on); break;
    case Scheme::repetition: x = encode_repetition(symbols, n_on); break;
    case Scheme::alamouti: x = encode_alamouti(symbols, n_on); break;
  }
  const std::size_t data_slots = x.n_slots();
  append_silence(x, L);

  const RxSeries rx = cfg.expectation_mode ? channel_expected_counts(x, taps) : channel_transmit(x, taps, eng);
  const auto combined = egc_combine(rx);

  BitSequence decided;
  const double n = static_cast<double>(n_on);
  if (cfg.detector == Detector::atd) {
    decided = atd_detect(as_doubles(combined, combined.size()));
  } else if (cfg.scheme == Scheme::alamouti) {
    // Guard slots carry no pair codewords; the joint trellis covers data slots only.
    decided = alamouti_mlse_detect(as_doubles(combined, data_slots), alamouti_channel(taps, n));
  } else {
    const auto ch = cfg.scheme == Scheme::siso ? siso_channel(taps, n) : repetition_channel(taps, n);
    decided = mlse_detect(as_doubles(combined, combined.size()), ch);
  }

  std::uint64_t errors = 0;
  for (std::size_t k = 0; k < K; ++k) errors += decided[k] != bits[k];
  return errors;
}

BerRecord run_experiment_serial(const ExperimentConfig& cfg, const TapSet& taps) {
  cfg.validate();
  check_taps(cfg, taps);
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t errors = 0;
  for (std::int64_t r = 0; r < cfg.R; ++r) errors += run_realization(cfg, taps, r);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(cfg, errors, secs);
}

BerRecord run_experiment(const ExperimentConfig& cfg, const TapSet& taps) {
  cfg.validate();
  check_taps(cfg, taps);
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t errors = 0;
  const std::int64_t R = cfg.R;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : errors)
  for (std::int64_t r = 0; r < R; ++r) errors += run_realization(cfg, taps, r);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(cfg, errors, secs);
}

TapProvider analytic_siso_or(std::function<TapSet(const Geometry&)> mimo) {
  return [mimo = std::move(mimo)](const Geometry& g, Scheme s) {
    return s == Scheme::siso ? siso_taps(g) : mimo(g);
  };
}

std::vector<BerRecord> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values,
                             const std::vector<std::pair<Scheme, Detector>>& combos, const TapProvider& taps) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  if (combos.empty()) throw std::invalid_argument("sweep: no scheme/detector combinations");
  std::vector<BerRecord> out;
  for (double v : values) {
    ExperimentConfig cfg = base;
    switch (axis) {
      case SweepAxis::N:
        if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("sweep: N values must be positive integers");
        cfg.N = static_cast<Count>(v);
        break;
      case SweepAxis::a: cfg.geometry.a = v; break;
      case SweepAxis::D: cfg.geometry.D = v; break;
    }
    cfg.geometry.validate();
    // One tap set per scheme shape per value.
    std::map<bool, TapSet> cache;
    for (const auto& [scheme, detector] : combos) {
      cfg.scheme = scheme;
      cfg.detector = detector;
      const bool siso = scheme == Scheme::siso;
      auto it = cache.find(siso);
      if (it == cache.end()) it = cache.emplace(siso, taps(cfg.geometry, scheme)).first;
      out.push_back(run_experiment(cfg, it->second));
    }
  }
  return out;
}

}  // namespace molmimo
