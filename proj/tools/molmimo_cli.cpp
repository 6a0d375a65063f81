// molmimo: channel taps, particle simulation, curve fitting and BER runs for
// the 2x2 diffusion link.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>
#include <omp.h>

#include "molmimo/analytic.hpp"
#include "molmimo/csv.hpp"
#include "molmimo/fit.hpp"
#include "molmimo/harness.hpp"
#include "molmimo/particle.hpp"

using namespace molmimo;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;

  Geometry geometry;
  std::string model = "analytic";
  std::string fit_table;
  std::uint64_t molecules = 100000;
  double dt = 1e-4;

  std::string scheme = "repetition";
  std::string detector = "mlse";
  Count N = 1000;
  std::int64_t K = 10000;
  std::int64_t R = 100;
  bool no_power_normalization = false;
  bool expectation_mode = false;

  bool mimo = false;

  std::string scene = "mimo";
  int source = 1;
  double bin_width = 0.0;
  std::string crossing = "bridge";
  bool no_jumps = false;

  std::vector<std::string> inputs;

  std::string axis;
  std::vector<double> values;
  std::vector<std::string> combos;
};

// Flat JSON object; keys mirror the flag names.
void load_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  const auto one_of = [](const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (v == a) return v;
    throw UsageError("config file: bad value '" + v + "' for '" + key + "'");
  };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "scheme") o.scheme = one_of(key, v.get<std::string>(), {"siso", "repetition", "alamouti"});
      else if (key == "detector") o.detector = one_of(key, v.get<std::string>(), {"atd", "mlse"});
      else if (key == "model") o.model = one_of(key, v.get<std::string>(), {"analytic", "fitted", "particle"});
      else if (key == "fit_table") o.fit_table = v.get<std::string>();
      else if (key == "N") o.N = v.get<Count>();
      else if (key == "K") o.K = v.get<std::int64_t>();
      else if (key == "R") o.R = v.get<std::int64_t>();
      else if (key == "seed") o.seed = v.get<std::uint64_t>();
      else if (key == "d") o.geometry.d = v.get<double>();
      else if (key == "a") o.geometry.a = v.get<double>();
      else if (key == "r") o.geometry.r = v.get<double>();
      else if (key == "D") o.geometry.D = v.get<double>();
      else if (key == "Ts") o.geometry.Ts = v.get<double>();
      else if (key == "L") o.geometry.L = v.get<int>();
      else if (key == "molecules") o.molecules = v.get<std::uint64_t>();
      else if (key == "dt") o.dt = v.get<double>();
      else if (key == "power_normalization") o.no_power_normalization = !v.get<bool>();
      else if (key == "expectation_mode") o.expectation_mode = v.get<bool>();
      else throw UsageError("config file: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw UsageError("config file: wrong type for '" + key + "'");
    }
  }
}

// Bad parameter values are reported as usage errors.
template <class T>
void check_usage(const T& v) {
  try {
    v.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return {};
}

void add_geometry_flags(CLI::App* sub, Options& o) {
  sub->add_option("--d", o.geometry.d, "Tx-Rx distance to the sphere center (um)");
  sub->add_option("--a", o.geometry.a, "antenna separation (um)");
  sub->add_option("--r", o.geometry.r, "receiver radius (um)");
  sub->add_option("--D", o.geometry.D, "diffusion coefficient (um^2/s)");
  sub->add_option("--Ts", o.geometry.Ts, "symbol duration (s)");
  sub->add_option("--L", o.geometry.L, "channel memory (slots)");
}

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "source of the 2x2 taps")->check(CLI::IsMember({"analytic", "fitted", "particle"}));
  sub->add_option("--fit-table", o.fit_table, "fit parameter table for --model fitted")->check(CLI::ExistingFile);
  sub->add_option("--molecules", o.molecules, "molecules per emitter for --model particle");
  sub->add_option("--dt", o.dt, "particle time step (s)");
}

void add_experiment_flags(CLI::App* sub, Options& o) {
  sub->add_option("--N", o.N, "molecules per ON symbol and antenna");
  sub->add_option("--K", o.K, "bits per realization");
  sub->add_option("--R", o.R, "realizations");
  sub->add_flag("--no-power-normalization", o.no_power_normalization, "SISO emits N instead of 2N");
  sub->add_flag("--expectation-mode", o.expectation_mode, "noise-free rounded expected counts");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + o.out + "' failed");
}

std::vector<FitTableEntry> load_fit_table(const std::string& path) {
  if (path.empty()) throw UsageError("--model fitted needs --fit-table");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_fit_table_csv(in);
}

// Particle taps are memoised per geometry.
std::function<TapSet(const Geometry&)> mimo_provider(const Options& o) {
  if (o.model == "analytic")
    return [](const Geometry& g) { return symmetric_mimo_taps(g, FitParams::identity()); };
  if (o.model == "fitted") {
    auto table = std::make_shared<std::vector<FitTableEntry>>(load_fit_table(o.fit_table));
    return [table](const Geometry& g) { return symmetric_mimo_taps(g, interpolate_params(*table, g)); };
  }
  auto memo = std::make_shared<std::map<std::tuple<double, double, double, double, double, int>, TapSet>>();
  return [memo, n = o.molecules, dt = o.dt, seed = o.seed](const Geometry& g) {
    const auto key = std::make_tuple(g.d, g.a, g.r, g.D, g.Ts, g.L);
    auto it = memo->find(key);
    if (it == memo->end()) it = memo->emplace(key, estimate_mimo_taps(g, n, dt, seed).taps).first;
    return it->second;
  };
}

void add_model_metadata(Metadata& md, const Options& o) {
  md.set("model", o.model);
  if (o.model == "fitted") md.set("fit_table", o.fit_table);
  if (o.model == "particle") md.set("molecules", o.molecules).set("dt", o.dt);
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig cfg;
  try {
    cfg.scheme = parse_scheme(o.scheme);
    cfg.detector = parse_detector(o.detector);
    cfg.provenance = parse_provenance(o.model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.geometry = o.geometry;
  cfg.N = o.N;
  cfg.K = o.K;
  cfg.R = o.R;
  cfg.seed = o.seed;
  cfg.power_normalization = !o.no_power_normalization;
  cfg.expectation_mode = o.expectation_mode;
  return cfg;
}

Metadata experiment_metadata(const std::string& kind, const ExperimentConfig& cfg, const Options& o) {
  Metadata md = base_metadata(kind);
  add_geometry(md, cfg.geometry);
  md.set("N", cfg.N).set("K", cfg.K).set("R", cfg.R).set("seed", cfg.seed);
  md.set("power_normalization", std::string(cfg.power_normalization ? "true" : "false"));
  md.set("siso_N", 2 * cfg.N);
  if (!cfg.power_normalization) md.set("siso_N", cfg.N);
  md.set("expectation_mode", std::string(cfg.expectation_mode ? "true (noise-free, detector check only)" : "false"));
  add_model_metadata(md, o);
  md.set("siso_taps", std::string("analytic"));
  return md;
}

int cmd_taps(const Options& o) {
  const Geometry& g = o.geometry;
  check_usage(g);
  Metadata md = base_metadata("taps");
  add_geometry(md, g);
  TapSet taps(1, 1, 0);
  if (o.model == "analytic" && !o.mimo) {
    taps = siso_taps(g);
  } else {
    taps = mimo_provider(o)(g);
  }
  add_model_metadata(md, o);
  if (o.model == "particle") md.set("seed", o.seed);
  std::ostringstream os;
  write_taps_csv(os, taps, md);
  emit(o, os.str());
  return 0;
}

int cmd_simulate(const Options& o) {
  const Geometry& g = o.geometry;
  check_usage(g);
  const Scene scene = o.scene == "siso" ? siso_scene(g, o.dt) : mimo_scene(g, o.dt);
  if (o.source < 1 || static_cast<std::size_t>(o.source) > scene.emitters.size())
    throw UsageError("--source out of range for the scene");
  const double width = o.bin_width > 0.0 ? o.bin_width : g.Ts;
  WalkOptions walk;
  walk.crossing = o.crossing == "end-of-step" ? CrossingCheck::end_of_step : CrossingCheck::bridge;
  walk.far_field_jumps = !o.no_jumps;
  const auto hist = simulate_hits(scene, static_cast<std::size_t>(o.source - 1), o.molecules, width, o.seed, walk);

  Metadata md = base_metadata("histogram");
  add_geometry(md, g);
  md.set("scene", o.scene).set("source", o.source).set("dt", o.dt).set("n", o.molecules).set("seed", o.seed);
  md.set("crossing", o.crossing).set("far_field_jumps", std::string(o.no_jumps ? "false" : "true"));
  std::ostringstream os;
  write_histogram_csv(os, hist, md);
  emit(o, os.str());
  return 0;
}

int cmd_fit(const Options& o) {
  std::vector<FitTableEntry> rows;
  Metadata md = base_metadata("fit");
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    std::ifstream in(o.inputs[i]);
    if (!in) throw std::runtime_error("cannot open '" + o.inputs[i] + "'");
    const auto [hist, hmd] = read_histogram_csv(in);
    const auto* scene = hmd.find("scene");
    if (!scene || *scene != "mimo" || hist.n_absorbers() != 2)
      throw std::runtime_error("'" + o.inputs[i] + "' is not a two-receiver histogram");
    const Geometry g = geometry_from(hmd);
    const std::size_t own = hmd.find("source") ? static_cast<std::size_t>(hmd.number("source")) - 1 : 0;
    const auto fit = fit_response(g, empirical_cdf(hist, own), empirical_cdf(hist, 1 - own));
    rows.push_back({g, fit.params});
    md.set("residual_" + std::to_string(i + 1),
           format_sig(fit.direct.residual_norm, 6) + " " + format_sig(fit.cross.residual_norm, 6));
  }
  std::ostringstream os;
  write_fit_table_csv(os, rows, md);
  emit(o, os.str());
  return 0;
}

int cmd_ber(const Options& o) {
  const ExperimentConfig cfg = experiment_config(o);
  check_usage(cfg);
  const TapSet taps = cfg.scheme == Scheme::siso ? siso_taps(cfg.geometry) : mimo_provider(o)(cfg.geometry);
  const auto rec = run_experiment(cfg, taps);
  std::cerr << "elapsed " << format_sig(rec.wall_seconds, 4) << " s\n";
  std::ostringstream os;
  write_ber_csv(os, std::span(&rec, 1), experiment_metadata("ber", cfg, o));
  emit(o, os.str());
  return 0;
}

int cmd_sweep(const Options& o) {
  ExperimentConfig base = experiment_config(o);
  std::vector<std::pair<Scheme, Detector>> combos;
  for (const auto& c : o.combos) {
    const auto colon = c.find(':');
    if (colon == std::string::npos) throw UsageError("--combos entries look like scheme:detector");
    try {
      combos.emplace_back(parse_scheme(c.substr(0, colon)), parse_detector(c.substr(colon + 1)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (combos.back().first == Scheme::alamouti && combos.back().second == Detector::atd)
      throw UsageError("alamouti:atd is not a valid combination");
  }
  if (combos.empty())
    combos = {{Scheme::siso, Detector::atd},
              {Scheme::siso, Detector::mlse},
              {Scheme::repetition, Detector::atd},
              {Scheme::repetition, Detector::mlse},
              {Scheme::alamouti, Detector::mlse}};
  check_usage(base.geometry);
  const SweepAxis axis = parse_axis(o.axis);
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = sweep(base, axis, o.values, combos, analytic_siso_or(mimo_provider(o)));
  std::cerr << "elapsed "
            << format_sig(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 4) << " s\n";

  Metadata md = experiment_metadata("sweep", base, o);
  std::string vals, names;
  for (double v : o.values) vals += (vals.empty() ? "" : ",") + format_sig(v, 12);
  for (const auto& [s, d] : combos)
    names += (names.empty() ? "" : ",") + std::string(to_string(s)) + ":" + std::string(to_string(d));
  md.set("axis", o.axis).set("values", vals).set("combos", names);
  std::ostringstream os;
  write_ber_csv(os, recs, md);
  emit(o, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Molecular MIMO link toolkit", "molmimo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("molmimo ") + MOLMIMO_VERSION);
  app.add_option("--config", o.config, "JSON file with default values")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--out", o.out, "output file (default: stdout)");
  app.add_option("--threads", o.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  auto* taps = app.add_subcommand("taps", "channel taps as CSV");
  add_geometry_flags(taps, o);
  add_model_flags(taps, o);
  taps->add_flag("--mimo", o.mimo, "2x2 closed-form taps for --model analytic");

  auto* sim = app.add_subcommand("simulate-channel", "particle simulation to a hit histogram");
  add_geometry_flags(sim, o);
  sim->add_option("--scene", o.scene, "receiver layout")->check(CLI::IsMember({"siso", "mimo"}));
  sim->add_option("--source", o.source, "emitting antenna (1-based)");
  sim->add_option("--molecules", o.molecules, "molecules released");
  sim->add_option("--dt", o.dt, "time step (s)");
  sim->add_option("--bin-width", o.bin_width, "histogram bin width (s, default Ts)");
  sim->add_option("--crossing", o.crossing, "absorption test")->check(CLI::IsMember({"bridge", "end-of-step"}));
  sim->add_flag("--no-jumps", o.no_jumps, "unit steps everywhere");

  auto* fit = app.add_subcommand("fit", "fit response parameters to histograms");
  fit->add_option("histograms", o.inputs, "histogram CSV files from simulate-channel")
      ->required()
      ->check(CLI::ExistingFile);

  auto* ber = app.add_subcommand("ber", "one BER experiment");
  add_geometry_flags(ber, o);
  add_model_flags(ber, o);
  add_experiment_flags(ber, o);
  ber->add_option("--scheme", o.scheme)->check(CLI::IsMember({"siso", "repetition", "alamouti"}));
  ber->add_option("--detector", o.detector)->check(CLI::IsMember({"atd", "mlse"}));

  auto* sw = app.add_subcommand("sweep", "BER over one parameter axis");
  add_geometry_flags(sw, o);
  add_model_flags(sw, o);
  add_experiment_flags(sw, o);
  sw->add_option("--axis", o.axis)->required()->check(CLI::IsMember({"N", "a", "D"}));
  sw->add_option("--values", o.values)->required()->delimiter(',');
  sw->add_option("--combos", o.combos, "scheme:detector list (default: all five)")->delimiter(',');

  try {
    const std::string cfg = find_config_arg(argc, argv);
    if (!cfg.empty()) load_config(cfg, o);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (o.threads > 0) omp_set_num_threads(o.threads);
  try {
    if (*taps) return cmd_taps(o);
    if (*sim) return cmd_simulate(o);
    if (*fit) return cmd_fit(o);
    if (*ber) return cmd_ber(o);
    return cmd_sweep(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
