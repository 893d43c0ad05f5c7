#pragma once

// Batch front end behind the saw-cli binary: maps a JSON run config onto the
// library modules, writes plot-ready CSV and JSON artifacts into an output
// directory, and records per-device failures without aborting the run.
//
// Reports are a pure function of config bytes and input data: identical
// inputs reproduce identical report bytes regardless of worker count.
// Timestamps go to a separate run_meta.json so they never break that.
//
// Exit codes: 0 success, 2 usage (config schema, missing referenced paths),
// 3 data (unreadable or inconsistent inputs, nothing produced), 4 numerical
// failure. SAW_LOG=quiet|info|debug controls stderr verbosity.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "saw/ae.hpp"
#include "saw/dispersion.hpp"
#include "saw/errors.hpp"
#include "saw/idt.hpp"
#include "saw/materials_db.hpp"
#include "saw/rfdata.hpp"
#include "saw/spin.hpp"

namespace saw::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Config problems the user must fix before anything runs; mapped to exit 2
// while everything else stays on the data/numerics codes.
struct UsageError : Error {
  using Error::Error;
};

enum class Command { dispersion, idt, analyze, lossfit, ae, spinmap };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::dispersion: return "dispersion";
    case Command::idt: return "idt";
    case Command::analyze: return "analyze";
    case Command::lossfit: return "lossfit";
    case Command::ae: return "ae";
    case Command::spinmap: return "spinmap";
  }
  return "?";
}

inline Command command_from_string(const std::string& s) {
  if (s == "dispersion") return Command::dispersion;
  if (s == "idt") return Command::idt;
  if (s == "analyze") return Command::analyze;
  if (s == "lossfit") return Command::lossfit;
  if (s == "ae") return Command::ae;
  if (s == "spinmap") return Command::spinmap;
  throw UsageError("config: command: unknown command '" + s + "'");
}

// ---------------------------------------------------------------------------
// Run configuration

struct StackConfig {
  std::string film = "alscn42";
  std::string substrate = "sic_4h";
  double film_thickness = 0.0;  // m
  double wavelength = 0.0;      // m
  SearchWindow window{};        // zeroed v_max means "use default_window"
  std::vector<double> h_over_lambda;  // optional sweep; empty = single solve
};

struct IdtGridConfig {
  double lo = 0.0;  // Hz; 0 means derive from f0 and N
  double hi = 0.0;
  int points = 2001;
};

struct IdtMatchConfig {
  bool requested = false;
  double z0 = 50.0;
  MatchBounds bounds;
};

struct IdtConfig {
  int pairs = 0;
  double aperture = 0.0;  // m
  double pitch = 0.0;     // m
  double cs = 0.0;        // F/m; 0 means default_cs_alscn_sic()
  ModeParams mode;
  IdtGridConfig grid;
  IdtMatchConfig match;
};

struct RangeConfig {
  std::vector<double> values;  // explicit list wins over min/max/points
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  bool log_spaced = false;
};

struct AeConfig {
  std::string film = "alscn42";  // permittivity source when sum not given
  AeDeviceParams device;          // width field holds the slab width
  double waveguide_width = 0.0;   // m
  double excess_loss_db = 0.0;
  double drive_power = 0.0;       // W
  RangeConfig width_range;
  RangeConfig mobility_range;
};

struct SpinConfig {
  std::string g_tensor_path;
  std::string strain_grid_csv;  // optional; present = imported-grid mode
  double substrate_top = 0.0;   // m, used with imported grids
};

struct BandConfig {
  FrequencyBand rayleigh{2.7e9, 3.2e9};
  FrequencyBand sezawa{3.8e9, 4.3e9};
};

struct RunConfig {
  Command command = Command::dispersion;
  std::string base_dir;        // directory of the config file
  std::string materials_path;  // empty = embedded defaults
  std::string output_dir = "out";
  int workers = 1;
  BandConfig bands;
  std::vector<std::string> exclude;  // device ids dropped from analysis
  StackConfig stack;
  IdtConfig idt;
  std::string manifest_path;
  std::vector<FrequencyBand> fit_bands;  // parasitic-fit windows, Hz
  AeConfig ae;
  SpinConfig spin;
  std::string config_hash;  // fnv1a64 of the raw config bytes
};

// ---------------------------------------------------------------------------
// Small utilities

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline int log_level() {
  static const int level = [] {
    const char* e = std::getenv("SAW_LOG");
    if (!e) return 1;
    const std::string s(e);
    if (s == "quiet") return 0;
    if (s == "debug") return 2;
    return 1;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[saw] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[saw] %s\n", msg.c_str());
}

// Index-sharded fan-out with results landing in slot order, so the assembled
// output is independent of scheduling. fn must not throw; item processors
// catch their own errors and store them in the slot.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int workers, Fn fn) {
  std::vector<T> out(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int count = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        out[i] = fn(i);
      }
    });
  for (auto& t : pool) t.join();
  return out;
}

namespace detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return p;
  return (std::filesystem::path(base_dir) / path).string();
}

inline void require_exists(const std::string& path, const std::string& field) {
  if (!std::filesystem::exists(path))
    throw UsageError("config: " + field + ": path '" + path +
                     "' does not exist");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

// --- config field access with path-carrying errors

inline const nlohmann::json& need(const nlohmann::json& j,
                                  const std::string& key,
                                  const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw UsageError("config: " + path + ": missing required field");
  return j.at(key);
}

inline double need_number(const nlohmann::json& j, const std::string& key,
                          const std::string& path) {
  const nlohmann::json& v = need(j, key, path);
  if (!v.is_number())
    throw UsageError("config: " + path + ": expected a number");
  return v.get<double>();
}

inline double opt_number(const nlohmann::json& j, const std::string& key,
                         const std::string& path, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw UsageError("config: " + path + ": expected a number");
  return j.at(key).get<double>();
}

inline std::string opt_string(const nlohmann::json& j, const std::string& key,
                              const std::string& path,
                              const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw UsageError("config: " + path + ": expected a string");
  return j.at(key).get<std::string>();
}

inline FrequencyBand band_from_json(const nlohmann::json& v,
                                    const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v.at(0).is_number() ||
      !v.at(1).is_number())
    throw UsageError("config: " + path + ": expected [lo_hz, hi_hz]");
  FrequencyBand b{v.at(0).get<double>(), v.at(1).get<double>()};
  if (!(b.lo > 0.0) || !(b.lo < b.hi))
    throw UsageError("config: " + path + ": need 0 < lo < hi");
  return b;
}

inline RangeConfig range_from_json(const nlohmann::json& v,
                                   const std::string& path) {
  RangeConfig r;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw UsageError("config: " + path + ": expected numbers");
      r.values.push_back(e.get<double>());
    }
    if (r.values.empty())
      throw UsageError("config: " + path + ": list must be non-empty");
    return r;
  }
  if (!v.is_object())
    throw UsageError("config: " + path + ": expected a list or {min,max,points}");
  r.min = need_number(v, "min", path + ".min");
  r.max = need_number(v, "max", path + ".max");
  r.points = static_cast<int>(need_number(v, "points", path + ".points"));
  if (v.contains("log")) {
    if (!v.at("log").is_boolean())
      throw UsageError("config: " + path + ".log: expected a boolean");
    r.log_spaced = v.at("log").get<bool>();
  }
  if (!(r.min > 0.0) || r.max < r.min || r.points < 1)
    throw UsageError("config: " + path + ": need 0 < min <= max, points >= 1");
  return r;
}

inline std::vector<double> range_values(const RangeConfig& r) {
  if (!r.values.empty()) return r.values;
  std::vector<double> out;
  out.reserve(r.points);
  if (r.points == 1) {
    out.push_back(r.min);
    return out;
  }
  for (int i = 0; i < r.points; ++i) {
    const double t = static_cast<double>(i) / (r.points - 1);
    out.push_back(r.log_spaced
                      ? r.min * std::pow(r.max / r.min, t)
                      : r.min + (r.max - r.min) * t);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Config parsing

// Parses and validates a run config. relative paths resolve against
// base_dir (the config file's directory); referenced input files must exist
// now so a long batch cannot die halfway on a typo.
inline RunConfig parse_run_config(const std::string& text,
                                  const std::string& base_dir,
                                  Command command) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config: top level must be an object");

  RunConfig cfg;
  cfg.command = command;
  cfg.base_dir = base_dir;
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    cfg.config_hash = buf;
  }

  if (j.contains("command")) {
    const Command in_file =
        command_from_string(detail::opt_string(j, "command", "command", ""));
    if (in_file != command)
      throw UsageError("config: command: file says '" +
                       std::string(to_string(in_file)) +
                       "' but the invocation asked for '" +
                       std::string(to_string(command)) + "'");
  }

  cfg.materials_path =
      detail::resolve(base_dir, detail::opt_string(j, "materials", "materials", ""));
  if (!cfg.materials_path.empty())
    detail::require_exists(cfg.materials_path, "materials");
  cfg.output_dir =
      detail::resolve(base_dir, detail::opt_string(j, "output_dir", "output_dir", "out"));
  cfg.workers = static_cast<int>(detail::opt_number(j, "workers", "workers", 1));
  if (cfg.workers < 1)
    throw UsageError("config: workers: must be >= 1");

  if (j.contains("bands")) {
    const auto& b = j.at("bands");
    if (b.contains("rayleigh"))
      cfg.bands.rayleigh = detail::band_from_json(b.at("rayleigh"), "bands.rayleigh");
    if (b.contains("sezawa"))
      cfg.bands.sezawa = detail::band_from_json(b.at("sezawa"), "bands.sezawa");
  }
  const FrequencyBand& br = cfg.bands.rayleigh;
  const FrequencyBand& bs = cfg.bands.sezawa;
  if (!(br.hi <= bs.lo || bs.hi <= br.lo))
    throw UsageError("config: bands: rayleigh and sezawa ranges overlap");

  if (j.contains("exclude")) {
    if (!j.at("exclude").is_array())
      throw UsageError("config: exclude: expected a list of device ids");
    for (const auto& e : j.at("exclude")) {
      if (!e.is_string())
        throw UsageError("config: exclude: expected strings");
      cfg.exclude.push_back(e.get<std::string>());
    }
  }

  if (j.contains("fit_bands_hz")) {
    if (!j.at("fit_bands_hz").is_array())
      throw UsageError("config: fit_bands_hz: expected a list of [lo, hi]");
    int i = 0;
    for (const auto& e : j.at("fit_bands_hz"))
      cfg.fit_bands.push_back(detail::band_from_json(
          e, "fit_bands_hz[" + std::to_string(i++) + "]"));
  }

  const bool needs_stack = command == Command::dispersion ||
                           command == Command::spinmap;
  if (needs_stack && !j.contains("stack") && command == Command::dispersion)
    throw UsageError("config: stack: missing required field");
  if (j.contains("stack")) {
    const auto& s = j.at("stack");
    cfg.stack.film = detail::opt_string(s, "film", "stack.film", "alscn42");
    cfg.stack.substrate =
        detail::opt_string(s, "substrate", "stack.substrate", "sic_4h");
    cfg.stack.film_thickness =
        detail::need_number(s, "film_thickness_m", "stack.film_thickness_m");
    cfg.stack.wavelength =
        detail::need_number(s, "wavelength_m", "stack.wavelength_m");
    if (!(cfg.stack.film_thickness > 0.0))
      throw UsageError("config: stack.film_thickness_m: must be > 0");
    if (!(cfg.stack.wavelength > 0.0))
      throw UsageError("config: stack.wavelength_m: must be > 0");
    if (s.contains("window")) {
      const auto& w = s.at("window");
      cfg.stack.window.v_min = detail::need_number(w, "v_min", "stack.window.v_min");
      cfg.stack.window.v_max = detail::need_number(w, "v_max", "stack.window.v_max");
      cfg.stack.window.grid_points = static_cast<int>(
          detail::opt_number(w, "grid_points", "stack.window.grid_points", 400));
      if (!(cfg.stack.window.v_min > 0.0) ||
          !(cfg.stack.window.v_min < cfg.stack.window.v_max) ||
          cfg.stack.window.grid_points < 3)
        throw UsageError("config: stack.window: need 0 < v_min < v_max and grid_points >= 3");
    }
    if (s.contains("h_over_lambda")) {
      if (!s.at("h_over_lambda").is_array())
        throw UsageError("config: stack.h_over_lambda: expected a list");
      for (const auto& e : s.at("h_over_lambda")) {
        if (!e.is_number() || !(e.get<double>() > 0.0))
          throw UsageError("config: stack.h_over_lambda: entries must be > 0");
        cfg.stack.h_over_lambda.push_back(e.get<double>());
      }
    }
  }

  if (command == Command::idt) {
    const auto& d = detail::need(j, "idt", "idt");
    cfg.idt.pairs = static_cast<int>(detail::need_number(d, "pairs", "idt.pairs"));
    cfg.idt.aperture = detail::need_number(d, "aperture_m", "idt.aperture_m");
    cfg.idt.pitch = detail::need_number(d, "pitch_m", "idt.pitch_m");
    cfg.idt.cs = detail::opt_number(d, "cs_f_per_m", "idt.cs_f_per_m", 0.0);
    cfg.idt.mode.velocity =
        detail::need_number(d, "velocity_mps", "idt.velocity_mps");
    cfg.idt.mode.k2 = detail::need_number(d, "k2", "idt.k2");
    if (cfg.idt.pairs < 1) throw UsageError("config: idt.pairs: must be >= 1");
    if (!(cfg.idt.mode.k2 > 0.0 && cfg.idt.mode.k2 < 1.0))
      throw UsageError("config: idt.k2: must be in (0, 1)");
    if (d.contains("grid")) {
      const auto& g = d.at("grid");
      cfg.idt.grid.lo = detail::need_number(g, "lo_hz", "idt.grid.lo_hz");
      cfg.idt.grid.hi = detail::need_number(g, "hi_hz", "idt.grid.hi_hz");
      cfg.idt.grid.points = static_cast<int>(
          detail::opt_number(g, "points", "idt.grid.points", 2001));
      if (!(cfg.idt.grid.lo > 0.0) || !(cfg.idt.grid.lo < cfg.idt.grid.hi) ||
          cfg.idt.grid.points < 2)
        throw UsageError("config: idt.grid: need 0 < lo_hz < hi_hz, points >= 2");
    }
    if (d.contains("match")) {
      const auto& m = d.at("match");
      cfg.idt.match.requested = true;
      cfg.idt.match.z0 = detail::opt_number(m, "z0_ohm", "idt.match.z0_ohm", 50.0);
      cfg.idt.match.bounds.pairs_min = static_cast<int>(
          detail::need_number(m, "pairs_min", "idt.match.pairs_min"));
      cfg.idt.match.bounds.pairs_max = static_cast<int>(
          detail::need_number(m, "pairs_max", "idt.match.pairs_max"));
      cfg.idt.match.bounds.aperture_min =
          detail::need_number(m, "aperture_min_m", "idt.match.aperture_min_m");
      cfg.idt.match.bounds.aperture_max =
          detail::need_number(m, "aperture_max_m", "idt.match.aperture_max_m");
      cfg.idt.match.bounds.aperture_steps = static_cast<int>(detail::opt_number(
          m, "aperture_steps", "idt.match.aperture_steps", 61));
    }
  }

  if (command == Command::analyze || command == Command::lossfit) {
    cfg.manifest_path = detail::resolve(
        base_dir, detail::opt_string(j, "manifest", "manifest", ""));
    if (cfg.manifest_path.empty())
      throw UsageError("config: manifest: missing required field");
    detail::require_exists(cfg.manifest_path, "manifest");
  }

  if (command == Command::ae) {
    const auto& a = detail::need(j, "ae", "ae");
    cfg.ae.film = detail::opt_string(a, "film", "ae.film", "alscn42");
    cfg.ae.device.carrier_density =
        detail::need_number(a, "carrier_density_per_m3", "ae.carrier_density_per_m3");
    cfg.ae.device.mobility =
        detail::need_number(a, "mobility_m2_per_vs", "ae.mobility_m2_per_vs");
    cfg.ae.device.width =
        detail::need_number(a, "slab_width_m", "ae.slab_width_m");
    cfg.ae.device.thickness =
        detail::need_number(a, "thickness_m", "ae.thickness_m");
    cfg.ae.device.length = detail::need_number(a, "length_m", "ae.length_m");
    cfg.ae.device.acoustic_velocity =
        detail::need_number(a, "acoustic_velocity_mps", "ae.acoustic_velocity_mps");
    cfg.ae.device.permittivity_sum = detail::opt_number(
        a, "permittivity_sum_f_per_m", "ae.permittivity_sum_f_per_m", 0.0);
    cfg.ae.waveguide_width =
        detail::need_number(a, "waveguide_width_m", "ae.waveguide_width_m");
    cfg.ae.excess_loss_db =
        detail::opt_number(a, "excess_loss_db", "ae.excess_loss_db", 0.0);
    cfg.ae.drive_power =
        detail::opt_number(a, "drive_power_w", "ae.drive_power_w", 0.0);
    if (!(cfg.ae.waveguide_width > 0.0))
      throw UsageError("config: ae.waveguide_width_m: must be > 0");
    if (a.contains("width_range_m"))
      cfg.ae.width_range =
          detail::range_from_json(a.at("width_range_m"), "ae.width_range_m");
    else
      cfg.ae.width_range = RangeConfig{{}, 5e-6, 150e-6, 30, false};
    if (a.contains("mobility_range_m2_per_vs"))
      cfg.ae.mobility_range = detail::range_from_json(
          a.at("mobility_range_m2_per_vs"), "ae.mobility_range_m2_per_vs");
    else
      cfg.ae.mobility_range = RangeConfig{{}, 1e-3, 1.0, 25, true};
  }

  if (command == Command::spinmap) {
    const auto& s = detail::need(j, "spin", "spin");
    cfg.spin.g_tensor_path = detail::resolve(
        base_dir, detail::opt_string(s, "g_tensor", "spin.g_tensor", ""));
    if (cfg.spin.g_tensor_path.empty())
      throw UsageError("config: spin.g_tensor: missing required field");
    detail::require_exists(cfg.spin.g_tensor_path, "spin.g_tensor");
    cfg.spin.strain_grid_csv = detail::resolve(
        base_dir,
        detail::opt_string(s, "strain_grid_csv", "spin.strain_grid_csv", ""));
    if (!cfg.spin.strain_grid_csv.empty())
      detail::require_exists(cfg.spin.strain_grid_csv, "spin.strain_grid_csv");
    cfg.spin.substrate_top = detail::opt_number(
        s, "substrate_top_m", "spin.substrate_top_m", 0.0);
    if (cfg.spin.strain_grid_csv.empty() && !j.contains("stack"))
      throw UsageError(
          "config: spinmap needs either spin.strain_grid_csv or a stack");
  }

  return cfg;
}

// ---------------------------------------------------------------------------
// Command implementations

namespace detail {

inline const std::vector<MaterialTensors>& materials_for(
    const RunConfig& cfg, std::vector<MaterialTensors>& storage) {
  if (cfg.materials_path.empty()) return default_materials();
  storage = load_materials(cfg.materials_path);
  return storage;
}

inline LayerStack build_stack(const RunConfig& cfg,
                              const std::vector<MaterialTensors>& db,
                              double thickness) {
  LayerStack st;
  st.layers.push_back({lookup_material(db, cfg.stack.film), thickness});
  st.substrate = lookup_material(db, cfg.stack.substrate);
  return st;
}

inline SearchWindow window_for(const RunConfig& cfg, const LayerStack& stack) {
  if (cfg.stack.window.v_max > 0.0) return cfg.stack.window;
  return default_window(stack);
}

inline nlohmann::ordered_json report_header(const RunConfig& cfg) {
  nlohmann::ordered_json r;
  r["tool_version"] = kToolVersion;
  r["config_hash"] = cfg.config_hash;
  r["command"] = to_string(cfg.command);
  return r;
}

inline void write_report(const RunConfig& cfg, nlohmann::ordered_json& report,
                         const std::vector<std::string>& artifacts) {
  report["artifacts"] = artifacts;
  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "report.json").string(),
      report.dump(2) + "\n");

  // Wall-clock context lives apart from the deterministic payload.
  nlohmann::ordered_json meta;
  meta["tool_version"] = kToolVersion;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  meta["started_utc"] = stamp;
  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "run_meta.json").string(),
      meta.dump(2) + "\n");
}

// --- dispersion

inline int run_dispersion_sweep(const RunConfig& cfg,
                                const std::vector<MaterialTensors>& db) {
  const double lambda = cfg.stack.wavelength;
  const LayerStack tmpl = build_stack(cfg, db, cfg.stack.film_thickness);
  const std::vector<double>& ratios = cfg.stack.h_over_lambda;

  const auto per_ratio = parallel_map<std::vector<SweepRow>>(
      ratios.size(), cfg.workers, [&](std::size_t i) {
        LayerStack st = tmpl;
        st.layers[0].thickness = ratios[i] * lambda;
        return sweep_point(tmpl, lambda, ratios[i], window_for(cfg, st));
      });

  std::string csv =
      "h_over_lambda,label,phase_velocity_mps,frequency_hz,k2,status\n";
  nlohmann::ordered_json report = report_header(cfg);
  nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
  std::size_t produced = 0;
  for (const auto& rows : per_ratio)
    for (const SweepRow& row : rows) {
      csv += num(row.h_over_lambda) + "," + saw::to_string(row.label) + "," +
             num(row.velocity) + "," + num(row.velocity / lambda) + "," +
             (std::isfinite(row.k2) ? num(row.k2) : std::string()) + "," +
             row.status + "\n";
      nlohmann::ordered_json jr;
      jr["h_over_lambda"] = row.h_over_lambda;
      jr["label"] = saw::to_string(row.label);
      jr["phase_velocity_mps"] = row.velocity;
      if (std::isfinite(row.k2))
        jr["k2"] = row.k2;
      else
        jr["k2"] = nullptr;
      jr["status"] = row.status;
      jrows.push_back(jr);
      if (row.velocity > 0.0) ++produced;
    }
  report["rows"] = jrows;

  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "sweep.csv").string(), csv);
  write_report(cfg, report, {"sweep.csv"});
  if (produced == 0) {
    log_info("dispersion: sweep produced no modes");
    return 3;
  }
  log_info("dispersion: wrote " + std::to_string(produced) + " sweep rows");
  return 0;
}

inline int run_dispersion(const RunConfig& cfg) {
  std::vector<MaterialTensors> storage;
  const auto& db = materials_for(cfg, storage);
  if (!cfg.stack.h_over_lambda.empty()) return run_dispersion_sweep(cfg, db);

  const double lambda = cfg.stack.wavelength;
  const LayerStack st = build_stack(cfg, db, cfg.stack.film_thickness);
  const SearchWindow win = window_for(cfg, st);
  const auto modes = solve_modes(st, lambda, win);

  std::string csv =
      "mode_index,label,phase_velocity_mps,frequency_hz,k2\n";
  nlohmann::ordered_json report = report_header(cfg);
  nlohmann::ordered_json jmodes = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double k2 =
        coupling_coefficient(st, lambda, static_cast<int>(m), win);
    csv += std::to_string(m) + "," + saw::to_string(modes[m].label) + "," +
           num(modes[m].phase_velocity) + "," + num(modes[m].frequency) +
           "," + num(k2) + "\n";
    nlohmann::ordered_json jm;
    jm["mode_index"] = m;
    jm["label"] = saw::to_string(modes[m].label);
    jm["phase_velocity_mps"] = modes[m].phase_velocity;
    jm["frequency_hz"] = modes[m].frequency;
    jm["k2"] = k2;
    jmodes.push_back(jm);
  }
  report["modes"] = jmodes;

  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "modes.csv").string(), csv);
  write_report(cfg, report, {"modes.csv"});
  if (modes.empty()) {
    log_info("dispersion: no modes found");
    return 3;
  }
  log_info("dispersion: wrote " + std::to_string(modes.size()) + " modes");
  return 0;
}

// --- idt

inline int run_idt(const RunConfig& cfg) {
  IdtDesign d;
  d.pairs = cfg.idt.pairs;
  d.aperture = cfg.idt.aperture;
  d.pitch = cfg.idt.pitch;
  d.static_capacitance_per_pair_per_length =
      cfg.idt.cs > 0.0 ? cfg.idt.cs : default_cs_alscn_sic();
  d.mode = cfg.idt.mode;

  const double f0 = d.center_frequency();
  double lo = cfg.idt.grid.lo, hi = cfg.idt.grid.hi;
  if (!(lo > 0.0)) {
    lo = std::max(f0 * (1.0 - 4.0 / d.pairs), 0.02 * f0);
    hi = f0 * (1.0 + 4.0 / d.pairs);
  }
  std::vector<double> grid(cfg.idt.grid.points);
  for (int i = 0; i < cfg.idt.grid.points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                       (cfg.idt.grid.points - 1);

  const AdmittanceSpectrum y = synthesize_admittance(d, grid);
  std::string csv = "frequency_hz,conductance_s,susceptance_s\n";
  for (std::size_t i = 0; i < y.frequency_grid.size(); ++i)
    csv += num(y.frequency_grid[i]) + "," + num(y.conductance[i]) + "," +
           num(y.susceptance[i]) + "\n";

  nlohmann::ordered_json report = report_header(cfg);
  report["center_frequency_hz"] = f0;
  report["static_capacitance_f"] = d.static_capacitance();
  report["cs_f_per_m"] = d.static_capacitance_per_pair_per_length;
  report["peak_conductance_s"] =
      *std::max_element(y.conductance.begin(), y.conductance.end());
  if (cfg.idt.match.requested) {
    const MatchResult m = match_design(cfg.idt.match.z0, d.mode,
                                       d.static_capacitance_per_pair_per_length,
                                       d.wavelength(), cfg.idt.match.bounds);
    nlohmann::ordered_json jm;
    jm["pairs"] = m.design.pairs;
    jm["aperture_m"] = m.design.aperture;
    jm["residual_ohm"] = m.residual;
    jm["status"] = m.status;
    report["match"] = jm;
  }

  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "admittance.csv").string(), csv);
  write_report(cfg, report, {"admittance.csv"});
  log_info("idt: wrote admittance over " +
           std::to_string(y.frequency_grid.size()) + " points");
  return 0;
}

// --- analyze / lossfit shared plumbing

struct BandK2 {
  bool attempted = false;
  bool ok = false;
  std::string error;
  K2Estimate estimate;
};

struct DeviceOutcome {
  ManifestEntry entry;
  bool excluded = false;
  bool ok = false;
  std::string error;
  TwoPortSweep sweep;  // valid when ok
  ParasiticFit fit;    // analyze only
  BandK2 rayleigh, sezawa;
};

// Off-resonance windows for the parasitic fit when the config gives none:
// everything on the grid except a guard margin around both mode bands.
inline std::vector<FrequencyBand> derive_fit_bands(
    const TwoPortSweep& sweep, const BandConfig& bands) {
  const double glo = sweep.frequency_grid.front();
  const double ghi = sweep.frequency_grid.back();
  const double guard = 0.03;
  const FrequencyBand lo_band = bands.rayleigh.lo < bands.sezawa.lo
                                    ? bands.rayleigh
                                    : bands.sezawa;
  const FrequencyBand hi_band = bands.rayleigh.lo < bands.sezawa.lo
                                    ? bands.sezawa
                                    : bands.rayleigh;
  const std::vector<FrequencyBand> candidates = {
      {glo, lo_band.lo * (1.0 - guard)},
      {lo_band.hi * (1.0 + guard), hi_band.lo * (1.0 - guard)},
      {hi_band.hi * (1.0 + guard), ghi}};
  std::vector<FrequencyBand> out;
  for (const FrequencyBand& b : candidates) {
    if (!(b.lo < b.hi)) continue;
    std::size_t count = 0;
    for (double f : sweep.frequency_grid)
      if (f >= b.lo && f <= b.hi) ++count;
    if (count >= 8) out.push_back(b);
  }
  if (out.empty())
    throw DomainError("no off-resonance grid points for the parasitic fit");
  return out;
}

inline BandK2 extract_band_k2(const AdmittanceSpectrum& spectrum,
                              const FrequencyBand& band, double ct_stderr) {
  BandK2 out;
  std::size_t count = 0;
  for (double f : spectrum.frequency_grid)
    if (f >= band.lo && f <= band.hi) ++count;
  if (count < 3) return out;  // band outside this sweep's grid; skip quietly
  out.attempted = true;
  try {
    out.estimate = extract_k2(spectrum, band, ct_stderr);
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

inline DeviceOutcome process_device(const RunConfig& cfg,
                                    const ManifestEntry& entry,
                                    const std::string& manifest_dir,
                                    bool want_k2) {
  DeviceOutcome out;
  out.entry = entry;
  try {
    const std::string path = resolve(manifest_dir, entry.file);
    out.sweep = parse_touchstone(read_text_file(path));
    out.sweep.metadata = entry.metadata;
    if (want_k2) {
      const std::vector<FrequencyBand> fit_bands =
          cfg.fit_bands.empty() ? derive_fit_bands(out.sweep, cfg.bands)
                                : cfg.fit_bands;
      out.fit = fit_parasitics(out.sweep, fit_bands);
      const AdmittanceSpectrum y = deembed(out.sweep, out.fit.model);
      out.rayleigh = extract_band_k2(y, cfg.bands.rayleigh, out.fit.ct_stderr);
      out.sezawa = extract_band_k2(y, cfg.bands.sezawa, out.fit.ct_stderr);
    }
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

inline std::vector<DeviceOutcome> process_manifest(const RunConfig& cfg,
                                                   bool want_k2) {
  const std::string manifest_dir =
      std::filesystem::path(cfg.manifest_path).parent_path().string();
  std::vector<ManifestEntry> entries =
      parse_manifest(read_text_file(cfg.manifest_path));
  for (ManifestEntry& e : entries)
    for (const std::string& id : cfg.exclude)
      if (e.metadata.device_id == id) e.metadata.excluded = true;

  return parallel_map<DeviceOutcome>(
      entries.size(), cfg.workers, [&](std::size_t i) {
        if (entries[i].metadata.excluded) {
          DeviceOutcome skip;
          skip.entry = entries[i];
          skip.excluded = true;
          return skip;
        }
        return process_device(cfg, entries[i], manifest_dir, want_k2);
      });
}

inline nlohmann::ordered_json loss_fit_json(const LossFitResult& fit) {
  nlohmann::ordered_json j;
  j["alpha_db_per_m"] = fit.alpha;
  j["alpha_db_per_mm"] = fit.alpha * 1e-3;
  j["alpha_stderr_db_per_m"] = fit.alpha_stderr;
  j["intercept_db"] = fit.intercept;
  j["n_points"] = fit.n_points;
  j["exact_fit_caveat"] = fit.exact_fit_caveat;
  return j;
}

inline bool covers_band(const TwoPortSweep& sweep, const FrequencyBand& band) {
  for (double f : sweep.frequency_grid)
    if (f >= band.lo && f <= band.hi) return true;
  return false;
}

// Two-group loss fit over one band. Sweeps whose grid misses the band are
// dropped instead of failing the whole fit.
inline nlohmann::ordered_json band_loss_json(
    const std::vector<TwoPortSweep>& sweeps, const FrequencyBand& band) {
  std::vector<TwoPortSweep> covered;
  for (const TwoPortSweep& s : sweeps)
    if (covers_band(s, band)) covered.push_back(s);
  const auto groups = loss_points(covered, band);
  const LossAnalysis fit = fit_propagation_loss(groups.first, groups.second);
  nlohmann::ordered_json j;
  j["slab"] = loss_fit_json(fit.slab);
  j["waveguide"] = loss_fit_json(fit.waveguide);
  j["taper_loss_2x_db"] = fit.taper.loss_2x;
  j["taper_uncertainty_db"] = fit.taper.uncertainty;
  return j;
}

inline std::string loss_points_csv(const std::vector<TwoPortSweep>& sweeps,
                                   const BandConfig& bands) {
  std::string csv = "band,kind,length_m,peak_db\n";
  const std::pair<const char*, const FrequencyBand*> specs[2] = {
      {"rayleigh", &bands.rayleigh}, {"sezawa", &bands.sezawa}};
  for (const auto& [name, band] : specs) {
    for (const TwoPortSweep& s : sweeps) {
      if (s.metadata.excluded) continue;
      try {
        const BandPeak p = band_peak(s, *band);
        csv += std::string(name) + "," +
               saw::to_string(s.metadata.kind) + "," +
               num(s.metadata.propagation_length) + "," + num(p.value) + "\n";
      } catch (const Error&) {
        // Band off this sweep's grid; the fit below will surface gaps.
      }
    }
  }
  return csv;
}

inline int run_analyze(const RunConfig& cfg, bool want_k2) {
  const auto outcomes = process_manifest(cfg, want_k2);

  nlohmann::ordered_json report = report_header(cfg);
  nlohmann::ordered_json jdevices = nlohmann::ordered_json::array();
  std::vector<TwoPortSweep> good_sweeps;
  std::size_t active = 0, failed = 0;
  std::string csv =
      "device_id,kind,length_m,status,rs_ohm,ls_h,ct_f,ct_stderr_f,"
      "k2_rayleigh,k2_rayleigh_unc,k2_sezawa,k2_sezawa_unc\n";

  auto band_json = [](const BandK2& b) {
    nlohmann::ordered_json j;
    if (!b.attempted) {
      j["status"] = "band outside sweep";
      return j;
    }
    if (!b.ok) {
      j["status"] = "error";
      j["error"] = b.error;
      return j;
    }
    j["status"] = "ok";
    j["k2"] = b.estimate.k2;
    j["uncertainty"] = b.estimate.uncertainty;
    j["center_frequency_hz"] = b.estimate.center_frequency;
    return j;
  };

  for (const DeviceOutcome& d : outcomes) {
    nlohmann::ordered_json jd;
    jd["device_id"] = d.entry.metadata.device_id;
    jd["kind"] = saw::to_string(d.entry.metadata.kind);
    jd["length_m"] = d.entry.metadata.propagation_length;
    jd["file"] = d.entry.file;
    if (d.excluded) {
      jd["status"] = "excluded";
      jdevices.push_back(jd);
      csv += d.entry.metadata.device_id + "," +
             saw::to_string(d.entry.metadata.kind) + "," +
             num(d.entry.metadata.propagation_length) + ",excluded,,,,,,,,\n";
      continue;
    }
    ++active;
    if (!d.ok) {
      ++failed;
      jd["status"] = "error";
      jd["error"] = d.error;
      jdevices.push_back(jd);
      csv += d.entry.metadata.device_id + "," +
             saw::to_string(d.entry.metadata.kind) + "," +
             num(d.entry.metadata.propagation_length) + ",error,,,,,,,,\n";
      continue;
    }
    jd["status"] = "ok";
    std::string rs, ls, ct, ctse, k2r, k2ru, k2s, k2su;
    if (want_k2) {
      nlohmann::ordered_json jp;
      jp["series_resistance_ohm"] = d.fit.model.series_resistance;
      jp["series_inductance_h"] = d.fit.model.series_inductance;
      jp["static_capacitance_f"] = d.fit.model.static_capacitance;
      jp["ct_stderr_f"] = d.fit.ct_stderr;
      jp["band_suspect"] = d.fit.band_suspect;
      jd["parasitics"] = jp;
      jd["k2_rayleigh"] = band_json(d.rayleigh);
      jd["k2_sezawa"] = band_json(d.sezawa);
      rs = num(d.fit.model.series_resistance);
      ls = num(d.fit.model.series_inductance);
      ct = num(d.fit.model.static_capacitance);
      ctse = num(d.fit.ct_stderr);
      if (d.rayleigh.ok) {
        k2r = num(d.rayleigh.estimate.k2);
        k2ru = num(d.rayleigh.estimate.uncertainty);
      }
      if (d.sezawa.ok) {
        k2s = num(d.sezawa.estimate.k2);
        k2su = num(d.sezawa.estimate.uncertainty);
      }
    }
    jdevices.push_back(jd);
    good_sweeps.push_back(d.sweep);
    csv += d.entry.metadata.device_id + "," +
           saw::to_string(d.entry.metadata.kind) + "," +
           num(d.entry.metadata.propagation_length) + ",ok," + rs + "," + ls +
           "," + ct + "," + ctse + "," + k2r + "," + k2ru + "," + k2s + "," +
           k2su + "\n";
  }
  report["devices"] = jdevices;
  report["device_failures"] = failed;

  nlohmann::ordered_json jloss;
  const std::pair<const char*, const FrequencyBand*> specs[2] = {
      {"rayleigh", &cfg.bands.rayleigh}, {"sezawa", &cfg.bands.sezawa}};
  for (const auto& [name, band] : specs) {
    try {
      jloss[name] = band_loss_json(good_sweeps, *band);
    } catch (const Error& e) {
      nlohmann::ordered_json j;
      j["error"] = e.what();
      jloss[name] = j;
    }
  }
  report["loss_fit"] = jloss;

  std::vector<std::string> artifacts = {"devices.csv", "loss_points.csv"};
  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "devices.csv").string(), csv);
  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "loss_points.csv").string(),
      loss_points_csv(good_sweeps, cfg.bands));
  write_report(cfg, report, artifacts);

  if (active == 0) {
    log_info("analyze: no devices after exclusions");
    return 3;
  }
  if (failed == active) {
    log_info("analyze: every device failed");
    return 3;
  }
  log_info("analyze: " + std::to_string(active - failed) + "/" +
           std::to_string(active) + " devices processed");
  return 0;
}

// --- ae

inline int run_ae(const RunConfig& cfg) {
  std::vector<MaterialTensors> storage;
  const auto& db = materials_for(cfg, storage);

  AeDeviceParams slab = cfg.ae.device;
  if (!(slab.permittivity_sum > 0.0))
    slab.permittivity_sum =
        default_permittivity_sum(lookup_material(db, cfg.ae.film));
  AeDeviceParams wg = slab;
  wg.width = cfg.ae.waveguide_width;

  const std::vector<double> widths = range_values(cfg.ae.width_range);
  const std::vector<double> mobilities = range_values(cfg.ae.mobility_range);
  const AePowerGrid grid = pdc_map(slab, widths, mobilities);

  std::string csv = "width_m,mobility_m2_per_vs,pdc_w\n";
  for (std::size_t i = 0; i < mobilities.size(); ++i)
    for (std::size_t j = 0; j < widths.size(); ++j)
      csv += num(widths[j]) + "," + num(mobilities[i]) + "," +
             num(grid.power[i][j]) + "\n";

  nlohmann::ordered_json report = report_header(cfg);
  report["pdc_slab_w"] = pdc_max(slab);
  report["pdc_waveguide_w"] = pdc_max(wg);
  report["reduction_bare"] = pdc_reduction(slab, wg);
  report["reduction_loss_adjusted"] = pdc_reduction_loss_adjusted(
      slab, wg, cfg.ae.excess_loss_db, cfg.ae.drive_power);
  report["excess_loss_db"] = cfg.ae.excess_loss_db;
  report["drive_power_w"] = cfg.ae.drive_power;
  report["optimal_mobility_m2_per_vs"] = optimal_mobility(slab);
  report["mixing_enhancement"] =
      mixing_enhancement(slab.width, cfg.ae.waveguide_width);
  report["permittivity_sum_f_per_m"] = slab.permittivity_sum;

  write_text_file(
      (std::filesystem::path(cfg.output_dir) / "pdc_map.csv").string(), csv);
  write_report(cfg, report, {"pdc_map.csv"});
  log_info("ae: wrote " + std::to_string(widths.size() * mobilities.size()) +
           " grid cells");
  return 0;
}

// --- spinmap

inline nlohmann::ordered_json peak_json(const PeakCoupling& p) {
  nlohmann::ordered_json j;
  j["value_hz"] = p.value;
  j["x_m"] = p.x;
  j["depth_m"] = p.depth;
  return j;
}

inline int run_spinmap(const RunConfig& cfg) {
  const SpinStrainTensor g = load_spin_tensor(cfg.spin.g_tensor_path);
  nlohmann::ordered_json report = report_header(cfg);
  report["g_source"] = g.source;
  std::vector<std::string> artifacts;

  if (!cfg.spin.strain_grid_csv.empty()) {
    const StrainGrid grid = load_strain_grid(cfg.spin.strain_grid_csv);
    const SpinCouplingMap map =
        coupling_map(grid, g, cfg.spin.substrate_top);
    write_text_file(
        (std::filesystem::path(cfg.output_dir) / "map_imported.csv").string(),
        serialize_coupling_map_csv(map));
    artifacts.push_back("map_imported.csv");
    report["peak_omega1"] = peak_json(map.peak_omega1);
    report["peak_omega2"] = peak_json(map.peak_omega2);
    report["points"] = map.x.size();
    write_report(cfg, report, artifacts);
    log_info("spinmap: imported grid, " + std::to_string(map.x.size()) +
             " points");
    return 0;
  }

  std::vector<MaterialTensors> storage;
  const auto& db = materials_for(cfg, storage);
  const LayerStack stack = build_stack(cfg, db, cfg.stack.film_thickness);
  const SearchWindow win = window_for(cfg, stack);
  const auto modes = solve_modes(stack, cfg.stack.wavelength, win);
  if (modes.empty()) {
    report["modes"] = nlohmann::ordered_json::array();
    write_report(cfg, report, artifacts);
    log_info("spinmap: no modes found");
    return 3;
  }

  const double top = stack.total_thickness();
  nlohmann::ordered_json jmodes = nlohmann::ordered_json::array();
  double rayleigh_peak = -1.0, sezawa_peak = -1.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const SpinCouplingMap map = coupling_map(modes[m].fields, g, top);
    const std::string name = "map_" + std::to_string(m) + "_" +
                             saw::to_string(modes[m].label) + ".csv";
    write_text_file((std::filesystem::path(cfg.output_dir) / name).string(),
                    serialize_coupling_map_csv(map));
    artifacts.push_back(name);
    nlohmann::ordered_json jm;
    jm["mode_index"] = m;
    jm["label"] = saw::to_string(modes[m].label);
    jm["phase_velocity_mps"] = modes[m].phase_velocity;
    jm["peak_omega1"] = peak_json(map.peak_omega1);
    jm["peak_omega2"] = peak_json(map.peak_omega2);
    jmodes.push_back(jm);
    if (modes[m].label == ModeLabel::rayleigh_like && rayleigh_peak < 0.0)
      rayleigh_peak = map.peak_omega1.value;
    if (modes[m].label == ModeLabel::sezawa_like && sezawa_peak < 0.0)
      sezawa_peak = map.peak_omega1.value;
  }
  report["modes"] = jmodes;
  if (rayleigh_peak > 0.0 && sezawa_peak > 0.0)
    report["sezawa_over_rayleigh_omega1"] = sezawa_peak / rayleigh_peak;
  write_report(cfg, report, artifacts);
  log_info("spinmap: mapped " + std::to_string(modes.size()) + " modes");
  return 0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry point

// Executes the configured command, writing artifacts under
// config.output_dir. Partial per-device failures are recorded in the report;
// the exit status is nonzero only when nothing useful was produced.
inline int run(const RunConfig& cfg) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec)
      throw Error("cannot create output directory '" + cfg.output_dir +
                  "': " + ec.message());
    switch (cfg.command) {
      case Command::dispersion: return detail::run_dispersion(cfg);
      case Command::idt: return detail::run_idt(cfg);
      case Command::analyze: return detail::run_analyze(cfg, true);
      case Command::lossfit: return detail::run_analyze(cfg, false);
      case Command::ae: return detail::run_ae(cfg);
      case Command::spinmap: return detail::run_spinmap(cfg);
    }
    return 3;
  } catch (const UsageError& e) {
    log_info(std::string("usage error: ") + e.what());
    return 2;
  } catch (const SolverError& e) {
    log_info(std::string("numerical failure: ") + e.what());
    return 4;
  } catch (const Error& e) {
    log_info(std::string("data error: ") + e.what());
    return 3;
  }
}

// Command-line flags that take precedence over the config file.
struct Overrides {
  std::string output_dir;
  std::string materials_path;
  int workers = 0;  // 0 = keep config value
};

// Convenience wrapper for the binary: load config file, parse, apply
// overrides, run.
inline int run_config_file(const std::string& config_path, Command command,
                           const Overrides& overrides = {}) {
  std::string text;
  try {
    text = detail::read_text_file(config_path);
  } catch (const Error& e) {
    log_info(std::string("usage error: ") + e.what());
    return 2;
  }
  RunConfig cfg;
  try {
    cfg = parse_run_config(
        text, std::filesystem::path(config_path).parent_path().string(),
        command);
    if (!overrides.output_dir.empty()) cfg.output_dir = overrides.output_dir;
    if (!overrides.materials_path.empty()) {
      detail::require_exists(overrides.materials_path, "materials");
      cfg.materials_path = overrides.materials_path;
    }
    if (overrides.workers > 0) cfg.workers = overrides.workers;
  } catch (const UsageError& e) {
    log_info(std::string("usage error: ") + e.what());
    return 2;
  }
  return run(cfg);
}

}  // namespace saw::cli
