// Acceptance gate: ten end-to-end checks with hard numeric tolerances.
// Prints one PASS/FAIL line per check; the exit status is the number of
// failures. Independent oracles (Rayleigh equation, golden-section search,
// index-sum tensor contraction) are reimplemented here so nothing is
// compared against its own algebra.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saw/ae.hpp"
#include "saw/dispersion.hpp"
#include "saw/idt.hpp"
#include "saw/materials_db.hpp"
#include "saw/rfdata.hpp"
#include "saw/spin.hpp"

using namespace saw;
namespace fs = std::filesystem;

namespace {

struct Gate {
  std::string errors;  // empty = pass
  std::string detail;  // shown on the pass line
  void check(bool ok, const std::string& why) {
    if (!ok) errors += (errors.empty() ? "" : "; ") + why;
  }
  void note(const std::string& d) { detail = d; }
};

std::string num(double v, const char* f = "%.4g") {
  char b[64];
  std::snprintf(b, sizeof(b), f, v);
  return std::string(b);
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

LayerStack reference_stack(double h) {
  LayerStack st;
  st.layers.push_back({lookup_material("alscn42"), h});
  st.substrate = lookup_material("sic_4h");
  return st;
}

const SearchWindow kWindow{3300.0, 7030.0, 320};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Classical Rayleigh equation for an isotropic half-space, bisection on
// (2 - x^2)^2 = 4 sqrt(1-x^2) sqrt(1 - x^2 vs^2/vp^2), x = v/vs.
double rayleigh_oracle(double vs, double vp) {
  auto f = [&](double x) {
    const double a = 2.0 - x * x;
    return a * a - 4.0 * std::sqrt(1.0 - x * x) *
                       std::sqrt(1.0 - x * x * vs * vs / (vp * vp));
  };
  double lo = 0.5, hi = 0.999999;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) * f(mid) <= 0.0) ? hi : lo) = mid;
  }
  return vs * 0.5 * (lo + hi);
}

template <typename F>
double golden_min(F f, double lo, double hi, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

IdtDesign make_design(double velocity, double k2, int pairs = 20,
                      double aperture = 100e-6) {
  IdtDesign d;
  d.pairs = pairs;
  d.aperture = aperture;
  d.pitch = 0.8e-6;
  d.static_capacitance_per_pair_per_length = default_cs_alscn_sic();
  d.mode = {velocity, k2};
  return d;
}

TwoPortSweep embed_admittance(const AdmittanceSpectrum& sp,
                              const ParasiticModel& p, double z0 = 50.0) {
  TwoPortSweep sw;
  sw.frequency_grid = sp.frequency_grid;
  sw.reference_impedance = z0;
  sw.ports = 1;
  for (std::size_t i = 0; i < sp.frequency_grid.size(); ++i) {
    const double w = 2.0 * M_PI * sp.frequency_grid[i];
    const Complex y(sp.conductance[i], sp.susceptance[i]);
    const Complex z = 1.0 / y + p.series_resistance +
                      Complex(0.0, w * p.series_inductance);
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = (z - z0) / (z + z0);
    sw.s_matrix.push_back(s);
  }
  return sw;
}

AeDeviceParams slab_params() {
  AeDeviceParams p;
  p.carrier_density = 5e21;
  p.mobility = 0.1;
  p.width = 120e-6;
  p.thickness = 50e-9;
  p.length = 800e-6;
  p.acoustic_velocity = 6270.0;
  p.permittivity_sum = default_permittivity_sum(lookup_material("alscn42"));
  return p;
}

// --- synthetic measured corpus for the determinism check (one IDT
// responding in both mode bands, S21 loss lines by kind and length)

std::string fixture_touchstone(DeviceKind kind, double length) {
  const IdtDesign dr = make_design(4545.4, 0.0076, 40, 80e-6);
  const IdtDesign ds = make_design(6270.1, 0.0608, 40, 80e-6);
  const std::vector<double> grid = linspace(2.0e9, 4.6e9, 1301);
  const AdmittanceSpectrum yr = synthesize_admittance(dr, grid);
  const AdmittanceSpectrum ys = synthesize_admittance(ds, grid);
  const double ct = dr.static_capacitance();

  auto s21_db = [&](double f) {
    auto bump = [&](double f0, double il_slab, double a_slab, double il_wg,
                    double a_wg) {
      const double pk = kind == DeviceKind::slab ? il_slab - a_slab * length
                                                 : il_wg - a_wg * length;
      const double df = (f - f0) / 30e6;
      return pk - df * df;
    };
    return std::max({-80.0,
                     bump(4545.4 / 1.6e-6, -15.0, 2000.0, -30.0, 9000.0),
                     bump(6270.1 / 1.6e-6, -20.0, 5300.0, -39.8, 10700.0)});
  };

  TwoPortSweep sw;
  sw.frequency_grid = grid;
  sw.ports = 2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = 2.0 * M_PI * grid[i];
    const double g = yr.conductance[i] + ys.conductance[i];
    const double b = yr.susceptance[i] + ys.susceptance[i] - w * ct;
    const Complex z = 1.0 / Complex(g, b) + 3.0 + Complex(0.0, w * 0.4e-9);
    const Complex s11 = (z - 50.0) / (z + 50.0);
    const double s21 = std::pow(10.0, s21_db(grid[i]) / 20.0);
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = s11;
    s(1, 0) = s21;
    s(0, 1) = s21;
    sw.s_matrix.push_back(s);
  }
  return serialize_touchstone(sw, TouchstoneFormat::ri);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Two trapped modes, velocities in band, bounded solve time.

void criterion_1(Gate& g) {
  const LayerStack st = reference_stack(1.0e-6);
  const auto t0 = std::chrono::steady_clock::now();
  const auto modes = solve_modes(st, 1.6e-6, kWindow);
  const double dt = seconds_since(t0);
  g.check(modes.size() == 2,
          "expected 2 modes, got " + std::to_string(modes.size()));
  if (modes.size() == 2) {
    g.check(modes[0].label == ModeLabel::rayleigh_like,
            "first mode not rayleigh_like");
    g.check(modes[1].label == ModeLabel::sezawa_like,
            "second mode not sezawa_like");
    const double vr = modes[0].phase_velocity, vs = modes[1].phase_velocity;
    g.check(std::abs(vr - 4780.0) <= 478.0,
            "vR " + num(vr) + " outside 4780 +-10%");
    g.check(std::abs(vs - 6480.0) <= 648.0,
            "vS " + num(vs) + " outside 6480 +-10%");
    g.note("vR=" + num(vr, "%.1f") + " m/s, vS=" + num(vs, "%.1f") +
           " m/s, solve " + num(dt, "%.2f") + " s");
  }
  g.check(dt < 10.0, "solve took " + num(dt, "%.2f") + " s (limit 10)");
}

// ---------------------------------------------------------------------------
// 2. Rayleigh-equation oracle across Poisson ratios, 0.1% and 1 s each.

void criterion_2(Gate& g) {
  double worst_rel = 0.0, worst_dt = 0.0;
  for (double nu : {0.1, 0.25, 0.34, 0.45}) {
    const double vs = 3100.0;
    const MaterialTensors iso = isotropic_material("iso", vs, nu, 2600.0);
    const double vp = std::sqrt(iso.stiffness(0, 0) / iso.density);
    const double v_ref = rayleigh_oracle(vs, vp);
    LayerStack st;
    st.substrate = iso;
    const auto t0 = std::chrono::steady_clock::now();
    const auto modes = solve_modes(st, 1.0e-6, {0.80 * vs, 0.99 * vs, 120});
    const double dt = seconds_since(t0);
    worst_dt = std::max(worst_dt, dt);
    if (modes.size() != 1) {
      g.check(false, "nu=" + num(nu) + ": expected 1 mode, got " +
                         std::to_string(modes.size()));
      continue;
    }
    const double rel = std::abs(modes[0].phase_velocity - v_ref) / v_ref;
    worst_rel = std::max(worst_rel, rel);
    g.check(rel <= 1e-3,
            "nu=" + num(nu) + ": relative error " + num(rel) + " > 1e-3");
    g.check(dt < 1.0,
            "nu=" + num(nu) + ": solve took " + num(dt, "%.2f") + " s");
  }
  g.note("worst relative error " + num(worst_rel) + ", worst solve " +
         num(worst_dt, "%.2f") + " s");
}

// ---------------------------------------------------------------------------
// 3. Coupling magnitudes at the reference ratio and interior k2 maximum.

void criterion_3(Gate& g) {
  const LayerStack tmpl = reference_stack(1.0e-6);
  const std::vector<double> ratios = {0.40, 0.45, 0.50,  0.55, 0.60,
                                      0.625, 0.65, 0.70, 0.75, 0.80};
  double best_ratio = -1.0, best_k2 = -1.0;
  double ref_k2_r = -1.0, ref_k2_s = -1.0;
  for (double r : ratios) {
    const auto rows = sweep_point(tmpl, 1.6e-6, r, kWindow);
    for (const auto& row : rows) {
      if (row.status != "ok" || !std::isfinite(row.k2)) continue;
      if (row.label == ModeLabel::sezawa_like && row.k2 > best_k2) {
        best_k2 = row.k2;
        best_ratio = r;
      }
      if (r == 0.625 && row.label == ModeLabel::sezawa_like) ref_k2_s = row.k2;
      if (r == 0.625 && row.label == ModeLabel::rayleigh_like)
        ref_k2_r = row.k2;
    }
  }
  g.check(ref_k2_s >= 0.028 && ref_k2_s <= 0.064,
          "Sezawa k2 " + num(ref_k2_s) + " outside [0.028, 0.064]");
  g.check(ref_k2_r >= 0.0 && ref_k2_r < 0.01,
          "Rayleigh k2 " + num(ref_k2_r) + " not below 0.01");
  g.check(best_ratio >= 0.56 && best_ratio <= 0.68,
          "k2 argmax at h/lambda=" + num(best_ratio) +
              " outside [0.56, 0.68]");
  g.note("k2S=" + num(ref_k2_s) + ", k2R=" + num(ref_k2_r) +
         " at 0.625; argmax at " + num(best_ratio));
}

// ---------------------------------------------------------------------------
// 4. k2 round trip through noise, parasitic fit, deembed, extraction.

void criterion_4(Gate& g) {
  struct Case {
    double velocity, k2, tol;
  };
  const Case cases[] = {{4780.0, 0.0076, 0.0018}, {6480.0, 0.0608, 0.012}};
  std::string detail;
  for (const Case& c : cases) {
    const IdtDesign d = make_design(c.velocity, c.k2);
    const double f0 = d.center_frequency();
    const auto grid = linspace(0.5 * f0, 1.5 * f0, 1601);
    const AdmittanceSpectrum clean = synthesize_admittance(d, grid);
    const ParasiticModel truth{3.2, 0.4e-9, d.static_capacitance()};

    int hits = 0;
    const int trials = 100;
    for (int seed = 0; seed < trials; ++seed) {
      std::mt19937 rng(7100 + seed);
      std::normal_distribution<double> gauss(0.0, 0.01);
      AdmittanceSpectrum noisy = clean;
      for (double& gv : noisy.conductance) gv *= 1.0 + gauss(rng);
      for (double& bv : noisy.susceptance) bv *= 1.0 + gauss(rng);
      const TwoPortSweep sw = embed_admittance(noisy, truth);
      const ParasiticFit fit = fit_parasitics(
          sw, {{0.52 * f0, 0.75 * f0}, {1.25 * f0, 1.48 * f0}});
      const AdmittanceSpectrum deemb = deembed(sw, fit.model);
      const K2Estimate est =
          extract_k2(deemb, {grid.front(), grid.back()}, fit.ct_stderr);
      if (std::abs(est.k2 - c.k2) <= c.tol) ++hits;
    }
    g.check(hits >= 90, "k2=" + num(c.k2) + ": " + std::to_string(hits) +
                            "/100 trials inside +-" + num(c.tol));
    detail += (detail.empty() ? "" : ", ") + std::to_string(hits) +
              "/100 at k2=" + num(c.k2);
  }
  g.note(detail);
}

// ---------------------------------------------------------------------------
// 5. Loss-line recovery under 1 dB noise, medians over 50 seeds.

void criterion_5(Gate& g) {
  const std::vector<double> lengths = linspace(200e-6, 2000e-6, 10);
  std::vector<double> err_slab, err_wg, err_taper;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937 rng(5200 + seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<LossPoint> slab, wg;
    for (double L : lengths)
      for (int rep = 0; rep < 24; ++rep) {
        slab.push_back({L, -20.0 - 5300.0 * L + gauss(rng)});
        wg.push_back({L, -39.8 - 10700.0 * L + gauss(rng)});
      }
    const LossAnalysis fit = fit_propagation_loss(slab, wg);
    err_slab.push_back(std::abs(fit.slab.alpha * 1e-3 - 5.3));
    err_wg.push_back(std::abs(fit.waveguide.alpha * 1e-3 - 10.7));
    err_taper.push_back(std::abs(fit.taper.loss_2x - 19.8));
  }
  const double ms = median(err_slab), mw = median(err_wg),
               mt = median(err_taper);
  g.check(ms <= 0.2, "median slab error " + num(ms) + " dB/mm > 0.2");
  g.check(mw <= 1.7, "median waveguide error " + num(mw) + " dB/mm > 1.7");
  g.check(mt <= 8.3, "median taper error " + num(mt) + " dB > 8.3");
  g.note("medians: slab " + num(ms, "%.3f") + " dB/mm, waveguide " +
         num(mw, "%.3f") + " dB/mm, taper " + num(mt, "%.3f") + " dB");
}

// ---------------------------------------------------------------------------
// 6. DC power limit: exact width linearity, reduction figures, mobility
//    optimum against a golden-section oracle.

void criterion_6(Gate& g) {
  const AeDeviceParams slab = slab_params();
  AeDeviceParams wg = slab;
  wg.width = 4.8e-6;

  AeDeviceParams half = slab, quarter = slab;
  half.width = slab.width / 2.0;
  quarter.width = slab.width / 4.0;
  g.check(same_bits(2.0 * pdc_max(half), pdc_max(slab)),
          "width/2 scaling not bitwise exact");
  g.check(same_bits(4.0 * pdc_max(quarter), pdc_max(slab)),
          "width/4 scaling not bitwise exact");

  const double bare = pdc_reduction(slab, wg);
  g.check(std::abs(bare - 0.96) <= 1e-12,
          "bare reduction " + num(bare, "%.6f") + " != 0.96");
  const double adjusted = pdc_reduction_loss_adjusted(slab, wg, 4.32, 1e-4);
  g.check(adjusted >= 0.93 && adjusted <= 0.97,
          "loss-adjusted reduction " + num(adjusted, "%.4f") +
              " outside [0.93, 0.97]");

  auto cost = [&](double mu) {
    AeDeviceParams q = slab;
    q.mobility = mu;
    return pdc_max(q);
  };
  const double oracle = golden_min(cost, 1e-4, 10.0, 1e-10);
  const double closed = optimal_mobility(slab);
  g.check(std::abs(closed - oracle) / oracle <= 1e-3,
          "optimal mobility " + num(closed) + " vs oracle " + num(oracle));
  g.note("bare " + num(100.0 * bare, "%.1f") + "%, adjusted " +
         num(100.0 * adjusted, "%.2f") + "%, mu* " + num(closed, "%.4g") +
         " m^2/Vs");
}

// ---------------------------------------------------------------------------
// 7. Width-ratio mixing enhancement is exactly 5.

void criterion_7(Gate& g) {
  const double e = mixing_enhancement(120e-6, 4.8e-6);
  g.check(e == 5.0, "enhancement " + num(e, "%.17g") + " != 5.0 exactly");
  g.note("sqrt(120/4.8) = " + num(e, "%.1f"));
}

// ---------------------------------------------------------------------------
// 8. Spin coupling: Sezawa beats Rayleigh below the film, and the map
//    matches an index-sum oracle and exact linearity.

void criterion_8(Gate& g) {
  const char* data_dir = std::getenv("SAW_DATA_DIR");
  if (data_dir == nullptr) {
    g.check(false, "SAW_DATA_DIR not set");
    return;
  }
  const SpinStrainTensor tensor =
      load_spin_tensor(std::string(data_dir) + "/spin_g_hh_divacancy.json");

  const LayerStack st = reference_stack(0.6 * 1.6e-6);
  const auto modes = solve_modes(st, 1.6e-6, kWindow);
  g.check(modes.size() == 2,
          "expected 2 modes, got " + std::to_string(modes.size()));
  if (modes.size() == 2) {
    const double top = st.total_thickness();
    const SpinCouplingMap mr = coupling_map(modes[0].fields, tensor, top);
    const SpinCouplingMap ms = coupling_map(modes[1].fields, tensor, top);
    g.check(ms.peak_omega1.value > mr.peak_omega1.value,
            "Sezawa peak " + num(ms.peak_omega1.value) +
                " Hz not above Rayleigh peak " + num(mr.peak_omega1.value));
    g.note("omega1 peaks: sezawa " + num(ms.peak_omega1.value, "%.3g") +
           " Hz vs rayleigh " + num(mr.peak_omega1.value, "%.3g") + " Hz");
  }

  // index-sum oracle and bitwise doubling on random tensors and strains
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> amp(-30e9, 30e9);
  std::uniform_real_distribution<double> eps(-1e-6, 1e-6);
  for (int trial = 0; trial < 5; ++trial) {
    SpinStrainTensor t;
    t.source = "oracle";
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) t.g(r, c) = amp(rng);
    StrainVector s;
    for (int c = 0; c < 6; ++c) s(c) = Complex(eps(rng), eps(rng));
    const DShiftVector d = zero_field_shift(s, t);
    for (int r = 0; r < 6; ++r) {
      Complex manual = 0.0;
      for (int c = 0; c < 6; ++c) manual += t.g(r, c) * s(c);
      const double scale = std::max(1.0, std::abs(manual));
      g.check(std::abs(d(r) - manual) <= 1e-12 * scale,
              "oracle mismatch at component " + std::to_string(r));
    }
    const DShiftVector d2 = zero_field_shift((2.0 * s).eval(), t);
    for (int r = 0; r < 6; ++r)
      g.check(same_bits(d2(r).real(), 2.0 * d(r).real()) &&
                  same_bits(d2(r).imag(), 2.0 * d(r).imag()),
              "doubling not bitwise at component " + std::to_string(r));
  }
}

// ---------------------------------------------------------------------------
// 9. Touchstone round trips: RI bit-identical, MA/DB to 1e-12.

void criterion_9(Gate& g) {
  TwoPortSweep sw;
  sw.frequency_grid = {1.0e9, 1.7e9, 2.9e9};
  sw.ports = 2;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> amp(-0.7, 0.7);
  for (std::size_t i = 0; i < sw.frequency_grid.size(); ++i) {
    Eigen::Matrix2cd s;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) s(r, c) = Complex(amp(rng), amp(rng));
    sw.s_matrix.push_back(s);
  }

  const TwoPortSweep ri =
      parse_touchstone(serialize_touchstone(sw, TouchstoneFormat::ri));
  bool ri_exact = ri.frequency_grid.size() == sw.frequency_grid.size();
  for (std::size_t i = 0; ri_exact && i < sw.frequency_grid.size(); ++i) {
    ri_exact = same_bits(ri.frequency_grid[i], sw.frequency_grid[i]);
    for (int r = 0; ri_exact && r < 2; ++r)
      for (int c = 0; ri_exact && c < 2; ++c)
        ri_exact = same_bits(ri.s_matrix[i](r, c).real(),
                             sw.s_matrix[i](r, c).real()) &&
                   same_bits(ri.s_matrix[i](r, c).imag(),
                             sw.s_matrix[i](r, c).imag());
  }
  g.check(ri_exact, "RI round trip is not bit-identical");

  for (TouchstoneFormat f : {TouchstoneFormat::ma, TouchstoneFormat::db}) {
    const TwoPortSweep back = parse_touchstone(serialize_touchstone(sw, f));
    double worst = 0.0;
    for (std::size_t i = 0; i < sw.frequency_grid.size(); ++i)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          const Complex a = sw.s_matrix[i](r, c), b = back.s_matrix[i](r, c);
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    g.check(worst <= 1e-12, std::string(f == TouchstoneFormat::ma ? "MA" : "DB") +
                                " round trip error " + num(worst));
  }
  g.note("RI bit-identical; MA/DB within 1e-12");
}

// ---------------------------------------------------------------------------
// 10. Reports are byte-identical across worker counts, via the binary.

void criterion_10(Gate& g) {
  const char* bin = std::getenv("SAW_CLI_BIN");
  if (bin == nullptr) {
    g.check(false, "SAW_CLI_BIN not set");
    return;
  }
  std::string tmpl = (fs::temp_directory_path() / "saw_accept_XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    g.check(false, "cannot create temp dir");
    return;
  }
  const fs::path dir(tmpl);

  nlohmann::json manifest = nlohmann::json::array();
  const std::pair<DeviceKind, const char*> kinds[] = {
      {DeviceKind::slab, "s"}, {DeviceKind::waveguide, "w"}};
  for (const auto& [kind, prefix] : kinds)
    for (double um : {200.0, 500.0, 1000.0}) {
      const std::string id =
          std::string(prefix) + std::to_string(static_cast<int>(um));
      write_file(dir / (id + ".s2p"), fixture_touchstone(kind, um * 1e-6));
      manifest.push_back({{"file", id + ".s2p"},
                          {"kind", to_string(kind)},
                          {"propagation_length_m", um * 1e-6},
                          {"device_id", id}});
    }
  write_file(dir / "manifest.json", manifest.dump(1));
  write_file(dir / "cfg.json", R"({"manifest": "manifest.json"})");

  auto run = [&](const std::string& out, int workers) {
    const std::string cmd = "SAW_LOG=quiet " + std::string(bin) +
                            " analyze -c " + (dir / "cfg.json").string() +
                            " -o " + (dir / out).string() + " -w " +
                            std::to_string(workers);
    const int rc = std::system(cmd.c_str());
    return rc != -1 ? WEXITSTATUS(rc) : -1;
  };
  g.check(run("w1", 1) == 0, "1-worker run failed");
  g.check(run("w4", 4) == 0, "4-worker run failed");
  for (const char* name : {"report.json", "devices.csv", "loss_points.csv"}) {
    const std::string a = read_file(dir / "w1" / name);
    const std::string b = read_file(dir / "w4" / name);
    g.check(!a.empty() && a == b,
            std::string(name) + " differs between worker counts");
  }
  g.note("report.json, devices.csv, loss_points.csv byte-identical (1 vs 4 workers)");
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    void (*fn)(Gate&);
  };
  const Entry entries[] = {
      {"two trapped modes at the reference stack", criterion_1},
      {"Rayleigh-equation oracle across Poisson ratios", criterion_2},
      {"coupling magnitudes and interior k2 maximum", criterion_3},
      {"k2 round trip through the noisy measurement chain", criterion_4},
      {"loss-line recovery under 1 dB peak noise", criterion_5},
      {"DC power limit scaling, reductions, mobility optimum", criterion_6},
      {"width-ratio mixing enhancement", criterion_7},
      {"spin coupling contrast, oracle, and linearity", criterion_8},
      {"touchstone round-trip fidelity", criterion_9},
      {"byte-identical reports across worker counts", criterion_10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    Gate g;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      entries[i].fn(g);
    } catch (const std::exception& e) {
      g.check(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    const bool pass = g.errors.empty();
    if (!pass) ++failures;
    std::printf("[%s] %2zu %-52s %s(%.1f s)\n", pass ? "PASS" : "FAIL", i + 1,
                entries[i].label,
                (pass ? g.detail : g.errors)
                    .append(pass && g.detail.empty() ? "" : " ")
                    .c_str(),
                dt);
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures;
}
