#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "saw/errors.hpp"
#include "saw/idt.hpp"
#include "saw/units.hpp"

namespace saw {

enum class DeviceKind { slab, waveguide };

inline std::string to_string(DeviceKind k) {
  return k == DeviceKind::slab ? "slab" : "waveguide";
}

inline DeviceKind device_kind_from_string(const std::string& s) {
  if (s == "slab") return DeviceKind::slab;
  if (s == "waveguide") return DeviceKind::waveguide;
  throw ParseError("unknown device kind \"" + s + "\" (expected slab or waveguide)");
}

// Per-device context carried alongside a measured sweep; filled from the
// manifest, not from the Touchstone file itself.
struct SweepMetadata {
  std::string device_id;
  DeviceKind kind = DeviceKind::slab;
  double propagation_length = 0.0;  // m
  bool excluded = false;            // manual omission, never set automatically
};

enum class TouchstoneFormat { ri, ma, db };

// Measured S-parameters on a strictly increasing frequency grid. One-port
// files fill S11 and leave the other entries zero; `ports` records which.
struct TwoPortSweep {
  std::vector<double> frequency_grid;      // Hz
  std::vector<Eigen::Matrix2cd> s_matrix;  // rows/cols = port 1, 2
  double reference_impedance = 50.0;       // ohm
  int ports = 2;
  SweepMetadata metadata;
};

// Series elements between the VNA reference plane and the IDT, plus the
// transducer's static capacitance.
struct ParasiticModel {
  double series_resistance = 0.0;   // R_s, ohm
  double series_inductance = 0.0;   // L_s, H
  double static_capacitance = 0.0;  // C_T, F
};

// Closed frequency interval used for fitting, integration, and peak picking.
struct FrequencyBand {
  double lo = 0.0;  // Hz
  double hi = 0.0;  // Hz
};

namespace detail {

inline void check_band(const FrequencyBand& b, const char* where) {
  if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
    throw DomainError(std::string(where) + ": band [" + std::to_string(b.lo) +
                      ", " + std::to_string(b.hi) + "] Hz is empty or non-finite");
}

inline void check_sweep(const TwoPortSweep& s, const char* where) {
  if (s.frequency_grid.size() != s.s_matrix.size())
    throw DomainError(std::string(where) + ": frequency and S-matrix lengths differ");
  if (s.frequency_grid.empty())
    throw DomainError(std::string(where) + ": sweep is empty");
  for (size_t i = 0; i + 1 < s.frequency_grid.size(); ++i)
    if (!(s.frequency_grid[i] < s.frequency_grid[i + 1]))
      throw DomainError(std::string(where) + ": frequencies must be strictly increasing");
}

// Grid indices with lo <= f <= hi, in ascending order.
inline std::vector<size_t> band_indices(const std::vector<double>& f,
                                        const FrequencyBand& b) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < f.size(); ++i)
    if (f[i] >= b.lo && f[i] <= b.hi) idx.push_back(i);
  return idx;
}

// Shortest text that reparses to the same double (17 significant digits).
inline std::string round_trip_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Touchstone v1

namespace detail {

struct TouchstoneOption {
  double unit_to_hz = 1e9;  // v1 default unit is GHz
  TouchstoneFormat format = TouchstoneFormat::ma;
  double reference = 50.0;
};

inline ParseError touchstone_error(size_t line, const std::string& what) {
  return ParseError("touchstone: line " + std::to_string(line) + ": " + what);
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline double parse_number(std::string_view tok, size_t line) {
  std::string_view body = tok;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (body.empty() || ec != std::errc() || p != body.data() + body.size())
    throw touchstone_error(line, "cannot parse number \"" + std::string(tok) + "\"");
  if (!std::isfinite(v))
    throw touchstone_error(line, "non-finite value \"" + std::string(tok) + "\"");
  return v;
}

inline TouchstoneOption parse_option_line(const std::vector<std::string_view>& toks,
                                          size_t line) {
  TouchstoneOption opt;
  bool saw_param = false;
  for (size_t i = 1; i < toks.size(); ++i) {
    const std::string t = lower(toks[i]);
    if (t == "hz") opt.unit_to_hz = 1.0;
    else if (t == "khz") opt.unit_to_hz = 1e3;
    else if (t == "mhz") opt.unit_to_hz = 1e6;
    else if (t == "ghz") opt.unit_to_hz = 1e9;
    else if (t == "ri") opt.format = TouchstoneFormat::ri;
    else if (t == "ma") opt.format = TouchstoneFormat::ma;
    else if (t == "db") opt.format = TouchstoneFormat::db;
    else if (t == "s") saw_param = true;
    else if (t == "y" || t == "z" || t == "g" || t == "h")
      throw touchstone_error(line, "only S-parameters are supported, got \"" +
                                       std::string(toks[i]) + "\"");
    else if (t == "r") {
      if (i + 1 >= toks.size())
        throw touchstone_error(line, "R must be followed by a reference impedance");
      opt.reference = parse_number(toks[++i], line);
      if (!(opt.reference > 0.0))
        throw touchstone_error(line, "reference impedance must be > 0");
    } else {
      throw touchstone_error(line, "unknown option token \"" + std::string(toks[i]) + "\"");
    }
  }
  (void)saw_param;  // omitted parameter type defaults to S per v1
  return opt;
}

inline Complex touchstone_value(double a, double b, TouchstoneFormat fmt) {
  switch (fmt) {
    case TouchstoneFormat::ri:
      return Complex(a, b);
    case TouchstoneFormat::ma:
      return std::polar(a, b * M_PI / 180.0);
    case TouchstoneFormat::db:
      return std::polar(std::pow(10.0, a / 20.0), b * M_PI / 180.0);
  }
  throw DomainError("touchstone_value: bad format enum");
}

}  // namespace detail

// Touchstone v1 reader for .s1p / .s2p content. The option line
// `# <unit> S <RI|MA|DB> R <Z0>` is honored with v1 defaults (GHz, S, MA, 50)
// for omitted tokens; `!` comments are stripped; frequencies are converted to
// Hz. Two-port rows use the v1 column order S11 S21 S12 S22. Each data row
// must be complete on one line (3 or 9 columns). Touchstone v2 keyword lines
// are rejected.
inline TwoPortSweep parse_touchstone(const std::string& text) {
  TwoPortSweep sweep;
  sweep.ports = 0;
  bool have_option = false;
  detail::TouchstoneOption opt;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (size_t bang = line.find('!'); bang != std::string_view::npos)
      line = line.substr(0, bang);

    std::vector<std::string_view> toks;
    for (size_t i = 0; i < line.size();) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) toks.push_back(line.substr(start, i - start));
    }
    if (toks.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    if (toks[0].front() == '[')
      throw detail::touchstone_error(line_no, "Touchstone v2 keywords are not supported");
    if (toks[0].front() == '#') {
      if (have_option)
        throw detail::touchstone_error(line_no, "second option line");
      if (toks[0].size() > 1) toks[0].remove_prefix(1);
      else toks.erase(toks.begin());
      toks.insert(toks.begin(), std::string_view("#"));
      opt = detail::parse_option_line(toks, line_no);
      have_option = true;
      continue;
    }

    if (!have_option)
      throw detail::touchstone_error(line_no, "data before the option line (missing option line?)");

    if (sweep.ports == 0) {
      if (toks.size() == 3) sweep.ports = 1;
      else if (toks.size() == 9) sweep.ports = 2;
      else
        throw detail::touchstone_error(
            line_no, "expected 3 (one-port) or 9 (two-port) columns, got " +
                         std::to_string(toks.size()));
    }
    const size_t want = sweep.ports == 1 ? 3 : 9;
    if (toks.size() != want)
      throw detail::touchstone_error(line_no, "expected " + std::to_string(want) +
                                                  " columns, got " +
                                                  std::to_string(toks.size()));

    std::vector<double> nums(want);
    for (size_t i = 0; i < want; ++i) nums[i] = detail::parse_number(toks[i], line_no);

    const double f = nums[0] * opt.unit_to_hz;
    if (!sweep.frequency_grid.empty() && !(f > sweep.frequency_grid.back()))
      throw detail::touchstone_error(line_no, "frequencies must be strictly increasing");
    sweep.frequency_grid.push_back(f);

    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = detail::touchstone_value(nums[1], nums[2], opt.format);
    if (sweep.ports == 2) {
      s(1, 0) = detail::touchstone_value(nums[3], nums[4], opt.format);
      s(0, 1) = detail::touchstone_value(nums[5], nums[6], opt.format);
      s(1, 1) = detail::touchstone_value(nums[7], nums[8], opt.format);
    }
    sweep.s_matrix.push_back(s);
    if (pos > text.size()) break;
  }

  if (!have_option) throw ParseError("touchstone: missing option line");
  if (sweep.frequency_grid.empty()) throw ParseError("touchstone: no data rows");
  sweep.reference_impedance = opt.reference;
  return sweep;
}

// Writes frequencies in Hz. RI output reparses to bit-identical doubles.
inline std::string serialize_touchstone(const TwoPortSweep& sweep,
                                        TouchstoneFormat format = TouchstoneFormat::ri) {
  detail::check_sweep(sweep, "serialize_touchstone");
  if (sweep.ports != 1 && sweep.ports != 2)
    throw DomainError("serialize_touchstone: ports must be 1 or 2");

  const char* fmt_name = format == TouchstoneFormat::ri   ? "RI"
                         : format == TouchstoneFormat::ma ? "MA"
                                                          : "DB";
  std::string out = "# Hz S " + std::string(fmt_name) + " R " +
                    detail::round_trip_double(sweep.reference_impedance) + "\n";
  auto emit = [&](Complex v) {
    double a = 0.0, b = 0.0;
    switch (format) {
      case TouchstoneFormat::ri: a = v.real(); b = v.imag(); break;
      case TouchstoneFormat::ma: a = std::abs(v); b = std::arg(v) * 180.0 / M_PI; break;
      case TouchstoneFormat::db:
        a = 20.0 * std::log10(std::abs(v));
        b = std::arg(v) * 180.0 / M_PI;
        break;
    }
    out += ' ';
    out += detail::round_trip_double(a);
    out += ' ';
    out += detail::round_trip_double(b);
  };
  for (size_t i = 0; i < sweep.frequency_grid.size(); ++i) {
    out += detail::round_trip_double(sweep.frequency_grid[i]);
    const Eigen::Matrix2cd& s = sweep.s_matrix[i];
    emit(s(0, 0));
    if (sweep.ports == 2) {
      emit(s(1, 0));
      emit(s(0, 1));
      emit(s(1, 1));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// De-embedding and parasitic fitting

namespace detail {

// One-port impedance from S11. De-embedding enforces passivity strictly;
// the parasitic fitter tolerates noise pushing |S11| marginally past 1 at
// off-resonance points and only rejects the Z = infinity singularity.
inline Complex port_impedance(Complex s11, double z0, double f, const char* where,
                              bool enforce_passivity) {
  if (enforce_passivity && std::abs(s11) >= 1.0)
    throw DomainError(std::string(where) + ": |S11| = " + std::to_string(std::abs(s11)) +
                      " at " + std::to_string(f) + " Hz violates passivity");
  if (std::abs(Complex(1.0, 0.0) - s11) < 1e-9)
    throw DomainError(std::string(where) + ": S11 = 1 at " + std::to_string(f) +
                      " Hz corresponds to infinite impedance");
  return z0 * (Complex(1.0, 0.0) + s11) / (Complex(1.0, 0.0) - s11);
}

inline void check_parasitics(const ParasiticModel& p, const char* where) {
  if (!(p.series_resistance >= 0.0))
    throw DomainError(std::string(where) + ": series resistance must be >= 0");
  if (!(p.series_inductance >= 0.0))
    throw DomainError(std::string(where) + ": series inductance must be >= 0");
  if (!(p.static_capacitance > 0.0))
    throw DomainError(std::string(where) + ": static capacitance must be > 0");
}

}  // namespace detail

// Removes the series parasitics from the one-port view of the sweep:
// Z = Z0 (1 + S11)/(1 - S11), Y = 1 / (Z - R_s - i omega L_s). The static
// capacitance stays inside Y (its susceptance remains in B) and is carried on
// the returned spectrum for later k2 extraction.
inline AdmittanceSpectrum deembed(const TwoPortSweep& sweep,
                                  const ParasiticModel& parasitics) {
  detail::check_sweep(sweep, "deembed");
  detail::check_parasitics(parasitics, "deembed");

  AdmittanceSpectrum out;
  out.frequency_grid = sweep.frequency_grid;
  out.static_capacitance = parasitics.static_capacitance;
  out.conductance.reserve(sweep.frequency_grid.size());
  out.susceptance.reserve(sweep.frequency_grid.size());
  for (size_t i = 0; i < sweep.frequency_grid.size(); ++i) {
    const double f = sweep.frequency_grid[i];
    const Complex Z = detail::port_impedance(sweep.s_matrix[i](0, 0),
                                             sweep.reference_impedance, f, "deembed",
                                             /*enforce_passivity=*/true);
    const Complex Zr = Z - parasitics.series_resistance -
                       Complex(0.0, 2.0 * M_PI * f * parasitics.series_inductance);
    const Complex Y = 1.0 / Zr;
    out.conductance.push_back(Y.real());
    out.susceptance.push_back(Y.imag());
  }
  return out;
}

// Relative residual above which a fit band is marked as violating the
// series-RLC model (a mode resonance inside the band shows up at tens of
// percent; instrument noise stays near its own amplitude).
inline constexpr double kParasiticResidualFlag = 0.05;

struct ParasiticFit {
  ParasiticModel model;
  double ct_stderr = 0.0;              // 1-sigma on C_T from the fit, F
  double residual = 0.0;               // rms relative residual, all fit points
  std::vector<double> band_residual;   // rms relative residual per input band
  std::vector<bool> band_suspect;      // residual above kParasiticResidualFlag
};

// Least-squares fit of Z(omega) ~ R_s + i omega L_s + 1/(i omega C_T) over
// off-resonance bands. The model is linear in (R_s, L_s, 1/C_T); bands should
// exclude both mode resonances and carry at least ~10 points each for a
// stable fit. Tiny negative R_s or L_s from noise is clamped to zero.
inline ParasiticFit fit_parasitics(const TwoPortSweep& sweep,
                                   const std::vector<FrequencyBand>& bands) {
  detail::check_sweep(sweep, "fit_parasitics");
  if (bands.empty()) throw DomainError("fit_parasitics: no fit bands given");

  std::vector<std::vector<size_t>> per_band;
  std::vector<size_t> all;
  for (const FrequencyBand& b : bands) {
    detail::check_band(b, "fit_parasitics");
    per_band.push_back(detail::band_indices(sweep.frequency_grid, b));
    all.insert(all.end(), per_band.back().begin(), per_band.back().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.empty())
    throw DomainError("fit_parasitics: no grid points inside the fit bands");

  const size_t n = all.size();
  Eigen::MatrixXd A(2 * n, 3);
  Eigen::VectorXd y(2 * n);
  std::vector<Complex> z(n);
  for (size_t i = 0; i < n; ++i) {
    const double f = sweep.frequency_grid[all[i]];
    const double w = 2.0 * M_PI * f;
    z[i] = detail::port_impedance(sweep.s_matrix[all[i]](0, 0),
                                  sweep.reference_impedance, f, "fit_parasitics",
                                  /*enforce_passivity=*/false);
    A(2 * i, 0) = 1.0;
    A(2 * i, 1) = 0.0;
    A(2 * i, 2) = 0.0;
    A(2 * i + 1, 0) = 0.0;
    A(2 * i + 1, 1) = w;
    A(2 * i + 1, 2) = -1.0 / w;
    y(2 * i) = z[i].real();
    y(2 * i + 1) = z[i].imag();
  }

  // Column scaling keeps the SVD rank test meaningful despite omega ~ 1e10
  // against 1/omega ~ 1e-10.
  Eigen::Vector3d scale;
  for (int c = 0; c < 3; ++c) scale(c) = std::max(A.col(c).norm(), 1e-300);
  Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(2) < 1e-10 * svd.singularValues()(0))
    throw SolverError(
        "fit_parasitics: normal equations are singular; need at least two "
        "distinct frequencies across the fit bands");
  Eigen::Vector3d beta = scale.cwiseInverse().asDiagonal() * svd.solve(y);

  if (!(beta(2) > 0.0))
    throw SolverError(
        "fit_parasitics: fitted static capacitance is not positive; the bands "
        "do not follow the series-RLC model");

  ParasiticFit fit;
  fit.model.series_resistance = std::max(beta(0), 0.0);
  fit.model.series_inductance = std::max(beta(1), 0.0);
  fit.model.static_capacitance = 1.0 / beta(2);

  // 1-sigma on C_T: sigma_gamma / gamma^2 with gamma = 1/C_T, from the
  // unscaled parameter covariance s^2 (A^T A)^-1.
  const size_t rows = 2 * n;
  if (rows > 3) {
    Eigen::VectorXd resid = A * beta - y;
    const double s2 = resid.squaredNorm() / static_cast<double>(rows - 3);
    Eigen::Matrix3d ata_inv =
        scale.cwiseInverse().asDiagonal() *
        (As.transpose() * As).inverse() * scale.cwiseInverse().asDiagonal();
    const double var_gamma = s2 * ata_inv(2, 2);
    fit.ct_stderr = std::sqrt(std::max(var_gamma, 0.0)) / (beta(2) * beta(2));
  }

  auto model_z = [&](double f) {
    const double w = 2.0 * M_PI * f;
    return Complex(fit.model.series_resistance,
                   w * fit.model.series_inductance -
                       1.0 / (w * fit.model.static_capacitance));
  };
  double num = 0.0, den = 0.0;
  std::vector<double> zmag(sweep.frequency_grid.size(), 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double f = sweep.frequency_grid[all[i]];
    const double r2 = std::norm(model_z(f) - z[i]);
    num += r2;
    den += std::norm(z[i]);
    zmag[all[i]] = r2 / std::max(std::norm(z[i]), 1e-300);
  }
  fit.residual = std::sqrt(num / std::max(den, 1e-300));
  for (const std::vector<size_t>& idx : per_band) {
    double acc = 0.0;
    for (size_t i : idx) acc += zmag[i];
    const double band_rms = idx.empty() ? 0.0 : std::sqrt(acc / idx.size());
    fit.band_residual.push_back(band_rms);
    fit.band_suspect.push_back(band_rms > kParasiticResidualFlag);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// k2 extraction

struct K2Estimate {
  double k2 = 0.0;                // dimensionless
  double uncertainty = 0.0;       // 1-sigma, dimensionless
  double center_frequency = 0.0;  // Hz, at the conductance maximum
};

// k2 = (pi/4) (1/(omega0^2 C_T)) Integral G(omega) domega over the band,
// trapezoidal, with omega0 at the conductance maximum. The band must contain
// exactly one conductance peak: two separate excursions above half the band
// maximum raise an ambiguous-band error (half-max connectivity is immune to
// point noise on a single lobe, while sinc^2 sidelobes stay below 5%). The
// uncertainty combines the C_T error with a truncation estimate that
// extrapolates the 1/(omega - omega0)^2 conductance envelope past each edge.
inline K2Estimate extract_k2(const AdmittanceSpectrum& spectrum,
                             const FrequencyBand& band, double ct_uncertainty = 0.0) {
  detail::check_band(band, "extract_k2");
  if (spectrum.frequency_grid.size() != spectrum.conductance.size())
    throw DomainError("extract_k2: frequency and conductance lengths differ");
  if (!(spectrum.static_capacitance > 0.0))
    throw DomainError("extract_k2: spectrum carries no positive static capacitance");
  if (!(ct_uncertainty >= 0.0))
    throw DomainError("extract_k2: C_T uncertainty must be >= 0");
  const std::vector<size_t> idx =
      detail::band_indices(spectrum.frequency_grid, band);
  if (idx.size() < 3)
    throw DomainError("extract_k2: band covers fewer than 3 grid points");

  size_t peak = idx[0];
  for (size_t i : idx)
    if (spectrum.conductance[i] > spectrum.conductance[peak]) peak = i;
  const double gmax = spectrum.conductance[peak];

  K2Estimate est;
  if (!(gmax > 0.0)) {
    // No conductance in band: k2 = 0 by the integral, centered mid-band.
    est.center_frequency = spectrum.frequency_grid[idx[idx.size() / 2]];
    return est;
  }

  // Count excursions above half maximum (connected runs over the band grid).
  int runs = 0;
  bool in_run = false;
  for (size_t i : idx) {
    const bool above = spectrum.conductance[i] >= 0.5 * gmax;
    if (above && !in_run) ++runs;
    in_run = above;
  }
  if (runs > 1)
    throw DomainError("extract_k2: band contains " + std::to_string(runs) +
                      " comparable conductance peaks; narrow the band to one mode");

  const double w0 = 2.0 * M_PI * spectrum.frequency_grid[peak];
  double integral = 0.0;
  for (size_t j = 0; j + 1 < idx.size(); ++j) {
    const double dw = 2.0 * M_PI * (spectrum.frequency_grid[idx[j + 1]] -
                                    spectrum.frequency_grid[idx[j]]);
    integral += 0.5 * (spectrum.conductance[idx[j]] +
                       spectrum.conductance[idx[j + 1]]) * dw;
  }
  const double ct = spectrum.static_capacitance;
  est.k2 = (M_PI / 4.0) * integral / (w0 * w0 * ct);
  est.center_frequency = w0 / (2.0 * M_PI);

  // Tail estimate per side: mean of G * |omega - omega0| over the outer tenth
  // of the band points equals the missing integral if G falls off as the
  // squared-envelope 1/(omega - omega0)^2 beyond the edge.
  const size_t outer = std::max<size_t>(1, idx.size() / 10);
  double tail = 0.0;
  for (int side = 0; side < 2; ++side) {
    double acc = 0.0;
    for (size_t j = 0; j < outer; ++j) {
      const size_t i = side == 0 ? idx[j] : idx[idx.size() - 1 - j];
      acc += std::max(spectrum.conductance[i], 0.0) *
             std::abs(2.0 * M_PI * spectrum.frequency_grid[i] - w0);
    }
    tail += acc / outer;
  }
  const double sigma_trunc = (M_PI / 4.0) * tail / (w0 * w0 * ct);
  const double sigma_ct = est.k2 * ct_uncertainty / ct;
  est.uncertainty = std::hypot(sigma_trunc, sigma_ct);
  return est;
}

// ---------------------------------------------------------------------------
// Transmission peaks and loss fitting

struct BandPeak {
  double frequency = 0.0;  // Hz
  double value = 0.0;      // 20 log10 |S21|, dB
};

// Maximum of 20 log10 |S21| over grid points inside the band. Equal values
// resolve to the lowest frequency.
inline BandPeak band_peak(const TwoPortSweep& sweep, const FrequencyBand& band) {
  detail::check_sweep(sweep, "band_peak");
  detail::check_band(band, "band_peak");
  const std::vector<size_t> idx = detail::band_indices(sweep.frequency_grid, band);
  if (idx.empty())
    throw DomainError("band_peak: band [" + std::to_string(band.lo) + ", " +
                      std::to_string(band.hi) + "] Hz contains no grid points");
  size_t best = idx[0];
  for (size_t i : idx)
    if (std::abs(sweep.s_matrix[i](1, 0)) > std::abs(sweep.s_matrix[best](1, 0)))
      best = i;
  BandPeak out;
  out.frequency = sweep.frequency_grid[best];
  out.value = 20.0 * std::log10(std::abs(sweep.s_matrix[best](1, 0)));
  return out;
}

struct LossPoint {
  double length = 0.0;   // propagation length, m
  double peak_db = 0.0;  // band_peak value for that device, dB
};

// Straight-line fit of peak transmission against propagation length.
// Covariance order is (slope, intercept); units are dB and meters throughout
// (the conventional dB/mm figure is slope * 1e-3).
struct LossFitResult {
  double slope = 0.0;          // dB/m, equals -alpha
  double intercept = 0.0;      // dB at zero length
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double alpha = 0.0;          // propagation loss, dB/m
  double alpha_stderr = 0.0;   // 1-sigma, dB/m
  int n_points = 0;
  // Exactly determined fit (zero degrees of freedom): residual-based errors
  // are unavailable and the covariance is zero.
  bool exact_fit_caveat = false;
};

struct TaperLoss {
  double loss_2x = 0.0;       // both tapers combined, dB
  double uncertainty = 0.0;   // 1-sigma, dB
};

struct LossAnalysis {
  LossFitResult slab;
  LossFitResult waveguide;
  TaperLoss taper;
};

namespace detail {

inline LossFitResult fit_loss_group(const std::vector<LossPoint>& pts,
                                    const char* group) {
  std::vector<double> lengths;
  for (const LossPoint& p : pts) lengths.push_back(p.length);
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  if (lengths.size() < 2)
    throw DomainError("fit_propagation_loss: " + std::string(group) +
                      " group needs at least 2 distinct lengths, got " +
                      std::to_string(lengths.size()));

  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = pts[i].length;
    X(i, 1) = 1.0;
    y(i) = pts[i].peak_db;
  }
  const Eigen::Matrix2d xtx = X.transpose() * X;
  const Eigen::Vector2d beta = xtx.ldlt().solve(X.transpose() * y);

  LossFitResult fit;
  fit.slope = beta(0);
  fit.intercept = beta(1);
  fit.alpha = -beta(0);
  fit.n_points = n;
  const int dof = n - 2;
  if (dof > 0) {
    const double ssr = (X * beta - y).squaredNorm();
    fit.covariance = (ssr / dof) * xtx.inverse();
    fit.alpha_stderr = std::sqrt(std::max(fit.covariance(0, 0), 0.0));
  } else {
    fit.exact_fit_caveat = true;
  }
  return fit;
}

}  // namespace detail

// Per-group ordinary least squares of dB peak against length; alpha = -slope.
// The combined taper loss is the intercept difference slab - waveguide (equal
// IDT insertion loss assumed on both groups), with the intercept variances
// summed. A constant dB offset common to both groups moves both intercepts
// equally and cancels from the taper figure.
inline LossAnalysis fit_propagation_loss(const std::vector<LossPoint>& slab_points,
                                         const std::vector<LossPoint>& waveguide_points) {
  LossAnalysis out;
  out.slab = detail::fit_loss_group(slab_points, "slab");
  out.waveguide = detail::fit_loss_group(waveguide_points, "waveguide");
  out.taper.loss_2x = out.slab.intercept - out.waveguide.intercept;
  out.taper.uncertainty =
      std::sqrt(out.slab.covariance(1, 1) + out.waveguide.covariance(1, 1));
  return out;
}

// Peak-picks every non-excluded sweep in the band and groups the (length,
// peak) points by device kind, ready for fit_propagation_loss.
inline std::pair<std::vector<LossPoint>, std::vector<LossPoint>> loss_points(
    const std::vector<TwoPortSweep>& sweeps, const FrequencyBand& band) {
  std::pair<std::vector<LossPoint>, std::vector<LossPoint>> out;
  for (const TwoPortSweep& s : sweeps) {
    if (s.metadata.excluded) continue;
    const BandPeak p = band_peak(s, band);
    LossPoint pt{s.metadata.propagation_length, p.value};
    (s.metadata.kind == DeviceKind::slab ? out.first : out.second).push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Device manifest

// Maps a Touchstone filename to its measurement context. Lengths are meters.
struct ManifestEntry {
  std::string file;
  SweepMetadata metadata;
};

// JSON array of {"file", "kind", "propagation_length_m", optional
// "device_id" (defaults to the filename stem), optional "exclude"}.
inline std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("manifest: top level must be a JSON array");

  std::vector<ManifestEntry> entries;
  for (size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& rec = doc[i];
    const std::string where = "manifest entry " + std::to_string(i);
    if (!rec.is_object()) throw ParseError(where + ": must be an object");
    auto need = [&](const char* key) -> const nlohmann::json& {
      if (!rec.contains(key))
        throw ParseError(where + ": missing \"" + key + "\"");
      return rec.at(key);
    };
    ManifestEntry e;
    if (!need("file").is_string()) throw ParseError(where + ": \"file\" must be a string");
    e.file = need("file").get<std::string>();
    if (e.file.empty()) throw ParseError(where + ": \"file\" is empty");
    if (!need("kind").is_string()) throw ParseError(where + ": \"kind\" must be a string");
    try {
      e.metadata.kind = device_kind_from_string(need("kind").get<std::string>());
    } catch (const ParseError& ex) {
      throw ParseError(where + ": " + ex.what());
    }
    if (!need("propagation_length_m").is_number())
      throw ParseError(where + ": \"propagation_length_m\" must be a number");
    e.metadata.propagation_length = need("propagation_length_m").get<double>();
    if (!(e.metadata.propagation_length >= 0.0))
      throw ParseError(where + ": \"propagation_length_m\" must be >= 0");
    if (rec.contains("device_id")) {
      if (!rec.at("device_id").is_string())
        throw ParseError(where + ": \"device_id\" must be a string");
      e.metadata.device_id = rec.at("device_id").get<std::string>();
    } else {
      const size_t slash = e.file.find_last_of('/');
      std::string stem = slash == std::string::npos ? e.file : e.file.substr(slash + 1);
      const size_t dot = stem.find_last_of('.');
      e.metadata.device_id = dot == std::string::npos ? stem : stem.substr(0, dot);
    }
    if (rec.contains("exclude")) {
      if (!rec.at("exclude").is_boolean())
        throw ParseError(where + ": \"exclude\" must be a boolean");
      e.metadata.excluded = rec.at("exclude").get<bool>();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace saw
