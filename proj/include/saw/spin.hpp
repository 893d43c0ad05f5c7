#pragma once

// Spin-strain coupling for divacancy centers in the SiC substrate: the
// zero-field-splitting shift Delta D = g * strain, the Delta m_s = +-1 and
// +-2 transition terms built from it, and spatial maps of both over
// per-phonon strain fields.
//
// Ordering contract: D-shift 6-vectors are (Dxx, Dyy, Dzz, Dyz, Dxz, Dxy)
// and strain 6-vectors are engineering Voigt (exx, eyy, ezz, 2eyz, 2exz,
// 2exy), matching the dispersion module's field profiles. Coupling constants
// are measured quantities and ship in a config file, never in code.

#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "saw/dispersion.hpp"
#include "saw/errors.hpp"

namespace saw {

struct SpinStrainTensor {
  Eigen::Matrix<double, 6, 6> g;  // Hz per unit engineering Voigt strain
  std::string source;             // citation for the measured constants
};

using DShiftVector = Eigen::Matrix<Complex, 6, 1>;
using StrainVector = Eigen::Matrix<Complex, 6, 1>;

// Loads a coupling tensor from its JSON record. The record must declare the
// ordering and strain convention it was written against so a mismatched file
// fails loudly instead of silently permuting components.
inline SpinStrainTensor parse_spin_tensor(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spin tensor: invalid JSON: ") + e.what());
  }

  static const std::vector<std::string> expected_order = {
      "Dxx", "Dyy", "Dzz", "Dyz", "Dxz", "Dxy"};
  if (!j.contains("dshift_ordering") ||
      j.at("dshift_ordering") != nlohmann::json(expected_order))
    throw ParseError(
        "spin tensor: dshift_ordering must be [Dxx, Dyy, Dzz, Dyz, Dxz, Dxy]");
  if (!j.contains("strain_convention") ||
      j.at("strain_convention") != "engineering_voigt")
    throw ParseError("spin tensor: strain_convention must be engineering_voigt");
  if (!j.contains("source") || !j.at("source").is_string() ||
      j.at("source").get<std::string>().empty())
    throw ParseError("spin tensor: missing source citation");
  if (!j.contains("g") || !j.at("g").is_array() || j.at("g").size() != 6)
    throw ParseError("spin tensor: g must be a 6x6 matrix");

  SpinStrainTensor out;
  out.source = j.at("source").get<std::string>();
  for (int r = 0; r < 6; ++r) {
    const auto& row = j.at("g").at(r);
    if (!row.is_array() || row.size() != 6)
      throw ParseError("spin tensor: g row " + std::to_string(r) +
                       " must have 6 entries");
    for (int c = 0; c < 6; ++c) {
      if (!row.at(c).is_number())
        throw ParseError("spin tensor: g entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ") is not a number");
      const double v = row.at(c).get<double>();
      if (!std::isfinite(v))
        throw ParseError("spin tensor: g entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ") is not finite");
      out.g(r, c) = v;
    }
  }
  return out;
}

inline SpinStrainTensor load_spin_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("spin tensor file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spin_tensor(ss.str());
}

// Delta D = g * strain, complex linear in the strain phasor.
inline DShiftVector zero_field_shift(const StrainVector& strain,
                                     const SpinStrainTensor& tensor) {
  for (int i = 0; i < 6; ++i)
    if (!std::isfinite(strain(i).real()) || !std::isfinite(strain(i).imag()))
      throw DomainError("zero_field_shift: strain component " +
                        std::to_string(i) + " is not finite");
  return tensor.g.cast<Complex>() * strain;
}

// The two transition matrix elements the D-shift drives: Delta m_s = +-1
// couples through (Dxz - i Dxy)/sqrt(2), Delta m_s = +-2 through
// (1/2)(Dxx - Dyy) - i Dxy.
struct TransitionCouplings {
  Complex omega1;  // Hz
  Complex omega2;  // Hz
};

inline TransitionCouplings transition_couplings(const DShiftVector& d) {
  const Complex i(0.0, 1.0);
  TransitionCouplings t;
  t.omega1 = (d(4) - i * d(5)) / std::sqrt(2.0);
  t.omega2 = 0.5 * (d(0) - d(1)) - i * d(5);
  return t;
}

// Largest |value| over a map with its location. Ties keep the first grid
// point in index order so maps are reproducible.
struct PeakCoupling {
  double value = 0.0;  // Hz
  double x = 0.0;      // m
  double depth = 0.0;  // m
};

// Both transition terms sampled over space. Points are stored flat in grid
// index order; 1D depth strips carry x = 0 everywhere.
struct SpinCouplingMap {
  std::vector<double> x;               // m
  std::vector<double> depth;           // m
  std::vector<Complex> omega1_term;    // Hz
  std::vector<Complex> omega2_term;    // Hz
  Normalization normalization = Normalization::per_phonon;
  double phonon_energy = 0.0;          // J, from the input field
  PeakCoupling peak_omega1;
  PeakCoupling peak_omega2;
};

// Imported 2D strain field on arbitrary (x, y-depth) points, per-phonon
// normalized. Strain is engineering Voigt like FieldProfile.
struct StrainGrid {
  std::vector<double> x;      // m
  std::vector<double> y;      // m, depth
  std::vector<StrainVector> strain;
  double phonon_energy = 0.0;  // J
};

namespace detail {

inline double parse_csv_number(const std::string& field, int line) {
  const char* b = field.data();
  const char* e = b + field.size();
  if (b != e && *b == '+') ++b;
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v))
    throw ParseError("strain grid: line " + std::to_string(line) +
                     ": bad number '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline void fold_peak(PeakCoupling& peak, const Complex& value, double x,
                      double depth) {
  const double mag = std::abs(value);
  if (mag > peak.value) {
    peak.value = mag;
    peak.x = x;
    peak.depth = depth;
  }
}

}  // namespace detail

// Reads the documented import format: optional leading '#' comments, one of
// which must set the normalizing energy as "phonon_energy_J = <value>", then
// the exact column header, then one row per point. File shears are tensor
// components (eyz, exz, exy); the loader doubles them into engineering
// Voigt.
inline StrainGrid parse_strain_grid(const std::string& text) {
  static const std::string kHeader =
      "x,y,exx_re,exx_im,eyy_re,eyy_im,ezz_re,ezz_im,"
      "eyz_re,eyz_im,exz_re,exz_im,exy_re,exy_im";

  StrainGrid grid;
  bool have_energy = false;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("phonon_energy_J");
      if (pos != std::string::npos) {
        const auto eq = line.find('=', pos);
        if (eq == std::string::npos)
          throw ParseError("strain grid: line " + std::to_string(lineno) +
                           ": phonon_energy_J needs '= <value>'");
        std::string num = line.substr(eq + 1);
        num.erase(0, num.find_first_not_of(" \t"));
        num.erase(num.find_last_not_of(" \t") + 1);
        grid.phonon_energy = detail::parse_csv_number(num, lineno);
        if (!(grid.phonon_energy > 0.0))
          throw ParseError("strain grid: line " + std::to_string(lineno) +
                           ": phonon_energy_J must be positive");
        have_energy = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != kHeader)
        throw ParseError("strain grid: line " + std::to_string(lineno) +
                         ": header must be '" + kHeader + "'");
      have_header = true;
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (fields.size() != 14)
      throw ParseError("strain grid: line " + std::to_string(lineno) +
                       ": expected 14 fields, got " +
                       std::to_string(fields.size()));
    std::array<double, 14> v{};
    for (std::size_t i = 0; i < 14; ++i)
      v[i] = detail::parse_csv_number(fields[i], lineno);
    grid.x.push_back(v[0]);
    grid.y.push_back(v[1]);
    StrainVector s;
    s(0) = Complex(v[2], v[3]);
    s(1) = Complex(v[4], v[5]);
    s(2) = Complex(v[6], v[7]);
    s(3) = 2.0 * Complex(v[8], v[9]);
    s(4) = 2.0 * Complex(v[10], v[11]);
    s(5) = 2.0 * Complex(v[12], v[13]);
    grid.strain.push_back(s);
  }
  if (!have_header)
    throw ParseError("strain grid: missing column header");
  if (!have_energy)
    throw ParseError(
        "strain grid: missing '# phonon_energy_J = <value>' comment");
  if (grid.strain.empty()) throw ParseError("strain grid: no data rows");
  return grid;
}

inline StrainGrid load_strain_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("strain grid file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_strain_grid(ss.str());
}

namespace detail {

template <typename PointFn>
SpinCouplingMap build_map(std::size_t npts, double phonon_energy,
                          const SpinStrainTensor& tensor, PointFn point) {
  SpinCouplingMap map;
  map.phonon_energy = phonon_energy;
  map.x.reserve(npts);
  map.depth.reserve(npts);
  map.omega1_term.reserve(npts);
  map.omega2_term.reserve(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    const auto [x, depth, strain] = point(i);
    const TransitionCouplings t =
        transition_couplings(zero_field_shift(strain, tensor));
    map.x.push_back(x);
    map.depth.push_back(depth);
    map.omega1_term.push_back(t.omega1);
    map.omega2_term.push_back(t.omega2);
    fold_peak(map.peak_omega1, t.omega1, x, depth);
    fold_peak(map.peak_omega2, t.omega2, x, depth);
  }
  return map;
}

}  // namespace detail

// Coupling terms along a 1D mode profile, restricted to the substrate where
// the defects live: only points at depth >= substrate_top (the film/substrate
// interface) enter the map. Requires a per-phonon profile; any other
// normalization would silently rescale every reported Hz value.
inline SpinCouplingMap coupling_map(const FieldProfile& fields,
                                    const SpinStrainTensor& tensor,
                                    double substrate_top) {
  if (fields.normalization != Normalization::per_phonon)
    throw DomainError("coupling_map: fields must be per_phonon normalized");
  if (!(substrate_top >= 0.0) || !std::isfinite(substrate_top))
    throw DomainError("coupling_map: substrate_top must be >= 0");
  if (fields.depth.size() != fields.strain.size())
    throw DomainError("coupling_map: profile depth/strain size mismatch");

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < fields.depth.size(); ++i)
    if (fields.depth[i] >= substrate_top) keep.push_back(i);
  if (keep.empty())
    throw DomainError("coupling_map: no profile points below substrate_top");

  return detail::build_map(
      keep.size(), fields.phonon_energy, tensor, [&](std::size_t i) {
        const std::size_t k = keep[i];
        return std::tuple<double, double, const StrainVector&>(
            0.0, fields.depth[k], fields.strain[k]);
      });
}

// Same over an imported 2D grid; y is depth, so the substrate mask keeps
// points with y >= substrate_top.
inline SpinCouplingMap coupling_map(const StrainGrid& grid,
                                    const SpinStrainTensor& tensor,
                                    double substrate_top) {
  if (!(grid.phonon_energy > 0.0))
    throw DomainError("coupling_map: grid must be per_phonon normalized");
  if (!(substrate_top >= 0.0) || !std::isfinite(substrate_top))
    throw DomainError("coupling_map: substrate_top must be >= 0");
  if (grid.x.size() != grid.y.size() || grid.x.size() != grid.strain.size())
    throw DomainError("coupling_map: grid column size mismatch");

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < grid.y.size(); ++i)
    if (grid.y[i] >= substrate_top) keep.push_back(i);
  if (keep.empty())
    throw DomainError("coupling_map: no grid points below substrate_top");

  return detail::build_map(
      keep.size(), grid.phonon_energy, tensor, [&](std::size_t i) {
        const std::size_t k = keep[i];
        return std::tuple<double, double, const StrainVector&>(
            grid.x[k], grid.y[k], grid.strain[k]);
      });
}

// CSV for plotting: one row per point in grid index order, %.17g so the
// bytes are a pure function of the map.
inline std::string serialize_coupling_map_csv(const SpinCouplingMap& map) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string out;
  out += "# spin coupling map, per-phonon normalization\n";
  out += "# phonon_energy_J = " + num(map.phonon_energy) + "\n";
  out += "x,y,omega1_re,omega1_im,omega2_re,omega2_im\n";
  for (std::size_t i = 0; i < map.x.size(); ++i) {
    out += num(map.x[i]) + "," + num(map.depth[i]) + "," +
           num(map.omega1_term[i].real()) + "," +
           num(map.omega1_term[i].imag()) + "," +
           num(map.omega2_term[i].real()) + "," +
           num(map.omega2_term[i].imag()) + "\n";
  }
  return out;
}

}  // namespace saw
