#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "saw/errors.hpp"
#include "saw/units.hpp"

namespace saw {

// Velocity and coupling of the guided mode an IDT launches; the separating
// link between the dispersion solver and the electrical model.
struct ModeParams {
  double velocity = 0.0;  // m/s
  double k2 = 0.0;        // electromechanical coupling, dimensionless
};

// Transversal (non-reflective) interdigital transducer geometry. The
// acoustic wavelength is twice the pitch; center frequency f0 = v / (2 pitch).
struct IdtDesign {
  int pairs = 0;            // N, electrode pairs
  double aperture = 0.0;    // W, m
  double pitch = 0.0;       // electrode period / 2, m
  double static_capacitance_per_pair_per_length = 0.0;  // C_s, F/m
  ModeParams mode;

  double wavelength() const { return 2.0 * pitch; }
  double center_frequency() const { return mode.velocity / (2.0 * pitch); }
  double static_capacitance() const {
    return pairs * static_capacitance_per_pair_per_length * aperture;
  }
};

struct AdmittanceSpectrum {
  std::vector<double> frequency_grid;  // Hz
  std::vector<double> conductance;     // S
  std::vector<double> susceptance;     // S
  double static_capacitance = 0.0;     // C_T = N Cs W, F
};

// Per-pair static capacitance per unit aperture for electrodes at 50%
// metallization on a surface with effective permittivity eps_eff (absolute,
// F/m): C_s = eps_eff + eps0, the K(k)/K(k') elliptic factor being 1 at
// eta = 0.5. eps_eff of an anisotropic surface is sqrt(eps11 * eps33).
inline double static_capacitance_per_pair(double eps_eff_abs) {
  if (!(eps_eff_abs >= constants::eps0))
    throw DomainError("static_capacitance_per_pair: eps_eff below vacuum");
  return eps_eff_abs + constants::eps0;
}

// Default C_s for the AlScN-on-SiC surface: the field at h/lambda ~ 0.6
// mostly samples the film, whose effective permittivity is
// sqrt(eps11 * eps33) of the alscn42 record.
inline double default_cs_alscn_sic() {
  return static_capacitance_per_pair(std::sqrt(17.65 * 24.94) * constants::eps0);
}

namespace detail {

inline void check_design(const IdtDesign& d) {
  if (d.pairs < 1) throw DomainError("IdtDesign: pairs must be >= 1");
  if (!(d.aperture > 0.0)) throw DomainError("IdtDesign: aperture must be > 0");
  if (!(d.pitch > 0.0)) throw DomainError("IdtDesign: pitch must be > 0");
  if (!(d.static_capacitance_per_pair_per_length > 0.0))
    throw DomainError("IdtDesign: C_s must be > 0");
  if (!(d.mode.velocity > 0.0)) throw DomainError("IdtDesign: mode velocity must be > 0");
  if (!(d.mode.k2 > 0.0 && d.mode.k2 < 1.0))
    throw DomainError("IdtDesign: k2 must be in (0, 1)");
}

}  // namespace detail

// Crossed-field Mason model of the IDT admittance Y = G + iB:
//   G(f) = G0 sinc^2(X),  X = N pi (f - f0) / f0,  G0 = 8 k2 f0 Cs W N^2
//   B(f) = G0 (sin 2X - 2X) / (2 X^2) + 2 pi f C_T
// The grid must span at least f0 +/- 3 f0/N (main lobe plus the first two
// sidelobes on each side).
inline AdmittanceSpectrum synthesize_admittance(
    const IdtDesign& design, const std::vector<double>& frequency_grid) {
  detail::check_design(design);
  if (frequency_grid.size() < 2)
    throw DomainError("synthesize_admittance: need at least 2 grid points");
  for (size_t i = 0; i + 1 < frequency_grid.size(); ++i)
    if (!(frequency_grid[i] < frequency_grid[i + 1]))
      throw DomainError("synthesize_admittance: grid must be strictly increasing");

  const double f0 = design.center_frequency();
  const int N = design.pairs;
  const double span = 3.0 * f0 / N;
  if (frequency_grid.front() > f0 - span || frequency_grid.back() < f0 + span)
    throw DomainError(
        "synthesize_admittance: grid must span f0 +/- 3 f0/N = [" +
        std::to_string(f0 - span) + ", " + std::to_string(f0 + span) +
        "] Hz, got [" + std::to_string(frequency_grid.front()) + ", " +
        std::to_string(frequency_grid.back()) + "]");

  const double cs_w =
      design.static_capacitance_per_pair_per_length * design.aperture;
  const double G0 = 8.0 * design.mode.k2 * f0 * cs_w * N * N;
  const double C_T = design.static_capacitance();

  AdmittanceSpectrum out;
  out.frequency_grid = frequency_grid;
  out.static_capacitance = C_T;
  out.conductance.reserve(frequency_grid.size());
  out.susceptance.reserve(frequency_grid.size());
  for (double f : frequency_grid) {
    const double X = N * M_PI * (f - f0) / f0;
    double sinc = 1.0, rad = 0.0;
    if (X != 0.0) {
      sinc = std::sin(X) / X;
      rad = (std::sin(2.0 * X) - 2.0 * X) / (2.0 * X * X);
    }
    out.conductance.push_back(G0 * sinc * sinc);
    out.susceptance.push_back(G0 * rad + 2.0 * M_PI * f * C_T);
  }
  return out;
}

// Complex admittance at a single frequency, same model as the spectrum.
inline Complex admittance_at(const IdtDesign& design, double f) {
  detail::check_design(design);
  const double f0 = design.center_frequency();
  const int N = design.pairs;
  const double cs_w =
      design.static_capacitance_per_pair_per_length * design.aperture;
  const double G0 = 8.0 * design.mode.k2 * f0 * cs_w * N * N;
  const double X = N * M_PI * (f - f0) / f0;
  double sinc = 1.0, rad = 0.0;
  if (X != 0.0) {
    sinc = std::sin(X) / X;
    rad = (std::sin(2.0 * X) - 2.0 * X) / (2.0 * X * X);
  }
  return Complex(G0 * sinc * sinc,
                 G0 * rad + 2.0 * M_PI * f * design.static_capacitance());
}

inline Complex impedance_s11(Complex Z, double Z0) {
  if (!(Z0 > 0.0)) throw DomainError("impedance_s11: Z0 must be > 0");
  return (Z - Z0) / (Z + Z0);
}

inline Complex s11_to_impedance(Complex s11, double Z0) {
  if (!(Z0 > 0.0)) throw DomainError("s11_to_impedance: Z0 must be > 0");
  if (std::abs(s11 - Complex(1.0, 0.0)) < 1e-12)
    throw DomainError("s11_to_impedance: S11 = 1 corresponds to infinite impedance");
  if (std::abs(s11) >= 1.0)
    throw DomainError("s11_to_impedance: |S11| >= 1 is not a passive one-port");
  return Z0 * (Complex(1.0, 0.0) + s11) / (Complex(1.0, 0.0) - s11);
}

struct MatchBounds {
  int pairs_min = 1;
  int pairs_max = 1;
  double aperture_min = 0.0;  // m
  double aperture_max = 0.0;  // m
  int aperture_steps = 61;
};

struct MatchResult {
  IdtDesign design;
  double residual = 0.0;  // |Z(f0) - Z0|, ohm
  std::string status = "ok";
};

// Grid search over (N, W) minimizing |Z(f0) - Z0| at the mode's center
// frequency for the given wavelength (pitch = wavelength/2). Ties broken
// toward lowest N, then lowest W, by strict-improvement iteration order.
inline MatchResult match_design(double target_z0, const ModeParams& mode,
                                double cs, double wavelength,
                                const MatchBounds& bounds) {
  if (!(target_z0 > 0.0)) throw DomainError("match_design: target Z0 must be > 0");
  if (bounds.pairs_min < 1 || bounds.pairs_max < bounds.pairs_min)
    throw DomainError("match_design: empty pairs range");
  if (!(bounds.aperture_min > 0.0) || bounds.aperture_max < bounds.aperture_min)
    throw DomainError("match_design: empty aperture range");
  if (bounds.aperture_steps < 1)
    throw DomainError("match_design: aperture_steps must be >= 1");

  MatchResult best;
  best.residual = std::numeric_limits<double>::infinity();
  const int ws = (bounds.aperture_max > bounds.aperture_min)
                     ? bounds.aperture_steps
                     : 1;
  for (int n = bounds.pairs_min; n <= bounds.pairs_max; ++n) {
    for (int wi = 0; wi < ws; ++wi) {
      const double w =
          (ws == 1) ? bounds.aperture_min
                    : bounds.aperture_min + (bounds.aperture_max - bounds.aperture_min) *
                                                static_cast<double>(wi) / (ws - 1);
      IdtDesign d;
      d.pairs = n;
      d.aperture = w;
      d.pitch = wavelength / 2.0;
      d.static_capacitance_per_pair_per_length = cs;
      d.mode = mode;
      const Complex Z = 1.0 / admittance_at(d, d.center_frequency());
      const double r = std::abs(Z - target_z0);
      if (r < best.residual) {
        best.residual = r;
        best.design = d;
      }
    }
  }
  if (best.residual > target_z0)
    best.status = "warning: no reasonable match (best residual " +
                  std::to_string(best.residual) + " ohm exceeds Z0)";
  return best;
}

}  // namespace saw
