#pragma once

// Acoustoelectric amplifier power budget for a semiconductor film on a
// piezoelectric waveguide: DC dissipation at the maximum-gain drift point,
// width/mobility design maps, and the waveguide-vs-slab wave-mixing
// enhancement under the fixed-pump amplitude scaling model.

#include <cmath>
#include <string>
#include <vector>

#include "saw/errors.hpp"
#include "saw/materials.hpp"
#include "saw/units.hpp"

namespace saw {

// Parameters of one amplifier section. The semiconductor channel (carrier
// density N, mobility mu, thickness d) rides on a piezoelectric guide of
// width w and interaction length L0 carrying a wave at velocity v_a.
// permittivity_sum is eps0 + eps_p, vacuum plus the effective piezoelectric
// surface permittivity seen by the space-charge wave.
struct AeDeviceParams {
  double carrier_density = 0.0;    // 1/m^3
  double mobility = 0.0;           // m^2/(V s)
  double width = 0.0;              // m
  double thickness = 0.0;          // m, semiconductor film
  double length = 0.0;             // m, interaction length
  double acoustic_velocity = 0.0;  // m/s
  double permittivity_sum = 0.0;   // F/m
  double elementary_charge = constants::elementary_charge;  // C
};

namespace detail {

inline void check_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(name) + " must be positive and finite");
}

inline void check_device(const AeDeviceParams& p) {
  check_positive(p.carrier_density, "carrier_density");
  check_positive(p.mobility, "mobility");
  check_positive(p.width, "width");
  check_positive(p.thickness, "thickness");
  check_positive(p.length, "length");
  check_positive(p.acoustic_velocity, "acoustic_velocity");
  check_positive(p.permittivity_sum, "permittivity_sum");
  check_positive(p.elementary_charge, "elementary_charge");
}

}  // namespace detail

// eps0 + sqrt(eps11 * eps33) of the piezoelectric film, the same surface
// effective permittivity convention the IDT static capacitance uses.
inline double default_permittivity_sum(const MaterialTensors& film) {
  const double e11 = film.permittivity(0, 0);
  const double e33 = film.permittivity(2, 2);
  if (!(e11 > 0.0) || !(e33 > 0.0))
    throw DomainError("film permittivity must be positive");
  return constants::eps0 + std::sqrt(e11 * e33);
}

// DC power dissipated in the channel when the drift field is set for maximum
// acoustoelectric gain:
//
//   P = (q N mu w d / L0) * (v_a L0 / mu + N q d L0 / (eps0 + eps_p))^2
//
// The first velocity term is the drift bias, the second the space-charge
// field of the carriers themselves. Exactly linear in width.
inline double pdc_max(const AeDeviceParams& p) {
  detail::check_device(p);
  const double q = p.elementary_charge;
  const double drift = p.acoustic_velocity * p.length / p.mobility;
  const double space_charge =
      p.carrier_density * q * p.thickness * p.length / p.permittivity_sum;
  const double prefactor = q * p.carrier_density * p.mobility * p.width *
                           p.thickness / p.length;
  const double voltage = drift + space_charge;
  return prefactor * voltage * voltage;
}

// Mobility that minimizes pdc_max with everything else held fixed. Stationary
// point of the two competing terms: drift bias falls with mu, channel
// conductance rises with it.
inline double optimal_mobility(const AeDeviceParams& p) {
  detail::check_device(p);
  return p.acoustic_velocity * p.permittivity_sum /
         (p.carrier_density * p.elementary_charge * p.thickness);
}

// pdc_max evaluated over a design grid. power[i][j] pairs mobility[i] with
// width[j]; every row is monotone increasing in width.
struct AePowerGrid {
  std::vector<double> width;     // m
  std::vector<double> mobility;  // m^2/(V s)
  std::vector<std::vector<double>> power;  // W, power[mobility][width]
};

inline AePowerGrid pdc_map(const AeDeviceParams& params_template,
                           const std::vector<double>& width_range,
                           const std::vector<double>& mobility_range) {
  if (width_range.empty() || mobility_range.empty())
    throw DomainError("pdc_map ranges must be non-empty");
  AePowerGrid grid;
  grid.width = width_range;
  grid.mobility = mobility_range;
  grid.power.reserve(mobility_range.size());
  for (double mu : mobility_range) {
    std::vector<double> row;
    row.reserve(width_range.size());
    for (double w : width_range) {
      AeDeviceParams p = params_template;
      p.mobility = mu;
      p.width = w;
      row.push_back(pdc_max(p));
    }
    grid.power.push_back(std::move(row));
  }
  return grid;
}

// Fractional DC power saved by the narrow device at identical channel and
// drive settings, 1 - P_wg / P_slab. With only the width differing this is
// 1 - w_wg / w_slab by linearity.
inline double pdc_reduction(const AeDeviceParams& slab,
                            const AeDeviceParams& waveguide) {
  return 1.0 - pdc_max(waveguide) / pdc_max(slab);
}

// Same comparison with the RF drive budget included. Both devices must
// deliver the same acoustic power at the output, so the waveguide drive is
// raised by its excess propagation loss over the interaction length and the
// totals (DC dissipation + drive) are compared:
//
//   reduction = 1 - (P_wg + P_drive 10^(excess_db/10)) / (P_slab + P_drive)
//
// excess_db is the waveguide-minus-slab loss over the length (dB, >= 0 for a
// lossier guide), drive_power the slab-referenced acoustic drive in W.
inline double pdc_reduction_loss_adjusted(const AeDeviceParams& slab,
                                          const AeDeviceParams& waveguide,
                                          double excess_loss_db,
                                          double drive_power) {
  if (!std::isfinite(excess_loss_db))
    throw DomainError("excess_loss_db must be finite");
  if (!(drive_power >= 0.0) || !std::isfinite(drive_power))
    throw DomainError("drive_power must be non-negative and finite");
  const double penalty = std::pow(10.0, excess_loss_db / 10.0);
  return 1.0 - (pdc_max(waveguide) + drive_power * penalty) /
                   (pdc_max(slab) + drive_power);
}

// Wave-mixing amplitude gain of a narrow guide over a wide slab at fixed
// pump power: intensity concentrates as 1/width, so the strain amplitude
// entering the mixing product scales as 1/sqrt(width). This is the scaling
// model only, not an evaluation of the mixing coefficient itself.
inline double mixing_enhancement(double slab_width, double waveguide_width) {
  detail::check_positive(slab_width, "slab_width");
  detail::check_positive(waveguide_width, "waveguide_width");
  return std::sqrt(slab_width / waveguide_width);
}

// Calibration hook for the same model: given a measured mixing amplitude at
// one reference width, predict it at another. Units follow the reference.
inline double mixing_amplitude(double width, double reference_amplitude,
                               double reference_width) {
  detail::check_positive(width, "width");
  detail::check_positive(reference_width, "reference_width");
  if (!std::isfinite(reference_amplitude))
    throw DomainError("reference_amplitude must be finite");
  return reference_amplitude * std::sqrt(reference_width / width);
}

}  // namespace saw
