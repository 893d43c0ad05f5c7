#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "saw/errors.hpp"
#include "saw/materials.hpp"
#include "saw/stroh.hpp"
#include "saw/units.hpp"

namespace saw {

enum class TopBc { free_open, free_shorted };
enum class ModeLabel { rayleigh_like, sezawa_like, other };
enum class Normalization { unit_power, per_phonon };

inline const char* to_string(ModeLabel l) {
  switch (l) {
    case ModeLabel::rayleigh_like: return "rayleigh_like";
    case ModeLabel::sezawa_like:   return "sezawa_like";
    case ModeLabel::other:         return "other";
  }
  return "?";
}

struct Layer {
  MaterialTensors material;
  double thickness = 0.0;  // m
};

// Layered half-space: layers listed from the top surface downward, then a
// substrate occupying z > sum(thicknesses). Depth coordinate z is 0 at the
// surface and positive downward.
struct LayerStack {
  std::vector<Layer> layers;
  MaterialTensors substrate;
  TopBc top_bc = TopBc::free_open;

  double total_thickness() const {
    double h = 0.0;
    for (const auto& l : layers) h += l.thickness;
    return h;
  }
};

struct FieldProfile {
  std::vector<double> depth;                           // m
  std::vector<Eigen::Vector3cd> displacement;          // m
  std::vector<Eigen::Matrix<Complex, 6, 1>> strain;    // Voigt, engineering
  std::vector<Complex> potential;                      // V
  Normalization normalization = Normalization::unit_power;
  double phonon_energy = 0.0;  // J per wavelength, set when per_phonon
};

struct ModeSolution {
  ModeLabel label = ModeLabel::other;
  double phase_velocity = 0.0;  // m/s
  double wavelength = 0.0;      // m
  double frequency = 0.0;       // Hz, = phase_velocity / wavelength
  double k2 = std::numeric_limits<double>::quiet_NaN();  // set by coupling_coefficient
  FieldProfile fields;
};

struct SearchWindow {
  double v_min = 0.0;
  double v_max = 0.0;
  int grid_points = 400;
};

namespace detail {

// Propagation along +x, layering normal +z (depth axis).
inline const Eigen::Vector3d kProp{1.0, 0.0, 0.0};
inline const Eigen::Vector3d kNormal{0.0, 0.0, 1.0};

constexpr double kDecayImag = 1e-8;  // Im p threshold for substrate decay

struct LayerWaves {
  StrohEigen eig;
  double thickness = 0.0;
};

// Everything needed to evaluate boundary conditions and rebuild fields.
struct Assembly {
  Eigen::MatrixXcd A;          // row+column normalized boundary matrix
  Eigen::VectorXd col_norms;   // column norms removed from A
  bool leaky = false;          // substrate decay condition failed
  std::vector<LayerWaves> layers;
  StrohEigen sub;
  std::vector<int> sub_sel;    // decaying substrate columns
  double k = 0.0;              // 2 pi / wavelength
};

// Phase factor referenced so that |factor| <= 1 everywhere in the layer:
// decaying-down waves referenced at the layer top, growing-down waves at the
// layer bottom. Keeps thick layers from overflowing the boundary matrix.
inline Complex phase(Complex p, double k, double z, double h) {
  const double zr = (p.imag() >= 0.0) ? 0.0 : h;
  return std::exp(Complex(0.0, 1.0) * k * p * (z - zr));
}

inline Assembly assemble(const LayerStack& stack, double v, double wavelength,
                         TopBc bc) {
  Assembly out;
  out.k = 2.0 * M_PI / wavelength;
  const int nlay = static_cast<int>(stack.layers.size());
  out.layers.reserve(nlay);
  for (const auto& l : stack.layers) {
    ScaledMaterial sm(l.material);
    out.layers.push_back({stroh_eigen(sm, v, kProp, kNormal), l.thickness});
  }
  ScaledMaterial ssub(stack.substrate);
  out.sub = stroh_eigen(ssub, v, kProp, kNormal);
  for (int r = 0; r < 8; ++r)
    if (out.sub.p(r).imag() > kDecayImag) out.sub_sel.push_back(r);
  if (out.sub_sel.size() != 4) {
    out.leaky = true;
    return out;
  }

  const int dim = 8 * nlay + 4;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  const Complex iu(0.0, 1.0);

  // Top boundary rows 0..3: three traction components, then the electrical
  // condition. Open surface couples the potential to a decaying vacuum
  // half-space; in scaled units that is l4 - i*phi = 0. Shorted grounds the
  // surface potential.
  if (nlay == 0) {
    for (int j = 0; j < 4; ++j) {
      const int r = out.sub_sel[j];
      A.block<3, 1>(0, j) = out.sub.xi.block<3, 1>(4, r);
      A(3, j) = (bc == TopBc::free_open)
                    ? out.sub.xi(7, r) - iu * out.sub.xi(3, r)
                    : out.sub.xi(3, r);
    }
  } else {
    const auto& l0 = out.layers[0];
    for (int j = 0; j < 8; ++j) {
      const Complex E = phase(l0.eig.p(j), out.k, 0.0, l0.thickness);
      A.block<3, 1>(0, j) = l0.eig.xi.block<3, 1>(4, j) * E;
      A(3, j) = ((bc == TopBc::free_open)
                     ? l0.eig.xi(7, j) - iu * l0.eig.xi(3, j)
                     : l0.eig.xi(3, j)) *
                E;
    }
    // Interface rows: continuity of the full 8-vector (u, phi, tractions,
    // normal electric displacement) between consecutive media.
    int row = 4;
    for (int li = 0; li < nlay; ++li) {
      const auto& cur = out.layers[li];
      for (int j = 0; j < 8; ++j) {
        const Complex E = phase(cur.eig.p(j), out.k, cur.thickness, cur.thickness);
        A.block<8, 1>(row, 8 * li + j) = cur.eig.xi.col(j) * E;
      }
      if (li + 1 < nlay) {
        const auto& nxt = out.layers[li + 1];
        for (int j = 0; j < 8; ++j) {
          const Complex E = phase(nxt.eig.p(j), out.k, 0.0, nxt.thickness);
          A.block<8, 1>(row, 8 * (li + 1) + j) = -nxt.eig.xi.col(j) * E;
        }
      } else {
        for (int js = 0; js < 4; ++js) {
          const int r = out.sub_sel[js];
          A.block<8, 1>(row, 8 * nlay + js) = -out.sub.xi.col(r);
        }
      }
      row += 8;
    }
  }

  // Row then column normalization: traction and displacement rows differ by
  // many orders of magnitude in raw units and would destroy numerical rank.
  Eigen::VectorXd rn = A.rowwise().norm();
  for (int i = 0; i < dim; ++i)
    if (rn(i) > 0.0) A.row(i) /= rn(i);
  out.col_norms = A.colwise().norm();
  for (int j = 0; j < dim; ++j)
    if (out.col_norms(j) > 0.0) A.col(j) /= out.col_norms(j);
  out.A = A;
  return out;
}

// Smallest singular value of the normalized boundary matrix. Invariant to
// eigenvector ordering and phase, unlike the raw determinant, which makes it
// the reliable root functional for mode search.
inline double sigma_min(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double response(const LayerStack& stack, double v, double wavelength,
                       TopBc bc) {
  Assembly a = assemble(stack, v, wavelength, bc);
  if (a.leaky) return std::numeric_limits<double>::infinity();
  return sigma_min(a.A);
}

}  // namespace detail

struct BoundaryProbe {
  Complex determinant{0.0, 0.0};  // det of the normalized boundary matrix
  double sigma_min = 0.0;         // smallest singular value of the same
  bool leaky = false;             // substrate decay condition failed
};

// Evaluates the boundary-condition system at one trial velocity. The
// determinant vanishes at guided-mode velocities; sigma_min is the
// conditioning-robust functional the solver minimizes. Above the substrate's
// slow bulk shear threshold the decay condition fails and only the leaky
// flag is meaningful.
inline BoundaryProbe boundary_determinant(const LayerStack& stack,
                                          double velocity, double wavelength) {
  if (!(velocity > 0.0)) throw DomainError("boundary_determinant: velocity must be > 0");
  if (!(wavelength > 0.0)) throw DomainError("boundary_determinant: wavelength must be > 0");
  detail::Assembly a = detail::assemble(stack, velocity, wavelength, stack.top_bc);
  BoundaryProbe out;
  out.leaky = a.leaky;
  if (a.leaky) return out;
  out.determinant = a.A.determinant();
  out.sigma_min = detail::sigma_min(a.A);
  return out;
}

// Slowest substrate bulk velocity at which partial waves stop decaying with
// depth (the trapping threshold for true surface modes). Found by bisection
// on the decay-count predicate.
inline double limiting_velocity(const MaterialTensors& substrate,
                                double v_lo = 500.0, double v_hi = 30000.0) {
  ScaledMaterial sm(substrate);
  auto trapped = [&](double v) {
    StrohEigen e = stroh_eigen(sm, v, detail::kProp, detail::kNormal);
    int n = 0;
    for (int r = 0; r < 8; ++r)
      if (e.p(r).imag() > detail::kDecayImag) ++n;
    return n == 4;
  };
  if (!trapped(v_lo))
    throw DomainError("limiting_velocity: lower bracket already leaky");
  if (trapped(v_hi))
    throw DomainError("limiting_velocity: upper bracket still trapped");
  for (int it = 0; it < 200 && v_hi - v_lo > 1e-6 * v_hi; ++it) {
    const double mid = 0.5 * (v_lo + v_hi);
    (trapped(mid) ? v_lo : v_hi) = mid;
  }
  return 0.5 * (v_lo + v_hi);
}

// Search window covering everything from deep subsonic up to just below the
// substrate trapping threshold; the default for operations that re-solve.
inline SearchWindow default_window(const LayerStack& stack,
                                   int grid_points = 400) {
  const double v_limit = limiting_velocity(stack.substrate);
  return SearchWindow{0.4 * v_limit, 0.9995 * v_limit, grid_points};
}

namespace detail {

// Reconstructs the partial-wave amplitudes (raw, un-normalized basis) from
// the null vector of the normalized boundary matrix.
inline Eigen::VectorXcd null_amplitudes(const Assembly& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.A, Eigen::ComputeFullV);
  const int n = static_cast<int>(a.A.cols());
  const double s_last = svd.singularValues()(n - 1);
  const double s_prev = svd.singularValues()(n - 2);
  // Null-space dimension must be exactly one at a simple root.
  if (s_prev < 1e-6)
    throw SolverError("mode fields: null-space dimension exceeds 1 (degenerate mode)");
  (void)s_last;
  Eigen::VectorXcd c = svd.matrixV().col(n - 1);
  for (int j = 0; j < n; ++j)
    if (a.col_norms(j) > 0.0) c(j) /= a.col_norms(j);
  return c;
}

struct RawField {
  Eigen::Vector3cd u;        // scaled displacement
  Complex phi = 0.0;         // scaled potential
  Eigen::Vector3cd du;       // d(u)/dz analytic, scaled
  Complex dphi = 0.0;        // d(phi)/dz
};

// Evaluates the generalized displacement 4-vector and its depth derivative
// at one depth from the partial-wave expansion.
inline RawField eval_field(const Assembly& a, const Eigen::VectorXcd& c,
                           double z) {
  RawField f;
  f.u.setZero();
  const Complex iu(0.0, 1.0);
  const int nlay = static_cast<int>(a.layers.size());
  double ztop = 0.0;
  for (int li = 0; li < nlay; ++li) {
    const auto& L = a.layers[li];
    if (z <= ztop + L.thickness + 1e-15 || li == nlay - 1) {
      if (z <= ztop + L.thickness + 1e-15) {
        const double zl = z - ztop;
        for (int j = 0; j < 8; ++j) {
          const Complex E = phase(L.eig.p(j), a.k, zl, L.thickness);
          const Complex amp = c(8 * li + j) * E;
          f.u += amp * L.eig.xi.block<3, 1>(0, j);
          f.phi += amp * L.eig.xi(3, j);
          const Complex d = iu * a.k * L.eig.p(j) * amp;
          f.du += d * L.eig.xi.block<3, 1>(0, j);
          f.dphi += d * L.eig.xi(3, j);
        }
        return f;
      }
    }
    ztop += L.thickness;
  }
  // Substrate, referenced at the last interface.
  const double zs = z - ztop;
  for (size_t js = 0; js < a.sub_sel.size(); ++js) {
    const int r = a.sub_sel[js];
    const Complex E = std::exp(iu * a.k * a.sub.p(r) * zs);
    const Complex amp = c(8 * nlay + static_cast<int>(js)) * E;
    f.u += amp * a.sub.xi.block<3, 1>(0, r);
    f.phi += amp * a.sub.xi(3, r);
    const Complex d = iu * a.k * a.sub.p(r) * amp;
    f.du += d * a.sub.xi.block<3, 1>(0, r);
    f.dphi += d * a.sub.xi(3, r);
  }
  return f;
}

// Engineering Voigt strain from the field point, with the e^{ikx} in-plane
// dependence folded in: S = [ik u1, 0, u3', u2', u1' + ik u3, ik u2].
inline Eigen::Matrix<Complex, 6, 1> strain_voigt(const RawField& f, double k) {
  const Complex ik(0.0, k);
  Eigen::Matrix<Complex, 6, 1> S;
  S(0) = ik * f.u(0);
  S(1) = 0.0;
  S(2) = f.du(2);
  S(3) = f.du(1);
  S(4) = f.du(0) + ik * f.u(2);
  S(5) = ik * f.u(1);
  return S;
}

}  // namespace detail

// Time-averaged acoustic energy per wavelength of propagation, carried in a
// transverse strip one wavelength wide. Computed as twice the kinetic-energy
// depth integral: kinetic and potential parts are equal for a time-harmonic
// mode, and the kinetic part needs only density and |u|^2.
inline double acoustic_energy_per_wavelength(const LayerStack& stack,
                                             const FieldProfile& f,
                                             double frequency,
                                             double wavelength) {
  const double omega = 2.0 * M_PI * frequency;
  double ke = 0.0;
  double ztop = 0.0;
  size_t li = 0;
  for (size_t i = 0; i + 1 < f.depth.size(); ++i) {
    const double zm = 0.5 * (f.depth[i] + f.depth[i + 1]);
    while (li < stack.layers.size() && zm > ztop + stack.layers[li].thickness) {
      ztop += stack.layers[li].thickness;
      ++li;
    }
    const double rho = (li < stack.layers.size())
                           ? stack.layers[li].material.density
                           : stack.substrate.density;
    const double a2 = 0.5 * (f.displacement[i].squaredNorm() +
                             f.displacement[i + 1].squaredNorm());
    ke += rho * a2 * (f.depth[i + 1] - f.depth[i]);
  }
  ke *= 0.25 * omega * omega;
  return 2.0 * ke * wavelength * wavelength;
}

// Depth of the peak strain-energy density, the feature that separates the
// surface-hugging fundamental from the interface-guided overtone.
inline double strain_energy_peak_depth(const LayerStack& stack,
                                       const FieldProfile& f) {
  double best = -1.0, zbest = 0.0;
  double ztop = 0.0;
  size_t li = 0;
  for (size_t i = 0; i < f.depth.size(); ++i) {
    while (li < stack.layers.size() &&
           f.depth[i] > ztop + stack.layers[li].thickness) {
      ztop += stack.layers[li].thickness;
      ++li;
    }
    const MaterialTensors& m = (li < stack.layers.size())
                                   ? stack.layers[li].material
                                   : stack.substrate;
    const Eigen::Matrix<Complex, 6, 1>& S = f.strain[i];
    // w = 1/4 Re(S^H C S) per the complex-amplitude time average.
    const double w =
        0.25 * (S.adjoint() * m.stiffness.cast<Complex>() * S)(0).real();
    if (w > best) {
      best = w;
      zbest = f.depth[i];
    }
  }
  return zbest;
}

// Depth-resolved mode fields from the boundary-matrix null vector at a
// solved velocity. Depth grid: lambda/64 spacing, extended into the
// substrate until the partial waves have decayed.
inline FieldProfile mode_fields_at(const LayerStack& stack, double velocity,
                                   double wavelength,
                                   Normalization normalization) {
  detail::Assembly a =
      detail::assemble(stack, velocity, wavelength, stack.top_bc);
  if (a.leaky)
    throw SolverError("mode_fields: velocity is above the trapping threshold");
  Eigen::VectorXcd c = detail::null_amplitudes(a);

  const double H = stack.total_thickness();
  double im_min = 1.0;
  for (int r : a.sub_sel) im_min = std::min(im_min, a.sub.p(r).imag());
  const double tail =
      std::clamp(8.0 / (a.k * im_min), 3.0 * wavelength, 60.0 * wavelength);
  const double z_end = H + tail;
  const double dz = wavelength / 64.0;
  const int npts = static_cast<int>(std::ceil(z_end / dz)) + 1;

  FieldProfile out;
  out.normalization = normalization;
  out.depth.resize(npts);
  out.displacement.resize(npts);
  out.strain.resize(npts);
  out.potential.resize(npts);
  for (int i = 0; i < npts; ++i) {
    const double z = i * dz;
    detail::RawField f = detail::eval_field(a, c, z);
    out.depth[i] = z;
    out.displacement[i] = f.u;
    out.potential[i] = f.phi;
    out.strain[i] = detail::strain_voigt(f, a.k);
  }

  // The Stroh basis is dimensionless; pick the physical scale from the
  // requested normalization.
  const double freq = velocity / wavelength;
  const double E1 = acoustic_energy_per_wavelength(stack, out, freq, wavelength);
  double scale = 1.0;
  if (normalization == Normalization::per_phonon) {
    const double target = constants::h_planck * freq;
    scale = std::sqrt(target / E1);
    out.phonon_energy = target;
  } else {
    // unit_power: 1 W carried through a cross-section of width lambda.
    // Power = E_per_wavelength * f when the strip advances one wavelength
    // per period.
    const double P1 = E1 * freq;
    scale = std::sqrt(1.0 / P1);
    out.phonon_energy = 0.0;
  }
  for (int i = 0; i < npts; ++i) {
    out.displacement[i] *= scale;
    out.strain[i] *= scale;
    out.potential[i] *= scale;
  }
  return out;
}

namespace detail {

// Fraction of kinetic energy in the transverse (u2) component, used to
// separate decoupled shear-horizontal (Love) branches from sagittal modes.
inline double transverse_fraction(const FieldProfile& f) {
  double t = 0.0, tot = 0.0;
  for (const auto& u : f.displacement) {
    t += std::norm(u(1));
    tot += u.squaredNorm();
  }
  return (tot > 0.0) ? t / tot : 0.0;
}

inline ModeLabel classify(const LayerStack& stack, const FieldProfile& f,
                          double wavelength) {
  const double H = stack.total_thickness();
  const double zpk = strain_energy_peak_depth(stack, f);
  if (H <= 0.0) return ModeLabel::rayleigh_like;  // bare-substrate surface wave
  // The fundamental keeps its strain-energy peak at the top surface; the
  // first overtone concentrates strain from mid-film down to just below the
  // interface. Anything deeper is a higher-order or poorly confined branch.
  if (zpk <= 0.30 * H) return ModeLabel::rayleigh_like;
  if (zpk <= H + 0.75 * wavelength) return ModeLabel::sezawa_like;
  return ModeLabel::other;
}

struct Root {
  double v = 0.0;
  double residual = 0.0;
};

// Golden-section refinement of a sigma_min bracket down to machine width.
inline Root refine_minimum(const LayerStack& stack, double wavelength, TopBc bc,
                           double lo, double hi, int max_iter = 200) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = response(stack, x1, wavelength, bc);
  double f2 = response(stack, x2, wavelength, bc);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(hi))) break;
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = response(stack, x1, wavelength, bc);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = response(stack, x2, wavelength, bc);
    }
  }
  if (it >= max_iter)
    throw SolverError("solve_modes: refinement exceeded " +
                      std::to_string(max_iter) + " iterations in bracket [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  Root r;
  r.v = 0.5 * (lo + hi);
  r.residual = response(stack, r.v, wavelength, bc);
  return r;
}

// True roots refine to residuals near machine epsilon; pseudo-roots (cusps
// at bulk-wave thresholds) bottom out around 1e-8. The acceptance threshold
// sits between with two orders of margin on each side.
constexpr double kRootAccept = 1e-10;

// Shear-horizontal branches decouple exactly for the symmetric orientations
// and would otherwise be reported alongside the sagittal modes the rest of
// the toolkit consumes; anything with >99% transverse energy is dropped.
constexpr double kShFractionDrop = 0.99;

}  // namespace detail

// Finds guided modes in [v_min, v_max] for the stack's top_bc: coarse scan
// of the sigma_min response, golden-section refinement of each local
// minimum, acceptance by residual, then field construction (per-phonon
// normalized), SH-branch filtering, and labeling. Modes sorted by velocity.
inline std::vector<ModeSolution> solve_modes(const LayerStack& stack,
                                             double wavelength,
                                             const SearchWindow& search) {
  if (!(search.v_min > 0.0) || !(search.v_min < search.v_max))
    throw DomainError("solve_modes: need 0 < v_min < v_max");
  if (search.grid_points < 3)
    throw DomainError("solve_modes: grid_points must be >= 3");
  const double v_limit = limiting_velocity(stack.substrate);
  if (search.v_max > v_limit)
    throw DomainError("solve_modes: v_max " + std::to_string(search.v_max) +
                      " m/s exceeds the substrate trapping threshold " +
                      std::to_string(v_limit) + " m/s (true surface modes only)");

  const int n = search.grid_points;
  std::vector<double> vs(n), sig(n);
  for (int i = 0; i < n; ++i) {
    vs[i] = search.v_min +
            (search.v_max - search.v_min) * static_cast<double>(i) / (n - 1);
    sig[i] = detail::response(stack, vs[i], wavelength, stack.top_bc);
  }

  std::vector<detail::Root> roots;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(sig[i] < sig[i - 1] && sig[i] < sig[i + 1])) continue;
    if (!std::isfinite(sig[i])) continue;
    detail::Root r = detail::refine_minimum(stack, wavelength, stack.top_bc,
                                            vs[i - 1], vs[i + 1]);
    if (r.residual < detail::kRootAccept) {
      if (roots.empty() || std::abs(r.v - roots.back().v) > 1e-3)
        roots.push_back(r);
    }
  }

  std::vector<ModeSolution> modes;
  for (const auto& r : roots) {
    ModeSolution m;
    m.phase_velocity = r.v;
    m.wavelength = wavelength;
    m.frequency = r.v / wavelength;
    m.fields = mode_fields_at(stack, r.v, wavelength, Normalization::per_phonon);
    if (detail::transverse_fraction(m.fields) > detail::kShFractionDrop)
      continue;  // decoupled SH (Love) branch
    m.label = detail::classify(stack, m.fields, wavelength);
    modes.push_back(std::move(m));
  }
  std::sort(modes.begin(), modes.end(),
            [](const ModeSolution& a, const ModeSolution& b) {
              return a.phase_velocity < b.phase_velocity;
            });
  return modes;
}

// Fields of the mode_index-th mode (velocity-ascending order) under a chosen
// normalization. Re-solves within the window, so this is a pure function of
// its arguments.
inline FieldProfile mode_fields(const LayerStack& stack, double wavelength,
                                int mode_index, Normalization normalization,
                                const SearchWindow& search) {
  const auto modes = solve_modes(stack, wavelength, search);
  if (mode_index < 0 || mode_index >= static_cast<int>(modes.size()))
    throw DomainError("mode_fields: mode_index " + std::to_string(mode_index) +
                      " out of range (found " + std::to_string(modes.size()) +
                      " modes)");
  return mode_fields_at(stack, modes[mode_index].phase_velocity, wavelength,
                        normalization);
}

inline FieldProfile mode_fields(const LayerStack& stack, double wavelength,
                                int mode_index, Normalization normalization) {
  return mode_fields(stack, wavelength, mode_index, normalization,
                     default_window(stack));
}

namespace detail {

// Displacement-shape overlap between two profiles on the coarser grid:
// |<u_a, u_b>| / (|u_a| |u_b|). Used to confirm open/shorted mode identity.
inline double field_overlap(const FieldProfile& fa, const FieldProfile& fb) {
  const size_t n = std::min(fa.depth.size(), fb.depth.size());
  Complex inner = 0.0;
  double na = 0.0, nb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    inner += fa.displacement[i].dot(fb.displacement[i]);
    na += fa.displacement[i].squaredNorm();
    nb += fb.displacement[i].squaredNorm();
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(inner) / std::sqrt(na * nb);
}

}  // namespace detail

// k^2 = 2 (v_open - v_short) / v_open for the mode with the given index in
// the open-BC solution, matched to its shorted-BC counterpart by velocity
// proximity plus displacement-shape overlap > 0.9.
inline double coupling_coefficient(const LayerStack& stack, double wavelength,
                                   int mode_index,
                                   const SearchWindow& search) {
  LayerStack open_stack = stack;
  open_stack.top_bc = TopBc::free_open;
  LayerStack short_stack = stack;
  short_stack.top_bc = TopBc::free_shorted;
  const auto open_modes = solve_modes(open_stack, wavelength, search);
  if (mode_index < 0 || mode_index >= static_cast<int>(open_modes.size()))
    throw DomainError("coupling_coefficient: mode_index out of range (found " +
                      std::to_string(open_modes.size()) + " open-BC modes)");
  const auto short_modes = solve_modes(short_stack, wavelength, search);
  const ModeSolution& mo = open_modes[mode_index];

  const ModeSolution* best = nullptr;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& ms : short_modes) {
    const double dv = std::abs(ms.phase_velocity - mo.phase_velocity);
    if (dv < best_score &&
        detail::field_overlap(mo.fields, ms.fields) > 0.9) {
      best_score = dv;
      best = &ms;
    }
  }
  if (best == nullptr)
    throw SolverError(
        "coupling_coefficient: mode lost under shorted BC (no match with "
        "overlap > 0.9)");
  double k2 = 2.0 * (mo.phase_velocity - best->phase_velocity) /
              mo.phase_velocity;
  if (k2 < -1e-6)
    throw SolverError("coupling_coefficient: negative k^2 beyond tolerance (" +
                      std::to_string(k2) + "); mode matching failed");
  return std::max(k2, 0.0);
}

inline double coupling_coefficient(const LayerStack& stack, double wavelength,
                                   int mode_index) {
  return coupling_coefficient(stack, wavelength, mode_index,
                              default_window(stack));
}

struct SweepRow {
  double h_over_lambda = 0.0;
  ModeLabel label = ModeLabel::other;
  double velocity = 0.0;  // m/s, open-BC
  double k2 = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // per-row error text when not "ok"
};

// Solves one sweep point: both boundary conditions, mode matching, k^2 per
// mode. The film thickness (layers[0]) is set to ratio * wavelength.
inline std::vector<SweepRow> sweep_point(const LayerStack& stack_template,
                                         double wavelength, double ratio,
                                         const SearchWindow& search) {
  std::vector<SweepRow> rows;
  LayerStack st = stack_template;
  if (st.layers.empty())
    throw DomainError("dispersion_sweep: stack template has no layers");
  if (!(ratio > 0.0)) throw DomainError("dispersion_sweep: h/lambda must be > 0");
  st.layers[0].thickness = ratio * wavelength;
  st.top_bc = TopBc::free_open;
  LayerStack sh = st;
  sh.top_bc = TopBc::free_shorted;
  try {
    const auto open_modes = solve_modes(st, wavelength, search);
    const auto short_modes = solve_modes(sh, wavelength, search);
    for (const auto& mo : open_modes) {
      SweepRow row;
      row.h_over_lambda = ratio;
      row.label = mo.label;
      row.velocity = mo.phase_velocity;
      const ModeSolution* best = nullptr;
      double best_dv = std::numeric_limits<double>::infinity();
      for (const auto& ms : short_modes) {
        const double dv = std::abs(ms.phase_velocity - mo.phase_velocity);
        if (dv < best_dv && detail::field_overlap(mo.fields, ms.fields) > 0.9) {
          best_dv = dv;
          best = &ms;
        }
      }
      if (best != nullptr) {
        row.k2 = std::max(
            2.0 * (mo.phase_velocity - best->phase_velocity) / mo.phase_velocity,
            0.0);
      } else {
        row.status = "no shorted-BC match";
      }
      rows.push_back(row);
    }
  } catch (const Error& e) {
    SweepRow row;
    row.h_over_lambda = ratio;
    row.status = e.what();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace saw
