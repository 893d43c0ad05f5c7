#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "saw/errors.hpp"
#include "saw/materials.hpp"
#include "saw/units.hpp"

namespace saw {

using Matrix4cd = Eigen::Matrix<Complex, 4, 4>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Matrix8cd = Eigen::Matrix<Complex, 8, 8>;
using Vector8cd = Eigen::Matrix<Complex, 8, 1>;

// Nondimensionalized material view used by the Stroh assembly: stiffness in
// units of c_star, piezo in units of e_star, permittivity in units of eps0.
// With this scaling the generalized displacement (u, phi) and generalized
// traction rows of the eigenvector carry comparable magnitudes.
struct ScaledMaterial {
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> c;
  std::array<std::array<std::array<double, 3>, 3>, 3> e;
  Eigen::Matrix3d eps;
  double density = 0.0;  // kg/m^3, unscaled

  explicit ScaledMaterial(const MaterialTensors& m)
      : c(full_stiffness(m.stiffness)),
        e(full_piezo(m.piezo_stress)),
        eps(m.permittivity / constants::eps0),
        density(m.density) {
    const double cs = scaling::c_star;
    const double es = scaling::e_star;
    for (auto& a : c)
      for (auto& b : a)
        for (auto& d : b)
          for (auto& x : d) x /= cs;
    for (auto& a : e)
      for (auto& b : a)
        for (auto& x : b) x /= es;
  }
};

// The 4x4 block M(a,b) of the piezoelectric acoustic tensor:
//   M_jk  = a_i c_ijkl b_l   (mechanical)
//   M_j4  = a_i e_lij b_l    (piezo column)
//   M_4k  = a_i e_ikl b_l    (piezo row)
//   M_44  = -a_i eps_il b_l  (dielectric)
inline Eigen::Matrix4d acoustic_block(const ScaledMaterial& m,
                                      const Eigen::Vector3d& a,
                                      const Eigen::Vector3d& b) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) s += a(i) * m.c[i][j][k][l] * b(l);
      M(j, k) = s;
    }
  for (int j = 0; j < 3; ++j) {
    double s4 = 0.0, s4r = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l) {
        s4 += a(i) * m.e[l][i][j] * b(l);
        s4r += a(i) * m.e[i][j][l] * b(l);
      }
    M(j, 3) = s4;
    M(3, j) = s4r;
  }
  double s44 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) s44 -= a(i) * m.eps(i, l) * b(l);
  M(3, 3) = s44;
  return M;
}

// One partial wave: fields proportional to exp(ik(m.x + p n.x - v t)) with
// xi = [a; l]: a = generalized displacement (u1,u2,u3,phi), l = generalized
// traction vector (the n-projected stress rows and D.n, divided by ik).
struct StrohEigen {
  Vector8cd p;   // vertical slowness ratios
  Matrix8cd xi;  // columns [a; l]
};

// Solves the 8-dimensional Stroh eigenproblem for phase velocity v along
// direction prop with layering normal `normal` (unit vectors, orthogonal).
//
// Repeated eigenvalues (within 1e-9 relative) are resolved by re-extracting
// an orthonormal basis of the group's invariant subspace, which the dense
// eigensolver does not guarantee; a defective group (geometric multiplicity
// below its count) throws SolverError, and the caller should perturb the
// velocity. Isotropic media always produce such groups, so this resolution
// step is what keeps them solvable at all.
inline StrohEigen stroh_eigen(const ScaledMaterial& m, double v,
                              const Eigen::Vector3d& prop,
                              const Eigen::Vector3d& normal,
                              int retry_depth = 0) {
  const Eigen::Matrix4d Qm = acoustic_block(m, prop, prop);
  const Eigen::Matrix4d R = acoustic_block(m, prop, normal);
  const Eigen::Matrix4d T = acoustic_block(m, normal, normal);
  Eigen::Matrix4d J = Eigen::Matrix4d::Identity();
  J(3, 3) = 0.0;
  const Eigen::Matrix4d Q =
      Qm - (m.density * v * v / scaling::c_star) * J;
  const Eigen::Matrix4d Ti = T.inverse();
  Matrix8d N;
  N.block<4, 4>(0, 0) = -Ti * R.transpose();
  N.block<4, 4>(0, 4) = Ti;
  N.block<4, 4>(4, 0) = R * Ti * R.transpose() - Q;
  N.block<4, 4>(4, 4) = -R * Ti;

  // The real-Schur iteration stagnates at isolated velocities (measure-zero
  // set, but root refinement samples densely enough to hit it). Fall back to
  // the complex Schur path, then to a deterministic velocity nudge well
  // below the refinement tolerance.
  StrohEigen out;
  bool ok = false;
  {
    Eigen::EigenSolver<Matrix8d> es(N);
    if (es.info() == Eigen::Success) {
      out.p = es.eigenvalues();
      out.xi = es.eigenvectors();
      ok = true;
    }
  }
  if (!ok) {
    Eigen::ComplexEigenSolver<Matrix8cd> ces(N.cast<Complex>());
    if (ces.info() == Eigen::Success) {
      out.p = ces.eigenvalues();
      out.xi = ces.eigenvectors();
      ok = true;
    }
  }
  if (!ok) {
    if (retry_depth >= 3)
      throw SolverError("stroh_eigen: eigensolver failed to converge at v = " +
                        std::to_string(v) + " m/s");
    return stroh_eigen(m, v * (1.0 + 4e-12 * (retry_depth + 1)), prop, normal,
                       retry_depth + 1);
  }

  // Deterministic order: ascending real part, imaginary part as tiebreaker.
  std::array<int, 8> idx{0, 1, 2, 3, 4, 5, 6, 7};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const Complex pa = out.p(a), pb = out.p(b);
    if (pa.real() != pb.real()) return pa.real() < pb.real();
    return pa.imag() < pb.imag();
  });
  Vector8cd ps;
  Matrix8cd xs;
  for (int i = 0; i < 8; ++i) {
    ps(i) = out.p(idx[i]);
    xs.col(i) = out.xi.col(idx[i]);
  }
  out.p = ps;
  out.xi = xs;

  // Group repeated eigenvalues and rebuild each group's eigenbasis from the
  // nullspace of (N - p I); dense solvers can return nearly parallel vectors
  // for equal eigenvalues, which collapses the boundary matrix rank.
  std::array<bool, 8> used{};
  for (int i = 0; i < 8; ++i) {
    if (used[i]) continue;
    std::vector<int> grp{i};
    for (int j = i + 1; j < 8; ++j) {
      if (!used[j] &&
          std::abs(out.p(j) - out.p(i)) <
              1e-9 * std::max(1.0, std::abs(out.p(i))))
        grp.push_back(j);
    }
    for (int j : grp) used[j] = true;
    if (grp.size() < 2) continue;
    Complex pbar = 0.0;
    for (int j : grp) pbar += out.p(j);
    pbar /= static_cast<double>(grp.size());
    Matrix8cd M = N.cast<Complex>();
    for (int d = 0; d < 8; ++d) M(d, d) -= pbar;
    Eigen::JacobiSVD<Matrix8cd> svd(M, Eigen::ComputeFullV);
    const int g = static_cast<int>(grp.size());
    if (svd.singularValues()(8 - g) > 1e-6)
      throw SolverError(
          "stroh_eigen: defective eigenvalue group (geometric multiplicity "
          "below algebraic); perturb the velocity");
    for (int t = 0; t < g; ++t) {
      out.xi.col(grp[t]) = svd.matrixV().col(8 - g + t);
      out.p(grp[t]) = pbar;
    }
  }
  return out;
}

}  // namespace saw
