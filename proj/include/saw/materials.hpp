#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "saw/errors.hpp"
#include "saw/units.hpp"

namespace saw {

enum class SymmetryClass { isotropic, hexagonal_6mm, trigonal, cubic, triclinic };

inline const char* to_string(SymmetryClass s) {
  switch (s) {
    case SymmetryClass::isotropic:     return "isotropic";
    case SymmetryClass::hexagonal_6mm: return "hexagonal_6mm";
    case SymmetryClass::trigonal:      return "trigonal";
    case SymmetryClass::cubic:         return "cubic";
    case SymmetryClass::triclinic:     return "triclinic";
  }
  return "?";
}

inline SymmetryClass symmetry_from_string(const std::string& s) {
  if (s == "isotropic") return SymmetryClass::isotropic;
  if (s == "hexagonal_6mm") return SymmetryClass::hexagonal_6mm;
  if (s == "trigonal") return SymmetryClass::trigonal;
  if (s == "cubic") return SymmetryClass::cubic;
  if (s == "triclinic") return SymmetryClass::triclinic;
  throw ParseError("unknown symmetry_class '" + s + "'");
}

// Elastic/piezoelectric/dielectric constants of one material.
//
// Voigt convention: index order (11, 22, 33, 23, 13, 12); the strain vector
// uses engineering shears (factor 2 on the off-diagonal components), so the
// stiffness matrix relates stress to engineering strain and the 3x6 piezo
// stress matrix maps engineering strain to electric displacement.
struct MaterialTensors {
  std::string id;
  double density = 0.0;                      // kg/m^3
  Eigen::Matrix<double, 6, 6> stiffness;     // Pa
  Eigen::Matrix<double, 3, 6> piezo_stress;  // C/m^2
  Eigen::Matrix3d permittivity;              // F/m, absolute
  SymmetryClass symmetry_class = SymmetryClass::triclinic;
  std::string source;
};

namespace voigt {

// Pair of tensor indices (0-based) for each Voigt slot.
inline constexpr std::array<std::pair<int, int>, 6> pairs = {{
    {0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

inline int index(int i, int j) {
  if (i == j) return i;
  int s = i + j;        // (1,2)->3, (0,2)->4, (0,1)->5
  return 6 - s;
}

}  // namespace voigt

// Expands the Voigt stiffness to the full rank-4 tensor c[i][j][k][l].
inline std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>
full_stiffness(const Eigen::Matrix<double, 6, 6>& C) {
  std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c[i][j][k][l] = C(voigt::index(i, j), voigt::index(k, l));
  return c;
}

// Expands the 3x6 piezo stress matrix to the rank-3 tensor e[i][k][l].
inline std::array<std::array<std::array<double, 3>, 3>, 3>
full_piezo(const Eigen::Matrix<double, 3, 6>& E) {
  std::array<std::array<std::array<double, 3>, 3>, 3> e{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        e[i][k][l] = E(i, voigt::index(k, l));
  return e;
}

// Bond stress transformation matrix for a rotation R: sigma' = M sigma.
// Stiffness then transforms as C' = M C M^T and the piezo stress matrix as
// e' = R e M^T (engineering-strain convention).
inline Eigen::Matrix<double, 6, 6> bond_matrix(const Eigen::Matrix3d& R) {
  Eigen::Matrix<double, 6, 6> M;
  auto r = [&R](int i, int j) { return R(i, j); };
  for (int i = 0; i < 3; ++i) {
    M(i, 0) = r(i, 0) * r(i, 0);
    M(i, 1) = r(i, 1) * r(i, 1);
    M(i, 2) = r(i, 2) * r(i, 2);
    M(i, 3) = 2.0 * r(i, 1) * r(i, 2);
    M(i, 4) = 2.0 * r(i, 0) * r(i, 2);
    M(i, 5) = 2.0 * r(i, 0) * r(i, 1);
  }
  // Rows 3..5 correspond to the (2,3), (1,3), (1,2) shear slots.
  const int a[3] = {1, 0, 0};
  const int b[3] = {2, 2, 1};
  for (int row = 3; row < 6; ++row) {
    int i = a[row - 3], j = b[row - 3];
    M(row, 0) = r(i, 0) * r(j, 0);
    M(row, 1) = r(i, 1) * r(j, 1);
    M(row, 2) = r(i, 2) * r(j, 2);
    M(row, 3) = r(i, 1) * r(j, 2) + r(i, 2) * r(j, 1);
    M(row, 4) = r(i, 0) * r(j, 2) + r(i, 2) * r(j, 0);
    M(row, 5) = r(i, 0) * r(j, 1) + r(i, 1) * r(j, 0);
  }
  return M;
}

// Rotates all tensors into the frame x' = R x. Density is unchanged.
// Throws DomainError unless R is proper orthogonal within 1e-10.
inline MaterialTensors rotate_tensors(const MaterialTensors& mat,
                                      const Eigen::Matrix3d& R) {
  const double ortho = (R * R.transpose() - Eigen::Matrix3d::Identity())
                           .cwiseAbs().maxCoeff();
  if (ortho > 1e-10)
    throw DomainError("rotate_tensors: matrix is not orthogonal (max |R R^T - I| = " +
                      std::to_string(ortho) + ")");
  if (std::abs(R.determinant() - 1.0) > 1e-10)
    throw DomainError("rotate_tensors: determinant is " +
                      std::to_string(R.determinant()) + ", expected +1");
  MaterialTensors out = mat;
  const Eigen::Matrix<double, 6, 6> M = bond_matrix(R);
  out.stiffness = M * mat.stiffness * M.transpose();
  out.piezo_stress = R * mat.piezo_stress * M.transpose();
  out.permittivity = R * mat.permittivity * R.transpose();
  return out;
}

namespace detail {

// Canonical zero/equality pattern for a symmetry class: projects the tensors
// onto the class's admissible subspace. Pattern violations are then measured
// as the distance to the projection.
inline void project_symmetry(SymmetryClass sc,
                             Eigen::Matrix<double, 6, 6>& C,
                             Eigen::Matrix<double, 3, 6>& E,
                             Eigen::Matrix3d& P) {
  using M6 = Eigen::Matrix<double, 6, 6>;
  using M36 = Eigen::Matrix<double, 3, 6>;
  switch (sc) {
    case SymmetryClass::triclinic:
      return;  // no constraints
    case SymmetryClass::isotropic: {
      const double c12 = (C(0, 1) + C(0, 2) + C(1, 2)) / 3.0;
      const double c11 = (C(0, 0) + C(1, 1) + C(2, 2)) / 3.0;
      C = M6::Zero();
      C(0, 0) = C(1, 1) = C(2, 2) = c11;
      C(0, 1) = C(1, 0) = C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c12;
      C(3, 3) = C(4, 4) = C(5, 5) = 0.5 * (c11 - c12);
      E = M36::Zero();
      const double p = P.trace() / 3.0;
      P = p * Eigen::Matrix3d::Identity();
      return;
    }
    case SymmetryClass::cubic: {
      const double c11 = (C(0, 0) + C(1, 1) + C(2, 2)) / 3.0;
      const double c12 = (C(0, 1) + C(0, 2) + C(1, 2)) / 3.0;
      const double c44 = (C(3, 3) + C(4, 4) + C(5, 5)) / 3.0;
      C = M6::Zero();
      C(0, 0) = C(1, 1) = C(2, 2) = c11;
      C(0, 1) = C(1, 0) = C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c12;
      C(3, 3) = C(4, 4) = C(5, 5) = c44;
      const double e14 = (E(0, 3) + E(1, 4) + E(2, 5)) / 3.0;
      E = M36::Zero();
      E(0, 3) = E(1, 4) = E(2, 5) = e14;  // zincblende-type piezoelectricity
      const double p = P.trace() / 3.0;
      P = p * Eigen::Matrix3d::Identity();
      return;
    }
    case SymmetryClass::hexagonal_6mm: {
      const double c11 = 0.5 * (C(0, 0) + C(1, 1));
      const double c12 = C(0, 1);
      const double c13 = 0.5 * (C(0, 2) + C(1, 2));
      const double c33 = C(2, 2);
      const double c44 = 0.5 * (C(3, 3) + C(4, 4));
      C = M6::Zero();
      C(0, 0) = C(1, 1) = c11;
      C(0, 1) = C(1, 0) = c12;
      C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c13;
      C(2, 2) = c33;
      C(3, 3) = C(4, 4) = c44;
      C(5, 5) = 0.5 * (c11 - c12);
      const double e15 = 0.5 * (E(0, 4) + E(1, 3));
      const double e31 = 0.5 * (E(2, 0) + E(2, 1));
      const double e33 = E(2, 2);
      E = M36::Zero();
      E(0, 4) = E(1, 3) = e15;
      E(2, 0) = E(2, 1) = e31;
      E(2, 2) = e33;
      const double p11 = 0.5 * (P(0, 0) + P(1, 1));
      const double p33 = P(2, 2);
      P = Eigen::Matrix3d::Zero();
      P(0, 0) = P(1, 1) = p11;
      P(2, 2) = p33;
      return;
    }
    case SymmetryClass::trigonal: {  // class 3m, mirror normal to x1
      const double c11 = 0.5 * (C(0, 0) + C(1, 1));
      const double c12 = C(0, 1);
      const double c13 = 0.5 * (C(0, 2) + C(1, 2));
      const double c14 = (C(0, 3) - C(1, 3) + C(4, 5)) / 3.0;
      const double c33 = C(2, 2);
      const double c44 = 0.5 * (C(3, 3) + C(4, 4));
      C = M6::Zero();
      C(0, 0) = C(1, 1) = c11;
      C(0, 1) = C(1, 0) = c12;
      C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c13;
      C(2, 2) = c33;
      C(3, 3) = C(4, 4) = c44;
      C(5, 5) = 0.5 * (c11 - c12);
      C(0, 3) = C(3, 0) = c14;
      C(1, 3) = C(3, 1) = -c14;
      C(4, 5) = C(5, 4) = c14;
      const double e15 = 0.5 * (E(0, 4) + E(1, 3));
      const double e22 = (-E(0, 5) - E(1, 0) + E(1, 1)) / 3.0;
      const double e31 = 0.5 * (E(2, 0) + E(2, 1));
      const double e33 = E(2, 2);
      E = M36::Zero();
      E(0, 4) = e15;
      E(0, 5) = -e22;
      E(1, 0) = -e22;
      E(1, 1) = e22;
      E(1, 3) = e15;
      E(2, 0) = E(2, 1) = e31;
      E(2, 2) = e33;
      const double p11 = 0.5 * (P(0, 0) + P(1, 1));
      const double p33 = P(2, 2);
      P = Eigen::Matrix3d::Zero();
      P(0, 0) = P(1, 1) = p11;
      P(2, 2) = p33;
      return;
    }
  }
}

}  // namespace detail

// Checks every invariant; returns one message per violation, empty if valid.
inline std::vector<std::string> validate_tensors(const MaterialTensors& mat) {
  std::vector<std::string> report;
  if (!(mat.density > 0.0))
    report.push_back("density must be > 0 (got " + std::to_string(mat.density) + ")");
  const double cscale = mat.stiffness.cwiseAbs().maxCoeff();
  if ((mat.stiffness - mat.stiffness.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(cscale, 1.0)) {
    report.push_back("stiffness matrix is not symmetric");
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(mat.stiffness);
    if (es.eigenvalues().minCoeff() <= 0.0)
      report.push_back("stiffness matrix is not positive definite (min eigenvalue " +
                       std::to_string(es.eigenvalues().minCoeff()) + " Pa)");
  }
  const double pscale = mat.permittivity.cwiseAbs().maxCoeff();
  if ((mat.permittivity - mat.permittivity.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(pscale, 1e-15)) {
    report.push_back("permittivity matrix is not symmetric");
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(mat.permittivity);
    if (es.eigenvalues().minCoeff() <= constants::eps0)
      report.push_back("permittivity must exceed eps0 in every direction");
  }
  // Symmetry pattern: distance to the class's admissible subspace.
  Eigen::Matrix<double, 6, 6> Cp = mat.stiffness;
  Eigen::Matrix<double, 3, 6> Ep = mat.piezo_stress;
  Eigen::Matrix3d Pp = mat.permittivity;
  detail::project_symmetry(mat.symmetry_class, Cp, Ep, Pp);
  const double escale = std::max(mat.piezo_stress.cwiseAbs().maxCoeff(), 1e-3);
  if ((mat.stiffness - Cp).cwiseAbs().maxCoeff() > 1e-6 * std::max(cscale, 1.0))
    report.push_back(std::string("stiffness violates the ") +
                     to_string(mat.symmetry_class) + " zero/equality pattern");
  if ((mat.piezo_stress - Ep).cwiseAbs().maxCoeff() > 1e-6 * escale)
    report.push_back(std::string("piezo_stress violates the ") +
                     to_string(mat.symmetry_class) + " zero/equality pattern");
  if ((mat.permittivity - Pp).cwiseAbs().maxCoeff() > 1e-6 * std::max(pscale, 1e-15))
    report.push_back(std::string("permittivity violates the ") +
                     to_string(mat.symmetry_class) + " zero/equality pattern");
  return report;
}

// Convenience constructors used by tests and the database loader.

inline Eigen::Matrix<double, 6, 6> isotropic_stiffness(double c11, double c12) {
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  C(0, 0) = C(1, 1) = C(2, 2) = c11;
  C(0, 1) = C(1, 0) = C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c12;
  C(3, 3) = C(4, 4) = C(5, 5) = 0.5 * (c11 - c12);
  return C;
}

inline Eigen::Matrix<double, 6, 6> hexagonal_stiffness(double c11, double c12,
                                                       double c13, double c33,
                                                       double c44) {
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  C(0, 0) = C(1, 1) = c11;
  C(0, 1) = C(1, 0) = c12;
  C(0, 2) = C(2, 0) = C(1, 2) = C(2, 1) = c13;
  C(2, 2) = c33;
  C(3, 3) = C(4, 4) = c44;
  C(5, 5) = 0.5 * (c11 - c12);
  return C;
}

inline Eigen::Matrix<double, 3, 6> hexagonal_piezo(double e15, double e31,
                                                   double e33) {
  Eigen::Matrix<double, 3, 6> E = Eigen::Matrix<double, 3, 6>::Zero();
  E(0, 4) = e15;
  E(1, 3) = e15;
  E(2, 0) = E(2, 1) = e31;
  E(2, 2) = e33;
  return E;
}

// Isotropic material from bulk wave speeds; zero piezoelectricity.
inline MaterialTensors isotropic_material(const std::string& id, double v_shear,
                                          double poisson, double density,
                                          double eps_rel = 1.5) {
  const double vp =
      v_shear * std::sqrt((2.0 - 2.0 * poisson) / (1.0 - 2.0 * poisson));
  const double mu = density * v_shear * v_shear;
  const double lam = density * vp * vp - 2.0 * mu;
  MaterialTensors m;
  m.id = id;
  m.density = density;
  m.stiffness = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.stiffness(i, j) = lam + (i == j ? 2.0 * mu : 0.0);
  m.stiffness(3, 3) = m.stiffness(4, 4) = m.stiffness(5, 5) = mu;
  m.piezo_stress = Eigen::Matrix<double, 3, 6>::Zero();
  m.permittivity = eps_rel * constants::eps0 * Eigen::Matrix3d::Identity();
  m.symmetry_class = SymmetryClass::isotropic;
  m.source = "constructed from (v_s, nu, rho)";
  return m;
}

}  // namespace saw
