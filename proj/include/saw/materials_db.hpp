#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "saw/errors.hpp"
#include "saw/materials.hpp"
#include "saw/units.hpp"

namespace saw {

// Built-in material records. data/materials.json must stay byte-identical to
// this string (enforced by test); edit here first, then copy the file.
//
// Stiffness in Pa, piezoelectric stress constants in C/m^2, permittivity
// relative to vacuum. Records use the reduced constant set for their
// symmetry class; the loader expands to full matrices.
inline const char* default_materials_json() {
  return R"JSON({
  "materials": [
    {
      "id": "alscn42",
      "symmetry_class": "hexagonal_6mm",
      "density": 3588.8,
      "stiffness": {
        "c11": 311.9e9, "c12": 130.1e9, "c13": 114.3e9,
        "c33": 140.2e9, "c44": 106.1e9
      },
      "piezo_stress": { "e15": -0.337, "e31": -1.305, "e33": 2.394 },
      "permittivity_relative": { "eps11": 17.65, "eps33": 24.94 },
      "source": "Al(0.58)Sc(0.42)N sputtered film, c-axis texture. Elastic and piezoelectric constants within the composition trends of Caro et al., Phys. Rev. B 90, 224104 (2014) (DFT) and Kurz et al., J. Appl. Phys. 126, 075106 (2019) (resonator extraction); dielectric softening near the phase boundary per Yazawa et al., Appl. Phys. Lett. 118, 162903 (2021). Values adjusted within reported film-to-film scatter to reproduce measured SAW velocities on 4H-SiC."
    },
    {
      "id": "sic_4h",
      "symmetry_class": "hexagonal_6mm",
      "density": 3211.0,
      "stiffness": {
        "c11": 507.0e9, "c12": 108.0e9, "c13": 52.0e9,
        "c33": 547.0e9, "c44": 159.0e9
      },
      "piezo_stress": { "e15": 0.08, "e31": -0.08, "e33": 0.20 },
      "permittivity_relative": { "eps11": 9.66, "eps33": 10.03 },
      "source": "4H-SiC, c-axis. Elastic constants: Kamitani et al., J. Appl. Phys. 82, 3152 (1997) (Brillouin scattering). Weak piezoelectricity and dielectric constants: Patrick & Choyke, Phys. Rev. B 2, 2255 (1970); Karmann et al., J. Appl. Phys. 66, 3922 (1989)."
    },
    {
      "id": "aln",
      "symmetry_class": "hexagonal_6mm",
      "density": 3260.0,
      "stiffness": {
        "c11": 345.0e9, "c12": 125.0e9, "c13": 120.0e9,
        "c33": 395.0e9, "c44": 118.0e9
      },
      "piezo_stress": { "e15": -0.48, "e31": -0.58, "e33": 1.55 },
      "permittivity_relative": { "eps11": 8.0, "eps33": 9.5 },
      "source": "AlN, c-axis. Tsubouchi & Mikoshiba, IEEE Trans. Sonics Ultrason. 32, 634 (1985)."
    },
    {
      "id": "diamond",
      "symmetry_class": "isotropic",
      "density": 3512.0,
      "stiffness": { "c11": 1144.0e9, "c12": 118.0e9 },
      "permittivity_relative": { "eps11": 5.7 },
      "source": "Polycrystalline diamond, isotropic average of McSkimin & Andreatch, J. Appl. Phys. 43, 2944 (1972) single-crystal constants."
    }
  ]
}
)JSON";
}

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ParseError("materials: " + ctx + " missing numeric key '" + key + "'");
  return j.at(key).get<double>();
}

inline Eigen::Matrix<double, 6, 6> stiffness_from_json(
    const nlohmann::json& s, SymmetryClass sym, const std::string& id) {
  const std::string ctx = "record '" + id + "' stiffness";
  if (s.is_array()) {
    // Full 6x6 matrix in Pa, row-major nested arrays.
    if (s.size() != 6) throw ParseError("materials: " + ctx + " needs 6 rows");
    Eigen::Matrix<double, 6, 6> C;
    for (int i = 0; i < 6; ++i) {
      if (!s.at(i).is_array() || s.at(i).size() != 6)
        throw ParseError("materials: " + ctx + " row " + std::to_string(i) +
                         " needs 6 entries");
      for (int j = 0; j < 6; ++j) C(i, j) = s.at(i).at(j).get<double>();
    }
    return C;
  }
  switch (sym) {
    case SymmetryClass::isotropic: {
      const double c11 = require_number(s, "c11", ctx);
      const double c12 = require_number(s, "c12", ctx);
      return isotropic_stiffness(c11, c12);
    }
    case SymmetryClass::hexagonal_6mm: {
      return hexagonal_stiffness(require_number(s, "c11", ctx),
                                 require_number(s, "c12", ctx),
                                 require_number(s, "c13", ctx),
                                 require_number(s, "c33", ctx),
                                 require_number(s, "c44", ctx));
    }
    default:
      throw ParseError("materials: " + ctx +
                       ": reduced constants only supported for isotropic and "
                       "hexagonal_6mm; give the full 6x6 matrix");
  }
}

}  // namespace detail

inline MaterialTensors material_from_json(const nlohmann::json& rec) {
  if (!rec.contains("id") || !rec.at("id").is_string())
    throw ParseError("materials: record without string 'id'");
  MaterialTensors m;
  m.id = rec.at("id").get<std::string>();
  const std::string ctx = "record '" + m.id + "'";
  if (!rec.contains("symmetry_class"))
    throw ParseError("materials: " + ctx + " missing symmetry_class");
  m.symmetry_class = symmetry_from_string(rec.at("symmetry_class").get<std::string>());
  m.density = detail::require_number(rec, "density", ctx);
  if (!rec.contains("stiffness"))
    throw ParseError("materials: " + ctx + " missing stiffness");
  m.stiffness = detail::stiffness_from_json(rec.at("stiffness"),
                                            m.symmetry_class, m.id);

  m.piezo_stress.setZero();
  if (rec.contains("piezo_stress")) {
    const auto& e = rec.at("piezo_stress");
    if (e.is_array()) {
      if (e.size() != 3) throw ParseError("materials: " + ctx + " piezo_stress needs 3 rows");
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j) m.piezo_stress(i, j) = e.at(i).at(j).get<double>();
    } else {
      const double e15 = detail::require_number(e, "e15", ctx + " piezo");
      const double e31 = detail::require_number(e, "e31", ctx + " piezo");
      const double e33 = detail::require_number(e, "e33", ctx + " piezo");
      m.piezo_stress = hexagonal_piezo(e15, e31, e33);
    }
  }

  m.permittivity.setZero();
  const bool has_abs = rec.contains("permittivity");
  const bool has_rel = rec.contains("permittivity_relative");
  if (has_abs == has_rel)
    throw ParseError("materials: " + ctx +
                     " needs exactly one of permittivity / permittivity_relative");
  const auto& p = rec.at(has_abs ? "permittivity" : "permittivity_relative");
  const double scale = has_abs ? 1.0 : constants::eps0;
  if (p.is_array()) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        m.permittivity(i, j) = p.at(i).at(j).get<double>() * scale;
  } else {
    const double e11 = detail::require_number(p, "eps11", ctx + " permittivity");
    const double e33 = p.contains("eps33")
                           ? detail::require_number(p, "eps33", ctx + " permittivity")
                           : e11;
    m.permittivity.diagonal() << e11 * scale, e11 * scale, e33 * scale;
  }

  if (rec.contains("source")) m.source = rec.at("source").get<std::string>();
  if (m.source.empty())
    throw ParseError("materials: " + ctx + " missing source citation");
  return m;
}

inline std::vector<MaterialTensors> parse_materials(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("materials: invalid JSON: ") + e.what());
  }
  if (!doc.contains("materials") || !doc.at("materials").is_array())
    throw ParseError("materials: top-level 'materials' array missing");
  std::vector<MaterialTensors> out;
  for (const auto& rec : doc.at("materials")) out.push_back(material_from_json(rec));
  return out;
}

inline std::vector<MaterialTensors> load_materials(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw NotFoundError("materials: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_materials(ss.str());
}

inline const std::vector<MaterialTensors>& default_materials() {
  static const std::vector<MaterialTensors> db =
      parse_materials(default_materials_json());
  return db;
}

inline const MaterialTensors& lookup_material(
    const std::vector<MaterialTensors>& db, const std::string& id) {
  for (const auto& m : db)
    if (m.id == id) return m;
  std::string known;
  for (const auto& m : db) {
    if (!known.empty()) known += ", ";
    known += m.id;
  }
  throw NotFoundError("material '" + id + "' not in database (have: " + known + ")");
}

inline const MaterialTensors& lookup_material(const std::string& id) {
  return lookup_material(default_materials(), id);
}

}  // namespace saw
