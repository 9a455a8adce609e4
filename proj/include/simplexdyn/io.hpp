#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "simplexdyn/certify.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/fixedpoint.hpp"
#include "simplexdyn/model.hpp"

namespace simplexdyn {

/// A run configuration could not be read or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using nlohmann::json;

/// Fixed 12 significant digits.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Rounds through the 12-digit text form so JSON bodies match the CSV
/// precision.
inline double rounded(double x) { return std::stod(format_real(x)); }

inline json to_json(const SimplexVector& p) {
  json a = json::array();
  for (double x : p.to_std()) a.push_back(rounded(x));
  return a;
}

/// Contents of a JSON run configuration:
///
///     {
///       "n": 3,
///       "C":  [[0.8, 0.1, 0.1], [0.4, 0.2, 0.4], [0.4, 0.4, 0.2]],
///       "C0": [[...]],            optional, identity by default
///       "W":  [[...]],            optional, identity by default
///       "reinforcement": {"family": "ExpAttract", "gamma": 4},
///       "tolerances": {"fixed_point_residual": 1e-10}   optional
///     }
struct RunConfig {
  std::size_t n = 0;
  Matrix influence;
  std::optional<Matrix> stay;
  std::optional<Matrix> grouping;
  Family family = Family::ExpAttract;
  double gamma = 1.0;
  Tolerances tolerances;

  ModelSpec model() const { return model_with_gamma(gamma); }

  ModelSpec model_with_gamma(double g) const {
    ModelOptions opts;
    if (stay) opts.stay = RowStochasticMatrix(*stay, tolerances.simplex);
    if (grouping) opts.grouping = RowStochasticMatrix(*grouping, tolerances.simplex);
    opts.tolerances = tolerances;
    return ModelSpec(RowStochasticMatrix(influence, tolerances.simplex), Reinforcement(family, g), std::move(opts));
  }
};

namespace detail {

inline Matrix matrix_from_json(const json& j, std::size_t n, const char* name) {
  if (!j.is_array() || j.size() != n) {
    throw ConfigError(std::string(name) + " must be an array of " + std::to_string(n) + " rows");
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != n) {
      throw ConfigError(std::string(name) + " row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!row[k].is_number()) throw ConfigError(std::string(name) + " entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Overwrites the fields named in `j`; unknown keys are rejected.
inline Tolerances apply_tolerance_overrides(Tolerances tol, const json& j) {
  if (!j.is_object()) throw ConfigError("tolerances must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("tolerance " + key + " must be a number");
    const double v = value.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance " + key + " must be positive");
    if (key == "simplex") tol.simplex = v;
    else if (key == "eigen_residual") tol.eigen_residual = v;
    else if (key == "power_change") tol.power_change = v;
    else if (key == "power_max_iter") tol.power_max_iter = static_cast<std::size_t>(v);
    else if (key == "jacobian_colsum") tol.jacobian_colsum = v;
    else if (key == "gain_colsum") tol.gain_colsum = v;
    else if (key == "fixed_point_residual") tol.fixed_point_residual = v;
    else if (key == "dedup_radius") tol.dedup_radius = v;
    else if (key == "positivity") tol.positivity = v;
    else if (key == "contraction_margin") tol.contraction_margin = v;
    else if (key == "certify_residual") tol.certify_residual = v;
    else if (key == "orbit_defect") tol.orbit_defect = v;
    else if (key == "orbit_match") tol.orbit_match = v;
    else if (key == "boundary") tol.boundary = v;
    else throw ConfigError("unknown tolerance " + key);
  }
  return tol;
}

/// Parses and validates a configuration. Every matrix must be row
/// stochastic and the influence matrix irreducible and aperiodic.
inline RunConfig parse_config(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig cfg;
    if (!j.contains("C")) throw ConfigError("missing influence matrix C");
    if (j.contains("n")) {
      if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) throw ConfigError("n must be a positive integer");
      cfg.n = j["n"].get<std::size_t>();
    } else {
      cfg.n = j["C"].size();
    }
    cfg.influence = detail::matrix_from_json(j["C"], cfg.n, "C");
    if (j.contains("C0") && !j["C0"].is_null()) cfg.stay = detail::matrix_from_json(j["C0"], cfg.n, "C0");
    if (j.contains("W") && !j["W"].is_null()) cfg.grouping = detail::matrix_from_json(j["W"], cfg.n, "W");
    if (!j.contains("reinforcement") || !j["reinforcement"].is_object()) {
      throw ConfigError("missing reinforcement {family, gamma}");
    }
    const json& r = j["reinforcement"];
    if (!r.contains("family") || !r["family"].is_string()) throw ConfigError("reinforcement.family must be a string");
    auto fam = family_from_string(r["family"].get<std::string>());
    if (!fam) throw ConfigError("unknown reinforcement family " + r["family"].get<std::string>());
    cfg.family = *fam;
    if (!r.contains("gamma") || !r["gamma"].is_number()) throw ConfigError("reinforcement.gamma must be a number");
    cfg.gamma = r["gamma"].get<double>();
    if (j.contains("tolerances")) cfg.tolerances = apply_tolerance_overrides(cfg.tolerances, j["tolerances"]);
    // Validates matrices, gamma and connectivity.
    (void)cfg.model();
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline RunConfig load_config(const std::string& path, const std::optional<std::string>& tolerance_override = {}) {
  RunConfig cfg = parse_config(read_json_file(path));
  if (tolerance_override) {
    cfg.tolerances = apply_tolerance_overrides(cfg.tolerances, read_json_file(*tolerance_override));
  }
  return cfg;
}

/// "uniform", "vertex:i" (0-based) or comma-separated coordinates.
inline SimplexVector parse_point(const std::string& text, std::size_t n, double tol = Tolerances{}.simplex) {
  if (text == "uniform") return SimplexVector::uniform(n);
  if (text.rfind("vertex:", 0) == 0) {
    std::size_t pos = 0;
    const std::string idx = text.substr(7);
    long long i = -1;
    try {
      i = std::stoll(idx, &pos);
    } catch (const std::exception&) {
      throw DomainError("bad vertex index in " + text);
    }
    if (pos != idx.size() || i < 0 || static_cast<std::size_t>(i) >= n) throw DomainError("bad vertex index in " + text);
    return SimplexVector::vertex(n, static_cast<std::size_t>(i));
  }
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw DomainError("bad coordinate '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw DomainError("bad coordinate '" + item + "'");
    xs.push_back(v);
  }
  if (xs.size() != n) throw DimensionError("point has " + std::to_string(xs.size()) + " coordinates, expected " + std::to_string(n));
  return SimplexVector(Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())), tol);
}

/// "a:b:step" -> a, a + step, ..., up to b inclusive.
inline std::vector<double> parse_gamma_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw DomainError("bad gamma range " + text);
    } catch (const std::logic_error&) {
      throw DomainError("bad gamma range " + text);
    }
  }
  if (parts.size() != 3) throw DomainError("gamma range must be a:b:step");
  const double a = parts[0], b = parts[1], h = parts[2];
  if (!(h > 0.0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("bad gamma range " + text);
  const auto count = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(a + static_cast<double>(k) * h);
  return out;
}

/// Header `t,p_1,...,p_n`, one row per point.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.points.empty() ? 0 : traj.points.front().size();
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",p_" << i;
  os << '\n';
  for (std::size_t t = 0; t < traj.size(); ++t) {
    os << t;
    for (double x : traj.points[t].to_std()) os << ',' << format_real(x);
    os << '\n';
  }
}

/// Inverse of `write_trajectory_csv`; every row is validated as a simplex
/// point at the precision the writer emits.
inline std::vector<SimplexVector> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("empty trajectory file");
  std::vector<SimplexVector> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("malformed trajectory row");
    std::vector<double> xs;
    std::stringstream ss(line.substr(comma + 1));
    std::string item;
    while (std::getline(ss, item, ',')) xs.push_back(std::stod(item));
    out.emplace_back(Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())), 1e-10);
  }
  return out;
}

inline json to_json(const StabilityCertificate& c) {
  json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["basis"] = c.basis ? json(std::string(to_string(*c.basis))) : json(nullptr);
  j["contraction_factor"] = c.contraction_factor ? json(rounded(*c.contraction_factor)) : json(nullptr);
  j["iterant_order"] = c.iterant_order ? json(*c.iterant_order) : json(nullptr);
  j["evidence_points_sampled"] = c.evidence_points_sampled;
  j["proof_grade"] = c.proof_grade;
  j["spectral_radius"] = c.spectral_radius ? json(rounded(*c.spectral_radius)) : json(nullptr);
  j["fixed_point"] = c.fixed_point ? to_json(*c.fixed_point) : json(nullptr);
  json gains = json::array();
  for (double g : c.gains) gains.push_back(rounded(g));
  j["gains"] = gains;
  j["diagnostic"] = c.diagnostic;
  return j;
}

inline json to_json(const FixedPoint& fp, const std::optional<StabilityCertificate>& cert = {}) {
  json j;
  j["point"] = to_json(fp.point);
  j["residual"] = rounded(fp.residual);
  j["kappa"] = fp.kappa ? json(rounded(*fp.kappa)) : json(nullptr);
  j["boundary"] = fp.boundary;
  j["certificate"] = cert ? to_json(*cert) : json(nullptr);
  return j;
}

inline json to_json(const OrbitReport& orbit) {
  json pts = json::array();
  for (const auto& p : orbit.points) pts.push_back(to_json(p));
  return {{"period", orbit.period}, {"max_defect", rounded(orbit.max_defect)}, {"points", pts}};
}

/// Accepts either {"points": [[...], ...]} or a bare array of points.
/// Coordinates are taken at the 12-digit precision files carry.
inline OrbitReport orbit_from_json(const json& j, std::size_t n) {
  const json& pts = j.is_object() ? j.at("points") : j;
  if (!pts.is_array() || pts.empty()) throw DomainError("orbit must list at least one point");
  OrbitReport orbit;
  for (const auto& row : pts) {
    if (!row.is_array() || row.size() != n) throw DimensionError("orbit point has wrong dimension");
    std::vector<double> xs = row.get<std::vector<double>>();
    orbit.points.emplace_back(Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(n)), 1e-10);
  }
  orbit.period = orbit.points.size();
  return orbit;
}

}  // namespace simplexdyn
