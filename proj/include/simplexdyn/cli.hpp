#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "simplexdyn/analysis.hpp"
#include "simplexdyn/certify.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/fixedpoint.hpp"
#include "simplexdyn/io.hpp"

namespace simplexdyn::cli {

/// Process exit codes. Nothing else is ever returned.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kBadInitialPoint = 3,
  kNoConvergence = 4,
  kBadTarget = 5,
};

struct Common {
  std::string config_path;
  /// Output file; empty means no file.
  std::string out_path;
  /// Path to a tolerance JSON applied on top of the config's own overrides.
  std::optional<std::string> tolerance_override;
};

struct SimulateArgs {
  Common common;
  std::string p0 = "uniform";
  std::size_t steps = 100;
};

struct FixedPointsArgs {
  Common common;
  std::string strategy = "auto";
  std::size_t starts = 200;
};

struct CertifyArgs {
  Common common;
  std::string target = "point";
  std::optional<std::string> point;
  std::optional<std::string> orbit_file;
  std::size_t max_order = kDefaultMaxOrder;
  std::size_t grid_density = 20;
};

struct SweepArgs {
  Common common;
  std::string gamma_range;
  std::size_t starts = 200;
};

namespace detail {

inline bool open_output(const std::string& path, std::ofstream& file, std::ostream& err) {
  if (path.empty()) return true;
  file.open(path);
  if (!file) {
    err << "error: cannot write " << path << '\n';
    return false;
  }
  return true;
}

inline bool kappa_regime(const ModelSpec& model) {
  if (!model.identity_stay() || !model.identity_grouping()) return false;
  const double g = model.reinforcement().gamma();
  switch (model.reinforcement().family()) {
    case Family::ExpAttract: return g <= 1.0;
    case Family::LinearAttract: return g <= 0.5;
    case Family::ExpRepel: return g > 0.0;
    default: return false;
  }
}

inline bool grouping_supported(const ModelSpec& model) {
  const auto& r = model.reinforcement();
  return model.identity_stay() && r.gamma() == 1.0 &&
         (r.family() == Family::LinearAttract || r.family() == Family::ExpAttract);
}

inline std::string resolve_strategy(const ModelSpec& model, const std::string& requested) {
  if (requested != "auto") return requested;
  if (!model.identity_grouping()) return grouping_supported(model) ? "grouping" : "multistart";
  if (model.identity_stay() && model.reinforcement().family() == Family::LinearRepel &&
      model.reinforcement().gamma() > 0.0) {
    return "closed-form";
  }
  if (kappa_regime(model)) return "kappa";
  return "multistart";
}

inline FixedPointReport find_fixed_points(const ModelSpec& model, const std::string& requested, std::size_t starts) {
  const std::string s = resolve_strategy(model, requested);
  if (s == "kappa") return solve_kappa(model);
  if (s == "multistart") return multistart_solve(model, starts);
  if (s == "grouping") return grouping_fixed_point(model, 10000);
  if (s == "closed-form") {
    if (model.reinforcement().family() != Family::LinearRepel || !model.identity_stay() ||
        !model.identity_grouping()) {
      throw PreconditionError("closed-form strategy applies to LinearRepel with C0 = I and W = I");
    }
    FixedPoint fp = simplexdyn::detail::make_fixed_point(model, closed_form_sqrt(model.influence(), model.tolerances()));
    if (fp.residual > model.tolerances().fixed_point_residual) {
      throw ConvergenceError("closed-form point has residual " + std::to_string(fp.residual));
    }
    return {{std::move(fp)}, FixedPointMethod::ClosedForm};
  }
  throw ConfigError("unknown strategy " + s);
}

inline std::optional<StabilityCertificate> local_certificate(const ModelSpec& model, const FixedPoint& fp,
                                                             std::size_t max_order) {
  if (fp.boundary) return std::nullopt;
  return certify_local(model, fp.point, max_order);
}

// Maps library exceptions escaping a command onto exit codes.
template <class Body>
int guarded(std::ostream& err, int precondition_code, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const NotInvariantError& e) {
    err << "bad target: " << e.what() << '\n';
    return kBadTarget;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return precondition_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace detail

inline int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, kConfigError, [&]() -> int {
    const RunConfig cfg = load_config(args.common.config_path, args.common.tolerance_override);
    const ModelSpec model = cfg.model();
    if (args.steps < 1) {
      err << "error: --steps must be >= 1\n";
      return kConfigError;
    }
    std::optional<SimplexVector> p0;
    try {
      p0 = parse_point(args.p0, model.size(), cfg.tolerances.simplex);
    } catch (const Error& e) {
      err << "bad initial point: " << e.what() << '\n';
      return kBadInitialPoint;
    }
    const Trajectory traj = iterate(model, *p0, args.steps);
    std::ofstream file;
    if (!detail::open_output(args.common.out_path, file, err)) return kConfigError;
    if (file.is_open()) write_trajectory_csv(file, traj);
    const auto& last = traj.back();
    out << "final:";
    for (double x : last.to_std()) out << ' ' << format_real(x);
    out << "\nlast_step_l1: " << format_real(l1_distance(last, traj.points[traj.size() - 2])) << '\n';
    return kOk;
  });
}

inline int cmd_fixed_points(const FixedPointsArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, kConfigError, [&]() -> int {
    const RunConfig cfg = load_config(args.common.config_path, args.common.tolerance_override);
    const ModelSpec model = cfg.model();
    static const std::vector<std::string> known{"auto", "kappa", "multistart", "closed-form", "grouping"};
    if (std::find(known.begin(), known.end(), args.strategy) == known.end()) {
      err << "error: unknown strategy " << args.strategy << '\n';
      return kConfigError;
    }
    const FixedPointReport report = detail::find_fixed_points(model, args.strategy, args.starts);
    if (report.points.empty()) {
      err << "no convergence: no fixed point found\n";
      return kNoConvergence;
    }
    json arr = json::array();
    for (const auto& fp : report.points) arr.push_back(to_json(fp, detail::local_certificate(model, fp, kDefaultMaxOrder)));
    std::ofstream file;
    if (!detail::open_output(args.common.out_path, file, err)) return kConfigError;
    if (file.is_open()) file << arr.dump(2) << '\n';
    out << "method: " << to_string(report.method) << "\nfixed_points: " << report.points.size() << '\n';
    for (const auto& fp : report.points) {
      out << " ";
      for (double x : fp.point.to_std()) out << ' ' << format_real(x);
      out << (fp.boundary ? "  (boundary)" : "") << '\n';
    }
    return kOk;
  });
}

inline int cmd_certify(const CertifyArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, kBadTarget, [&]() -> int {
    const RunConfig cfg = load_config(args.common.config_path, args.common.tolerance_override);
    const ModelSpec model = cfg.model();
    json result;
    if (args.target == "point") {
      if (args.point) {
        std::optional<SimplexVector> p;
        try {
          p = parse_point(*args.point, model.size(), 1e-9);
        } catch (const Error& e) {
          err << "bad target: " << e.what() << '\n';
          return kBadTarget;
        }
        result = to_json(certify_local(model, *p, args.max_order));
      } else {
        const FixedPointReport report = detail::find_fixed_points(model, "auto", 200);
        json arr = json::array();
        for (const auto& fp : report.points) {
          if (auto c = detail::local_certificate(model, fp, args.max_order)) arr.push_back(to_json(*c));
        }
        if (arr.empty()) {
          err << "bad target: no interior fixed point found\n";
          return kBadTarget;
        }
        result = arr.size() == 1 ? arr.front() : arr;
      }
    } else if (args.target == "orbit") {
      OrbitReport orbit;
      if (args.orbit_file) {
        try {
          orbit = orbit_from_json(read_json_file(*args.orbit_file), model.size());
        } catch (const ConfigError& e) {
          err << "bad target: " << e.what() << '\n';
          return kBadTarget;
        } catch (const Error& e) {
          err << "bad target: " << e.what() << '\n';
          return kBadTarget;
        } catch (const json::exception& e) {
          err << "bad target: " << e.what() << '\n';
          return kBadTarget;
        }
      } else {
        const SimplexVector start = multistart_points(model.size(), 1).back();
        const Trajectory traj = iterate(model, start, 2000);
        auto found = detect_orbit(model, traj, args.max_order);
        if (!found) {
          err << "bad target: no periodic orbit detected\n";
          return kBadTarget;
        }
        orbit = *found;
      }
      result = to_json(certify_orbit(model, orbit, args.max_order));
      result["orbit"] = to_json(orbit);
    } else if (args.target == "global") {
      result = to_json(certify_global(model, args.grid_density, args.max_order));
    } else {
      err << "error: unknown target " << args.target << '\n';
      return kConfigError;
    }
    std::ofstream file;
    if (!detail::open_output(args.common.out_path, file, err)) return kConfigError;
    if (file.is_open()) file << result.dump(2) << '\n';
    out << result.dump(2) << '\n';
    return kOk;
  });
}

inline int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, kConfigError, [&]() -> int {
    const RunConfig cfg = load_config(args.common.config_path, args.common.tolerance_override);
    const std::vector<double> gammas = parse_gamma_range(args.gamma_range);
    std::ofstream file;
    if (!detail::open_output(args.common.out_path, file, err)) return kConfigError;
    std::ostream& csv = file.is_open() ? static_cast<std::ostream&>(file) : out;
    csv << "gamma,n_fixed_points,max_gain_at_fp,verdict\n";
    for (double g : gammas) {
      csv << format_real(g) << ',';
      std::optional<ModelSpec> model;
      try {
        model = cfg.model_with_gamma(g);
      } catch (const Error&) {
        csv << "NA,NA,error:gamma_out_of_range\n";
        continue;
      }
      try {
        const FixedPointReport report = detail::find_fixed_points(*model, "auto", args.starts);
        double max_gain = 0.0;
        bool any = false;
        for (const auto& fp : report.points) {
          if (fp.boundary) continue;
          max_gain = std::max(max_gain, l1_tangent_gain(jacobian(*model, fp.point)));
          any = true;
        }
        const StabilityCertificate cert = certify_global(*model);
        csv << report.points.size() << ',' << (any ? format_real(max_gain) : std::string("NA")) << ','
            << to_string(cert.verdict) << '\n';
      } catch (const ConvergenceError&) {
        csv << "NA,NA,error:no_convergence\n";
      } catch (const Error&) {
        csv << "NA,NA,error:precondition\n";
      }
    }
    return kOk;
  });
}

}  // namespace simplexdyn::cli
