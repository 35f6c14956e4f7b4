#include "slipform_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slipform/compatibility.hpp"
#include "slipform/energy_densities.hpp"
#include "slipform/error.hpp"
#include "slipform/format.hpp"
#include "slipform/lavrentiev_lab.hpp"
#include "slipform/limit_profile.hpp"
#include "slipform/mesh_io.hpp"
#include "slipform/recovery_engine.hpp"
#include "slipform/svg.hpp"

namespace slipform::cli {

namespace {

std::vector<double> parse_reals(const std::string &text, std::size_t count, const std::string &flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(Errc::ParseError, flag + ": '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.size() != count) {
    throw Error(Errc::ParseError, flag + " expects " + std::to_string(count) +
                                      " comma-separated numbers, got '" + text + "'");
  }
  return values;
}

Vec2 parse_vec(const std::string &text, const std::string &flag) {
  const auto v = parse_reals(text, 2, flag);
  return {v[0], v[1]};
}

SlipSystem parse_slip(const std::string &text) {
  try {
    return SlipSystem::from_direction(parse_vec(text, "--slip"));
  } catch (const Error &e) {
    if (e.code() == Errc::InvalidRange) throw Error(Errc::ParseError, std::string("--slip: ") + e.what());
    throw;
  }
}

LimitProfile load_profile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "--profile: cannot open " + path);
  return LimitProfile::read_csv(in);
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ParseError:
    case Errc::InvalidRange:
    case Errc::BadAlpha:
    case Errc::NonPositiveEps:
    case Errc::GridTooSmall:
    case Errc::CFLViolation:
      return kUsage;
    case Errc::Infeasible:
    case Errc::ShortSegment:
    case Errc::HTooLarge:
    case Errc::InfeasibleSqueeze:
    case Errc::AxisShearUnsupported:
    case Errc::AxisSlip:
    case Errc::BlowUp:
    case Errc::AngleTooLarge:
    case Errc::SlipAngleTooLarge:
    case Errc::AngleOutOfRange:
      return kInfeasible;
    default:
      return kVerifyFailed;
  }
}

/// Finite reals as JSON numbers, the rest as the strings of format_real.
nlohmann::json real_json(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

struct DensityArgs {
  std::string slip;
  std::vector<std::string> xi;
  std::vector<std::string> F;
  std::optional<double> eps;
};

int cmd_density(const DensityArgs &a, std::ostream &out) {
  const SlipSystem sys = parse_slip(a.slip);
  if (a.xi.empty() && a.F.empty()) throw Error(Errc::ParseError, "density needs --xi or --F");
  const auto column_block = [&](Vec2 xi) {
    out << "Wbar = " << reduced_density(sys, xi).to_string() << "\n";
    out << "Wbar_c = " << relaxed_density(sys, xi).to_string() << "\n";
  };
  for (const std::string &text : a.xi) {
    const Vec2 xi = parse_vec(text, "--xi");
    out << "[xi = " << format_real(xi.x) << "," << format_real(xi.y) << "]\n";
    column_block(xi);
  }
  for (const std::string &text : a.F) {
    const auto v = parse_reals(text, 4, "--F");
    const Mat2 F{v[0], v[1], v[2], v[3]};
    out << "[F = " << format_real(F.a) << "," << format_real(F.b) << "," << format_real(F.c) << ","
        << format_real(F.d) << "]\n";
    out << "W = " << hard_density(sys, F).to_string() << "\n";
    if (a.eps) {
      const SoftDensity soft = soft_density(sys, F, *a.eps);
      out << "W_eps = " << format_real(soft.value) << "\n";
      out << "W_eps_gamma = " << format_real(soft.gamma) << "\n";
    }
    column_block(F.col0());
  }
  return kOk;
}

struct BuildArgs {
  std::string profile;
  std::string slip;
  double h = 0.0;
  std::string mode = "hard";
  std::optional<double> eps;
  std::optional<int> zigzag;
  std::string out;
  std::string svg;
};

int cmd_build(const BuildArgs &a, std::ostream &out) {
  const SlipSystem sys = parse_slip(a.slip);
  LimitProfile u = load_profile(a.profile);
  if (a.zigzag) u = zigzag_approximate(sys, u, *a.zigzag);
  EnergyMode mode = EnergyMode::hard();
  if (a.mode == "soft") {
    if (!a.eps) throw Error(Errc::ParseError, "--mode soft needs --eps");
    mode = EnergyMode::soft(*a.eps);
  } else if (a.mode != "hard") {
    throw Error(Errc::ParseError, "--mode must be hard or soft, got '" + a.mode + "'");
  }
  const Recovery rec = build_recovery(sys, u, a.h);
  EnergyReport rep = rec.report;
  if (mode.kind == EnergyMode::Kind::Soft) {
    rep = energy_of_map(rec.map, mode);
    rep.limit_energy = rec.report.limit_energy;
  }
  if (!a.out.empty()) write_mesh(a.out, rec.map);
  if (!a.svg.empty()) write_svg(a.svg, rec.map);
  out << "cells = " << rec.map.cells.size() << "\n";
  out << "mode = " << a.mode << "\n";
  out << "h = " << format_real(a.h) << "\n";
  out << "total_energy = " << format_real(rep.total_energy) << "\n";
  out << "rescaled_energy = " << format_real(rep.rescaled_energy) << "\n";
  out << "limit_energy = " << format_real(*rep.limit_energy) << "\n";
  out << "gap = " << format_real(rep.gap()) << "\n";
  out << "relaxed_lower_bound = " << format_real(rep.relaxed_lower_bound) << "\n";
  out << "max_constraint_residual = " << format_real(rep.max_constraint_residual) << "\n";
  out << "max_interface_residual = " << format_real(rep.max_interface_residual) << "\n";
  for (std::size_t n = 0; n < rec.transition_r.size(); ++n) {
    out << "transition_r[" << n << "] = " << format_real(rec.transition_r[n]) << "\n";
  }
  return kOk;
}

struct VerifyArgs {
  std::string mesh;
  std::optional<double> tol;
};

int cmd_verify(const VerifyArgs &a, std::ostream &out) {
  const PiecewiseAffineMap map = read_mesh(a.mesh);
  ValidationTolerances tol;
  if (a.tol) tol = {*a.tol, *a.tol, *a.tol, *a.tol};
  const MapValidation v = validate_map(map);
  const bool ok = v.ok(tol);
  const nlohmann::json doc = {
      {"ok", ok},
      {"cells", map.cells.size()},
      {"shared_edges", v.shared_edge_count},
      {"cells_convex", v.cells_convex},
      {"area_residual", real_json(v.area_residual)},
      {"overlap_residual", real_json(v.overlap_residual)},
      {"containment_residual", real_json(v.containment_residual)},
      {"admissibility_residual", real_json(v.admissibility_residual)},
      {"interface_residual", real_json(v.interface_residual)},
      {"tail_residual", real_json(v.tail_residual)},
      {"tolerances",
       {{"admissibility", tol.admissibility},
        {"interface", tol.interface},
        {"tiling", tol.tiling},
        {"tail", tol.tail}}},
  };
  out << doc.dump(1) << "\n";
  return ok ? kOk : kVerifyFailed;
}

struct SweepArgs {
  std::string experiment;
  std::string grid;
  std::string profile;
  std::string slip = "1,0";
  std::optional<int> zigzag;
  std::optional<double> eps;
  double alpha = 1.0;
  double delta = 0.5;
  std::uint64_t seed = 1;
  int restarts = 20;
  std::string out;
};

void sweep_csv(const SweepArgs &a, std::ostream &csv) {
  const SlipSystem sys = parse_slip(a.slip);
  const std::vector<double> hs = parse_grid(a.grid);
  if (a.experiment == "recovery" || a.experiment == "soft") {
    if (a.profile.empty()) throw Error(Errc::ParseError, "--profile is required for this sweep");
    LimitProfile u = load_profile(a.profile);
    if (a.zigzag) u = zigzag_approximate(sys, u, *a.zigzag);
    const ConvergenceTable t =
        a.experiment == "recovery"
            ? recovery_sweep(sys, u, hs)
            : soft_sweep(sys, u, hs, a.alpha, a.eps ? *a.eps : 1.0, a.eps ? 0.0 : 0.5);
    const std::string rate = t.rate ? format_real(*t.rate) : "nan";
    csv << "h,eps,rescaled_energy,limit_energy,gap,rate\n";
    for (const ConvergenceRow &r : t.rows) {
      csv << format_real(r.h) << "," << format_real(r.eps) << "," << format_real(r.rescaled_energy)
          << "," << format_real(r.limit_energy) << "," << format_real(r.gap) << "," << rate << "\n";
    }
    return;
  }
  if (a.experiment == "lavrentiev") {
    GapOptions opt;
    opt.seed = a.seed;
    opt.restarts = a.restarts;
    const GapTable t = gap_experiment(sys, a.delta, hs, opt);
    csv << "h,kinks,kinked_energy,kinked_rescaled,kinked_delta,smooth_feasible,smooth_energy,"
           "smooth_rescaled,smooth_delta,amplitude,frequency,phase,alpha,curl_order_r2,"
           "curl_order_rcurl,energy_ratio\n";
    for (const GapRow &r : t.rows) {
      const double nan = std::nan("");
      const auto smooth = [&](double x) { return format_real(r.smooth_feasible ? x : nan); };
      csv << format_real(r.h) << "," << r.kinks << "," << format_real(r.kinked_energy) << ","
          << format_real(r.kinked_rescaled) << "," << format_real(r.kinked_delta) << ","
          << (r.smooth_feasible ? 1 : 0) << "," << smooth(r.smooth_energy) << ","
          << smooth(r.smooth_rescaled) << "," << smooth(r.smooth_delta) << ","
          << smooth(r.smooth_params.amplitude) << "," << smooth(r.smooth_params.frequency) << ","
          << smooth(r.smooth_params.phase) << "," << smooth(r.smooth_params.alpha) << ","
          << smooth(r.curl_order_r2) << "," << smooth(r.curl_order_rcurl) << ","
          << smooth(r.kinked_energy / r.smooth_energy) << "\n";
    }
    return;
  }
  throw Error(Errc::ParseError,
              "--experiment must be recovery, soft or lavrentiev, got '" + a.experiment + "'");
}

int cmd_sweep(const SweepArgs &a, std::ostream &out) {
  std::ostringstream csv;
  sweep_csv(a, csv);
  if (a.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(a.out);
    if (!file) throw Error(Errc::ParseError, "--out: cannot open " + a.out);
    file << csv.str();
  }
  return kOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string &spec) {
  std::vector<std::string> parts;
  std::stringstream in(spec);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.size() != 3 && !(parts.size() == 4 && (parts[3] == "lin" || parts[3] == "log"))) {
    throw Error(Errc::ParseError, "--grid expects lo:hi:n or lo:hi:n:lin, got '" + spec + "'");
  }
  const double lo = parse_reals(parts[0], 1, "--grid")[0];
  const double hi = parse_reals(parts[1], 1, "--grid")[0];
  const double n_real = parse_reals(parts[2], 1, "--grid")[0];
  const bool log_spaced = parts.size() == 3 || parts[3] == "log";
  if (!(n_real >= 1.0) || n_real != std::floor(n_real)) {
    throw Error(Errc::ParseError, "--grid: n must be a positive integer");
  }
  if (log_spaced && !(lo > 0.0 && hi > 0.0)) {
    throw Error(Errc::ParseError, "--grid: log spacing needs positive bounds");
  }
  const auto n = static_cast<std::size_t>(n_real);
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    out.push_back(log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  // Exact endpoints.
  out.front() = lo;
  if (n > 1) out.back() = hi;
  return out;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"slipform: single-slip thin-strip constructions and energies", "slipform"};
  app.require_subcommand(1);

  DensityArgs da;
  CLI::App *density = app.add_subcommand("density", "evaluate densities at column vectors or gradients");
  density->add_option("--slip", da.slip, "slip direction a,b (normalized)")->required();
  density->add_option("--xi", da.xi, "column vector x,y (repeatable)");
  density->add_option("--F", da.F, "gradient a,b,c,d row-major (repeatable)");
  density->add_option("--eps", da.eps, "soft-constraint penalty parameter");

  BuildArgs ba;
  CLI::App *build = app.add_subcommand("build", "build a recovery map for a profile");
  // --h is the strip thickness here, so help is long-form only.
  build->set_help_flag("--help", "print this help message and exit");
  build->add_option("--profile", ba.profile, "profile CSV (t_end,xi1,xi2)")->required();
  build->add_option("--slip", ba.slip, "slip direction a,b")->required();
  build->add_option("--h", ba.h, "strip half-thickness")->required();
  build->add_option("--mode", ba.mode, "energy: hard or soft");
  build->add_option("--eps", ba.eps, "penalty parameter for --mode soft");
  build->add_option("--zigzag", ba.zigzag, "laminate segments with |xi| < 1 using i oscillations");
  build->add_option("--out", ba.out, "mesh JSON output");
  build->add_option("--svg", ba.svg, "SVG output");

  VerifyArgs va;
  CLI::App *verify = app.add_subcommand("verify", "check a mesh document");
  verify->add_option("mesh", va.mesh, "mesh JSON")->required();
  verify->add_option("--tol", va.tol, "override every tolerance");

  SweepArgs sa;
  CLI::App *sweep = app.add_subcommand("sweep", "convergence tables as CSV");
  sweep->add_option("--experiment", sa.experiment, "recovery, soft or lavrentiev")->required();
  sweep->add_option("--grid", sa.grid, "h values lo:hi:n (log) or lo:hi:n:lin")->required();
  sweep->add_option("--profile", sa.profile, "profile CSV");
  sweep->add_option("--slip", sa.slip, "slip direction a,b");
  sweep->add_option("--zigzag", sa.zigzag, "laminate segments with |xi| < 1");
  sweep->add_option("--eps", sa.eps, "fixed eps for the soft sweep (default sqrt(h))");
  sweep->add_option("--alpha", sa.alpha, "transition exponent for the soft sweep");
  sweep->add_option("--delta", sa.delta, "squeeze target for the lavrentiev sweep");
  sweep->add_option("--seed", sa.seed, "optimizer restart seed");
  sweep->add_option("--restarts", sa.restarts, "optimizer restarts");
  sweep->add_option("--out", sa.out, "CSV output (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (density->parsed()) return cmd_density(da, out);
    if (build->parsed()) return cmd_build(ba, out);
    if (verify->parsed()) return cmd_verify(va, out);
    return cmd_sweep(sa, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

}  // namespace slipform::cli
