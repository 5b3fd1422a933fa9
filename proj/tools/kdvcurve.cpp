// kdvcurve: batch front-end.
//
//   kdvcurve <evolve|check|pair|miura|reconstruct> --config cfg.json [--out dir] [--quiet]
//
// Exit status: 0 success; 1 failed identity or violated precondition;
// 2 unstable or blown-up integration; 3 invalid config or initial data.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "kdvcurve/kdvcurve.hpp"

namespace fs = std::filesystem;
using namespace kdvcurve;
using namespace kdvcurve::cli;

namespace {

constexpr const char* report_schema = "kdvcurve-report/1";

enum Exit { ok = 0, failed = 1, unstable = 2, invalid = 3 };

struct Options {
  fs::path config;
  fs::path out = "kdvcurve_out";
  bool quiet = false;
};

/// Precondition failures reported by a verb without an exception.
class CheckFailure : public Error {
 public:
  explicit CheckFailure(const std::string& what) : Error(what) {}
};

std::string error_name(const std::exception& e) {
#define KDV_NAME(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  KDV_NAME(ValidationError)
  KDV_NAME(io::FormatError)
  KDV_NAME(StabilityError)
  KDV_NAME(BlowupError)
  KDV_NAME(ConstraintDriftError)
  KDV_NAME(NotLevelTangentError)
  KDV_NAME(NotTangentError)
  KDV_NAME(NonZeroMeanError)
  KDV_NAME(NotClosedError)
  KDV_NAME(UnsupportedOrderError)
  KDV_NAME(DegenerateConstraintError)
  KDV_NAME(NonFiniteError)
  KDV_NAME(GridMismatchError)
  KDV_NAME(NotUnimodularError)
  KDV_NAME(NotTraceFreeError)
  KDV_NAME(NotOrthogonalError)
  KDV_NAME(CheckFailure)
#undef KDV_NAME
  return "Error";
}

void say(const Options& opt, const std::string& line) {
  if (!opt.quiet) std::cout << line << '\n';
}

std::string num(double v) { return std::isfinite(v) ? io::format_number(v) : (std::isnan(v) ? "nan" : "inf"); }

/// Writes text next to its destination, then renames it into place.
void write_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  io::write_file(tmp, text);
  fs::rename(tmp, path);
}

json identities_json(const checks::CheckReport& report) {
  json out = json::object();
  for (const auto& c : report.items) {
    json e{{"residual", std::isfinite(c.residual) ? json(c.residual) : json(nullptr)},
           {"tolerance", c.tolerance},
           {"pass", c.pass}};
    if (!c.error.empty()) e["error"] = c.error;
    out[c.name] = e;
  }
  return out;
}

void print_identities(const Options& opt, const checks::CheckReport& report) {
  for (const auto& c : report.items) {
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-24s tol %-8.0e %s", c.name.c_str(), num(c.residual).c_str(),
                  c.tolerance, c.pass ? "pass" : "FAIL");
    say(opt, line);
  }
}

/// Exit 1 with the failures listed on standard error.
int finish(const checks::CheckReport& report) {
  if (report.all_pass()) return ok;
  std::cerr << "failed identities:";
  for (const auto& n : report.failures()) std::cerr << ' ' << n;
  std::cerr << '\n';
  return failed;
}

// ---------------------------------------------------------------------------
// evolve

flow::FlowSpec read_flow_spec(const json& j) {
  auto spec = io::flow_spec_from_json(j, "flow");
  if (spec.hierarchy_n < 1) throw ValidationError("flow.hierarchy_n must be >= 1");
  if (!(spec.t_final > 0)) throw ValidationError("flow.t_final must be positive");
  if (!(spec.dt > 0)) throw ValidationError("flow.dt must be positive");
  if (spec.record_every < 0) throw ValidationError("flow.record_every must be >= 0");
  if (!(spec.stability_safety > 0 && spec.stability_safety <= 1))
    throw ValidationError("flow.stability_safety must lie in (0, 1]");
  return spec;
}

flow::FlowState initial_state(const json& cfg, const ConfigContext& ctx, const flow::FlowSpec& spec) {
  using flow::Model;
  if (spec.representation == flow::Representation::curvature) {
    if (!cfg.contains("initial")) throw ValidationError("evolve: missing key \"initial\"");
    if (cfg.contains("initial_curve")) throw ValidationError("evolve: initial_curve needs representation \"curve\"");
    if (spec.model == Model::eca_complex) return field_from_descriptor<Complex>(cfg["initial"], ctx, "initial");
    return real_descriptor(cfg["initial"], ctx, "initial");
  }
  if (spec.model == Model::eca_complex) throw ValidationError("evolve: curve mode needs model eca or euclidean");
  const bool has_curve = cfg.contains("initial_curve");
  if (has_curve == cfg.contains("initial"))
    throw ValidationError("evolve: curve mode takes exactly one of \"initial\" and \"initial_curve\"");
  const json curve = has_curve ? cfg["initial_curve"] : json{{"kind", "from_curvature"}, {"curvature", cfg["initial"]}};
  if (spec.model == Model::eca) {
    auto g = curve_from_descriptor<eca::EcaCurve>(curve, ctx, "initial_curve");
    const auto v = eca::validate(g);
    if (!v.ok) throw ValidationError("initial curve: det defect " + num(v.max_det_defect));
    return g;
  }
  auto g = curve_from_descriptor<euc::EucCurve>(curve, ctx, "initial_curve");
  const auto v = euc::validate(g);
  if (!v.ok) throw ValidationError("initial curve: speed defect " + num(v.max_speed_defect));
  return g;
}

/// The output directory must be absent, empty, or hold an earlier trajectory.
void prepare_trajectory_dir(const fs::path& out) {
  if (!fs::exists(out)) return;
  if (!fs::is_directory(out)) throw ValidationError("--out exists and is not a directory: " + out.string());
  for (const auto& e : fs::directory_iterator(out)) {
    const auto name = e.path().filename().string();
    if (name != "manifest.json" && name != "invariants.csv" && name != "snapshots")
      throw ValidationError("--out holds files other than an earlier trajectory: " + out.string());
  }
}

int cmd_evolve(const json& cfg, const ConfigContext& ctx, const Options& opt) {
  io::expect_keys(cfg, {"schema", "flow"}, {"n_points", "initial", "initial_curve"}, "config");
  const auto spec = read_flow_spec(cfg["flow"]);
  prepare_trajectory_dir(opt.out);
  flow::FlowState state = [&] {
    try {
      return initial_state(cfg, ctx, spec);
    } catch (const ValidationError&) {
      throw;
    } catch (const io::FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw ValidationError("initial data: " + error_name(e) + ": " + e.what());
    }
  }();

  const auto rec = flow::evolve(state, spec);

  // Everything is in memory; nothing has been written yet.
  const fs::path staging = opt.out.string() + ".staging";
  fs::remove_all(staging);
  io::write_trajectory(staging, rec, spec);
  fs::remove_all(opt.out);
  fs::rename(staging, opt.out);

  const auto& inv = rec.invariants;
  say(opt, "steps " + std::to_string(rec.steps) + ", dt " + num(rec.dt_used) + ", stability bound " +
               num(rec.stability_bound) + ", snapshots " + std::to_string(rec.states.size()));
  for (std::size_t i = 0; i < 3; ++i)
    say(opt, inv.names[i] + ": initial " + num(inv.initial[i].real()) + ", max relative drift " +
                 num(inv.max_rel_drift[i]));
  if (!inv.defect_name.empty()) say(opt, inv.defect_name + ": max " + num(inv.max_defect));
  say(opt, "wrote " + (opt.out / "manifest.json").string());
  return ok;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const json& cfg, const ConfigContext& ctx, const Options& opt) {
  io::expect_keys(cfg, {"schema"},
                  {"n_points", "curvature", "curve", "khat", "euclidean_curve", "rng_seed", "random_count"}, "config");
  std::optional<eca::EcaCurve> curve;
  if (cfg.contains("curve")) curve = curve_from_descriptor<eca::EcaCurve>(cfg["curve"], ctx, "curve");
  if (!cfg.contains("curvature") && !curve) throw ValidationError("check: give \"curvature\" or \"curve\"");
  const RealField kappa = cfg.contains("curvature") ? real_descriptor(cfg["curvature"], ctx, "curvature")
                                                    : eca::curvature(*curve);
  const PeriodicGrid grid = kappa.grid();

  std::string curve_source = "config";
  if (!curve) {
    try {
      curve = eca::from_curvature(kappa);
      curve_source = "from_curvature";
    } catch (const NotClosedError&) {
      const auto shape = cosine_field(grid, 0.0, 0.05, 4);
      curve = eca::from_curvature(shape + eca::closing_shift(shape, 4));
      curve_source = "closed_default";
    }
  }

  std::optional<euc::EucCurve> euc_curve;
  if (cfg.contains("euclidean_curve"))
    euc_curve = curve_from_descriptor<euc::EucCurve>(cfg["euclidean_curve"], ctx, "euclidean_curve");
  const RealField khat = cfg.contains("khat")       ? real_descriptor(cfg["khat"], ctx, "khat")
                         : euc_curve.has_value() ? euc::curvature(*euc_curve)
                                                 : kappa;
  std::string euc_source = "config";
  if (!euc_curve) {
    try {
      euc_curve = euc::from_curvature(khat);
      euc_source = "from_curvature";
    } catch (const NotClosedError&) {
      euc_curve = euc::from_curvature(cosine_field(khat.grid(), 1.0, 0.2, 2));
      euc_source = "closed_default";
    }
  }

  checks::CheckFixture fx{kappa, curve, khat, euc_curve, rng_seed(cfg), positive_int(cfg, "random_count", 5)};
  const auto report = checks::run_checks(fx);
  const json out{{"schema", report_schema},
                 {"command", "check"},
                 {"n_points", grid.n_points()},
                 {"rng_seed", fx.seed},
                 {"curve_source", curve_source},
                 {"euclidean_curve_source", euc_source},
                 {"identities", identities_json(report)},
                 {"pass", report.all_pass()},
                 {"failures", report.failures()}};
  write_atomic(opt.out / "check.json", io::dump(out) + "\n");
  print_identities(opt, report);
  return finish(report);
}

// ---------------------------------------------------------------------------
// pair

eca::EcaTangent eca_tangent(const json& d, const ConfigContext& ctx, const RealField& kappa, const std::string& where) {
  if (d.is_object() && d.contains("hierarchy_field")) {
    io::expect_keys(d, {"hierarchy_field"}, {}, where);
    return eca::xn_field(kappa, static_cast<int>(io::get_integer(d["hierarchy_field"], where + ".hierarchy_field")));
  }
  io::expect_keys(d, {"alpha"}, {}, where);
  return {check_grid(ctx, real_descriptor(d["alpha"], ctx, where + ".alpha"), where)};
}

euc::EucTangent euc_tangent(const json& d, const ConfigContext& ctx, const RealField& khat, const std::string& where) {
  if (d.is_object() && d.contains("hierarchy_field")) {
    io::expect_keys(d, {"hierarchy_field"}, {}, where);
    return euc::xhat_field(khat, static_cast<int>(io::get_integer(d["hierarchy_field"], where + ".hierarchy_field")));
  }
  if (d.is_object() && d.contains("lambda")) {
    io::expect_keys(d, {"lambda", "mu"}, {}, where);
    euc::EucTangent t{real_descriptor(d["lambda"], ctx, where + ".lambda"), real_descriptor(d["mu"], ctx, where + ".mu")};
    const double r = euc::tangency_residual(khat, t);
    if (r > 1e-8 * (1.0 + max_abs(t.lambda) + max_abs(t.mu))) throw NotTangentError(r);
    return t;
  }
  io::expect_keys(d, {"mu"}, {"lambda_const"}, where);
  const double c = d.contains("lambda_const") ? io::get_number(d["lambda_const"], where + ".lambda_const") : 0.0;
  return euc::tangent_from_mu(khat, real_descriptor(d["mu"], ctx, where + ".mu"), c);
}

int cmd_pair(const json& cfg, const ConfigContext& ctx, const Options& opt) {
  io::expect_keys(cfg, {"schema", "model", "curvature", "form", "first", "second"},
                  {"n_points", "level", "membership_tol"}, "config");
  const auto model = io::get_string(cfg["model"], "model");
  if (model != "eca" && model != "euclidean") throw ValidationError("pair: model must be eca or euclidean");
  const auto k = io::get_integer(cfg["form"], "form");
  if (k < 0) throw ValidationError("pair: form must be >= 0");
  const auto kappa = real_descriptor(cfg["curvature"], ctx, "curvature");

  eca::LevelSetSpec level;
  if (cfg.contains("membership_tol")) level.membership_tol = io::get_number(cfg["membership_tol"], "membership_tol");
  if (cfg.contains("level")) {
    if (!cfg["level"].is_array()) throw ValidationError("level: expected an array of constants");
    for (const auto& c : cfg["level"]) level.constants.push_back(io::get_number(c, "level"));
  } else {
    for (int j = 1; j < k; ++j)
      level.constants.push_back(model == "eca" ? eca::hamiltonian(kappa, j) : euc::hamiltonian_hat(kappa, j));
  }
  const auto membership = model == "eca" ? eca::level_membership(kappa, level) : euc::level_membership_hat(kappa, level);
  for (std::size_t j = 0; j < membership.size(); ++j)
    if (membership[j] > level.membership_tol * (1.0 + std::abs(level.constants[j])))
      throw CheckFailure("curvature is not on the level set: |H_" + std::to_string(j + 1) + " - c| = " +
                         num(membership[j]));

  double value = 0;
  if (model == "eca") {
    const auto t1 = eca_tangent(cfg["first"], ctx, kappa, "first");
    const auto t2 = eca_tangent(cfg["second"], ctx, kappa, "second");
    value = k == 0 ? eca::omega0(t1, t2) : eca::omega_k(kappa, t1, t2, static_cast<int>(k), level);
  } else {
    const auto t1 = euc_tangent(cfg["first"], ctx, kappa, "first");
    const auto t2 = euc_tangent(cfg["second"], ctx, kappa, "second");
    value = euc::omega_hat_k(kappa, t1, t2, static_cast<int>(k), level);
  }
  const json out{{"schema", report_schema}, {"command", "pair"}, {"model", model}, {"form", k}, {"value", value}};
  write_atomic(opt.out / "pair.json", io::dump(out) + "\n");
  say(opt, num(value));
  return ok;
}

// ---------------------------------------------------------------------------
// miura

int cmd_miura(const json& cfg, const ConfigContext& ctx, const Options& opt) {
  io::expect_keys(cfg, {"schema", "khat"}, {"n_points", "rng_seed", "random_count", "conjugacy"}, "config");
  const auto khat = real_descriptor(cfg["khat"], ctx, "khat");
  checks::Recorder rec;
  std::mt19937_64 rng(rng_seed(cfg));
  checks::miura_checks(khat, rng, positive_int(cfg, "random_count", 20), rec);

  json curve_level;
  try {
    const auto gamma_hat = euc::from_curvature(khat);
    const auto phi = miura::miura_curve(gamma_hat);
    curve_level = {{"available", true}, {"branch", io::to_json(phi.branch)}};
    if (!phi.branch.antiperiodic) {
      rec.add("curvature_relation", max_abs_diff(miura::curvature(phi.curve), miura::miura_curvature(khat)), 1e-8);
      rec.add("image_det_defect", max_abs(miura::det_defect(phi.curve)), 1e-8);
      write_atomic(opt.out / "miura_curve.json", io::dump(io::to_json(phi.curve)) + "\n");
    } else {
      curve_level["note"] = "odd rotation index: the square-root branch is antiperiodic";
    }
  } catch (const NotClosedError& e) {
    curve_level = {{"available", false}, {"note", e.what()}};
  }

  json conj = nullptr;
  if (cfg.contains("conjugacy")) {
    const auto& c = cfg["conjugacy"];
    io::expect_keys(c, {"t_final", "dt"}, {"hierarchy_n", "integrator"}, "conjugacy");
    const int n = c.contains("hierarchy_n") ? static_cast<int>(io::get_integer(c["hierarchy_n"], "conjugacy.hierarchy_n")) : 1;
    const double t = io::get_number(c["t_final"], "conjugacy.t_final");
    const double dt = io::get_number(c["dt"], "conjugacy.dt");
    if (n < 1 || !(t > 0) || !(dt > 0)) throw ValidationError("conjugacy: need hierarchy_n >= 1, t_final > 0, dt > 0");
    const auto integrator = c.contains("integrator")
                                ? io::integrator_from_string(io::get_string(c["integrator"], "conjugacy.integrator"))
                                : flow::Integrator::if_rk4;
    rec.add("flow_conjugacy", miura::flow_conjugacy_residual(khat, n, t, dt, integrator), 1e-6);
    conj = {{"hierarchy_n", n}, {"t_final", t}, {"dt", dt}, {"integrator", flow::to_string(integrator)}};
  }

  const auto report = rec.take();
  const json out{{"schema", report_schema},      {"command", "miura"},
                 {"n_points", khat.grid().n_points()}, {"curve_level", curve_level},
                 {"conjugacy", conj},            {"identities", identities_json(report)},
                 {"pass", report.all_pass()},    {"failures", report.failures()}};
  write_atomic(opt.out / "miura.json", io::dump(out) + "\n");
  print_identities(opt, report);
  return finish(report);
}

// ---------------------------------------------------------------------------
// reconstruct

int cmd_reconstruct(const json& cfg, const ConfigContext& ctx, const Options& opt) {
  io::expect_keys(cfg, {"schema", "model"}, {"n_points", "curvature", "curve", "closure_tol", "substeps"}, "config");
  const auto model = io::get_string(cfg["model"], "model");
  if (model != "eca" && model != "euclidean") throw ValidationError("reconstruct: model must be eca or euclidean");
  if (cfg.contains("curvature") == cfg.contains("curve"))
    throw ValidationError("reconstruct: give exactly one of \"curvature\" and \"curve\"");
  const double closure_tol = cfg.contains("closure_tol") ? io::get_number(cfg["closure_tol"], "closure_tol") : 1e-8;
  const int substeps = positive_int(cfg, "substeps", 16);
  constexpr double tol = 1e-8;

  json report{{"schema", report_schema}, {"command", "reconstruct"}, {"model", model}};
  double residual = 0;
  json curve_json, curvature_json;
  if (model == "eca") {
    const bool from_curve = cfg.contains("curve");
    const auto input_curve = from_curve ? std::optional(curve_from_descriptor<eca::EcaCurve>(cfg["curve"], ctx, "curve"))
                                        : std::nullopt;
    const auto kappa = from_curve ? eca::curvature(*input_curve) : real_descriptor(cfg["curvature"], ctx, "curvature");
    const auto gamma = eca::from_curvature(kappa, closure_tol, substeps);
    residual = max_abs_diff(eca::curvature(gamma), kappa);
    report["validation"] = io::to_json(eca::validate(gamma));
    curve_json = io::to_json(gamma);
    curvature_json = io::to_json(kappa);
  } else {
    const bool from_curve = cfg.contains("curve");
    const auto input_curve = from_curve ? std::optional(curve_from_descriptor<euc::EucCurve>(cfg["curve"], ctx, "curve"))
                                        : std::nullopt;
    const auto khat = from_curve ? euc::curvature(*input_curve) : real_descriptor(cfg["curvature"], ctx, "curvature");
    const auto gamma = euc::from_curvature(khat, closure_tol);
    residual = max_abs_diff(euc::curvature(gamma), khat);
    report["validation"] = io::to_json(euc::validate(gamma));
    curve_json = io::to_json(gamma);
    curvature_json = io::to_json(khat);
  }
  report["residual"] = residual;
  report["tolerance"] = tol;
  report["pass"] = residual <= tol;
  write_atomic(opt.out / "curve.json", io::dump(curve_json) + "\n");
  write_atomic(opt.out / "curvature.json", io::dump(curvature_json) + "\n");
  write_atomic(opt.out / "reconstruct.json", io::dump(report) + "\n");
  say(opt, "round-trip residual " + num(residual) + (residual <= tol ? " pass" : " FAIL"));
  if (residual > tol) {
    std::cerr << "round-trip residual " << num(residual) << " exceeds " << num(tol) << '\n';
    return failed;
  }
  return ok;
}

using Command = int (*)(const json&, const ConfigContext&, const Options&);

int run(Command cmd, const Options& opt) {
  try {
    const json cfg = load_config(opt.config);
    check_schema(cfg);
    const auto ctx = context_from(cfg, opt.config);
    return cmd(cfg, ctx, opt);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return invalid;
  } catch (const io::FormatError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return invalid;
  } catch (const StabilityError& e) {
    std::cerr << error_name(e) << ": " << e.what() << '\n';
    return unstable;
  } catch (const BlowupError& e) {
    std::cerr << error_name(e) << ": " << e.what() << '\n';
    return unstable;
  } catch (const ConstraintDriftError& e) {
    std::cerr << error_name(e) << ": " << e.what() << '\n';
    return unstable;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << error_name(e) << ": " << e.what() << '\n';
    return failed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for KdV/mKdV curve flows"};
  app.fallthrough();
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "JSON experiment config")->required();
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_flag("--quiet", opt.quiet, "suppress standard output");

  Command cmd = nullptr;
  const std::pair<const char*, Command> verbs[] = {
      {"evolve", cmd_evolve},
      {"check", cmd_check},
      {"pair", cmd_pair},
      {"miura", cmd_miura},
      {"reconstruct", cmd_reconstruct},
  };
  const char* help[] = {"integrate a hierarchy flow and write a trajectory", "evaluate the structural identities",
                        "evaluate a presymplectic form on two tangents", "Miura map residuals",
                        "curve/curvature round trip"};
  for (std::size_t i = 0; i < std::size(verbs); ++i)
    app.add_subcommand(verbs[i].first, help[i])->callback([&cmd, f = verbs[i].second] { cmd = f; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid;
  }
  return run(cmd, opt);
}
