#pragma once

// JSON and CSV artifacts.
//
// Real fields: {"n": N, "samples": [...]}; complex fields use [re, im] pairs.
// Curves: {"n": N, "x": [...], "y": [...]}. Numbers are written with 17
// significant digits, so every double re-parses to the same bits. Readers
// reject unknown keys.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/errors.hpp"
#include "kdvcurve/euclidean_geometry.hpp"
#include "kdvcurve/flow_engine.hpp"
#include "kdvcurve/miura.hpp"
#include "kdvcurve/periodic_calculus.hpp"

namespace kdvcurve::io {

using json = nlohmann::json;

inline constexpr const char* trajectory_schema = "kdvcurve-trajectory/1";

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format error: " + what) {}
};

// ---------------------------------------------------------------------------
// Text output

inline std::string format_number(double v) {
  if (!std::isfinite(v)) throw FormatError("non-finite number cannot be written");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%#.17g", v);
  return buf;
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) { os << json(s).dump(); }

inline void write(std::ostream& os, const json& j, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  // Arrays of scalars stay on one line.
  const auto flat = [](const json& a) {
    for (const auto& e : a)
      if (e.is_structured() && !(e.is_array() && e.size() <= 2 && std::all_of(e.begin(), e.end(), [](const json& x) {
                                   return x.is_number();
                                 })))
        return false;
    return true;
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        write_string(os, it.key());
        os << (indent >= 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      pad(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      const bool inline_items = flat(j);
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (inline_items && indent >= 0 ? ", " : ",");
        first = false;
        if (!inline_items) pad(depth + 1);
        write(os, e, inline_items ? -1 : indent, depth + 1);
      }
      if (!inline_items && !j.empty()) pad(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// JSON text with floats at 17 significant digits.
inline std::string dump(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reading helpers

/// Throws unless j is an object whose keys are all in `allowed` and include
/// every key in `required`.
inline void expect_keys(const json& j, std::initializer_list<const char*> required,
                        std::initializer_list<const char*> optional, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) throw FormatError(where + ": missing key \"" + k + "\"");
  }
  for (const char* k : optional) allowed.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key())) throw FormatError(where + ": unknown key \"" + it.key() + "\"");
}

inline double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

inline long long get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer");
  return j.get<long long>();
}

inline bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw FormatError(where + ": expected true or false");
  return j.get<bool>();
}

inline std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw FormatError(where + ": expected a string");
  return j.get<std::string>();
}

inline Complex get_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw FormatError(where + ": expected [re, im]");
  return {get_number(j[0], where), get_number(j[1], where)};
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline PeriodicGrid grid_from(const json& n, const std::string& where) {
  const auto v = get_integer(n, where + ".n");
  try {
    return PeriodicGrid(static_cast<std::size_t>(v < 0 ? 0 : v));
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
}

template <PeriodicScalar S>
std::vector<S> samples_from(const json& a, std::size_t n, const std::string& where) {
  if (!a.is_array()) throw FormatError(where + ": expected an array");
  if (a.size() != n)
    throw FormatError(where + ": " + std::to_string(a.size()) + " samples for n = " + std::to_string(n));
  std::vector<S> out;
  out.reserve(n);
  for (const auto& e : a) {
    if constexpr (std::is_same_v<S, double>)
      out.push_back(get_number(e, where));
    else
      out.push_back(get_complex(e, where));
  }
  return out;
}

template <PeriodicScalar S>
json samples_json(const PeriodicField<S>& f) {
  json a = json::array();
  for (const S& v : f.samples()) {
    if constexpr (std::is_same_v<S, double>)
      a.push_back(v);
    else
      a.push_back(complex_json(v));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Fields, curves, tangents

template <PeriodicScalar S>
json to_json(const PeriodicField<S>& f) {
  return {{"n", f.grid().n_points()}, {"samples", samples_json(f)}};
}

template <PeriodicScalar S>
PeriodicField<S> field_from_json(const json& j, const std::string& where = "field") {
  expect_keys(j, {"n", "samples"}, {}, where);
  const auto g = grid_from(j["n"], where);
  try {
    return PeriodicField<S>(g, samples_from<S>(j["samples"], g.n_points(), where + ".samples"));
  } catch (const NonFiniteError& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline RealField real_field_from_json(const json& j, const std::string& where = "field") {
  return field_from_json<double>(j, where);
}
inline ComplexField complex_field_from_json(const json& j, const std::string& where = "field") {
  return field_from_json<Complex>(j, where);
}

template <class Curve>
json curve_json(const Curve& c) {
  return {{"n", c.x.grid().n_points()}, {"x", samples_json(c.x)}, {"y", samples_json(c.y)}};
}

inline json to_json(const eca::EcaCurve& c) { return curve_json(c); }
inline json to_json(const euc::EucCurve& c) { return curve_json(c); }
inline json to_json(const miura::ComplexEcaCurve& c) { return curve_json(c); }

template <class Curve, PeriodicScalar S>
Curve curve_from_json(const json& j, const std::string& where) {
  expect_keys(j, {"n", "x", "y"}, {}, where);
  const auto g = grid_from(j["n"], where);
  try {
    return Curve{PeriodicField<S>(g, samples_from<S>(j["x"], g.n_points(), where + ".x")),
                 PeriodicField<S>(g, samples_from<S>(j["y"], g.n_points(), where + ".y"))};
  } catch (const NonFiniteError& e) {
    throw FormatError(where + ": " + e.what());
  }
}

inline eca::EcaCurve eca_curve_from_json(const json& j, const std::string& where = "curve") {
  return curve_from_json<eca::EcaCurve, double>(j, where);
}
inline euc::EucCurve euc_curve_from_json(const json& j, const std::string& where = "curve") {
  return curve_from_json<euc::EucCurve, double>(j, where);
}
inline miura::ComplexEcaCurve complex_curve_from_json(const json& j, const std::string& where = "curve") {
  return curve_from_json<miura::ComplexEcaCurve, Complex>(j, where);
}

inline json to_json(const eca::EcaTangent& t) { return {{"alpha", to_json(t.alpha)}}; }
inline json to_json(const euc::EucTangent& t) { return {{"lambda", to_json(t.lambda)}, {"mu", to_json(t.mu)}}; }

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const eca::ValidationReport& r) { return {{"max_det_defect", r.max_det_defect}, {"ok", r.ok}}; }
inline json to_json(const euc::ValidationReport& r) {
  return {{"max_speed_defect", r.max_speed_defect}, {"ok", r.ok}};
}

inline json to_json(const miura::MiuraBranchReport& r) {
  return {{"antiperiodic", r.antiperiodic}, {"branch_values", to_json(r.branch_values)}, {"jump_defect", r.jump_defect}};
}

inline miura::MiuraBranchReport branch_report_from_json(const json& j, const std::string& where = "branch") {
  expect_keys(j, {"antiperiodic", "branch_values", "jump_defect"}, {}, where);
  return {get_bool(j["antiperiodic"], where + ".antiperiodic"),
          complex_field_from_json(j["branch_values"], where + ".branch_values"),
          get_number(j["jump_defect"], where + ".jump_defect")};
}

// ---------------------------------------------------------------------------
// Flow artifacts

inline flow::Model model_from_string(const std::string& s) {
  if (s == "eca") return flow::Model::eca;
  if (s == "euclidean") return flow::Model::euclidean;
  if (s == "eca_complex") return flow::Model::eca_complex;
  throw FormatError("unknown model \"" + s + "\"");
}

inline flow::Representation representation_from_string(const std::string& s) {
  if (s == "curvature") return flow::Representation::curvature;
  if (s == "curve") return flow::Representation::curve;
  throw FormatError("unknown representation \"" + s + "\"");
}

inline flow::Integrator integrator_from_string(const std::string& s) {
  if (s == "rk4") return flow::Integrator::rk4;
  if (s == "if_rk4") return flow::Integrator::if_rk4;
  throw FormatError("unknown integrator \"" + s + "\"");
}

inline json to_json(const flow::FlowSpec& s) {
  return {{"model", flow::to_string(s.model)},
          {"representation", flow::to_string(s.representation)},
          {"hierarchy_n", s.hierarchy_n},
          {"t_final", s.t_final},
          {"dt", s.dt},
          {"record_every", s.record_every},
          {"stability_safety", s.stability_safety},
          {"integrator", flow::to_string(s.integrator)},
          {"dealias", s.dealias},
          {"mean_tol", s.mean_tol}};
}

/// Missing keys keep their defaults.
inline flow::FlowSpec flow_spec_from_json(const json& j, const std::string& where = "flow") {
  expect_keys(j, {},
              {"model", "representation", "hierarchy_n", "t_final", "dt", "record_every", "stability_safety",
               "integrator", "dealias", "mean_tol"},
              where);
  flow::FlowSpec s;
  if (j.contains("model")) s.model = model_from_string(get_string(j["model"], where + ".model"));
  if (j.contains("representation"))
    s.representation = representation_from_string(get_string(j["representation"], where + ".representation"));
  if (j.contains("hierarchy_n")) s.hierarchy_n = static_cast<int>(get_integer(j["hierarchy_n"], where + ".hierarchy_n"));
  if (j.contains("t_final")) s.t_final = get_number(j["t_final"], where + ".t_final");
  if (j.contains("dt")) s.dt = get_number(j["dt"], where + ".dt");
  if (j.contains("record_every"))
    s.record_every = static_cast<int>(get_integer(j["record_every"], where + ".record_every"));
  if (j.contains("stability_safety")) s.stability_safety = get_number(j["stability_safety"], where + ".stability_safety");
  if (j.contains("integrator")) s.integrator = integrator_from_string(get_string(j["integrator"], where + ".integrator"));
  if (j.contains("dealias")) s.dealias = get_bool(j["dealias"], where + ".dealias");
  if (j.contains("mean_tol")) s.mean_tol = get_number(j["mean_tol"], where + ".mean_tol");
  return s;
}

inline json to_json(const flow::FlowState& state) {
  return std::visit([](const auto& v) { return to_json(v); }, state);
}

inline flow::FlowState state_from_json(const json& j, const flow::FlowSpec& spec, const std::string& where = "state") {
  using flow::Model;
  if (spec.representation == flow::Representation::curvature) {
    if (spec.model == Model::eca_complex) return complex_field_from_json(j, where);
    return real_field_from_json(j, where);
  }
  if (spec.model == Model::euclidean) return euc_curve_from_json(j, where);
  if (spec.model == Model::eca) return eca_curve_from_json(j, where);
  throw FormatError(where + ": curve mode is not available for eca_complex");
}

inline json to_json(const flow::InvariantReport& r) {
  json series = json::array();
  for (const auto& s : r.series) series.push_back({{"t", s.t}, {"h", s.h}, {"defect", s.defect}});
  json initial = json::array();
  for (const auto& z : r.initial) initial.push_back(complex_json(z));
  return {{"names", r.names},
          {"defect_name", r.defect_name},
          {"initial", initial},
          {"max_abs_drift", r.max_abs_drift},
          {"max_rel_drift", r.max_rel_drift},
          {"max_defect", r.max_defect},
          {"series", series}};
}

inline std::array<double, 3> triple_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw FormatError(where + ": expected three numbers");
  return {get_number(j[0], where), get_number(j[1], where), get_number(j[2], where)};
}

inline flow::InvariantReport invariant_report_from_json(const json& j, const std::string& where = "invariants") {
  expect_keys(j, {"names", "defect_name", "initial", "max_abs_drift", "max_rel_drift", "max_defect", "series"}, {},
              where);
  flow::InvariantReport r;
  if (!j["names"].is_array() || j["names"].size() != 3) throw FormatError(where + ".names: expected three names");
  for (std::size_t i = 0; i < 3; ++i) r.names[i] = get_string(j["names"][i], where + ".names");
  r.defect_name = get_string(j["defect_name"], where + ".defect_name");
  if (!j["initial"].is_array() || j["initial"].size() != 3) throw FormatError(where + ".initial: expected three values");
  for (std::size_t i = 0; i < 3; ++i) r.initial[i] = get_complex(j["initial"][i], where + ".initial");
  r.max_abs_drift = triple_from(j["max_abs_drift"], where + ".max_abs_drift");
  r.max_rel_drift = triple_from(j["max_rel_drift"], where + ".max_rel_drift");
  r.max_defect = get_number(j["max_defect"], where + ".max_defect");
  if (!j["series"].is_array()) throw FormatError(where + ".series: expected an array");
  for (const auto& e : j["series"]) {
    expect_keys(e, {"t", "h", "defect"}, {}, where + ".series");
    r.series.push_back({get_number(e["t"], where + ".series.t"), triple_from(e["h"], where + ".series.h"),
                        get_number(e["defect"], where + ".series.defect")});
  }
  return r;
}

/// Columns t, H1, H2, H3, defect, then |H_i(t) - H_i(0)| for i = 1..3.
inline std::string invariants_csv(const flow::InvariantReport& r) {
  std::ostringstream os;
  os << "t,H1,H2,H3,defect,drift_H1,drift_H2,drift_H3\n";
  for (const auto& s : r.series) {
    os << format_number(s.t);
    for (double h : s.h) os << ',' << format_number(h);
    os << ',' << format_number(s.defect);
    for (std::size_t i = 0; i < 3; ++i) os << ',' << format_number(std::abs(s.h[i] - r.initial[i].real()));
    os << '\n';
  }
  return os.str();
}

inline std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.json", i);
  return std::string("snapshots/") + buf;
}

inline json trajectory_manifest(const flow::TrajectoryRecord& rec, const flow::FlowSpec& spec) {
  json names = json::array();
  for (std::size_t i = 0; i < rec.states.size(); ++i) names.push_back(snapshot_name(i));
  return {{"schema", trajectory_schema},
          {"spec", to_json(spec)},
          {"dt_used", rec.dt_used},
          {"steps", rec.steps},
          {"stability_bound", rec.stability_bound},
          {"times", rec.times},
          {"snapshots", names},
          {"invariants", to_json(rec.invariants)}};
}

/// Writes manifest.json, snapshots/snapshot_NNNNNN.json and invariants.csv
/// under dir. Each snapshot holds {"t": t, "state": field or curve}.
inline void write_trajectory(const std::filesystem::path& dir, const flow::TrajectoryRecord& rec,
                             const flow::FlowSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "snapshots");
  for (std::size_t i = 0; i < rec.states.size(); ++i)
    write_file(dir / snapshot_name(i), dump(json{{"t", rec.times[i]}, {"state", to_json(rec.states[i])}}));
  write_file(dir / "invariants.csv", invariants_csv(rec.invariants));
  write_file(dir / "manifest.json", dump(trajectory_manifest(rec, spec)) + "\n");
}

struct StoredTrajectory {
  flow::FlowSpec spec;
  flow::TrajectoryRecord record;
};

inline StoredTrajectory read_trajectory(const std::filesystem::path& dir) {
  const auto m = read_json_file(dir / "manifest.json");
  expect_keys(m, {"schema", "spec", "dt_used", "steps", "stability_bound", "times", "snapshots", "invariants"}, {},
              "manifest");
  if (get_string(m["schema"], "manifest.schema") != trajectory_schema)
    throw FormatError("manifest: unsupported schema " + m["schema"].dump());
  StoredTrajectory out;
  out.spec = flow_spec_from_json(m["spec"], "manifest.spec");
  auto& rec = out.record;
  rec.dt_used = get_number(m["dt_used"], "manifest.dt_used");
  rec.steps = static_cast<std::size_t>(get_integer(m["steps"], "manifest.steps"));
  rec.stability_bound = get_number(m["stability_bound"], "manifest.stability_bound");
  if (!m["times"].is_array() || !m["snapshots"].is_array() || m["times"].size() != m["snapshots"].size())
    throw FormatError("manifest: times and snapshots must be arrays of equal length");
  for (std::size_t i = 0; i < m["times"].size(); ++i) {
    rec.times.push_back(get_number(m["times"][i], "manifest.times"));
    const auto name = get_string(m["snapshots"][i], "manifest.snapshots");
    const auto snap = read_json_file(dir / name);
    expect_keys(snap, {"t", "state"}, {}, name);
    if (get_number(snap["t"], name + ".t") != rec.times.back()) throw FormatError(name + ": time disagrees with manifest");
    rec.states.push_back(state_from_json(snap["state"], out.spec, name + ".state"));
  }
  rec.invariants = invariant_report_from_json(m["invariants"], "manifest.invariants");
  return out;
}

}  // namespace kdvcurve::io
