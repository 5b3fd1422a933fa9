#pragma once

// Experiment configs: versioned JSON, unknown keys rejected.
//
// Field descriptors:
//   {"kind": "constant", "value": v}
//   {"kind": "cosine_perturbation", "base": b, "amplitude": a, "mode": k, "phase": p}   (phase optional)
//   {"kind": "samples", "samples": [...]}          complex contexts accept [re, im] pairs
//   {"kind": "file", "path": "field.json"}          a {"n", "samples"} artifact
//   {"kind": "miura", "of": <descriptor>}           complex only: khat^2/4 + (i/2) khat_s
// Curve descriptors: an inline {"n", "x", "y"} object, {"kind": "file", "path": ...},
// or {"kind": "from_curvature", "curvature": <descriptor>}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "kdvcurve/kdvcurve.hpp"

namespace kdvcurve::cli {

using io::json;

inline constexpr const char* config_schema = "kdvcurve-config/1";
inline constexpr std::uint64_t default_rng_seed = 20240607;

/// Invalid config or initial data (exit status 3).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

struct ConfigContext {
  std::filesystem::path base_dir;  // relative file paths resolve against the config's directory
  std::optional<std::size_t> n_points;
};

inline json load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("config file not found: " + path.string());
  try {
    return io::read_json_file(path);
  } catch (const io::FormatError& e) {
    throw ValidationError(e.what());
  }
}

inline void check_schema(const json& cfg) {
  if (!cfg.is_object()) throw ValidationError("config: expected a JSON object");
  if (!cfg.contains("schema")) throw ValidationError("config: missing key \"schema\"");
  if (!cfg["schema"].is_string() || cfg["schema"].get<std::string>() != config_schema)
    throw ValidationError("config: unsupported schema " + cfg["schema"].dump() + " (expected \"" + config_schema +
                          "\")");
}

inline ConfigContext context_from(const json& cfg, const std::filesystem::path& config_path) {
  ConfigContext ctx{config_path.parent_path(), std::nullopt};
  if (cfg.contains("n_points")) {
    const auto n = io::get_integer(cfg["n_points"], "n_points");
    if (n < 8 || n % 2 != 0) throw ValidationError("n_points must be even and >= 8");
    ctx.n_points = static_cast<std::size_t>(n);
  }
  return ctx;
}

inline std::filesystem::path resolve(const ConfigContext& ctx, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = ctx.base_dir / path;
  if (!std::filesystem::exists(path)) throw ValidationError("referenced file not found: " + path.string());
  return path;
}

inline PeriodicGrid require_grid(const ConfigContext& ctx, const std::string& where) {
  if (!ctx.n_points) throw ValidationError(where + ": analytic seeds need \"n_points\"");
  return PeriodicGrid(*ctx.n_points);
}

template <PeriodicScalar S>
PeriodicField<S> check_grid(const ConfigContext& ctx, PeriodicField<S> f, const std::string& where) {
  if (ctx.n_points && f.grid().n_points() != *ctx.n_points)
    throw ValidationError(where + ": " + std::to_string(f.grid().n_points()) + " samples, config has n_points = " +
                          std::to_string(*ctx.n_points));
  return f;
}

template <PeriodicScalar S>
PeriodicField<S> field_from_descriptor(const json& d, const ConfigContext& ctx, const std::string& where) {
  if (!d.is_object() || !d.contains("kind")) throw ValidationError(where + ": expected a descriptor with \"kind\"");
  const auto kind = io::get_string(d["kind"], where + ".kind");
  if (kind == "constant") {
    io::expect_keys(d, {"kind", "value"}, {}, where);
    return PeriodicField<S>::constant(require_grid(ctx, where), static_cast<S>(io::get_number(d["value"], where)));
  }
  if (kind == "cosine_perturbation") {
    io::expect_keys(d, {"kind", "base", "amplitude", "mode"}, {"phase"}, where);
    const auto mode = io::get_integer(d["mode"], where + ".mode");
    const double phase = d.contains("phase") ? io::get_number(d["phase"], where + ".phase") : 0.0;
    const auto f = cosine_field(require_grid(ctx, where), io::get_number(d["base"], where + ".base"),
                                io::get_number(d["amplitude"], where + ".amplitude"), static_cast<int>(mode), phase);
    if constexpr (std::is_same_v<S, double>)
      return f;
    else
      return complexify(f);
  }
  if (kind == "samples") {
    io::expect_keys(d, {"kind", "samples"}, {}, where);
    if (!d["samples"].is_array()) throw ValidationError(where + ".samples: expected an array");
    const auto n = d["samples"].size();
    const json field{{"n", n}, {"samples", d["samples"]}};
    return check_grid(ctx, io::field_from_json<S>(field, where), where);
  }
  if (kind == "file") {
    io::expect_keys(d, {"kind", "path"}, {}, where);
    const auto path = resolve(ctx, io::get_string(d["path"], where + ".path"));
    return check_grid(ctx, io::field_from_json<S>(io::read_json_file(path), path.string()), where);
  }
  if (kind == "miura") {
    if constexpr (std::is_same_v<S, Complex>) {
      io::expect_keys(d, {"kind", "of"}, {}, where);
      return miura::miura_curvature(field_from_descriptor<double>(d["of"], ctx, where + ".of"));
    } else {
      throw ValidationError(where + ": a miura seed is complex; use it with the eca_complex model");
    }
  }
  throw ValidationError(where + ": unknown descriptor kind \"" + kind + "\"");
}

inline RealField real_descriptor(const json& d, const ConfigContext& ctx, const std::string& where) {
  return field_from_descriptor<double>(d, ctx, where);
}

template <class Curve>
Curve curve_from_descriptor(const json& d, const ConfigContext& ctx, const std::string& where) {
  constexpr bool is_eca = std::is_same_v<Curve, eca::EcaCurve>;
  auto parse = [&](const json& j, const std::string& w) {
    if constexpr (is_eca)
      return io::eca_curve_from_json(j, w);
    else
      return io::euc_curve_from_json(j, w);
  };
  if (!d.is_object()) throw ValidationError(where + ": expected a curve object");
  if (!d.contains("kind")) return parse(d, where);
  const auto kind = io::get_string(d["kind"], where + ".kind");
  if (kind == "file") {
    io::expect_keys(d, {"kind", "path"}, {}, where);
    const auto path = resolve(ctx, io::get_string(d["path"], where + ".path"));
    return parse(io::read_json_file(path), path.string());
  }
  if (kind == "from_curvature") {
    io::expect_keys(d, {"kind", "curvature"}, {}, where);
    const auto k = real_descriptor(d["curvature"], ctx, where + ".curvature");
    if constexpr (is_eca)
      return eca::from_curvature(k);
    else
      return euc::from_curvature(k);
  }
  throw ValidationError(where + ": unknown curve kind \"" + kind + "\"");
}

inline std::uint64_t rng_seed(const json& cfg) {
  if (!cfg.contains("rng_seed")) return default_rng_seed;
  const auto v = io::get_integer(cfg["rng_seed"], "rng_seed");
  if (v < 0) throw ValidationError("rng_seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

inline int positive_int(const json& cfg, const char* key, int fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto v = io::get_integer(cfg[key], key);
  if (v <= 0) throw ValidationError(std::string(key) + " must be positive");
  return static_cast<int>(v);
}

}  // namespace kdvcurve::cli
