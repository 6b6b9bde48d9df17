#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "peskin/errors.hpp"
#include "peskin/initdata.hpp"
#include "peskin/integrator.hpp"
#include "peskin/tension.hpp"

namespace peskin::config {

using nlohmann::json;

namespace detail {

inline void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

/// Unknown keys are errors.
inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + std::string(key) + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + std::string(key) + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

/// A number or a [re, im] pair.
inline Complex get_complex(const json& j, const char* key, const std::string& where, Complex fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(where + ": key '" + std::string(key) + "' must be a number or [re, im]");
}

}  // namespace detail

/// {"law": "hookean" | "cubic" | "power" | "polynomial", parameters..., "r_min", "r_max"}
inline TensionLaw parse_law(const json& j) {
  const std::string where = "law";
  detail::require_object(j, where);
  const auto name = detail::get<std::string>(j, "law", where);
  ValidityInterval validity;
  validity.r_min = detail::get_or(j, "r_min", validity.r_min, where);
  validity.r_max = detail::get_or(j, "r_max", validity.r_max, where);
  if (name == "hookean") {
    detail::allow_keys(j, where, {"law", "k0", "r_min", "r_max"});
    return TensionLaw::hookean(detail::get_or(j, "k0", 1.0, where), validity);
  }
  if (name == "cubic") {
    detail::allow_keys(j, where, {"law", "c", "r_min", "r_max"});
    return TensionLaw::cubic(detail::get_or(j, "c", 1.0, where), validity);
  }
  if (name == "power") {
    detail::allow_keys(j, where, {"law", "p", "r_min", "r_max"});
    return TensionLaw::power(detail::get<double>(j, "p", where), validity);
  }
  if (name == "polynomial") {
    detail::allow_keys(j, where, {"law", "coeffs", "r_min", "r_max"});
    return TensionLaw::polynomial(detail::get<std::vector<double>>(j, "coeffs", where), validity);
  }
  throw ConfigError("law: unknown law '" + name + "' (expected hookean, cubic, power or polynomial)");
}

inline InitialDataSpec parse_init(const json& j) {
  const std::string where = "init";
  detail::require_object(j, where);
  InitialDataSpec spec;
  const auto kind = detail::get<std::string>(j, "kind", where);
  spec.amplitude = detail::get_complex(j, "amplitude", where, 0.0);
  if (j.contains("target_norm")) {
    const json& t = j.at("target_norm");
    detail::require_object(t, "init.target_norm");
    detail::allow_keys(t, "init.target_norm", {"name", "value"});
    spec.target = TargetNorm{detail::get<std::string>(t, "name", "init.target_norm"),
                             detail::get<double>(t, "value", "init.target_norm")};
    if (spec.target->name != "s" && spec.target->name != "w") {
      throw ConfigError("init.target_norm: name must be \"s\" or \"w\"");
    }
    if (!j.contains("amplitude")) spec.amplitude = 1.0;
  }
  if (kind == "single_mode") {
    detail::allow_keys(j, where, {"kind", "k", "amplitude", "steady_state", "target_norm"});
    spec.kind = InitKind::single_mode;
    spec.mode = detail::get<int>(j, "k", where);
    spec.steady_state = detail::get_or(j, "steady_state", false, where);
  } else if (kind == "random_decay") {
    detail::allow_keys(j, where, {"kind", "exponent", "seed", "amplitude", "target_norm"});
    spec.kind = InitKind::random_decay;
    spec.exponent = detail::get<double>(j, "exponent", where);
    spec.seed = detail::get_or<std::uint64_t>(j, "seed", 0, where);
  } else if (kind == "corner") {
    detail::allow_keys(j, where, {"kind", "positions", "strengths", "width", "amplitude", "target_norm"});
    spec.kind = InitKind::corner;
    spec.positions = detail::get<std::vector<double>>(j, "positions", where);
    spec.strengths = detail::get_or(j, "strengths", std::vector<double>(spec.positions.size(), 1.0), where);
    spec.width = detail::get_or(j, "width", spec.width, where);
  } else if (kind == "polygonal") {
    detail::allow_keys(j, where, {"kind", "vertices", "amplitude", "target_norm"});
    spec.kind = InitKind::polygonal;
    spec.vertices = detail::get<int>(j, "vertices", where);
  } else {
    throw ConfigError("init: unknown kind '" + kind +
                      "' (expected single_mode, random_decay, corner or polygonal)");
  }
  if ((spec.kind == InitKind::corner || spec.kind == InitKind::polygonal) &&
      spec.amplitude.imag() != 0.0) {
    throw ConfigError("init: corner amplitudes must be real");
  }
  return spec;
}

inline RunConfig parse_run(const json& j) {
  const std::string where = "config";
  detail::require_object(j, where);
  detail::allow_keys(j, where,
                     {"law", "init", "K", "M", "dt", "t_end", "snapshot_every", "frozen_coefficients",
                      "watch_modes", "threads"});
  RunConfig cfg;
  if (!j.contains("law")) throw ConfigError("config: missing key 'law'");
  cfg.law = parse_law(j.at("law"));
  if (!j.contains("init")) throw ConfigError("config: missing key 'init'");
  cfg.init = parse_init(j.at("init"));
  cfg.K = detail::get_or(j, "K", cfg.K, where);
  cfg.M = detail::get_or(j, "M", 4 * cfg.K, where);
  if (j.contains("dt")) cfg.dt = detail::get<double>(j, "dt", where);
  cfg.t_end = detail::get<double>(j, "t_end", where);
  cfg.snapshot_every = detail::get_or(j, "snapshot_every", cfg.snapshot_every, where);
  cfg.frozen_coefficients = detail::get_or(j, "frozen_coefficients", true, where);
  cfg.watch_modes = detail::get_or(j, "watch_modes", cfg.watch_modes, where);
  cfg.threads = detail::get_or(j, "threads", 1, where);
  cfg.validate();
  return cfg;
}

/// Parses JSON text; syntax errors become ConfigError.
inline json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": malformed JSON (" + e.what() + ")");
  }
}

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

}  // namespace peskin::config
