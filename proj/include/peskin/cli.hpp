#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "peskin/config.hpp"
#include "peskin/errors.hpp"
#include "peskin/initdata.hpp"
#include "peskin/integrator.hpp"
#include "peskin/linear.hpp"
#include "peskin/norms.hpp"
#include "peskin/verify.hpp"

#ifndef PESKIN_VERSION
#define PESKIN_VERSION "0.0.0"
#endif

namespace peskin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_usage = 2,
  exit_config = 3,
  exit_geometry = 4,
  exit_tension_domain = 5,
  exit_step_rejected = 6,
  exit_insufficient_decay = 7,
  exit_ill_conditioned = 8,
  exit_verification_failed = 9,
  exit_io = 10,
};

struct ExitCodeEntry {
  int code;
  const char* name;
  const char* meaning;
};

inline const std::vector<ExitCodeEntry>& exit_code_table() {
  static const std::vector<ExitCodeEntry> table{
      {exit_ok, "ok", "success"},
      {exit_internal, "internal", "unexpected internal error"},
      {exit_usage, "usage", "bad command line (unknown flag, missing argument)"},
      {exit_config, "config", "malformed or invalid configuration"},
      {exit_geometry, "geometry", "chord-arc check failed (curve near self-intersection)"},
      {exit_tension_domain, "tension_domain", "stretch left the tension law's validity interval"},
      {exit_step_rejected, "step_rejected", "blow-up guard rejected a time step"},
      {exit_insufficient_decay, "insufficient_decay", "trajectory too short to fit a decay rate"},
      {exit_ill_conditioned, "ill_conditioned", "mode-pair eigenvector basis is ill-conditioned"},
      {exit_verification_failed, "verification_failed", "a verification report did not pass"},
      {exit_io, "io", "cannot read input or write output"},
  };
  return table;
}

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return exit_config;
    case ErrorKind::geometry: return exit_geometry;
    case ErrorKind::tension_domain: return exit_tension_domain;
    case ErrorKind::step_rejected: return exit_step_rejected;
    case ErrorKind::insufficient_decay: return exit_insufficient_decay;
    case ErrorKind::ill_conditioned: return exit_ill_conditioned;
    case ErrorKind::io: return exit_io;
  }
  return exit_internal;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

/// Output directory that records the hash of every file it writes.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) throw IoError("cannot create output directory " + root_.string());
  }

  void write(const std::string& relative, const std::string& content) {
    const fs::path path = root_ / relative;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write " + path.string());
    files_.push_back({{"path", relative}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  void write_json(const std::string& relative, const json& value) { write(relative, value.dump(2) + "\n"); }

  /// manifest.json: command, configuration, version and the hashes of all files written so far.
  void write_manifest(const std::string& command, const json& config, int exit_code) {
    json manifest{{"tool", "peskin_cli"},
                  {"version", PESKIN_VERSION},
                  {"command", command},
                  {"config", config},
                  {"exit_code", exit_code},
                  {"files", files_}};
    const fs::path path = root_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("cannot write " + path.string());
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  json files_ = json::array();
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

/// Parses "2,3,-1" into integers.
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("watch modes: '" + item + "' is not an integer");
    }
  }
  return out;
}

inline std::string snapshot_name(std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshots/snap_%06zu.json", index);
  return buf;
}

/// Reads snapshots/snap_*.json from a trajectory directory, in order.
inline std::vector<FourierCurve> load_snapshots(const fs::path& dir) {
  const fs::path snaps = dir / "snapshots";
  if (!fs::is_directory(snaps)) throw IoError("no snapshots directory in " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(snaps)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FourierCurve> out;
  for (const auto& f : files) {
    try {
      out.push_back(config::load_file(f.string()).get<FourierCurve>());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(f.string() + ": not a curve snapshot (" + e.what() + ")");
    }
  }
  if (out.empty()) throw IoError("no snapshots in " + snaps.string());
  return out;
}

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string trajectory_dir;
  std::string init_json;
  std::string watch_modes;
  int threads = 0;
  double snapshot_every = 0.0;
  int m_max = 128;
};

inline int simulate(const Options& opt, std::ostream& log) {
  json raw = config::load_file(opt.config_path);
  if (!opt.init_json.empty()) {
    if (!raw.is_object()) throw ConfigError("config: expected a JSON object");
    raw["init"] = config::parse_text(opt.init_json, "--init");
  }
  if (opt.threads > 0) raw["threads"] = opt.threads;
  if (opt.snapshot_every > 0.0) raw["snapshot_every"] = opt.snapshot_every;
  if (!opt.watch_modes.empty()) raw["watch_modes"] = parse_int_list(opt.watch_modes);
  const RunConfig cfg = config::parse_run(raw);
  const GeneratedData init = generate(cfg.init, cfg.K);

  OutputDir out(opt.out_dir);
  out.write_json("initial.json", {{"s_norm", init.s_norm},
                                  {"w_norm", init.w_norm},
                                  {"tail_mass", init.tail_mass},
                                  {"tail_divergent", init.tail_divergent},
                                  {"tail_warning", init.tail_warning}});
  if (init.tail_warning) {
    log << "warning: truncation tail " << (init.tail_divergent ? "diverges (data not in W)" : "exceeds 1e-6 of W")
        << "; partial tail mass " << init.tail_mass << "\n";
  }
  const RunResult result = run(cfg, init.curve);
  for (std::size_t i = 0; i < result.trajectory.snapshots.size(); ++i) {
    out.write_json(snapshot_name(i), result.trajectory.snapshots[i]);
  }
  std::ostringstream csv;
  write_diagnostics_csv(csv, result.trajectory);
  out.write("diagnostics.csv", csv.str());
  const int code = result.ok() ? exit_ok : exit_code_for(*result.failure);
  out.write_json("summary.json", {{"status", result.ok() ? "ok" : "aborted"},
                                  {"message", result.message},
                                  {"dt", result.dt},
                                  {"snapshots", result.trajectory.snapshots.size()}});
  out.write_manifest("simulate", raw, code);
  if (!result.ok()) log << "error: " << result.message << "\n";
  return code;
}

inline int linear_spectrum(const Options& opt, std::ostream&) {
  const json raw = config::load_file(opt.config_path);
  if (!raw.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& item : raw.items()) {
    if (item.key() != "law" && item.key() != "a1" && item.key() != "m_max") {
      throw ConfigError("config: unknown key '" + item.key() + "'");
    }
  }
  if (!raw.contains("law")) throw ConfigError("config: missing key 'law'");
  const TensionLaw law = config::parse_law(raw.at("law"));
  const Complex a1 = config::detail::get_complex(raw, "a1", "config", 0.0);
  const int m_max = raw.contains("m_max") ? config::detail::get<int>(raw, "m_max", "config") : opt.m_max;
  if (m_max < 3) throw ConfigError("m_max must be at least 3");

  std::ostringstream csv;
  csv << "m,lambda1,lambda2,decay_rate\n";
  for (const auto& row : spectrum_report(law, a1, m_max)) {
    csv << row.m << ',' << format_double(row.lambda1) << ',' << format_double(row.lambda2) << ','
        << format_double(row.decay_rate) << '\n';
  }
  OutputDir out(opt.out_dir);
  out.write("spectrum.csv", csv.str());
  const LinearCoefficients c = linear_coefficients(law, a1);
  out.write_json("coefficients.json", {{"A", c.A},
                                       {"B", c.B},
                                       {"b_tilde", c.b_tilde},
                                       {"tension_deriv", c.tension_deriv},
                                       {"mode2_rate", build_mode2_system(c).rate}});
  out.write_manifest("linear-spectrum", raw, exit_ok);
  return exit_ok;
}

inline int verify_kernels(const Options& opt, std::ostream& log) {
  KernelCheckOptions check;
  json raw = json::object();
  if (!opt.config_path.empty()) {
    raw = config::load_file(opt.config_path);
    if (!raw.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& item : raw.items()) {
      const std::string& key = item.key();
      if (key == "max_block") check.lattice.max_block = config::detail::get<int>(raw, "max_block", "config");
      else if (key == "depth") check.lattice.depth_below_block = config::detail::get<int>(raw, "depth", "config");
      else if (key == "seed") check.seed = config::detail::get<std::uint64_t>(raw, "seed", "config");
      else throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  const json report = kernel_report(check);
  OutputDir out(opt.out_dir);
  out.write_json("kernels.json", report);
  const int code = report.at("pass").get<bool>() ? exit_ok : exit_verification_failed;
  out.write_manifest("verify-kernels", raw, code);
  if (code != exit_ok) log << "kernel verification failed; see kernels.json\n";
  return code;
}

inline int measure_norms(const Options& opt, std::ostream&) {
  const auto snaps = load_snapshots(opt.trajectory_dir);
  std::ostringstream csv;
  csv << "t,s_norm,z1,z2,w\n";
  for (const auto& c : snaps) {
    const ModeArray y = split(c).y;
    csv << format_double(c.time) << ',' << format_double(s_norm(y)) << ',' << format_double(z1_weight(y, c.time))
        << ',' << format_double(z2_weight(y, c.time)) << ',' << format_double(wiener_snapshot(y, c.time)) << '\n';
  }
  OutputDir out(opt.out_dir);
  out.write("norms.csv", csv.str());
  out.write_manifest("measure-norms", {{"trajectory", opt.trajectory_dir}}, exit_ok);
  return exit_ok;
}

inline int fit_decay_command(const Options& opt, std::ostream&) {
  const auto snaps = load_snapshots(opt.trajectory_dir);
  Trajectory traj;
  for (const auto& c : snaps) {
    traj.snapshots.push_back(c);
    traj.diagnostics.push_back(diagnose(c, {}, 0.0));
  }
  const DecayFit fit = fit_decay(traj);
  const auto& first = traj.diagnostics.front();
  OutputDir out(opt.out_dir);
  out.write_json("decay.json", {{"rate", fit.rate},
                                {"fit_residual", fit.fit_residual},
                                {"a0_limit", complex_json(fit.a0_limit)},
                                {"a1_limit", complex_json(fit.a1_limit)},
                                {"a0_initial", complex_json(first.a0)},
                                {"a1_initial", complex_json(first.a1)}});
  out.write_manifest("fit-decay", {{"trajectory", opt.trajectory_dir}}, exit_ok);
  return exit_ok;
}

inline int verify_linearization(const Options& opt, std::ostream& log) {
  const json raw = config::load_file(opt.config_path);
  if (!raw.is_object()) throw ConfigError("config: expected a JSON object");
  LinearizationOptions check;
  for (const auto& item : raw.items()) {
    const std::string& key = item.key();
    if (key == "law") continue;
    if (key == "max_k") check.max_k = config::detail::get<int>(raw, "max_k", "config");
    else if (key == "delta") check.delta = config::detail::get<double>(raw, "delta", "config");
    else if (key == "K") check.K = config::detail::get<int>(raw, "K", "config");
    else if (key == "M") check.M = config::detail::get<int>(raw, "M", "config");
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  if (!raw.contains("law")) throw ConfigError("config: missing key 'law'");
  if (check.K < check.max_k + 2) throw ConfigError("config: K must be at least max_k + 2");
  if (check.M < 4 * check.K || check.M % 2 != 0) throw ConfigError("config: M must be even and at least 4K");
  const TensionLaw law = config::parse_law(raw.at("law"));
  const json report = linearization_report(law, check);
  OutputDir out(opt.out_dir);
  out.write_json("linearization.json", report);
  const int code = report.at("pass").get<bool>() ? exit_ok : exit_verification_failed;
  out.write_manifest("verify-linearization", raw, code);
  if (code != exit_ok) {
    log << "linearization check failed";
    if (report.contains("reason")) log << ": " << report.at("reason").get<std::string>();
    log << "\n";
  }
  return code;
}

/// Registers the subcommands; the parsed subcommand name lands in `command`.
inline void build_app(CLI::App& app, Options& opt, std::string& command) {
  app.description("Spectral boundary-integral simulator and verification bench for the 2D Peskin problem.");
  app.set_version_flag("--version", PESKIN_VERSION);
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Integrate a run configuration and write a trajectory directory");
  sim->add_option("--config", opt.config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", opt.out_dir, "Output directory")->required();
  sim->add_option("--threads", opt.threads, "Threads for the nonlinearity evaluation")->check(CLI::PositiveNumber);
  sim->add_option("--snapshot-every", opt.snapshot_every, "Time between snapshots")->check(CLI::PositiveNumber);
  sim->add_option("--watch-modes", opt.watch_modes, "Comma-separated modes k recorded as |a_k| in diagnostics.csv");
  sim->add_option("--init", opt.init_json, "Initial-data spec (JSON), replaces the config's init");

  auto* spec = app.add_subcommand("linear-spectrum", "Eigenvalues of the linearized mode-pair systems (CSV)");
  spec->add_option("--config", opt.config_path, "JSON with law, optional a1 and m_max")->required()->check(CLI::ExistingFile);
  spec->add_option("--out", opt.out_dir, "Output directory")->required();
  spec->add_option("--m-max", opt.m_max, "Largest pair index m")->check(CLI::Range(3, 1 << 20));

  auto* kern = app.add_subcommand("verify-kernels", "Check kernel identities and fitted kernel bounds (JSON)");
  kern->add_option("--config", opt.config_path, "Optional JSON with max_block, depth, seed")->check(CLI::ExistingFile);
  kern->add_option("--out", opt.out_dir, "Output directory")->required();

  auto* norms = app.add_subcommand("measure-norms", "S, Z1, Z2 and W snapshots of a trajectory (CSV)");
  norms->add_option("--trajectory", opt.trajectory_dir, "Trajectory directory written by simulate")
      ->required()->check(CLI::ExistingDirectory);
  norms->add_option("--out", opt.out_dir, "Output directory")->required();

  auto* fit = app.add_subcommand("fit-decay", "Fit the decay rate of ||Y||_L2 and the limits of a0, a1 (JSON)");
  fit->add_option("--trajectory", opt.trajectory_dir, "Trajectory directory written by simulate")
      ->required()->check(CLI::ExistingDirectory);
  fit->add_option("--out", opt.out_dir, "Output directory")->required();

  auto* lin = app.add_subcommand("verify-linearization",
                                 "Compare a finite-difference Jacobian of N with the closed-form linear part (JSON)");
  lin->add_option("--config", opt.config_path, "JSON with law and optional max_k, delta, K, M")
      ->required()->check(CLI::ExistingFile);
  lin->add_option("--out", opt.out_dir, "Output directory")->required();

  for (auto* sub : app.get_subcommands({})) {
    sub->callback([&command, sub] { command = sub->get_name(); });
  }
}

/// Full entry point: parses arguments, runs the command, maps errors to exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"", "peskin_cli"};
  Options opt;
  std::string command;
  build_app(app, opt, command);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }
  try {
    if (command == "simulate") return simulate(opt, err);
    if (command == "linear-spectrum") return linear_spectrum(opt, err);
    if (command == "verify-kernels") return verify_kernels(opt, err);
    if (command == "measure-norms") return measure_norms(opt, err);
    if (command == "fit-decay") return fit_decay_command(opt, err);
    if (command == "verify-linearization") return verify_linearization(opt, err);
    err << "error: no command\n";
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace peskin::cli
