// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file cli.hpp
/// \brief Batch front end: configuration resolution, the six commands
///        (verify, bands-line, bands-plane, weyl, scan-epsilon, scan-delta),
///        deterministic artifact assembly, and --check re-run diffing.
///
/// Commands are pure: they produce an exit code, a human-readable summary,
/// and a list of (filename, bytes) artifacts.  Writing (or diffing, under
/// --check) happens in one place, so byte-level reproducibility is the
/// default rather than an afterthought.  Exit codes: 0 success/admissible,
/// 1 structural negative (with serialized diagnosis), 2 usage or I/O error.

#include "triweyl/svg.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace triweyl {

/// Usage or I/O problem: maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string potential;     ///< preset name, example:c1,c2, or file; "" → command default
  std::string perturbation;  ///< secondary potential added as delta·V_p ("" → none)
  double delta = 0.0;        ///< scale of the perturbation outside δ-scans
  double a = 0.0;            ///< lattice constant; 0 → √3π (q = 1)
  double rho = 4.0;          ///< basis cutoff radius in units of q
  Eigen::Vector3d dir{1, 0, 0};
  Eigen::Vector3d dir2{0, 0, 1};
  double range = 0.1;        ///< half-width of λ grids
  int samples = 0;           ///< 0 → 101 per line, 61 per plane axis
  std::vector<double> values;  ///< ε or δ list; empty → command default
  std::string out = "out";
  int threads = 1;
  std::string format = "all";  ///< csv|json|svg|all
  bool check = false;          ///< re-run and diff instead of writing
  bool k_prime = false;        ///< weyl: report at the mirrored corner K'
};

/// Fill command-dependent defaults; validates the command name and format.
inline RunConfig resolve_config(RunConfig cfg) {
  static const std::array<const char*, 6> commands = {"verify",      "bands-line", "bands-plane",
                                                      "weyl",        "scan-epsilon",
                                                      "scan-delta"};
  bool known = false;
  for (const char* c : commands) known = known || cfg.command == c;
  if (!known) throw UsageError("unknown command \"" + cfg.command + "\"");
  if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "svg" && cfg.format != "all")
    throw UsageError("--format must be csv, json, svg, or all");
  if (cfg.a == 0.0) cfg.a = default_lattice_constant();
  if (!(cfg.a > 0.0)) throw UsageError("--a must be positive");
  if (!(cfg.rho >= 1.0)) throw UsageError("--rho must be at least 1");
  if (cfg.threads < 1) throw UsageError("--threads must be at least 1");
  if (cfg.potential.empty())
    cfg.potential = cfg.command == "scan-delta" ? "shallow-reference" : "reference";
  if (cfg.perturbation.empty() && cfg.command == "scan-delta") cfg.perturbation = "inversion-break";
  if (cfg.samples == 0) cfg.samples = cfg.command == "bands-plane" ? 61 : 101;
  if (cfg.samples < 2) throw UsageError("--samples must be at least 2");
  if (!(cfg.range > 0.0)) throw UsageError("--range must be positive");
  if (cfg.values.empty()) {
    if (cfg.command == "scan-epsilon") cfg.values = {0.0125, 0.025, 0.05, 0.1, 0.2};
    if (cfg.command == "scan-delta") cfg.values = {0.0025, 0.005, 0.01, 0.02};
  }
  for (double v : cfg.values)
    if (!(v >= 0.0)) throw UsageError("--values must be non-negative");
  return cfg;
}

/// The hashed configuration: everything that determines artifact bytes.
/// Thread count, output directory, format selection, and --check are
/// excluded — they change where/which files land, never their contents.
inline Json resolved_config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["potential"] = cfg.potential;
  j["perturbation"] = cfg.perturbation;
  j["delta"] = cfg.delta;
  j["a"] = cfg.a;
  j["rho"] = cfg.rho;
  j["dir"] = {cfg.dir[0], cfg.dir[1], cfg.dir[2]};
  j["dir2"] = {cfg.dir2[0], cfg.dir2[1], cfg.dir2[2]};
  j["range"] = cfg.range;
  j["samples"] = cfg.samples;
  j["values"] = cfg.values;
  j["k_prime"] = cfg.k_prime;
  return j;
}

inline std::string config_hash(const RunConfig& cfg) {
  return json_hash(resolved_config_json(cfg));
}

struct CommandOutcome {
  int exit_code = 0;
  std::string human;
  std::vector<std::pair<std::string, std::string>> files;
};

namespace cli_detail {

inline bool want(const RunConfig& cfg, const char* kind) {
  return cfg.format == "all" || cfg.format == kind;
}

inline void add_config_file(CommandOutcome& out, const RunConfig& cfg) {
  Json j = resolved_config_json(cfg);
  j["config_hash"] = config_hash(cfg);
  out.files.push_back({"config.json", j.dump(2) + "\n"});
}

/// Base potential plus optional δ-scaled perturbation.
inline FourierPotential effective_potential(const RunConfig& cfg) {
  FourierPotential v = load_potential(cfg.potential);
  if (!cfg.perturbation.empty() && cfg.command != "scan-delta" && cfg.delta != 0.0)
    v = v + cfg.delta * load_potential(cfg.perturbation);
  return v;
}

inline std::string flag_line(const char* name, bool pass, double worst) {
  std::string s = "  ";
  s += name;
  s += std::string(": ") + (pass ? "pass" : "FAIL") + " (worst " + format_short(worst) + ")\n";
  return s;
}

inline const std::vector<Eigen::Vector3d>& cone_directions() {
  static const std::vector<Eigen::Vector3d> d = {
      Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(2.0 / 3, 2.0 / 3, 1.0 / 3),
      Eigen::Vector3d(1, 1, 1).normalized()};
  return d;
}

inline CommandOutcome cmd_verify(const RunConfig& cfg) {
  CommandOutcome out;
  const FourierPotential v = effective_potential(cfg);
  const AdmissibilityReport rep = check_admissible(v);
  out.exit_code = rep.admissible() ? 0 : 1;
  out.human = "verify: potential \"" + cfg.potential + "\"";
  if (!cfg.perturbation.empty() && cfg.delta != 0.0)
    out.human += " + " + format_short(cfg.delta) + " * \"" + cfg.perturbation + "\"";
  out.human += "\n";
  out.human += flag_line("real", rep.is_real, rep.worst_real);
  out.human += flag_line("even", rep.is_even, rep.worst_even);
  out.human += flag_line("rotation-invariant", rep.is_R_invariant, rep.worst_R);
  out.human += flag_line("t-invariant", rep.is_T_invariant, rep.worst_T);
  out.human += rep.admissible() ? "  admissible: yes\n" : "  admissible: NO\n";
  Json j{{"admissible", rep.admissible()},
         {"is_real", rep.is_real},
         {"is_even", rep.is_even},
         {"is_R_invariant", rep.is_R_invariant},
         {"is_T_invariant", rep.is_T_invariant},
         {"worst_real", rep.worst_real},
         {"worst_even", rep.worst_even},
         {"worst_R", rep.worst_R},
         {"worst_T", rep.worst_T},
         {"config_hash", config_hash(cfg)}};
  out.files.push_back({"verify.json", j.dump(2) + "\n"});
  add_config_file(out, cfg);
  return out;
}

inline CommandOutcome cmd_bands_line(const RunConfig& cfg) {
  CommandOutcome out;
  if (cfg.dir.norm() < 1e-14) throw UsageError("--dir must be nonzero");
  const Eigen::Vector3d n = cfg.dir.normalized();
  const FourierPotential v = effective_potential(cfg);
  const LatticeSpec lat = build_lattice(cfg.a);
  const PlaneWaveBasis basis = build_basis(lat, cfg.rho);
  const Eigen::Vector3d kcenter = lat.k_point();

  BandTable table;
  std::vector<Eigen::Vector3d> ks;
  for (int i = 0; i < cfg.samples; ++i) {
    const double lam = -cfg.range + 2.0 * cfg.range * i / (cfg.samples - 1);
    table.p1.push_back(lam);
    ks.push_back(kcenter + lam * n);
  }
  const Eigen::MatrixXd mus = band_path(basis, v, ks, 4, cfg.threads);
  for (int i = 0; i < cfg.samples; ++i) table.mu.push_back(mus.row(i).transpose());

  // Dispersion-law overlay when the potential certifies a triple at K.
  const WeylSearch ws = find_weyl_candidate(basis, v);
  std::vector<std::vector<std::pair<double, double>>> overlays;
  Json prediction;
  if (ws.triple) {
    const StructureReport sr = verify_structure(extract_upsilons(basis, *ws.triple));
    std::array<std::vector<std::pair<double, double>>, 3> lines;
    for (double lam : table.p1) {
      std::array<double, 3> pred = {ws.triple->mu_star, ws.triple->mu_star, ws.triple->mu_star};
      if (lam != 0.0) pred = predicted_bands(ws.triple->mu_star, sr.v_F, lam * n);
      for (int b = 0; b < 3; ++b)
        lines[static_cast<std::size_t>(b)].push_back({lam, pred[static_cast<std::size_t>(b)]});
    }
    for (auto& l : lines) overlays.push_back(std::move(l));
    prediction = Json{{"mu_star", ws.triple->mu_star},
                      {"fermi_velocity", sr.v_F},
                      {"band_first", ws.triple->band_first + 1}};
    out.human = "bands-line: overlaying dispersion prediction (mu* = " +
                format_short(ws.triple->mu_star) + ", v_F = " + format_short(sr.v_F) + ")\n";
  } else {
    prediction = nullptr;
    out.human = "bands-line: no certified triple at K (pattern " + ws.multiplicity_pattern +
                "); no overlay\n";
  }
  out.human += "  " + std::to_string(cfg.samples) + " samples along (" + format_short(n[0]) +
               ", " + format_short(n[1]) + ", " + format_short(n[2]) + "), lambda in [-" +
               format_short(cfg.range) + ", " + format_short(cfg.range) + "]\n";

  const std::string hash = config_hash(cfg);
  if (want(cfg, "csv")) out.files.push_back({"bands_line.csv", band_table_csv(table, hash)});
  if (want(cfg, "json")) {
    Json j{{"rows", band_table_json(table)},
           {"prediction", prediction},
           {"basis_size", basis.size()},
           {"config_hash", hash}};
    out.files.push_back({"bands_line.json", j.dump(2) + "\n"});
  }
  if (want(cfg, "svg"))
    out.files.push_back({"bands_line.svg", svg_band_line_plot(table, overlays, hash)});
  add_config_file(out, cfg);
  return out;
}

inline CommandOutcome cmd_bands_plane(const RunConfig& cfg) {
  CommandOutcome out;
  if (cfg.dir.norm() < 1e-14 || cfg.dir2.norm() < 1e-14)
    throw UsageError("--dir and --dir2 must be nonzero");
  const Eigen::Vector3d e1 = cfg.dir.normalized();
  Eigen::Vector3d e2 = cfg.dir2 - cfg.dir2.dot(e1) * e1;
  if (e2.norm() < 1e-10 * cfg.dir2.norm())
    throw UsageError("--dir and --dir2 are parallel; the plane is degenerate");
  e2.normalize();

  const FourierPotential v = effective_potential(cfg);
  const LatticeSpec lat = build_lattice(cfg.a);
  const PlaneWaveBasis basis = build_basis(lat, cfg.rho);
  const Eigen::Vector3d kcenter = lat.k_point();

  BandTable table;
  table.two_params = true;
  std::vector<Eigen::Vector3d> ks;
  auto grid_value = [&](int i) {
    return -cfg.range + 2.0 * cfg.range * i / (cfg.samples - 1);
  };
  for (int i = 0; i < cfg.samples; ++i)
    for (int j = 0; j < cfg.samples; ++j) {
      table.p1.push_back(grid_value(i));
      table.p2.push_back(grid_value(j));
      ks.push_back(kcenter + grid_value(i) * e1 + grid_value(j) * e2);
    }
  const Eigen::MatrixXd mus = band_path(basis, v, ks, 4, cfg.threads);
  for (int r = 0; r < mus.rows(); ++r) table.mu.push_back(mus.row(r).transpose());

  out.human = "bands-plane: " + std::to_string(cfg.samples) + "x" + std::to_string(cfg.samples) +
              " grid, axes orthonormalized\n";
  const std::string hash = config_hash(cfg);
  if (want(cfg, "csv")) out.files.push_back({"bands_plane.csv", band_table_csv(table, hash)});
  if (want(cfg, "json")) {
    Json j{{"rows", band_table_json(table)}, {"basis_size", basis.size()}, {"config_hash", hash}};
    out.files.push_back({"bands_plane.json", j.dump(2) + "\n"});
  }
  if (want(cfg, "svg"))
    out.files.push_back(
        {"bands_plane.svg", svg_plane_heatmap(table, cfg.samples, cfg.samples, hash)});
  add_config_file(out, cfg);
  return out;
}

inline CommandOutcome cmd_weyl(const RunConfig& cfg) {
  CommandOutcome out;
  const FourierPotential v = effective_potential(cfg);
  const LatticeSpec lat = build_lattice(cfg.a);
  const PlaneWaveBasis basis = build_basis(lat, cfg.rho);
  const std::string hash = config_hash(cfg);
  const WeylSearch ws = find_weyl_candidate(basis, v);
  if (!ws.triple) {
    out.exit_code = 1;
    out.human = "weyl: no certified three-fold crossing at K\n  multiplicity pattern: " +
                ws.multiplicity_pattern + "\n";
    for (const ClusterInfo& c : ws.clusters)
      out.human += "  bands " + std::to_string(c.first + 1) + ".." + std::to_string(c.last + 1) +
                   ": mu = " + format_short(c.mu) + ", signature " + c.signature.to_string() +
                   "\n";
    Json j{{"certified", false}, {"diagnosis", diagnosis_json(ws)}, {"config_hash", hash}};
    out.files.push_back({"weyl.json", j.dump(2) + "\n"});
    add_config_file(out, cfg);
    return out;
  }

  WeylReport rep =
      build_weyl_report(basis, v, *ws.triple, cone_directions(), {1e-3, 5e-4}, cfg.threads);
  const ConjugationReport conj = verify_conjugation(basis, *ws.triple);
  std::string center = "K";
  if (cfg.k_prime) {
    // The mirrored corner K' = -K carries the complex-conjugate triple: same
    // eigenvalue, conjugated couplings, identical residuals.
    center = "K'";
    rep.upsilon1 = std::conj(rep.upsilon1);
    rep.upsilon2 = std::conj(rep.upsilon2);
    rep.upsilon3 = std::conj(rep.upsilon3);
    const double two_pi = 2.0 * std::numbers::pi;
    rep.arg_product = rep.arg_product == 0.0 ? 0.0 : two_pi - rep.arg_product;
  }
  out.human = "weyl: certified three-fold crossing at " + center + "\n";
  out.human += "  mu* = " + format_full(rep.mu_star) + " (bands " + std::to_string(rep.b) + ".." +
               std::to_string(rep.b + 2) + ")\n";
  out.human += "  v_F = " + format_full(rep.fermi_velocity) +
               ", arg(u1 u2 u3) = " + format_full(rep.arg_product) + "\n";
  out.human += "  modulus spread " + format_short(rep.modulus_spread) + ", |Re product| " +
               format_short(rep.real_part_of_product) + ", pairing residual " +
               format_short(rep.offdiag_omega_residual) + "\n";
  out.human += "  cone: max slope error " + format_short(rep.cone_fit.max_err_rel) +
               ", min decay " + format_short(rep.cone_fit.min_decay) + "\n";
  out.human += "  conjugation residuals: R " + format_short(conj.max_residual_R) + ", T " +
               format_short(conj.max_residual_T) + ", charpoly " +
               format_short(conj.max_charpoly_defect) + "\n";
  Json j{{"certified", true},
         {"center", center},
         {"report", weyl_report_json(rep, conj)},
         {"basis_size", basis.size()},
         {"config_hash", hash}};
  out.files.push_back({"weyl.json", j.dump(2) + "\n"});
  add_config_file(out, cfg);
  return out;
}

inline CommandOutcome cmd_scan_epsilon(const RunConfig& cfg) {
  CommandOutcome out;
  if (cfg.values.empty()) throw UsageError("scan-epsilon needs a non-empty --values list");
  const FourierPotential v = load_potential(cfg.potential);
  const LatticeSpec lat = build_lattice(cfg.a);
  const PlaneWaveBasis basis = build_basis(lat, cfg.rho);
  const EpsilonScan es = epsilon_scan(basis, v, cfg.values, cfg.threads);
  const VelocityScan vs = fermi_velocity_scan(basis, v, cfg.values, cfg.threads);

  out.human = "scan-epsilon: " + std::to_string(cfg.values.size()) + " values\n";
  out.human += "  mu* remainder order " + format_short(es.residual_fit.slope) + " +- " +
               format_short(es.residual_fit.slope_stderr) + "\n";
  out.human += "  v_F extrapolates to " + format_full(vs.intercept) + " (free value " +
               format_full(lat.q) + ")\n";

  Json vel_records = Json::array();
  for (const VelocityRecord& r : vs.records)
    vel_records.push_back(Json{{"param", r.param},
                               {"v_f", r.v_f},
                               {"deviation", r.deviation},
                               {"arg_product", r.arg_product},
                               {"flagged", r.flagged}});
  const std::string hash = config_hash(cfg);
  if (want(cfg, "csv")) out.files.push_back({"scan_epsilon.csv", scan_csv(es.records, hash)});
  if (want(cfg, "json")) {
    Json j{{"records", scan_records_json(es.records)},
           {"residual_fit", fit_json(es.residual_fit)},
           {"velocity",
            Json{{"records", vel_records},
                 {"intercept", vs.intercept},
                 {"deviation_fit", fit_json(vs.deviation_fit)}}},
           {"config_hash", hash}};
    out.files.push_back({"scan_epsilon.json", j.dump(2) + "\n"});
  }
  if (want(cfg, "svg"))
    out.files.push_back({"scan_epsilon.svg", svg_scan_plot(es.records, es.residual_fit, hash)});
  add_config_file(out, cfg);
  return out;
}

inline CommandOutcome cmd_scan_delta(const RunConfig& cfg) {
  CommandOutcome out;
  if (cfg.values.empty()) throw UsageError("scan-delta needs a non-empty --values list");
  const FourierPotential v = load_potential(cfg.potential);
  const FourierPotential vp = load_potential(cfg.perturbation);
  const LatticeSpec lat = build_lattice(cfg.a);
  const PlaneWaveBasis basis = build_basis(lat, cfg.rho);
  const DeltaScan ds = delta_scan(basis, v, vp, cfg.values, cfg.threads);

  out.human = "scan-delta: " + std::to_string(cfg.values.size()) + " values, " +
              (ds.odd_mode ? "odd" : "even") + " perturbation\n";
  if (ds.odd_mode) {
    const double w = std::sqrt(ds.s1 * ds.s1 + 2.0 * std::norm(ds.s2));
    out.human += "  s1 = " + format_full(ds.s1) + ", |s2| = " + format_short(std::abs(ds.s2)) +
                 ", split scale w = " + format_full(w) + "\n";
    out.human += "  split residual order " + format_short(ds.residual_fit.slope) + " +- " +
                 format_short(ds.residual_fit.slope_stderr) + "\n";
  } else {
    out.human += std::string("  multiplicity pattern 2+1 at every delta: ") +
                 (ds.pattern_ok ? "yes" : "NO") + "\n";
  }

  const std::string hash = config_hash(cfg);
  if (want(cfg, "csv")) out.files.push_back({"scan_delta.csv", scan_csv(ds.records, hash)});
  if (want(cfg, "json")) {
    Json j{{"odd_mode", ds.odd_mode},
           {"records", scan_records_json(ds.records)},
           {"config_hash", hash}};
    if (ds.odd_mode) {
      j["s1"] = ds.s1;
      j["s2"] = complex_json(ds.s2);
      j["w"] = std::sqrt(ds.s1 * ds.s1 + 2.0 * std::norm(ds.s2));
      j["residual_fit"] = fit_json(ds.residual_fit);
    } else {
      j["pattern_ok"] = ds.pattern_ok;
    }
    out.files.push_back({"scan_delta.json", j.dump(2) + "\n"});
  }
  if (want(cfg, "svg"))
    out.files.push_back({"scan_delta.svg", svg_scan_plot(ds.records, ds.residual_fit, hash)});
  add_config_file(out, cfg);
  if (!ds.odd_mode && !ds.pattern_ok) out.exit_code = 1;
  return out;
}

}  // namespace cli_detail

/// Run one command on a resolved configuration; throws UsageError (exit 2)
/// for bad inputs, never touches the filesystem except to read a potential.
inline CommandOutcome run_command(const RunConfig& resolved) {
  using namespace cli_detail;
  if (resolved.command == "verify") return cmd_verify(resolved);
  if (resolved.command == "bands-line") return cmd_bands_line(resolved);
  if (resolved.command == "bands-plane") return cmd_bands_plane(resolved);
  if (resolved.command == "weyl") return cmd_weyl(resolved);
  if (resolved.command == "scan-epsilon") return cmd_scan_epsilon(resolved);
  if (resolved.command == "scan-delta") return cmd_scan_delta(resolved);
  throw UsageError("unknown command \"" + resolved.command + "\"");
}

/// Resolve, run, then write artifacts — or, under --check, re-derive them and
/// byte-compare against what is already on disk (0 = identical, 1 = drift,
/// 2 = missing files).  Returns the process exit code; human-readable output
/// is appended to `log`.
inline int run_cli(const RunConfig& cfg_in, std::string& log) {
  RunConfig cfg;
  try {
    cfg = resolve_config(cfg_in);
  } catch (const UsageError& e) {
    log += std::string("error: ") + e.what() + "\n";
    return 2;
  }
  CommandOutcome out;
  try {
    out = run_command(cfg);
  } catch (const UsageError& e) {
    log += std::string("error: ") + e.what() + "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    log += std::string("error: ") + e.what() + "\n";
    return 2;
  } catch (const std::logic_error& e) {
    // Violated internal certificate: a structural negative, not a usage slip.
    log += std::string("certificate failure: ") + e.what() + "\n";
    return 1;
  } catch (const std::exception& e) {
    log += std::string("error: ") + e.what() + "\n";
    return 2;
  }
  log += out.human;
  const std::filesystem::path dir(cfg.out);
  if (cfg.check) {
    int verdict = out.exit_code;
    for (const auto& [name, content] : out.files) {
      const auto existing = read_file(dir / name);
      if (!existing) {
        log += "check: missing " + (dir / name).string() + "\n";
        return 2;
      }
      if (*existing != content) {
        log += "check: " + (dir / name).string() + " differs from a fresh run\n";
        verdict = 1;
      }
    }
    if (verdict == out.exit_code) log += "check: all artifacts reproduced byte-identically\n";
    return verdict;
  }
  try {
    for (const auto& [name, content] : out.files) write_file(dir / name, content);
  } catch (const std::exception& e) {
    log += std::string("error: ") + e.what() + "\n";
    return 2;
  }
  return out.exit_code;
}

}  // namespace triweyl
