// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file io.hpp
/// \brief Serialization: potential JSON loading (presets and files), band
///        table / scan CSV with embedded config hashes, Weyl report JSON, and
///        the FNV-1a hash of the resolved run configuration.
///
/// All emitters are pure string builders; file writes live in one helper so
/// every byte of every artifact is reproducible for a given configuration.

#include "triweyl/perturbation.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace triweyl {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic numeric formatting
// ---------------------------------------------------------------------------

/// Round-trip decimal form for data files (shortest is not portable; 17
/// significant digits always reconstruct the double exactly).
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Compact form for plot coordinates and labels.
inline std::string format_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Config hash
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit over a byte string.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of a JSON value in canonical (key-sorted, minimal-whitespace) form.
/// nlohmann::json stores objects sorted by key, so dump() is canonical.
inline std::string json_hash(const Json& j) { return hex64(fnv1a64(j.dump())); }

// ---------------------------------------------------------------------------
// Potential input
// ---------------------------------------------------------------------------

/// Parse `{ "terms": [ { "kind": "cos"|"sin", "index": [m1,m2,m3],
/// "amplitude": a } ] }` into a coefficient map.
inline FourierPotential potential_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw std::runtime_error("potential JSON must be an object with a \"terms\" array");
  std::vector<std::pair<DualIndex, double>> cos_terms, sin_terms;
  for (const Json& term : j["terms"]) {
    if (!term.is_object() || !term.contains("kind") || !term.contains("index") ||
        !term.contains("amplitude"))
      throw std::runtime_error("potential term needs \"kind\", \"index\", \"amplitude\"");
    const Json& idx = term["index"];
    if (!idx.is_array() || idx.size() != 3)
      throw std::runtime_error("potential term index must be [m1,m2,m3]");
    const DualIndex m{idx[0].get<std::int64_t>(), idx[1].get<std::int64_t>(),
                      idx[2].get<std::int64_t>()};
    const double amp = term["amplitude"].get<double>();
    const std::string kind = term["kind"].get<std::string>();
    if (kind == "cos")
      cos_terms.push_back({m, amp});
    else if (kind == "sin")
      sin_terms.push_back({m, amp});
    else
      throw std::runtime_error("potential term kind must be \"cos\" or \"sin\"");
  }
  return from_cosines(cos_terms) + from_sines(sin_terms);
}

/// Resolve a potential specification: a named preset, `example:c1,c2`, or a
/// path to a JSON file.  Unreadable or malformed files raise runtime_error
/// (the CLI maps that to a usage/IO exit).
inline FourierPotential load_potential(const std::string& spec) {
  if (spec == "reference") return reference_potential();
  if (spec == "t-break") return t_breaking_perturbation();
  if (spec == "inversion-break") return inversion_breaking_perturbation();
  if (spec == "shallow-reference") return example_potential(0.5, 0.5);
  if (spec == "zero" || spec.empty()) return FourierPotential{};
  if (spec.rfind("example:", 0) == 0) {
    const std::string args = spec.substr(8);
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("potential spec \"" + spec + "\": expected example:c1,c2");
    try {
      return example_potential(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("potential spec \"" + spec + "\": expected example:c1,c2");
    }
  }
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open potential file \"" + spec + "\"");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed potential JSON in \"" + spec + "\": " + e.what());
  }
  return potential_from_json(j);
}

// ---------------------------------------------------------------------------
// Band tables
// ---------------------------------------------------------------------------

/// Sampled bands along a line (p2 empty) or over a plane grid (p1, p2 per
/// row).  Eigenvalues are ascending within each row; the CSV writer enforces
/// this as schema validation.
struct BandTable {
  bool two_params = false;
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<Eigen::Vector4d> mu;
  std::size_t rows() const { return mu.size(); }
};

inline std::string band_table_csv(const BandTable& t, const std::string& hash) {
  if (t.p1.size() != t.mu.size() || (t.two_params && t.p2.size() != t.mu.size()))
    throw std::invalid_argument("band_table_csv: column length mismatch");
  std::string out = "# config-hash: " + hash + "\n";
  out += t.two_params ? "lambda,lambda2,mu1,mu2,mu3,mu4\n" : "lambda,mu1,mu2,mu3,mu4\n";
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const Eigen::Vector4d& m = t.mu[i];
    for (int b = 0; b + 1 < 4; ++b)
      if (!(m[b] <= m[b + 1]))
        throw std::logic_error("band_table_csv: eigenvalues not ascending in row " +
                               std::to_string(i));
    out += format_full(t.p1[i]);
    if (t.two_params) out += "," + format_full(t.p2[i]);
    for (int b = 0; b < 4; ++b) out += "," + format_full(m[b]);
    out += "\n";
  }
  return out;
}

inline Json band_table_json(const BandTable& t) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    Json row;
    row["lambda"] = t.p1[i];
    if (t.two_params) row["lambda2"] = t.p2[i];
    row["mu"] = {t.mu[i][0], t.mu[i][1], t.mu[i][2], t.mu[i][3]};
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

inline std::string scan_csv(const std::vector<ScanRecord>& records, const std::string& hash) {
  std::string out = "# config-hash: " + hash + "\n";
  out += "param,mu1,mu2,mu3,mu4,predicted,residual\n";
  for (const ScanRecord& r : records) {
    out += format_full(r.param);
    for (int b = 0; b < 4; ++b) out += "," + format_full(r.mu[b]);
    out += "," + format_full(r.predicted) + "," + format_full(r.residual) + "\n";
  }
  return out;
}

inline Json fit_json(const LogLogFit& f) {
  return Json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"slope_stderr", f.slope_stderr},
              {"points", f.points},
              {"span_decades", f.span_decades}};
}

inline Json scan_records_json(const std::vector<ScanRecord>& records) {
  Json arr = Json::array();
  for (const ScanRecord& r : records) {
    Json rec{{"param", r.param},
             {"mu", {r.mu[0], r.mu[1], r.mu[2], r.mu[3]}},
             {"predicted", r.predicted},
             {"residual", r.residual},
             {"flagged", r.flagged}};
    if (!r.note.empty()) rec["note"] = r.note;
    arr.push_back(rec);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Weyl reports
// ---------------------------------------------------------------------------

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json cone_fit_json(const ConeFit& cf) {
  Json dirs = Json::array();
  for (const ConeFitEntry& e : cf.entries) {
    dirs.push_back(Json{{"direction", {e.direction[0], e.direction[1], e.direction[2]}},
                        {"kappa_arg", e.kap_arg},
                        {"h", e.h},
                        {"err_plus", e.err_plus},
                        {"err_minus", e.err_minus},
                        {"min_decay", e.min_decay()}});
  }
  return Json{{"directions", dirs}, {"max_err_rel", cf.max_err_rel}, {"min_decay", cf.min_decay}};
}

inline Json weyl_report_json(const WeylReport& r, const ConjugationReport& c) {
  return Json{{"mu_star", r.mu_star},
              {"b", r.b},
              {"upsilon1", complex_json(r.upsilon1)},
              {"upsilon2", complex_json(r.upsilon2)},
              {"upsilon3", complex_json(r.upsilon3)},
              {"fermi_velocity", r.fermi_velocity},
              {"structure_residuals",
               Json{{"offdiag_omega_residual", r.offdiag_omega_residual},
                    {"modulus_spread", r.modulus_spread},
                    {"real_part_of_product", r.real_part_of_product},
                    {"arg_product", r.arg_product}}},
              {"cone_fit", cone_fit_json(r.cone_fit)},
              {"conjugation",
               Json{{"max_residual_R", c.max_residual_R},
                    {"max_residual_T", c.max_residual_T},
                    {"max_charpoly_defect", c.max_charpoly_defect}}}};
}

/// Serialized negative finding: what the K-spectrum looked like when no
/// certified triple exists (multiplicity pattern and per-cluster signatures).
inline Json diagnosis_json(const WeylSearch& ws) {
  Json clusters = Json::array();
  for (const ClusterInfo& c : ws.clusters) {
    clusters.push_back(Json{{"first_band", c.first + 1},
                            {"size", c.size()},
                            {"mu", c.mu},
                            {"signature", c.signature.to_string()}});
  }
  return Json{{"multiplicity_pattern", ws.multiplicity_pattern},
              {"clusters", clusters},
              {"gap_above", ws.gap_above}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write \"" + path.string() + "\"");
  out << content;
  if (!out) throw std::runtime_error("short write to \"" + path.string() + "\"");
}

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace triweyl
