// triweyl command-line front end: band structures, Weyl-point certification,
// admissibility checks, and shallow-potential scans of -Δ + V.
#include "triweyl/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

Eigen::Vector3d parse_vec3(const std::string& s) {
  std::array<double, 3> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t next = i < 2 ? s.find(',', pos) : s.size();
    if (next == std::string::npos)
      throw triweyl::UsageError("direction \"" + s + "\": expected x,y,z");
    try {
      v[static_cast<std::size_t>(i)] = std::stod(s.substr(pos, next - pos));
    } catch (const std::exception&) {
      throw triweyl::UsageError("direction \"" + s + "\": expected x,y,z");
    }
    pos = next + 1;
  }
  return {v[0], v[1], v[2]};
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = std::min(s.find(',', pos), s.size());
    try {
      out.push_back(std::stod(s.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw triweyl::UsageError("values \"" + s + "\": expected v1,v2,...");
    }
    pos = next + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-Bloch band structures and three-fold Weyl points of -Delta + V"};
  app.require_subcommand(1);

  triweyl::RunConfig cfg;
  std::string dir_s = "1,0,0";
  std::string dir2_s = "0,0,1";
  std::string values_s;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--potential", cfg.potential,
                    "preset (reference, t-break, inversion-break, shallow-reference, zero, "
                    "example:c1,c2) or a potential JSON file");
    sub->add_option("--perturbation", cfg.perturbation,
                    "secondary potential combined as V + delta*V_p (scan-delta: the scanned V_p)");
    sub->add_option("--delta", cfg.delta, "scale of --perturbation outside scan-delta");
    sub->add_option("--a", cfg.a, "lattice constant (default sqrt(3)*pi, so q = 1)");
    sub->add_option("--rho", cfg.rho, "plane-wave cutoff radius in units of q (default 4)");
    sub->add_option("--dir", dir_s, "line / first plane direction as x,y,z");
    sub->add_option("--dir2", dir2_s, "second plane direction as x,y,z");
    sub->add_option("--range", cfg.range, "half-width of the lambda grid (default 0.1)");
    sub->add_option("--samples", cfg.samples,
                    "sample count (default 101 per line, 61 per plane axis)");
    sub->add_option("--values", values_s, "comma-separated epsilon/delta list");
    sub->add_option("--out", cfg.out, "output directory (default ./out)");
    sub->add_option("--threads", cfg.threads,
                    "worker cap; results are independent of the thread count");
    sub->add_option("--format", cfg.format, "artifact selection: csv|json|svg|all");
    sub->add_flag("--check", cfg.check,
                  "re-run and byte-compare against existing artifacts instead of writing");
  };

  add_common(app.add_subcommand("verify", "check the four admissibility conditions"));
  add_common(app.add_subcommand("bands-line", "sample mu_1..mu_4 along K + lambda*n"));
  add_common(app.add_subcommand("bands-plane", "sample bands over a plane section through K"));
  CLI::App* weyl = app.add_subcommand("weyl", "certify the three-fold crossing at K");
  add_common(weyl);
  weyl->add_flag("--k-prime", cfg.k_prime, "report at the mirrored corner K' = -K");
  add_common(app.add_subcommand("scan-epsilon", "shallow-potential scan of mu* and v_F"));
  add_common(app.add_subcommand("scan-delta", "symmetry-breaking split scan of V + delta*V_p"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.command = app.get_subcommands().at(0)->get_name();

  try {
    cfg.dir = parse_vec3(dir_s);
    cfg.dir2 = parse_vec3(dir2_s);
    cfg.values = parse_values(values_s);
  } catch (const triweyl::UsageError& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  }

  std::string log;
  const int code = triweyl::run_cli(cfg, log);
  std::cout << log;
  return code;
}
