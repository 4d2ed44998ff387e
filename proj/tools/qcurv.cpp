// qcurv: command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qcurv/qcurv.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitSchema = 2;

int report_error(qc_status s) {
  std::cerr << "qcurv: " << qc_status_name(s) << ": " << qc_last_error() << "\n";
  return s == QC_ERR_SCHEMA ? kExitSchema : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-curvature and Gauss-Bonnet-Chern checks for radial conformally flat metrics"};
  app.footer("Environment: QCURV_THREADS caps worker threads.\n"
             "Exit status: 0 ok, 1 numerical failure or violated check, 2 schema or usage error.");
  app.require_subcommand(1);
  app.fallthrough();

  std::string input, output, format = "json";
  int n = 0, nodes = 0;
  std::uint64_t seed = 0;
  double rmax = 0.0, tol = 0.0;
  app.add_option("--input,-i", input, "profile specification (JSON)");
  app.add_option("--output,-o", output, "write the report here instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--n", n, "override the dimension of the profile")->check(CLI::IsMember({2, 4, 6, 8}));
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized checks");
  auto* rmax_opt = app.add_option("--rmax", rmax, "outer cutoff R_max")->check(CLI::PositiveNumber);
  auto* nodes_opt = app.add_option("--nodes", nodes, "radial node count (radius count for curvature)")
                        ->check(CLI::Range(4, 100000));
  auto* tol_opt = app.add_option("--tol", tol, "quadrature tolerance eps")->check(CLI::PositiveNumber);

  const char* commands[][2] = {
      {"curvature", "curvature frames at a set of radii"},
      {"kernels", "spherical-mean kernel table, r^2 II structure, Green's solve of the profile"},
      {"ends", "asymptotic exponent, completeness and equality case per end"},
      {"symmetrize", "spherical symmetrization of the (perturbed) profile"},
      {"gbc-verify", "total Q-curvature against the Gauss-Bonnet-Chern bound"},
      {"levelset", "level-set identities and F(lambda) in dimension four"},
      {"suite", "the full acceptance battery"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  qc_options* opt = nullptr;
  if (qc_status s = qc_options_create(&opt); s != QC_OK) return report_error(s);
  qc_status s = QC_OK;
  if (s == QC_OK && *seed_opt) s = qc_options_set_seed(opt, seed);
  if (s == QC_OK && *rmax_opt) s = qc_options_set_rmax(opt, rmax);
  if (s == QC_OK && *nodes_opt) s = qc_options_set_nodes(opt, nodes);
  if (s == QC_OK && *tol_opt) s = qc_options_set_tol(opt, tol);
  if (s == QC_OK) s = qc_options_set_format(opt, format == "csv" ? QC_FORMAT_CSV : QC_FORMAT_JSON);
  if (s != QC_OK) {
    qc_options_free(opt);
    std::cerr << "qcurv: invalid option: " << qc_last_error() << "\n";
    return kExitSchema;
  }

  qc_profile* profile = nullptr;
  if (command != "suite" || !input.empty()) {
    if (input.empty()) {
      std::cerr << "qcurv: " << command << " needs --input\n";
      qc_options_free(opt);
      return kExitSchema;
    }
    std::ifstream in(input, std::ios::binary);
    if (!in) {
      std::cerr << "qcurv: cannot read " << input << "\n";
      qc_options_free(opt);
      return kExitSchema;
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (qc_status ps = qc_profile_parse(text.str().c_str(), n, &profile); ps != QC_OK) {
      qc_options_free(opt);
      return report_error(ps);
    }
  }

  char* report = nullptr;
  const qc_status rs = qc_run(command.c_str(), profile, opt, &report);
  int code = 0;
  if (report) {
    if (output.empty()) {
      std::fwrite(report, 1, std::char_traits<char>::length(report), stdout);
    } else {
      std::ofstream out(output, std::ios::binary);
      out << report;
      if (!out) {
        std::cerr << "qcurv: cannot write " << output << "\n";
        code = kExitFailure;
      }
    }
    qc_string_free(report);
  }
  if (rs == QC_ERR_VIOLATION) {
    std::cerr << "qcurv: " << qc_last_error() << "\n";
    code = kExitFailure;
  } else if (rs != QC_OK) {
    code = report_error(rs);
  }
  qc_profile_free(profile);
  qc_options_free(opt);
  return code;
}
