#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qcurv/qcurv.h"

namespace {

std::string data_file(const std::string& name) {
  const char* dir = std::getenv("QCURV_TEST_DATA");
  REQUIRE(dir != nullptr);
  std::ifstream in(std::string(dir) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Owns a profile handle for the duration of a test.
struct Profile {
  qc_profile* p = nullptr;
  ~Profile() { qc_profile_free(p); }
};

struct Options {
  qc_options* o = nullptr;
  Options() { REQUIRE(qc_options_create(&o) == QC_OK); }
  ~Options() { qc_options_free(o); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(qc_abi_version() == QC_ABI_VERSION);
  CHECK(std::string(qc_status_name(QC_OK)) == "ok");
  CHECK(std::string(qc_status_name(QC_ERR_SCHEMA)) != "unknown");
  CHECK(std::string(qc_status_name(QC_ERR_VIOLATION)) == "violation");
  CHECK(std::string(qc_status_name(static_cast<qc_status>(99))) == "unknown");
}

TEST_CASE("constants") {
  double vol = 0.0, c = 0.0;
  REQUIRE(qc_constants(4, &vol, &c) == QC_OK);
  CHECK(vol == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
  CHECK(c == doctest::Approx(1.0 / (4.0 * vol)).epsilon(1e-14));
  REQUIRE(qc_constants(2, &vol, &c) == QC_OK);
  CHECK(c == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(qc_constants(3, &vol, &c) == QC_ERR_DIMENSION);
  CHECK(std::string(qc_last_error()).size() > 0);
}

TEST_CASE("parse errors surface as schema errors") {
  Profile pr;
  CHECK(qc_profile_parse(data_file("malformed.json").c_str(), 0, &pr.p) == QC_ERR_SCHEMA);
  CHECK(pr.p == nullptr);
  CHECK(qc_profile_parse(data_file("unknown_field.json").c_str(), 0, &pr.p) == QC_ERR_SCHEMA);
  CHECK(std::string(qc_last_error()).find("colour") != std::string::npos);
  CHECK(qc_profile_parse(data_file("bad_dimension.json").c_str(), 0, &pr.p) == QC_ERR_SCHEMA);
  CHECK(qc_profile_parse(R"({"n": 4, "profile": {"type": "analytic", "terms": [{"kind": "log1p_sq", "c": 1, "rho": -1}]}})",
                         0, &pr.p) == QC_ERR_SCHEMA);
}

TEST_CASE("null arguments") {
  qc_profile* p = nullptr;
  CHECK(qc_profile_parse(nullptr, 0, &p) == QC_ERR_INVALID_ARGUMENT);
  CHECK(qc_options_create(nullptr) == QC_ERR_INVALID_ARGUMENT);
  CHECK(qc_options_set_seed(nullptr, 1) == QC_ERR_INVALID_ARGUMENT);
  double x = 0.0;
  CHECK(qc_q_curvature(nullptr, 1.0, &x) == QC_ERR_INVALID_ARGUMENT);
  CHECK(qc_total_q(nullptr, nullptr, &x, nullptr, nullptr) == QC_ERR_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(qc_run(nullptr, nullptr, nullptr, &out) == QC_ERR_INVALID_ARGUMENT);
  CHECK(qc_run("curvature", nullptr, nullptr, &out) == QC_ERR_DOMAIN);
  CHECK(out == nullptr);
  CHECK(qc_profile_dimension(nullptr) == 0);
  qc_profile_free(nullptr);
  qc_options_free(nullptr);
  qc_string_free(nullptr);
}

TEST_CASE("option validation") {
  Options o;
  CHECK(qc_options_set_rmax(o.o, 0.5) == QC_ERR_DOMAIN);
  CHECK(qc_options_set_nodes(o.o, 2) == QC_ERR_DOMAIN);
  CHECK(qc_options_set_tol(o.o, 0.0) == QC_ERR_DOMAIN);
  CHECK(qc_options_set_format(o.o, static_cast<qc_format>(7)) == QC_ERR_INVALID_ARGUMENT);
  CHECK(qc_options_set_rmax(o.o, 80.0) == QC_OK);
  CHECK(qc_options_set_seed(o.o, 7) == QC_OK);
}

TEST_CASE("pointwise values on the round-sphere family") {
  // w = -ln(1 + r^2) is the sphere of radius 1/2: R = 4 n(n-1) = 48, Q = 16 * 6 = 96 in dimension four.
  const qc_term t{QC_TERM_LOG1P_SQ, -1.0, 1.0};
  Profile pr;
  REQUIRE(qc_profile_analytic(4, &t, 1, 0, &pr.p) == QC_OK);
  CHECK(qc_profile_dimension(pr.p) == 4);
  double w = 0.0, R = 0.0, Q = 0.0;
  REQUIRE(qc_profile_eval(pr.p, 2.0, 0, &w) == QC_OK);
  CHECK(w == doctest::Approx(-std::log(5.0)).epsilon(1e-14));
  for (double r : {0.0, 0.3, 1.0, 4.0}) {
    REQUIRE(qc_scalar_curvature(pr.p, r, &R) == QC_OK);
    REQUIRE(qc_q_curvature(pr.p, r, &Q) == QC_OK);
    CHECK(R == doctest::Approx(48.0).epsilon(1e-10));
    CHECK(Q == doctest::Approx(96.0).epsilon(1e-10));
  }
  CHECK(qc_profile_eval(pr.p, -1.0, 0, &w) != QC_OK);
}

TEST_CASE("total Q and the inequality for w_{-1}") {
  Profile pr;
  REQUIRE(qc_profile_parse(data_file("w_minus_one.json").c_str(), 0, &pr.p) == QC_OK);
  double total = 0.0, flux = 0.0, quad = 0.0;
  REQUIRE(qc_total_q(pr.p, nullptr, &total, &flux, &quad) == QC_OK);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(quad == doctest::Approx(1.0).epsilon(1e-5));
  qc_gbc_result r{};
  REQUIRE(qc_verify_gbc(pr.p, nullptr, &r) == QC_OK);
  CHECK(r.verdict == QC_SATISFIED);
  CHECK(r.bound == 1.0);
  CHECK(r.complete == 1);
  CHECK(r.scalar_nonneg == 1);
  CHECK(r.q_integrable == 1);
  CHECK(r.equality_expected == 1);
  CHECK(r.equality_observed == 1);
}

TEST_CASE("dimension override") {
  Profile pr;
  REQUIRE(qc_profile_parse(data_file("w_minus_one.json").c_str(), 8, &pr.p) == QC_OK);
  CHECK(qc_profile_dimension(pr.p) == 8);
  double total = 0.0;
  REQUIRE(qc_total_q(pr.p, nullptr, &total, nullptr, nullptr) == QC_OK);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("two ends: the cylinder") {
  Profile pr;
  REQUIRE(qc_profile_parse(data_file("cylinder.json").c_str(), 0, &pr.p) == QC_OK);
  qc_gbc_result r{};
  REQUIRE(qc_verify_gbc(pr.p, nullptr, &r) == QC_OK);
  CHECK(r.bound == 0.0);
  CHECK(std::abs(r.total) < 1e-10);
  CHECK(r.verdict == QC_SATISFIED);
  CHECK(r.equality_observed == 1);
}

TEST_CASE("sampled profiles") {
  std::vector<double> r, w;
  for (int i = 0; i <= 400; ++i) {
    const double x = 60.0 * std::sinh(4.0 * i / 400.0) / std::sinh(4.0);
    r.push_back(x);
    w.push_back(-0.5 * std::log1p(x * x));
  }
  Profile pr;
  REQUIRE(qc_profile_sampled(4, r.data(), w.data(), r.size(), 0, &pr.p) == QC_OK);
  double v = 0.0;
  REQUIRE(qc_profile_eval(pr.p, 1.0, 0, &v) == QC_OK);
  CHECK(v == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-6));
  Profile bad;
  CHECK(qc_profile_sampled(4, r.data(), w.data(), 2, 0, &bad.p) != QC_OK);
}

TEST_CASE("reports in both formats") {
  Profile pr;
  REQUIRE(qc_profile_parse(data_file("w_minus_one.json").c_str(), 0, &pr.p) == QC_OK);
  Options o;
  char* json = nullptr;
  REQUIRE(qc_run("gbc-verify", pr.p, o.o, &json) == QC_OK);
  REQUIRE(json != nullptr);
  CHECK(std::string(json).find("\"verdict\": \"satisfied\"") != std::string::npos);
  qc_string_free(json);

  REQUIRE(qc_options_set_format(o.o, QC_FORMAT_CSV) == QC_OK);
  REQUIRE(qc_options_set_nodes(o.o, 6) == QC_OK);
  char* csv = nullptr;
  REQUIRE(qc_run("curvature", pr.p, o.o, &csv) == QC_OK);
  const std::string text(csv);
  qc_string_free(csv);
  CHECK(text.rfind("# command=curvature", 0) == 0);
  std::size_t rows = 0;
  for (std::size_t i = text.find("\nr,"); i != std::string::npos; i = text.find('\n', i + 1)) ++rows;
  CHECK(rows == 8);  // header, six radii, trailing newline

  char* out = nullptr;
  CHECK(qc_run("nonsense", pr.p, o.o, &out) != QC_OK);
  CHECK(out == nullptr);
}

TEST_CASE("level sets of the flat metric are rejected") {
  Profile pr;
  REQUIRE(qc_profile_parse(data_file("flat.json").c_str(), 0, &pr.p) == QC_OK);
  char* out = nullptr;
  CHECK(qc_run("levelset", pr.p, nullptr, &out) == QC_ERR_LEVEL_SET);
  CHECK(out == nullptr);
}
