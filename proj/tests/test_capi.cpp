#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "qst/qst.h"

namespace {

std::string data_path(const char* name) {
  const char* dir = std::getenv("QST_TEST_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

struct Session {
  qst_session* s = nullptr;
  ~Session() { qst_session_free(s); }
};

struct Mode {
  qst_mode* m = nullptr;
  ~Mode() { qst_mode_free(m); }
};

}  // namespace

TEST_CASE("session and scalar queries") {
  CHECK(std::string(qst_version()) == "0.1.0");
  Session s;
  REQUIRE(qst_session_from_json(nullptr, &s.s) == QST_OK);
  double w = 0;
  CHECK(qst_weight(s.s, 1, 1, &w) == QST_OK);
  CHECK(w == 8.0);
  double s0 = 0;
  CHECK(qst_s(s.s, 0, &s0) == QST_OK);
  CHECK(s0 == doctest::Approx(1.6449340668482264).epsilon(1e-15));
  CHECK(qst_weight(s.s, -1, 0, &w) == QST_ERR_ARGUMENT);
  CHECK(std::string(qst_last_error()).find("n and k") != std::string::npos);
}

TEST_CASE("mode solve and kernel") {
  Session s;
  REQUIRE(qst_session_from_json("{}", &s.s) == QST_OK);
  Mode m;
  REQUIRE(qst_mode_solve(s.s, 1, 0, 128, &m.m) == QST_OK);
  CHECK(qst_mode_k_max(m.m) == 128);
  double tau = 0, eps = 0;
  CHECK(qst_mode_tau(m.m, &tau) == QST_OK);
  CHECK(tau == doctest::Approx(7.134636772).epsilon(1e-9));
  CHECK(qst_mode_epsilon(m.m, &eps) == QST_OK);
  CHECK(eps == doctest::Approx(1.303170422).epsilon(1e-9));
  std::vector<double> I1(129), I2(129), K1(129), K2(129);
  CHECK(qst_mode_kernel(m.m, I1.data(), I2.data(), K1.data(), K2.data()) == QST_OK);
  CHECK(I1[1] == doctest::Approx(-3.0));
  CHECK(I2[1] == doctest::Approx(1.25));
  CHECK(K1[0] * I2[0] - K2[0] * I1[0] == doctest::Approx(tau).epsilon(1e-14));
  CHECK(qst_mode_k_max(nullptr) == -1);
}

TEST_CASE("apply_Q then apply_A round trip") {
  Session s;
  REQUIRE(qst_session_from_json(nullptr, &s.s) == QST_OK);
  for (int mm : {-3, 0, 2}) {
    Mode m;
    REQUIRE(qst_mode_solve(s.s, mm, 1, 32, &m.m) == QST_OK);
    std::vector<double> r1(20), r2(20);
    for (int k = 0; k < 20; ++k) {
      r1[k] = std::sin(k + 1.0);
      r2[k] = std::cos(2.0 * k);
    }
    std::vector<double> g(33), f(33);
    double beta = 0, bres = 1;
    REQUIRE(qst_apply_Q(m.m, r1.data(), r2.data(), 20, 0.5, g.data(), f.data(), &beta, &bres) ==
            QST_OK);
    CHECK(bres <= 1e-12);
    std::vector<double> o1(32), o2(32);
    double q0 = 0;
    REQUIRE(qst_apply_A(m.m, g.data(), f.data(), 32, o1.data(), o2.data(), &q0) == QST_OK);
    CHECK(q0 == doctest::Approx(0.5).epsilon(1e-12));
    for (int k = 0; k < 32; ++k) {
      const double want1 = k < 20 ? r1[k] : 0.0, want2 = k < 20 ? r2[k] : 0.0;
      CHECK(std::abs(o1[k] - want1) <= 1e-10);
      CHECK(std::abs(o2[k] - want2) <= 1e-10);
    }
  }
}

TEST_CASE("error reporting") {
  qst_session* s = nullptr;
  CHECK(qst_session_from_json("{\"grid\": {\"n_lsit\": [0]}}", &s) == QST_ERR_CONFIG);
  CHECK(s == nullptr);
  CHECK(std::string(qst_last_error()).find("n_lsit") != std::string::npos);
  CHECK(qst_session_from_file("/nonexistent/x.json", &s) == QST_ERR_IO);
  CHECK(qst_session_from_json("{}", nullptr) == QST_ERR_ARGUMENT);
  double x = 0;
  CHECK(qst_mode_tau(nullptr, &x) == QST_ERR_ARGUMENT);
  CHECK(std::string(qst_last_error()) == "mode is NULL");

  Session bad;
  REQUIRE(qst_session_from_file(data_path("bad_rule.json").c_str(), &bad.s) == QST_OK);
  qst_mode* m = nullptr;
  CHECK(qst_mode_solve(bad.s, 1, 0, 16, &m) == QST_ERR_BOUNDARY_RULE);
  CHECK(m == nullptr);
  CHECK(std::string(qst_last_error()).find("condition") != std::string::npos);

  Session q1;
  REQUIRE(qst_session_from_file(data_path("q1.json").c_str(), &q1.s) == QST_OK);
  CHECK(qst_s(q1.s, 0, &x) == QST_ERR_HYPOTHESIS);
}

TEST_CASE("hs json") {
  Session s;
  REQUIRE(qst_session_from_json(nullptr, &s.s) == QST_OK);
  Mode m;
  REQUIRE(qst_mode_solve(s.s, 2, 0, 64, &m.m) == QST_OK);
  char* js = nullptr;
  REQUIRE(qst_mode_hs_json(m.m, &js) == QST_OK);
  const std::string text = js;
  qst_string_free(js);
  CHECK(text.find("\"hs_X11\"") != std::string::npos);
  CHECK(text.find("\"fubini\"") != std::string::npos);
}

TEST_CASE("commands") {
  int code = -1;
  char* report = nullptr;
  const std::string opts =
      "{\"config\": \"" + data_path("default.json") + "\", \"write_files\": false}";
  REQUIRE(qst_command("validate", opts.c_str(), &code, &report) == QST_OK);
  CHECK(code == 0);
  REQUIRE(report);
  CHECK(std::string(report).find("\"checks\"") != std::string::npos);
  qst_string_free(report);

  REQUIRE(qst_command("validate", "{\"config\": \"/nonexistent.json\", \"write_files\": false}",
                      &code, nullptr) == QST_OK);
  CHECK(code == 2);

  const std::string q1 = "{\"config\": \"" + data_path("q1.json") + "\", \"write_files\": false}";
  REQUIRE(qst_command("validate", q1.c_str(), &code, nullptr) == QST_OK);
  CHECK(code == 1);

  CHECK(qst_command("validate", "{not json", &code, nullptr) == QST_ERR_ARGUMENT);
  REQUIRE(qst_command("frobnicate", "{}", &code, nullptr) == QST_OK);
  CHECK(code == 2);
}
