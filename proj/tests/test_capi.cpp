#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "idel.h"

namespace {

const char* kSystemJson = R"({
  "type": "linear_scalar_distributed", "r": 1.0,
  "q": {"kind": "constant", "value": 0.5}
})";

} // namespace

TEST_CASE("sampled-function handles round-trip values") {
    idel_fn* fn = nullptr;
    const double vals[6] = {1, 2, 3, 4, 5, 6};
    REQUIRE(idel_fn_create(-1.0, 0.5, 3, 2, vals, &fn) == IDEL_OK);
    CHECK(idel_fn_count(fn) == 3);
    CHECK(idel_fn_dim(fn) == 2);
    CHECK(idel_fn_t_start(fn) == doctest::Approx(-1.0));
    CHECK(idel_fn_sup_norm(fn) == doctest::Approx(std::sqrt(61.0)));
    double buf[6];
    REQUIRE(idel_fn_values(fn, buf, 6) == IDEL_OK);
    CHECK(std::memcmp(buf, vals, sizeof vals) == 0);
    double integral[2];
    REQUIRE(idel_fn_integrate(fn, -1.0, 0.5, integral) == IDEL_OK);
    CHECK(integral[0] == doctest::Approx(0.5 * (1 + 3 + 5)));
    CHECK(integral[1] == doctest::Approx(0.5 * (2 + 4 + 6)));
    idel_fn_free(fn);

    double small[1];
    idel_fn* bad = nullptr;
    CHECK(idel_fn_create(-1.0, 0.5, 3, 2, nullptr, &bad) == IDEL_EINVAL);
    (void)small;
}

TEST_CASE("misaligned grids are rejected through the C surface") {
    idel_fn* fn = nullptr;
    const double v = 1.0;
    CHECK(idel_fn_constant(0.05, 1.0, 0.125, 1, &v, &fn) == IDEL_EINVAL);
    CHECK(std::string(idel_last_error()).find("aligned") != std::string::npos);
}

TEST_CASE("system parse, eval and solve through the C surface") {
    idel_system* sys = nullptr;
    REQUIRE(idel_system_parse(kSystemJson, &sys) == IDEL_OK);
    CHECK(idel_system_dim(sys) == 1);
    CHECK(idel_system_delay(sys) == doctest::Approx(1.0));
    CHECK(idel_system_input_dim(sys) == 2);

    const int K = 64;
    const double h = 1.0 / K;
    idel_fn* x0 = nullptr;
    const double one = 1.0;
    REQUIRE(idel_fn_constant(-1.0, 0.0, h, 1, &one, &x0) == IDEL_OK);
    idel_fn* input = nullptr;
    const double du[2] = {1.0, 0.0};
    REQUIRE(idel_fn_constant(-1.0, 1.0, h, 2, du, &input) == IDEL_OK);

    double f = 0.0;
    REQUIRE(idel_eval_rhs(sys, x0, input, &f) == IDEL_OK);
    CHECK(f == doctest::Approx(0.5).epsilon(1e-13));

    idel_trajectory* traj = nullptr;
    REQUIRE(idel_solve(sys, x0, input, 1.0, 0.0, &traj) == IDEL_OK);
    CHECK(idel_trajectory_escaped(traj) == 0);
    CHECK(idel_trajectory_t_max(traj) == doctest::Approx(1.0));
    CHECK(idel_trajectory_max_contraction(traj) <= 0.5 + 1e-9);

    const idel_fn* sol = idel_trajectory_solution(traj);
    CHECK(idel_fn_count(sol) == 2 * K);
    // committed value near t = 0.5 matches the analytic reduction
    const long long cell = K + K / 2;
    std::vector<double> all(static_cast<std::size_t>(idel_fn_count(sol)));
    REQUIRE(idel_fn_values(sol, all.data(), idel_fn_count(sol)) == IDEL_OK);
    const double expect = 1.0 - 0.5 * std::exp(0.5 * (0.5 + h / 2));
    CHECK(all[cell] == doctest::Approx(expect).epsilon(1e-4));

    char* diag = nullptr;
    REQUIRE(idel_trajectory_diag(traj, &diag) == IDEL_OK);
    CHECK(std::string(diag).find("window 0") != std::string::npos);
    idel_string_free(diag);

    const char* csv = "/tmp/idel_capi_sol.csv";
    REQUIRE(idel_fn_write_csv(sol, csv) == IDEL_OK);
    CHECK(std::filesystem::exists(csv));

    idel_trajectory_free(traj);
    idel_fn_free(input);
    idel_fn_free(x0);
    idel_system_free(sys);
}

TEST_CASE("razumikhin check through the C surface") {
    const char* pde = R"({
      "type": "hyperbolic", "c": 1.0,
      "g": [{"kind": "constant", "value": 1.0}],
      "K": [{"kind": "weighted_integral", "weight": {"kind": "constant", "value": 1.0}, "times_d": true}],
      "G": {"kind": "zero"},
      "m1": 1, "m2": 0
    })";
    idel_system* sys = nullptr;
    REQUIRE(idel_system_parse(pde, &sys) == IDEL_OK);
    CHECK(idel_system_dim(sys) == 2);

    char* report = nullptr;
    const char* cert = R"({"weights":[1.0,3.0],"lambda":0.8333334})";
    CHECK(idel_check_razumikhin(sys, cert, 1000, 42, &report) == IDEL_OK);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("\"violations\": 0") != std::string::npos);
    idel_string_free(report);
    idel_system_free(sys);
}

TEST_CASE("scenario runner returns CLI exit codes") {
    CHECK(idel_run_scenario("{bad json", "/tmp/idel_capi_bad") == 2);
    const std::string scenario = std::string(R"({
      "kind": "simulate-ide",
      "system": )") + kSystemJson + R"(,
      "x0": {"kind": "constant", "value": 1.0},
      "input": {"d": {"kind": "constant", "value": 1.0}, "u": {"kind": "zero"}},
      "numerics": {"K": 32, "T": 1.0}
    })";
    CHECK(idel_run_scenario(scenario.c_str(), "/tmp/idel_capi_run") == 0);
    CHECK(std::filesystem::exists("/tmp/idel_capi_run/solution.csv"));
}

TEST_CASE("bad arguments surface as EINVAL with error text") {
    CHECK(idel_system_parse(nullptr, nullptr) == IDEL_EINVAL);
    CHECK(std::string(idel_last_error()).size() > 0);
    idel_system* sys = nullptr;
    CHECK(idel_system_parse(R"({"type":"nope"})", &sys) == IDEL_EVALIDATION);
}
