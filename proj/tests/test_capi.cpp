#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <budgetmech/budgetmech.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

namespace {

const char* kPooling = R"({
  "cost": {"family": "power", "scale": 1, "exponent": 2},
  "distribution": {"kind": "uniform", "a": 1, "b": 2},
  "budget": 2
})";

struct Problem {
    bm_problem* p = nullptr;
    explicit Problem(const char* json) { REQUIRE(bm_problem_from_json(json, &p) == BM_OK); }
    ~Problem() { bm_problem_free(p); }
};

}  // namespace

TEST_CASE("status names and version") {
    CHECK(std::string(bm_status_name(BM_OK)) == "Ok");
    CHECK(std::string(bm_status_name(BM_AUDIT_FAILED)) == "AuditFailed");
    CHECK(std::string(bm_status_name(static_cast<bm_status>(42))) == "Unknown");
    CHECK(std::strlen(bm_version()) > 0);
}

TEST_CASE("solve the pooling instance through the handles") {
    Problem prob(kPooling);
    bm_solution* sol = nullptr;
    REQUIRE(bm_solve(prob.p, &sol) == BM_OK);
    const size_t n = bm_solution_size(sol);
    CHECK(n == 512);
    std::vector<double> x(n), t(n), th(n), rho(n);
    CHECK(bm_solution_action(sol, x.data(), n) == BM_OK);
    CHECK(bm_solution_transfer(sol, t.data(), n) == BM_OK);
    CHECK(bm_solution_theta(sol, th.data(), n) == BM_OK);
    CHECK(bm_solution_costate(sol, rho.data(), n) == BM_OK);
    for (size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x[i] - 1.0) <= 1e-9);
        CHECK(std::abs(t[i] - 2.0) <= 1e-9);
    }
    bm_solution_info info{};
    REQUIRE(bm_solution_info_get(sol, &info) == BM_OK);
    CHECK(info.complete_pooling == 1);
    CHECK(info.audit_passed == 1);
    CHECK(std::isnan(info.exclusion_threshold));
    CHECK(info.objective == doctest::Approx(1.0));

    const auto dir = (std::filesystem::temp_directory_path() / "bm_capi_write").string();
    std::filesystem::remove_all(dir);
    CHECK(bm_solution_write(sol, dir.c_str()) == BM_OK);
    CHECK(std::filesystem::exists(dir + "/solution.csv"));
    CHECK(std::filesystem::exists(dir + "/solution.json"));
    bm_solution_free(sol);
}

TEST_CASE("setters and variants") {
    Problem prob(kPooling);
    CHECK(bm_problem_set_grid(prob.p, 65) == BM_OK);
    CHECK(bm_problem_set_grid(prob.p, 2) == BM_CONFIG_ERROR);
    CHECK(bm_problem_set_tolerance(prob.p, -1) == BM_CONFIG_ERROR);
    CHECK(bm_problem_set_seed(prob.p, 99) == BM_OK);
    CHECK(bm_problem_set_method(prob.p, "separable") == BM_OK);
    CHECK(bm_problem_set_method(prob.p, "magic") == BM_CONFIG_ERROR);
    CHECK(bm_problem_set_variant(prob.p, "ex_ante", 0) == BM_OK);
    bm_solution* sol = nullptr;
    REQUIRE(bm_solve(prob.p, &sol) == BM_OK);
    CHECK(bm_solution_size(sol) == 65);
    bm_solution_info info{};
    bm_solution_info_get(sol, &info);
    CHECK(info.expected_spend == doctest::Approx(2.0).epsilon(1e-8));
    bm_solution_free(sol);
    CHECK(bm_problem_override_variant(prob.p, "linear_value:0.3") == BM_OK);
    CHECK(bm_problem_override_variant(prob.p, "nope") == BM_CONFIG_ERROR);
    CHECK(std::string(bm_last_error()).find("nope") != std::string::npos);
}

TEST_CASE("errors map to status codes") {
    bm_problem* p = nullptr;
    CHECK(bm_problem_from_json("{", &p) == BM_CONFIG_ERROR);
    CHECK(p == nullptr);
    CHECK(std::strlen(bm_last_error()) > 0);
    CHECK(bm_problem_from_file("/does/not/exist.json", &p) == BM_IO_ERROR);
    CHECK(bm_problem_from_json(nullptr, &p) == BM_INVALID_ARGUMENT);
    CHECK(bm_solve(nullptr, nullptr) == BM_INVALID_ARGUMENT);
    CHECK(bm_solution_info_get(nullptr, nullptr) == BM_INVALID_ARGUMENT);

    Problem degenerate(R"({
      "cost": {"family": "quadratic_plus_linear", "a": 1, "b": 1},
      "distribution": {"kind": "uniform", "a": 1, "b": 2},
      "budget": 1, "variant": {"type": "linear_value", "k": 1.5}
    })");
    bm_solution* sol = nullptr;
    CHECK(bm_solve(degenerate.p, &sol) == BM_DEGENERATE);
    CHECK(sol == nullptr);

    Problem discrete(R"({
      "cost": {"family": "power", "exponent": 2},
      "distribution": {"kind": "discrete", "types": [1, 2], "probs": [0.5, 0.5]},
      "budget": 1
    })");
    CHECK(bm_solve(discrete.p, &sol) == BM_INVALID_ARGUMENT);
}

TEST_CASE("last error is per thread") {
    bm_problem* p = nullptr;
    CHECK(bm_problem_from_json("{", &p) == BM_CONFIG_ERROR);
    std::string other;
    std::thread th([&] { other = bm_last_error(); });
    th.join();
    CHECK(other.empty());
    CHECK(std::strlen(bm_last_error()) > 0);
}

TEST_CASE("run a command with a summary") {
    Problem prob(kPooling);
    const auto dir = (std::filesystem::temp_directory_path() / "bm_capi_cmd").string();
    std::filesystem::remove_all(dir);
    char* summary = nullptr;
    REQUIRE(bm_run_command("concavify", prob.p, dir.c_str(), nullptr, &summary) == BM_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("envelope.csv") != std::string::npos);
    bm_string_free(summary);
    CHECK(bm_run_command("nope", prob.p, dir.c_str(), nullptr, nullptr) == BM_CONFIG_ERROR);
    CHECK(bm_run_command("audit", prob.p, dir.c_str(), "{\"bogus\": 1}", nullptr) == BM_CONFIG_ERROR);
    CHECK(bm_run_command("audit", prob.p, dir.c_str(), nullptr, nullptr) == BM_CONFIG_ERROR);
}
