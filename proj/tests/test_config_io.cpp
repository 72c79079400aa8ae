#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"
#include "config.hpp"
#include "error.hpp"
#include "io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bm;

namespace {

const char* kBase = R"({
  "cost": {"family": "power", "scale": 1, "exponent": 2},
  "distribution": {"kind": "uniform", "a": 1, "b": 2},
  "budget": 2
})";

ErrorCode code_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::kInternal;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& leaf) {
    const auto p = std::filesystem::temp_directory_path() / ("bm_config_io_" + leaf);
    std::filesystem::remove_all(p);
    return p.string();
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto cfg = parse_config_text(kBase);
    CHECK(cfg.spec.variant == Variant::kBaseline);
    CHECK(cfg.spec.budget == 2.0);
    CHECK(cfg.solver.grid == 512);
    CHECK(cfg.method == Method::kShooting);
    CHECK(cfg.table1.deltas.size() == 3);
}

TEST_CASE("variants and overrides") {
    auto cfg = parse_config_text(R"({
      "cost": {"family": "quadratic_plus_linear", "a": 1, "b": 1},
      "distribution": {"kind": "linear-density", "a": 1, "b": 2, "slope": -2},
      "budget": 1, "variant": {"type": "linear_value", "k": 0.3},
      "solver": {"grid": 128, "method": "separable"}, "seed": 7
    })");
    CHECK(cfg.spec.variant == Variant::kLinearValue);
    CHECK(cfg.spec.resource_value == 0.3);
    CHECK(cfg.solver.grid == 128);
    CHECK(cfg.method == Method::kSeparable);
    CHECK(cfg.seed == 7);
    CHECK(cfg.table1.bic.seed == 7);
    apply_variant_override(cfg, "multi_agent:3");
    CHECK(cfg.spec.variant == Variant::kMultiAgent);
    CHECK(cfg.spec.agents == 3);
    apply_variant_override(cfg, "ex-ante");
    CHECK(cfg.spec.variant == Variant::kExAnte);
    CHECK_THROWS_AS(apply_variant_override(cfg, "linear_value:abc"), Error);
    CHECK_THROWS_AS(apply_variant_override(cfg, "multi_agent:1.5"), Error);
}

TEST_CASE("schema violations are config errors") {
    CHECK(code_of("{not json") == ErrorCode::kConfig);
    CHECK(code_of("[]") == ErrorCode::kConfig);
    CHECK(code_of(R"({"distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1})") == ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "cubic"}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": "2"}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": 2}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": -1})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": 2}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1, "extra": 0})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": 2}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1, "variant": "fancy"})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": 2}, "distribution": {"kind": "uniform", "a": 1, "b": 2}, "budget": 1, "solver": {"grid": 3}})") ==
          ErrorCode::kConfig);
    CHECK(code_of(R"({"cost": {"family": "power", "exponent": 2}, "distribution": {"kind": "uniform", "a": 2, "b": 1}, "budget": 1})") ==
          ErrorCode::kConfig);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("shipped example configs parse") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(BM_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CHECK_NOTHROW(load_config(entry.path().string()));
        ++seen;
    }
    CHECK(seen >= 6);
}

TEST_CASE("number formatting") {
    CHECK(io::fmt(0.0) == "0");
    CHECK(io::fmt(-0.0) == "0");
    CHECK(io::fmt(2.0) == "2");
    CHECK(io::fmt(1.0 / 3.0) == "0.333333333333");
    CHECK(io::fmt(std::nan("")) == "nan");
}

TEST_CASE("csv round trip") {
    const auto dir = temp_dir("csv");
    io::ensure_dir(dir);
    const auto path = io::join(dir, "s.csv");
    io::write_csv(path, {{"theta", {1, 1.5, 2}}, {"x", {1, 0.5, 0.25}}});
    const auto data = io::read_csv(path);
    CHECK(data.header == std::vector<std::string>{"theta", "x"});
    CHECK(data.column("x") == std::vector<double>{1, 0.5, 0.25});
    CHECK_FALSE(data.has("t"));
    CHECK_THROWS_AS(data.column("t"), Error);
    CHECK(slurp(path) == "theta,x\n1,1\n1.5,0.5\n2,0.25\n");
}

TEST_CASE("svg output is deterministic and well formed") {
    io::PlotSpec p{"t", "a", "b", {{"s", {0, 1, 2}, {1, 0, 1}}, {"flat", {0, 2}, {3, 3}, "#d62728", true}}};
    const auto a = io::render_svg(p);
    CHECK(a == io::render_svg(p));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("solve command writes an audited schedule") {
    const auto cfg = parse_config_text(kBase);
    const auto dir = temp_dir("solve");
    const auto res = run_command("solve", cfg, dir);
    CHECK(res.summary["complete_pooling"].get<bool>());
    const auto data = io::read_csv(io::join(dir, "solution.csv"));
    for (double x : data.column("x")) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
    for (double t : data.column("t")) CHECK(t == doctest::Approx(2.0).epsilon(1e-9));
    const auto sub = io::read_csv(io::join(dir, "subsidy.csv"));
    CHECK(sub.rows.size() == 1);
    CHECK_THROWS_AS(run_command("bogus", cfg, dir), Error);
}

TEST_CASE("audit command names the worst pair") {
    const auto cfg = parse_config_text(kBase);
    const auto dir = temp_dir("audit");
    io::ensure_dir(dir);
    const auto sched = io::join(dir, "bad.csv");
    io::write_csv(sched, {{"theta", {1, 1.25, 1.5, 1.75, 2}}, {"x", {1, 1, 1, 1, 1}}, {"t", {2, 2, 2.3, 2, 2}}});
    CommandOptions opts;
    opts.schedule_path = sched;
    try {
        run_command("audit", cfg, dir, opts);
        FAIL("audit should fail");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kAuditFailed);
        CHECK(std::string(e.what()).find("reporting 2") != std::string::npos);
    }
    const auto report = nlohmann::json::parse(slurp(io::join(dir, "audit.json")));
    CHECK(report["worst_pair"]["report"] == 2);
    CHECK_FALSE(report["feasible"].get<bool>());

    const auto good = io::join(dir, "good.csv");
    io::write_csv(good, {{"theta", {1, 1.5, 2}}, {"x", {1, 1, 1}}});
    opts.schedule_path = good;
    CHECK(run_command("audit", cfg, dir, opts).summary["feasible"].get<bool>());
}
