#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlm/config.hpp"
#include "qlm/errors.hpp"
#include "qlm/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qlm;
namespace fs = std::filesystem;

namespace {

const char* kBasicConfig = R"cfg(
[mode]
omega = 0.057
theta = 0.3
n_photons = 100
beta = 0.0
kappa_dot_r = 0.0

[potential]
kind = free

[electron]
center = 0.0
width = 2.0
momentum = 0.0

[grid]
x_min = -20
x_max = 20
x_points = 64
q_half_width = 6
q_points = 32

[time]
t_end = 20.0
dt = 0.1

[run]
solver = parametric
field_path = both
strong_field = true

[output]
directory = out/test
cadence = 8
)cfg";

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("qlm_cli_io_" + tag);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("config parse and serialize round-trip") {
    auto cfg = parse_config(kBasicConfig);
    CHECK(cfg.modes.size() == 1);
    CHECK(cfg.modes[0].omega == doctest::Approx(0.057));
    CHECK(cfg.electron.width == doctest::Approx(2.0));
    CHECK(cfg.solver == SolverChoice::parametric);
    CHECK(cfg.field_path == FieldPath::both);
    CHECK(cfg.output.cadence == 8);

    auto text = serialize_config(cfg);
    auto cfg2 = parse_config(text);
    CHECK(serialize_config(cfg2) == text);
}

TEST_CASE("volume is preserved through serialization and derives beta") {
    std::string text(kBasicConfig);
    auto pos = text.find("beta = 0.0");
    text.replace(pos, 10, "volume = 1e6");
    auto cfg = parse_config(text);
    CHECK(cfg.mode_volumes[0] == doctest::Approx(1e6));
    CHECK(cfg.modes[0].beta > 0.0);
    auto round = parse_config(serialize_config(cfg));
    CHECK(round.mode_volumes[0] == doctest::Approx(1e6));
    CHECK(round.modes[0].beta == doctest::Approx(cfg.modes[0].beta).epsilon(1e-15));
}

TEST_CASE("a mode must give exactly one of beta and volume") {
    std::string both(kBasicConfig);
    auto pos = both.find("beta = 0.0");
    both.insert(pos, "volume = 1e6\n");
    CHECK_THROWS_AS(parse_config(both), validation_error);

    std::string neither(kBasicConfig);
    pos = neither.find("beta = 0.0\n");
    neither.erase(pos, 11);
    CHECK_THROWS_AS(parse_config(neither), validation_error);
}

TEST_CASE("unknown keys and sections are named in the error") {
    std::string bad(kBasicConfig);
    bad += "\n[mystery]\nvalue = 1\n";
    try {
        parse_config(bad);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }

    std::string badkey(kBasicConfig);
    badkey.insert(badkey.find("[potential]"), "wavelength = 800\n");
    try {
        parse_config(badkey);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("wavelength") != std::string::npos);
    }
}

TEST_CASE("validation collects every violation into one message") {
    auto cfg = parse_config(kBasicConfig);
    cfg.modes[0].omega = -1.0;       // not positive
    cfg.grid.x_points = 100;         // not a power of two
    cfg.time.t_end = 0.0;            // not positive
    cfg.output.cadence = 0;          // below one
    try {
        cfg.validate();
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("omega") != std::string::npos);
        CHECK(msg.find("x_points") != std::string::npos);
        CHECK(msg.find("t_end") != std::string::npos);
        CHECK(msg.find("cadence") != std::string::npos);
    }
}

TEST_CASE("strong-field form requires a large photon number") {
    auto cfg = parse_config(kBasicConfig);
    cfg.modes[0].n_photons = 5.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.strong_field = false;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("decoupled run produces the documented outputs") {
    auto cfg = parse_config(kBasicConfig);
    auto dir = temp_dir("run");
    cfg.output.directory = dir.string();
    auto res = run_scenario(cfg);

    CHECK(fs::exists(dir / "records.tsv"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(fs::exists(dir / "config.txt"));
    CHECK(fs::exists(dir / "checkpoints"));

    // beta = 0: the field never moves and the closed-form electron matches.
    CHECK(res.field_fidelity_to_initial == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.electron_volkov_fidelity == doctest::Approx(1.0).epsilon(1e-10));

    REQUIRE(!res.records.empty());
    double prev = -1.0;
    for (const auto& r : res.records) {
        CHECK(r.t > prev);
        prev = r.t;
        CHECK(r.values.size() == res.records.front().values.size());
    }
    CHECK(res.records.back().t == doctest::Approx(cfg.time.t_end));
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical") {
    auto cfg = parse_config(kBasicConfig);
    auto dir1 = temp_dir("det1");
    auto dir2 = temp_dir("det2");
    cfg.output.directory = dir1.string();
    run_scenario(cfg);
    cfg.output.directory = dir2.string();
    run_scenario(cfg);
    CHECK(read_file(dir1 / "records.tsv") == read_file(dir2 / "records.tsv"));
    CHECK(read_file(dir1 / "summary.txt") == read_file(dir2 / "summary.txt"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("plot emission extracts the recorded columns") {
    auto cfg = parse_config(kBasicConfig);
    auto dir = temp_dir("plots");
    cfg.output.directory = dir.string();
    run_scenario(cfg);

    emit_plot_data(dir.string(), "var_q");
    auto text = read_file(dir / "plots" / "var_q.dat");
    REQUIRE(!text.empty());
    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("var_q") != std::string::npos);
    int rows = 0;
    double t, v1, v2;
    while (lines >> t >> v1 >> v2) {
        CHECK(v1 == doctest::Approx(0.5).epsilon(1e-9)); // beta = 0 coherent state
        ++rows;
    }
    CHECK(rows > 2);

    emit_plot_data(dir.string(), "mean_n");
    CHECK(fs::exists(dir / "plots" / "mean_n.dat"));

    CHECK_THROWS_AS(emit_plot_data(dir.string(), "frobnication"), validation_error);
    // d12 needs a two-mode run; its columns are absent here.
    CHECK_THROWS_AS(emit_plot_data(dir.string(), "d12"), validation_error);
    fs::remove_all(dir);
}

TEST_CASE("thread count comes from the environment") {
    unsetenv("QLM_THREADS");
    CHECK(thread_count() == 1);
    setenv("QLM_THREADS", "4", 1);
    CHECK(thread_count() == 4);
    setenv("QLM_THREADS", "0", 1);
    CHECK_THROWS_AS(thread_count(), validation_error);
    setenv("QLM_THREADS", "soup", 1);
    CHECK_THROWS_AS(thread_count(), validation_error);
    unsetenv("QLM_THREADS");
}
