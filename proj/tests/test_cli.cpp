#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sqdati/config.hpp"
#include "sqdati/errors.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace sqdati;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sqdati_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(SQDATI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

// The sidecar body below the '#' comment lines is the canonical config echo.
std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.empty() || line.front() != '#') out << line << "\n";
    return out.str();
}

const char* kFastConfig =
    "[experiment]\n"
    "kind = displacement-compare\n"
    "cutoff = 120\n"
    "[laser]\n"
    "n_cyc = 1\n"
    "[squeeze]\n"
    "epsilon = 1e-3\n"
    "theta = 0\n"
    "[grids]\n"
    "v_f = 0.1\n"
    "t1 = 0:100:5\n";

} // namespace

TEST_CASE("config parsing: grids, comments, defaults") {
    const ExperimentConfig cfg = parse_config_text(
        "# leading comment\n"
        "[experiment]\n"
        "kind = entropy-scan  ; trailing comment\n"
        "threads = 2\n"
        "[grids]\n"
        "epsilon_log10 = -4:-3:3\n"
        "n_cyc = 1,2,5\n");
    CHECK(cfg.kind == "entropy-scan");
    CHECK(cfg.threads == 2);
    CHECK(cfg.cutoff == 200); // default
    REQUIRE(cfg.epsilon_grid.size() == 3);
    CHECK(cfg.epsilon_grid[1] == doctest::Approx(std::pow(10.0, -3.5)));
    CHECK(cfg.ncyc_grid == std::vector<int>{1, 2, 5});
    CHECK(cfg.laser == LaserParams{});
}

TEST_CASE("config parse errors carry line information") {
    CHECK_THROWS_AS(parse_config_text("[experiment\nkind = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nkind\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[laser]\nE0 = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[laser]\nn_cyc = 1.5\n"), ConfigError);
}

TEST_CASE("validate_config invariants") {
    ExperimentConfig cfg = parse_config_text(kFastConfig);
    CHECK_NOTHROW(validate_config(cfg));

    ExperimentConfig bad = cfg;
    bad.kind = "does-not-exist";
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = cfg;
    bad.cutoff = 10;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = cfg;
    bad.kind = "negativity-scan";
    bad.v_f_grid.clear();
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = cfg;
    bad.wigner_step = 0.0;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("canonical text round-trips to an equal config") {
    for (const std::string text :
         {std::string(kFastConfig),
          std::string("[experiment]\nkind = entropy-scan\nout = results\n"
                      "[squeeze]\nr = 1.5\ntheta = 3.14159\n"
                      "[grids]\nepsilon = 1e-4,3e-4\nn_cyc = 1,2\n"
                      "[tolerances]\nwigner_step = 0.05\n")}) {
        const ExperimentConfig cfg = parse_config_text(text);
        const ExperimentConfig again = parse_config_text(canonical_config_text(cfg));
        CHECK(again == cfg);
    }
}

TEST_CASE("cli run writes table and re-parseable sidecar") {
    const fs::path dir = scratch_dir("run");
    const fs::path cfg_path = dir / "exp.ini";
    write_file(cfg_path, kFastConfig);

    const int rc = run_cli("run " + cfg_path.string() + " --out " +
                           (dir / "out").string());
    CHECK(rc == 0);
    REQUIRE(fs::exists(dir / "out" / "displacement-compare.csv"));
    REQUIRE(fs::exists(dir / "out" / "displacement-compare.meta"));

    const std::string csv = read_file(dir / "out" / "displacement-compare.csv");
    CHECK(csv.find("t1_au,delta_re_au,delta_im_au") != std::string::npos);

    // sidecar body re-parses to the executed config (with the --out override)
    ExperimentConfig want = parse_config_text(kFastConfig);
    want.out_dir = (dir / "out").string();
    const ExperimentConfig echoed = parse_config_text(
        strip_comments(read_file(dir / "out" / "displacement-compare.meta")));
    CHECK(echoed == want);
}

TEST_CASE("cli output is byte-identical across runs") {
    const fs::path dir = scratch_dir("determinism");
    const fs::path cfg_path = dir / "exp.ini";
    write_file(cfg_path, kFastConfig);
    CHECK(run_cli("run " + cfg_path.string() + " --out " + (dir / "a").string()) == 0);
    CHECK(run_cli("run " + cfg_path.string() + " --out " + (dir / "b").string()) == 0);
    const std::string a = read_file(dir / "a" / "displacement-compare.csv");
    const std::string b = read_file(dir / "b" / "displacement-compare.csv");
    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("cli exit codes distinguish config and compute failures") {
    const fs::path dir = scratch_dir("exit_codes");

    const fs::path bad_cfg = dir / "bad.ini";
    write_file(bad_cfg, "[experiment]\nkind = nonsense\n");
    CHECK(run_cli("run " + bad_cfg.string()) == 2);

    // valid config whose computation violates a runtime precondition:
    // momentum beyond the classical continuum edge sqrt(4 Up)
    const fs::path doomed = dir / "doomed.ini";
    write_file(doomed,
               "[experiment]\nkind = negativity-scan\n"
               "[squeeze]\nepsilon = 1e-3\n"
               "[grids]\nv_f = 1.2\n");
    CHECK(run_cli("run " + doomed.string() + " --out " + (dir / "out").string()) == 3);
}

TEST_CASE("cli check writes a convergence report") {
    const fs::path dir = scratch_dir("check");
    const fs::path cfg_path = dir / "exp.ini";
    write_file(cfg_path, kFastConfig);
    CHECK(run_cli("check " + cfg_path.string() + " --out " + (dir / "out").string()) ==
          0);
    const std::string rep = read_file(dir / "out" / "displacement-compare.check");
    CHECK(rep.find("row,baseline,refined,abs_deviation") != std::string::npos);
    CHECK(rep.find("max_abs_deviation") != std::string::npos);
}
