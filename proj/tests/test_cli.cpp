#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

// Build-time location of the CLI under test.
const char* binary() { return HAWKESIM_BIN; }

int run(const std::string& args) {
    const std::string cmd = std::string(binary()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path write_config(const std::string& leaf, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "hawkesim_cli";
    fs::create_directories(dir);
    const fs::path p = dir / leaf;
    std::ofstream out(p);
    out << text;
    return p;
}

const char* kTinyRates = R"({
  "schema_version": 1,
  "seed": 2,
  "mu": 1.0,
  "kernel": {"family": "exponential", "alpha": 1.0, "beta": 2.0},
  "horizons": [5, 10, 20],
  "replications": 200,
  "debias_replicates": 8,
  "bootstrap_resamples": 30
})";

}  // namespace

TEST_CASE("help and usage exits") {
    CHECK(run("--help") == 0);
    CHECK(run("rates --help") == 0);
    // Missing subcommand / missing required config file.
    CHECK(run("") == 2);
    CHECK(run("rates") == 2);
    CHECK(run(""
              "frobnicate") == 2);
}

TEST_CASE("config errors exit with 2") {
    const fs::path bad = write_config("bad.json", R"({"schema_version": 1, "sead": 3})");
    CHECK(run("rates -c " + bad.string()) == 2);
    const fs::path malformed = write_config("malformed.json", "{");
    CHECK(run("psi -c " + malformed.string()) == 2);
    CHECK(run("rates -c /nonexistent/nope.json") == 2);
    // Supercritical kernel is a config error as well.
    const fs::path super = write_config(
        "super.json",
        R"({"schema_version": 1, "kernel": {"family": "exponential", "alpha": 3.0, "beta": 2.0}})");
    CHECK(run("psi -c " + super.string()) == 2);
}

TEST_CASE("rates writes its outputs and succeeds") {
    const fs::path cfg = write_config("rates.json", kTinyRates);
    const fs::path out = fs::temp_directory_path() / "hawkesim_cli" / "rates_out";
    fs::remove_all(out);
    CHECK(run("rates -c " + cfg.string() + " -o " + out.string()) == 0);
    for (const char* name : {"config.json", "distances.csv", "cumulants.csv", "ratefit.json"}) {
        CHECK(fs::exists(out / name));
    }
    // report reads the directory back.
    CHECK(run("report " + out.string()) == 0);
}

TEST_CASE("psi and sim subcommands succeed") {
    const fs::path cfg = write_config("tiny.json", kTinyRates);
    const fs::path out = fs::temp_directory_path() / "hawkesim_cli" / "psi_out";
    fs::remove_all(out);
    CHECK(run("psi -c " + cfg.string() + " -o " + out.string()) == 0);
    CHECK(fs::exists(out / "psi.csv"));

    const fs::path sim_out = fs::temp_directory_path() / "hawkesim_cli" / "sim_out";
    fs::remove_all(sim_out);
    CHECK(run("sim -c " + cfg.string() + " -o " + sim_out.string() + " -s 9") == 0);
    CHECK(fs::exists(sim_out / "paths.csv"));
}

TEST_CASE("verify exit code distinguishes failed checks") {
    // Deliberately small budgets: wide intervals leave some checks
    // inconclusive, so the overall verdict cannot be a pass.
    const fs::path cfg = write_config("verify_small.json", R"({
      "schema_version": 1,
      "seed": 2,
      "mu": 1.0,
      "kernel": {"family": "exponential", "alpha": 1.0, "beta": 2.0},
      "horizons": [4, 8, 16],
      "replications": 100,
      "verify": {"T": 4, "replications": 400, "strata": 2, "insertions": 2,
                 "checkpoints": [2, 4]}
    })");
    const fs::path out = fs::temp_directory_path() / "hawkesim_cli" / "verify_out";
    fs::remove_all(out);
    const int rc = run("verify -c " + cfg.string() + " -o " + out.string());
    CHECK(rc == 3);
    CHECK(fs::exists(out / "lemmas.json"));
}

TEST_CASE("report on a directory without outputs exits with 2") {
    const fs::path empty = fs::temp_directory_path() / "hawkesim_cli" / "empty";
    fs::remove_all(empty);
    fs::create_directories(empty);
    CHECK(run("report " + empty.string()) == 2);
}
