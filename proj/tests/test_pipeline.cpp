#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "claimsbench/csv.hpp"
#include "claimsbench/errors.hpp"
#include "claimsbench/ingestion.hpp"
#include "claimsbench/pipeline.hpp"

using namespace claimsbench;

namespace {

const std::filesystem::path kFixtures = FIXTURES_DIR;

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

struct EnvGuard {
    explicit EnvGuard(const std::string& value) {
        setenv("CLAIMSBENCH_CONFIG", value.c_str(), 1);
    }
    ~EnvGuard() { unsetenv("CLAIMSBENCH_CONFIG"); }
};

pipeline::RunConfig config_for(const std::filesystem::path& inputs,
                               const std::filesystem::path& out) {
    pipeline::RunConfig config;
    config.inputs_dir = inputs;
    config.out_dir = out;
    return config;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

int run_cli_with_env(const std::string& env, const std::string& args) {
    const std::string command =
        "CLAIMSBENCH_CONFIG=" + env + " " + CLI_PATH + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("content digests match the published vectors") {
    CHECK(pipeline::fnv1a_hex("") == "fnv1a:cbf29ce484222325");
    CHECK(pipeline::fnv1a_hex("hello") == "fnv1a:a430d84680aabd0b");
    CHECK(pipeline::fnv1a_hex("hello") != pipeline::fnv1a_hex("hellp"));
}

TEST_CASE("defaults apply when no file or flags are given") {
    unsetenv("CLAIMSBENCH_CONFIG");
    const auto config = pipeline::resolve_config({});
    CHECK(config.inputs_dir == "inputs");
    CHECK(config.out_dir == "out");
    CHECK(config.confidence == 0.95);
    CHECK(config.vmt_selection == vmt::Selection::ConservativeAuto);
    CHECK(!config.strict);
    CHECK(!config.seed.has_value());
}

TEST_CASE("the environment config file loses to explicit flags") {
    TempDir tmp("claimsbench_env_cfg");
    const auto file = tmp.path / "cfg.json";
    csv::write_text_file(file, R"({"inputs": "somewhere", "confidence": 0.9,
        "vmt_selection": "urban", "strict": true, "seed": 9})");
    EnvGuard guard(file.string());

    const auto from_env = pipeline::resolve_config({});
    CHECK(from_env.inputs_dir == "somewhere");
    CHECK(from_env.confidence == 0.9);
    CHECK(from_env.vmt_selection == vmt::Selection::ForceUrban);
    CHECK(from_env.strict);
    CHECK(from_env.seed == 9);

    pipeline::ConfigOverrides overrides;
    overrides.confidence = 0.85;
    overrides.vmt_selection = "state";
    const auto merged = pipeline::resolve_config(overrides);
    CHECK(merged.inputs_dir == "somewhere");
    CHECK(merged.confidence == 0.85);
    CHECK(merged.vmt_selection == vmt::Selection::ForceState);
}

TEST_CASE("bad configuration values are schema errors") {
    unsetenv("CLAIMSBENCH_CONFIG");

    pipeline::ConfigOverrides high;
    high.confidence = 1.5;
    CHECK_THROWS_AS(pipeline::resolve_config(high), Error);

    pipeline::ConfigOverrides zero;
    zero.confidence = 0.0;
    CHECK_THROWS_AS(pipeline::resolve_config(zero), Error);

    pipeline::ConfigOverrides selection;
    selection.vmt_selection = "median";
    CHECK_THROWS_AS(pipeline::resolve_config(selection), Error);

    TempDir tmp("claimsbench_bad_cfg");
    const auto file = tmp.path / "cfg.json";
    csv::write_text_file(file, R"({"confidnce": 0.9})");
    EnvGuard guard(file.string());
    try {
        pipeline::resolve_config({});
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadConfig);
        CHECK(std::string(e.what()).find("unknown or mistyped key 'confidnce'") !=
              std::string::npos);
    }
}

TEST_CASE("validation summarizes a clean dataset and returns ok") {
    TempDir tmp("claimsbench_validate_ok");
    std::ostringstream out;
    const auto code = pipeline::run_validate(config_for(kFixtures / "minimal", tmp.path), out);
    CHECK(code == ExitCode::Ok);
    const auto text = out.str();
    CHECK(text.find("claims.csv: 20 rows, 20 accepted, 0 rejected") != std::string::npos);
    CHECK(text.find("exposure SanFrancisco: 2000 policy-years") != std::string::npos);
    CHECK(text.find("exposure Phoenix: 4000 policy-years") != std::string::npos);
    CHECK(text.find("claims: 19 countable, 1 excluded") != std::string::npos);
    CHECK(text.find("validation: ok") != std::string::npos);
}

TEST_CASE("validation reports row-level issues and returns the invariant code") {
    TempDir tmp("claimsbench_validate_bad");
    std::ostringstream out;
    const auto code =
        pipeline::run_validate(config_for(kFixtures / "minimal_bad_zip", tmp.path), out);
    CHECK(code == ExitCode::Invariant);
    const auto text = out.str();
    CHECK(text.find("claims.csv: 20 rows, 19 accepted, 1 rejected") != std::string::npos);
    CHECK(text.find("row 6, field zip_code") != std::string::npos);
    CHECK(text.find("validation: 1 issue(s)") != std::string::npos);
}

TEST_CASE("validation flags exposure years without a VMT estimate") {
    TempDir tmp("claimsbench_validate_vmt");
    std::ostringstream out;
    const auto code =
        pipeline::run_validate(config_for(kFixtures / "minimal_missing_vmt", tmp.path), out);
    CHECK(code == ExitCode::Invariant);
    CHECK(out.str().find("no state VMT rows for") != std::string::npos);
}

TEST_CASE("each subcommand writes its table into the output directory") {
    TempDir tmp("claimsbench_outputs");
    const auto config = config_for(kFixtures / "minimal", tmp.path);
    std::ostringstream out;

    CHECK(pipeline::run_vmt(config, out) == ExitCode::Ok);
    const auto vmt_text = csv::read_text_file(tmp.path / "vmt.csv");
    CHECK(vmt_text.find("SanFrancisco,2018,12000,10000,auto,12000") != std::string::npos);
    CHECK(vmt_text.find("Phoenix,2019,13000,14000,auto,14000") != std::string::npos);

    CHECK(pipeline::run_baseline(config, out) == ExitCode::Ok);
    const auto baseline = csv::parse(csv::read_text_file(tmp.path / "baseline.csv"), "baseline");
    CHECK(baseline.rows.size() == 8);

    CHECK(pipeline::run_compare(config, out) == ExitCode::Ok);
    CHECK(std::filesystem::exists(tmp.path / "comparison.csv"));
    CHECK(std::filesystem::exists(tmp.path / "report.json"));

    auto urban = config;
    urban.vmt_selection = vmt::Selection::ForceUrban;
    CHECK(pipeline::run_vmt(urban, out) == ExitCode::Ok);
    CHECK(csv::read_text_file(tmp.path / "vmt.csv")
              .find("SanFrancisco,2018,12000,10000,urban,10000") != std::string::npos);
}

TEST_CASE("repeated comparisons are byte-identical") {
    TempDir first("claimsbench_repeat_a");
    TempDir second("claimsbench_repeat_b");
    std::ostringstream out_a, out_b;
    REQUIRE(pipeline::run_compare(config_for(kFixtures / "replication", first.path), out_a) ==
            ExitCode::Ok);
    REQUIRE(pipeline::run_compare(config_for(kFixtures / "replication", second.path), out_b) ==
            ExitCode::Ok);

    CHECK(out_a.str() == out_b.str());
    CHECK(csv::read_text_file(first.path / "comparison.csv") ==
          csv::read_text_file(second.path / "comparison.csv"));
    CHECK(csv::read_text_file(first.path / "report.json") ==
          csv::read_text_file(second.path / "report.json"));
}

TEST_CASE("the structured report carries provenance and full results") {
    TempDir tmp("claimsbench_report");
    std::ostringstream out;
    REQUIRE(pipeline::run_report(config_for(kFixtures / "minimal", tmp.path), out) ==
            ExitCode::Ok);
    for (const char* name : {"vmt.csv", "baseline.csv", "comparison.csv", "report.json"}) {
        CHECK(std::filesystem::exists(tmp.path / name));
    }

    const auto report = nlohmann::json::parse(csv::read_text_file(tmp.path / "report.json"));
    CHECK(report["tool"] == "claimsbench 1.0.0");
    CHECK(report["confidence"] == 0.95);
    CHECK(report["vmt_selection"] == "auto");
    CHECK(report["strict"] == false);
    CHECK(report["provenance"]["claims.csv"].get<std::string>().rfind("fnv1a:", 0) == 0);
    CHECK(report["provenance"]["config"].get<std::string>().rfind("fnv1a:", 0) == 0);
    CHECK(report["vmt"].size() == 4);
    CHECK(report["baselines"].size() == 8);
    CHECK(report["comparisons"].size() == 8);
    CHECK(report["comparisons"][0]["category"] == "Manual");
    CHECK(report["comparisons"][0].contains("verdict"));
}

TEST_CASE("simulation writes a dataset that reloads plus a coverage summary") {
    TempDir tmp("claimsbench_simulate");
    auto config = config_for(kFixtures, tmp.path);
    std::ostringstream out;
    REQUIRE(pipeline::run_simulate(config, out) == ExitCode::Ok);

    const auto ds = ingestion::load_dataset(tmp.path);
    CHECK(!ds.claims.empty());
    CHECK(ds.exposure.size() == 12);  // 2 regions x 6 coverage years

    const auto coverage = csv::parse(csv::read_text_file(tmp.path / "coverage.csv"), "coverage");
    CHECK(coverage.header[0] == "kind");
    REQUIRE(coverage.rows.size() == 10);  // 2 regions x 2 + 3 modes x 2
    for (const auto& row : coverage.rows) {
        const double fraction = std::stod(row[7]);
        CHECK(fraction >= 0.9);
        CHECK(fraction <= 1.0);
    }

    const auto first_claims = csv::read_text_file(tmp.path / "claims.csv");
    auto reseeded = config;
    reseeded.seed = 99;
    REQUIRE(pipeline::run_simulate(reseeded, out) == ExitCode::Ok);
    CHECK(csv::read_text_file(tmp.path / "claims.csv") != first_claims);
}

TEST_CASE("error kinds map onto the documented exit codes") {
    CHECK(Error(ErrorKind::FileUnreadable, "x").exit_code() == ExitCode::Schema);
    CHECK(Error(ErrorKind::SchemaMismatch, "x").exit_code() == ExitCode::Schema);
    CHECK(Error(ErrorKind::BadConfig, "x").exit_code() == ExitCode::Schema);
    CHECK(Error(ErrorKind::MalformedRow, "x").exit_code() == ExitCode::Invariant);
    CHECK(Error(ErrorKind::ZeroMileage, "x").exit_code() == ExitCode::Invariant);
    CHECK(Error(ErrorKind::MissingVmtYear, "x").exit_code() == ExitCode::Invariant);
    CHECK(Error(ErrorKind::NoConvergence, "x").exit_code() == ExitCode::Numerical);
}

TEST_CASE("the binary reports success and failure through exit codes") {
    TempDir tmp("claimsbench_cli");
    const auto inputs = (kFixtures / "minimal").string();
    CHECK(run_cli("compare --inputs " + inputs + " --out " + (tmp.path / "a").string()) == 0);
    CHECK(run_cli("validate --inputs " + (kFixtures / "minimal_bad_zip").string() + " --out " +
                  (tmp.path / "b").string()) == 3);
    CHECK(run_cli("compare --inputs " + (kFixtures / "minimal_bad_header").string() + " --out " +
                  (tmp.path / "c").string()) == 2);
    CHECK(run_cli("compare --inputs " + (tmp.path / "missing").string() + " --out " +
                  (tmp.path / "d").string()) == 2);
    CHECK(run_cli("compare --inputs " + inputs + " --vmt-selection median") == 2);
    CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("the binary honors the environment config end to end") {
    TempDir tmp("claimsbench_cli_env");
    const auto cfg = tmp.path / "cfg.json";
    const auto out_dir = tmp.path / "out";
    csv::write_text_file(cfg, std::string("{\"inputs\": \"") +
                                  (kFixtures / "minimal").string() + "\", \"out\": \"" +
                                  out_dir.string() + "\", \"confidence\": 0.9}");

    REQUIRE(run_cli_with_env(cfg.string(), "compare") == 0);
    auto report = nlohmann::json::parse(csv::read_text_file(out_dir / "report.json"));
    CHECK(report["confidence"] == 0.9);

    REQUIRE(run_cli_with_env(cfg.string(), "compare --confidence 0.97") == 0);
    report = nlohmann::json::parse(csv::read_text_file(out_dir / "report.json"));
    CHECK(report["confidence"] == 0.97);
}

TEST_CASE("a dataset with a missing VMT year cannot produce baselines") {
    TempDir tmp("claimsbench_missing_vmt");
    std::ostringstream out;
    try {
        pipeline::run_baseline(config_for(kFixtures / "minimal_missing_vmt", tmp.path), out);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingVmtYear);
        CHECK(e.exit_code() == ExitCode::Invariant);
    }
}

TEST_CASE("JSON inputs drive the pipeline exactly like CSV inputs") {
    TempDir json_out("claimsbench_json_out");
    TempDir csv_out("claimsbench_csv_out");
    std::ostringstream out;
    REQUIRE(pipeline::run_compare(config_for(kFixtures / "json_inputs", json_out.path), out) ==
            ExitCode::Ok);
    REQUIRE(pipeline::run_compare(config_for(kFixtures / "minimal", csv_out.path), out) ==
            ExitCode::Ok);
    CHECK(csv::read_text_file(json_out.path / "comparison.csv") ==
          csv::read_text_file(csv_out.path / "comparison.csv"));
}
