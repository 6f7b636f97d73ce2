#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"

namespace cogverify {
namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> with(std::vector<std::string> head, const std::string& scenario, const std::string& tables,
                              std::vector<std::string> tail = {}) {
    head.push_back("--scenario");
    head.push_back(testing::data_path("scenarios/" + scenario + ".yaml").string());
    head.push_back("--qtables");
    head.push_back(testing::data_path("qtables/" + tables + ".yaml").string());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cogverify_cli_" + name)).string();
}

TEST(Cli, ValidateToy) {
    const CliRun r = cli(with({"validate"}, "toy", "toy", {"--output", "json"}));
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(r.json()["waypoints"], 4);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({}).code, cli::kInputError);
    EXPECT_EQ(cli({"bogus"}).code, cli::kInputError);
    EXPECT_EQ(cli(with({"check"}, "toy", "toy", {"--output", "yaml"})).code, cli::kInputError);
    EXPECT_EQ(cli({"validate", "--scenario", "/nonexistent.yaml", "--qtables", "/nonexistent.yaml"}).code,
              cli::kInputError);
    EXPECT_EQ(cli({"--help"}).code, cli::kOk);
}

TEST(Cli, MalformedPropertyExitsTwo) {
    const CliRun r = cli(with({"check"}, "toy", "toy", {"--property", "Pmax(F goal"}));
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("column 12"), std::string::npos) << r.err;
}

TEST(Cli, InvalidScenarioListsIssues) {
    const std::string path = temp_path("bad.yaml");
    std::ofstream(path) << "grid: [3, 3]\nfeatures: [[litter, 5, 5]]\nhuman: [0, 0, 0]\nweights: [0.5, 0.1, 0.1]\n"
                           "temperature: 1\n";
    const CliRun r = cli({"validate", "--scenario", path, "--qtables", testing::data_path("qtables/toy.yaml").string()});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("feature off-grid"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("weight sum"), std::string::npos) << r.err;
    std::remove(path.c_str());
}

TEST(Cli, CheckReportsBothDirections) {
    const CliRun r = cli(with({"check"}, "toy", "toy", {"--property", "Pmax(F goal); Pmin(F goal)", "--output", "json"}));
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["model"]["states"], 1903);
    ASSERT_EQ(j["results"].size(), 2u);
    EXPECT_NEAR(j["results"][0]["value"].get<double>(), 0.70478, 5e-5);
    EXPECT_NEAR(j["results"][1]["value"].get<double>(), 0.69690, 5e-5);
    EXPECT_EQ(j["results"][0]["min"], j["results"][1]["min"]);
}

TEST(Cli, GateViolationExitsThree) {
    const auto args = with({"check"}, "toy", "toy", {"--property", "Pmax<0.5(F goal)", "--gate"});
    EXPECT_EQ(cli(args).code, cli::kGateViolation);
    const auto pass = with({"check"}, "toy", "toy", {"--property", "Pmax<0.9(F goal)", "--gate"});
    EXPECT_EQ(cli(pass).code, cli::kOk);
    const auto ungated = with({"check"}, "toy", "toy", {"--property", "Pmax<0.5(F goal)"});
    EXPECT_EQ(cli(ungated).code, cli::kOk);
}

TEST(Cli, SynthesizeWithoutRobotExitsTwo) {
    const CliRun r = cli(with({"synthesize"}, "toy", "toy"));
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.err.find("no robot"), std::string::npos);
}

TEST(Cli, SynthesizeWritesReplayablePolicy) {
    const std::string path = temp_path("policy.txt");
    const CliRun r = cli(with({"synthesize"}, "robot4", "synthetic",
                           {"--property", "Pmax(F robot_goal & !collision)", "--policy", path, "--output", "json"}));
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = r.json();
    EXPECT_NEAR(j["replay"].get<double>(), j["value"].get<double>(), 2e-6);
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("value ", 0), 0u);
    std::remove(path.c_str());
}

TEST(Cli, SimulationIsSeedDeterministic) {
    const auto args = with({"simulate"}, "toy", "toy",
                           {"--variant", "unique", "--samples", "2000", "--horizon", "20", "--seed", "7", "--output",
                            "json"});
    const CliRun a = cli(args), b = cli(args);
    ASSERT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(a.json()["within"].get<bool>());
}

TEST(Cli, SimulationHorizonZero) {
    const CliRun r = cli(with({"simulate"}, "toy", "toy", {"--variant", "unique", "--horizon", "0", "--output", "json"}));
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(r.json()["hits"], 0);
    EXPECT_EQ(r.json()["checker"].get<double>(), 0.0);
}

TEST(Cli, SimulationNeedsResolvedModel) {
    EXPECT_EQ(cli(with({"simulate"}, "toy", "toy")).code, cli::kInputError);
    EXPECT_EQ(cli(with({"simulate"}, "toy", "toy", {"--scheduler", "max", "--samples", "200"})).code, cli::kOk);
}

TEST(Cli, CsvAndTextOutputs) {
    const CliRun csv = cli(with({"sweep"}, "toy", "toy", {"--taus", "0.5,2", "--steps", "4:8:4,inf", "--output", "csv"}));
    ASSERT_EQ(csv.code, cli::kOk) << csv.err;
    std::istringstream in(csv.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "tau,k,pmin,pmax");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 6u);
    const CliRun text = cli(with({"build"}, "toy", "toy"));
    ASSERT_EQ(text.code, cli::kOk);
    EXPECT_NE(text.out.find("states: 1903"), std::string::npos) << text.out;
}

TEST(Cli, ExportVerifyMatchesBuilder) {
    const std::string path = temp_path("toy.prism");
    const CliRun r = cli(with({"export"}, "toy", "toy", {"--export-prism", path, "--verify", "--output", "json"}));
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["verify"]["states"], j["verify"]["builder_states"]);
    EXPECT_TRUE(std::filesystem::exists(path));
    std::remove(path.c_str());
    EXPECT_EQ(cli(with({"export"}, "toy", "toy")).code, cli::kInputError);
}

TEST(Cli, OutFileReceivesReport) {
    const std::string path = temp_path("report.json");
    const CliRun r = cli(with({"validate"}, "toy", "toy", {"--output", "json", "--out", path}));
    ASSERT_EQ(r.code, cli::kOk);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    EXPECT_EQ(nlohmann::json::parse(in)["command"], "validate");
    std::remove(path.c_str());
}

}  // namespace
}  // namespace cogverify
