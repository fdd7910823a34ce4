#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"
#include "cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "accum");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = accum::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

/// Data rows of a CSV table, comment lines and header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::string* header = nullptr) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            if (header) *header = line;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

const std::string kPlant = fixtures::data_path("plant.txt");

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("accum_cli_test_" + name); }

}  // namespace

TEST(Cli, FitPrintsMixingTable) {
    const auto r = run({"fit", kPlant});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    EXPECT_EQ(header, "gamma,weight");
    ASSERT_EQ(rows.size(), 7u);
    for (std::size_t u = 0; u < 7; ++u) {
        EXPECT_NEAR(std::stod(rows[u][0]), fixtures::kTable1Support[u], 0.05);
        EXPECT_NEAR(std::stod(rows[u][1]), fixtures::kTable1Weights[u], 0.01);
    }
    EXPECT_NE(r.out.find("# loglik=-454.977"), std::string::npos);
    EXPECT_NE(r.out.find("# gradient_sup="), std::string::npos);
    std::istringstream again(r.out);
    EXPECT_EQ(accum::read_mixture(again).size(), 7u);
}

TEST(Cli, FitJsonAndPrecision) {
    const auto r = run({"fit", kPlant, "--format", "json", "--precision", "3"});
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["rows"].size(), 7u);
    EXPECT_DOUBLE_EQ(doc["loglik"].get<double>(), -455.0);
    EXPECT_DOUBLE_EQ(doc["rows"][0]["gamma"].get<double>(), 0.864);
    EXPECT_TRUE(doc["converged"].get<bool>());
}

TEST(Cli, CompareReportsDiagnostics) {
    const auto r = run({"compare", kPlant});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    EXPECT_EQ(header, "quantity,j,value");
    ASSERT_EQ(rows.size(), 22u);
    EXPECT_NEAR(std::stod(rows[0][2]), 0.13, 0.005);
    EXPECT_EQ(rows[21][0], "gap_chao");
    EXPECT_NEAR(std::stod(rows[21][2]), 2.58, 0.5);
}

TEST(Cli, CurveColumnsAndMonotonePlus) {
    const auto r = run({"curve", kPlant, "--t-max", "3", "--grid", "0.01", "--j-max", "1", "--gt"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    EXPECT_EQ(header, "t,j,phi_hat,phi_tilde,phi_plus,chao,phi_tilde_plus,chao_tilde");
    ASSERT_EQ(rows.size(), 300u);
    EXPECT_LT(std::stod(rows.front()[4]), 10.0);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(std::stod(rows[i][4]), std::stod(rows[i - 1][4]));
    EXPECT_EQ(std::stod(rows[99][0]), 1.0);
    EXPECT_EQ(std::stod(rows[99][3]), 61.0);
}

TEST(Cli, CurvePlotWritesSvg) {
    const auto path = temp_file("curve.svg");
    fs::remove(path);
    const auto r = run({"curve", kPlant, "--plot", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    const std::string svg((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray=\"8,4\""), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray=\"8,3,2,3\""), std::string::npos);
    EXPECT_NE(svg.find("j=4"), std::string::npos);
    const auto rich = temp_file("rich.svg");
    ASSERT_EQ(run({"curve", kPlant, "--plot", rich.string(), "--plot-kind", "richness"}).code, 0);
    EXPECT_TRUE(fs::exists(rich));
}

TEST(Cli, RarefyEndsAtObservedCounts) {
    const auto r = run({"rarefy", kPlant, "--h-step", "100", "--j-max", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    EXPECT_EQ(header, "h,j,m_bar,m_bar_plus");
    ASSERT_EQ(rows.size(), 22u);
    EXPECT_EQ(rows[20][0], "1008");
    EXPECT_EQ(std::stod(rows[20][2]), 61.0);
    EXPECT_EQ(std::stod(rows[21][2]), 35.0);
    EXPECT_NEAR(std::stod(rows[21][3]), 188.0, 1e-3);
}

TEST(Cli, BootstrapReproducibleAndSeedFromEnvironment) {
    const std::vector<std::string> args{"bootstrap", kPlant, "--replicates", "50", "--grid", "1", "--seed", "7"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    std::string header;
    EXPECT_EQ(csv_rows(a.out, &header).size(), 3u);
    EXPECT_EQ(header, "t,estimate,lower,upper");
    EXPECT_NE(a.out.find("# seed=7"), std::string::npos);

    ::setenv("ACCUM_SEED", "7", 1);
    const auto env = run({"bootstrap", kPlant, "--replicates", "50", "--grid", "1"});
    ::unsetenv("ACCUM_SEED");
    EXPECT_EQ(env.out, a.out);
}

TEST(Cli, SimulateEmitsFrequencyCounts) {
    const auto mix = temp_file("theta.txt");
    {
        std::ofstream f(mix);
        f << "gamma weight\n0.5 0.6\n3 0.4\n";
    }
    const auto r = run({"simulate", "--mixture", mix.string(), "--species", "200", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto fc = accum::parse_counts(r.out, accum::InputFormat::pairs);
    EXPECT_LE(fc.n_plus(), 200);
    EXPECT_EQ(run({"simulate", "--mixture", mix.string(), "--species", "200", "--seed", "4"}).out, r.out);
    const auto m = run({"simulate", "--mixture", mix.string(), "--species", "200", "--individuals", "1"});
    EXPECT_EQ(m.out, "1 1\n");
}

TEST(CliErrors, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"fit", "/nonexistent/file.txt"}).code, 2);
    EXPECT_EQ(run({"curve", kPlant, "--t-max", "5"}).code, 2);
    EXPECT_EQ(run({"curve", kPlant, "--t-max", "3.5", "--no-t-cap", "--grid", "0.5"}).code, 0);
    EXPECT_EQ(run({"bootstrap", kPlant, "--replicates", "10"}).code, 2);
    EXPECT_EQ(run({"fit", kPlant, "--format", "xml"}).code, 2);

    const auto bad = temp_file("bad.txt");
    {
        std::ofstream f(bad);
        f << "1 5\n1 6\n";
    }
    const auto r = run({"fit", bad.string()});
    EXPECT_EQ(r.code, 3);
    const auto err = nlohmann::json::parse(r.err);
    EXPECT_EQ(err["error"], "data");
    EXPECT_EQ(err["exit_code"], 3);

    const auto nc = run({"fit", kPlant, "--max-iter", "1", "--tol", "1e-14"});
    EXPECT_EQ(nc.code, 4);
    EXPECT_EQ(nlohmann::json::parse(nc.err)["error"], "nonconvergence");
}

TEST(Cli, HelpExitsCleanly) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("bootstrap"), std::string::npos);
}
