#include "report.hpp"

#include <depscale/csv.hpp>
#include <depscale/depscale.hpp>

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace depscale;
using depscale::report::json;

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int status = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("depscale_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun run(const std::string& args) {
    const fs::path err = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string(DEPSCALE_CLI_PATH) + " " + args + " 2>" + err.string();
    CliRun r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::string matrix_csv(const Matrix& m) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "," : "") << m(i, k);
        out << '\n';
    }
    return out.str();
}

std::string samples_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    for (std::size_t i = 0; i < cols.front().size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c][i];
        out << '\n';
    }
    return out.str();
}

}  // namespace

TEST(Cli, ComputeTwoByTwo) {
    const auto f = write_file("two.csv", "0.4,0.1\n0.1,0.4\n");
    const CliRun r = run("compute " + f.string());
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["schema"], "v1");
    EXPECT_NEAR(j["R"].get<double>(), 0.6, 1e-12);
    ASSERT_EQ(j["D"].size(), 3u);
    EXPECT_NEAR(j["D"][0].get<double>(), 0.36, 1e-12);
    EXPECT_EQ(j["D"][1].get<double>(), 0.0);
    EXPECT_EQ(j["order"], 1);
    EXPECT_EQ(j["complete"], true);
}

TEST(Cli, ComputeIndependentHasOrderZero) {
    const auto f = write_file("indep.csv", "x,u,v\na,0.12,0.18\nb,0.28,0.42\n");
    const CliRun r = run("compute " + f.string() + " --max-order 1");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["order"], 0);
    EXPECT_LE(j["R"].get<double>(), 1e-12);
}

TEST(Cli, MalformedPmfExitsWithInputError) {
    const auto f = write_file("bad.csv", "0.5,0.5\n0.5,0.5\n");
    const CliRun r = run("compute " + f.string());
    EXPECT_EQ(r.status, 2);
    EXPECT_TRUE(r.out.empty());
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"], "NotNormalized");

    const CliRun missing = run("compute " + (scratch_dir() / "nope.csv").string());
    EXPECT_EQ(missing.status, 2);
    EXPECT_EQ(json::parse(missing.err)["error"], "ParseError");

    const CliRun usage = run("frobnicate");
    EXPECT_EQ(usage.status, 2);
}

TEST(Cli, ComputeMatchesLibraryBitForBit) {
    depscale::testing::Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const auto joint = depscale::testing::random_joint(rng, 4, 5);
        const auto f = write_file("rand.csv", matrix_csv(joint.probs()));
        const CliRun r = run("compute " + f.string() + " --max-order 3");
        ASSERT_EQ(r.status, 0) << r.err;
        // The CLI re-reads the printed table, so compare against the same file.
        const json expected = depscale::report::compute(csv::read_joint(f.string()), 3, kRankTolerance);
        EXPECT_EQ(json::parse(r.out), expected);
    }
}

TEST(Cli, CsvFormat) {
    const auto f = write_file("two.csv", "0.4,0.1\n0.1,0.4\n");
    const CliRun r = run("--format csv compute " + f.string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.rfind("key,index,value\n", 0), 0u);
    EXPECT_NE(r.out.find("\nD,0,0.359999"), std::string::npos);
    EXPECT_NE(r.out.find("\nD,2,0"), std::string::npos);
    EXPECT_NE(r.out.find("order,0,1"), std::string::npos);
}

TEST(Cli, EstimateIdenticalColumns) {
    depscale::testing::Rng rng(72);
    std::normal_distribution<double> normal;
    std::vector<double> x(400);
    for (auto& v : x) v = normal(rng);
    const auto f = write_file("same.csv", samples_csv({"a", "b"}, {x, x}));
    const CliRun r = run("estimate " + f.string() + " --x a --y b --bins 4");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["R"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(j["n"], 400);
    EXPECT_EQ(j["bias_warning"], false);
}

TEST(Cli, EstimateAddingAColumnDoesNotLowerR) {
    depscale::testing::Rng rng(73);
    std::normal_distribution<double> normal;
    const std::size_t n = 20000;
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = normal(rng);
        y[i] = normal(rng);
        x[i] = 0.5 * y[i] + 0.5 * z[i] + 0.7 * normal(rng);
    }
    const auto f = write_file("xyz.csv", samples_csv({"x", "y", "z"}, {x, y, z}));
    const CliRun one = run("estimate " + f.string() + " --x x --y y --bins 4");
    const CliRun two = run("estimate " + f.string() + " --x x --y y z --bins 4");
    ASSERT_EQ(one.status, 0) << one.err;
    ASSERT_EQ(two.status, 0) << two.err;
    EXPECT_GE(json::parse(two.out)["R"].get<double>(), json::parse(one.out)["R"].get<double>() - 0.02);
    EXPECT_EQ(json::parse(two.out)["bins"][1], 16);
}

TEST(Cli, EstimateUnknownColumn) {
    const auto f = write_file("ab.csv", "a,b\n1,2\n3,4\n");
    const CliRun r = run("estimate " + f.string() + " --x a --y c");
    EXPECT_EQ(r.status, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "InvalidArgument");
}

TEST(Cli, GaussianScalarAndNoiseCurve) {
    const auto f = write_file("cov.csv", "1,0.5\n0.5,1\n");
    const CliRun r = run("gaussian " + f.string() + " --dim-x 1 --lambdas -1,0,1");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["R"].get<double>(), 0.5);
    EXPECT_EQ(j["D"].get<double>(), 0.25);
    ASSERT_EQ(j["noise_curve"]["R"].size(), 3u);
    EXPECT_EQ(j["noise_curve"]["R"][1].get<double>(), 0.5);
    EXPECT_NEAR(j["noise_curve"]["R"][0].get<double>(), 0.5 / std::sqrt(2.0), 1e-15);
}

TEST(Cli, GaussianBlockFixture) {
    const auto f = write_file("cov4.csv", "1,0,0.6,0\n0,1,0,0.3\n0.6,0,1,0\n0,0.3,0,1\n");
    const CliRun r = run("gaussian " + f.string() + " --dim-x 2");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["lambda_max"].get<double>(), 0.36, 1e-12);
    EXPECT_NEAR(j["R"].get<double>(), 0.6, 1e-12);
    EXPECT_FALSE(j.contains("noise_curve"));
}

TEST(Cli, GaussianNotPositiveDefiniteReportsEigenvalue) {
    const auto f = write_file("covbad.csv", "0,0\n0,1\n");
    const CliRun r = run("gaussian " + f.string() + " --dim-x 1");
    EXPECT_EQ(r.status, 2);
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"], "NotPositiveDefinite");
    EXPECT_NE(e["message"].get<std::string>().find("eigenvalue 0"), std::string::npos);
}

TEST(Cli, Transforms) {
    const auto two = write_file("two.csv", "0.4,0.1\n0.1,0.4\n");
    CliRun r = run("transforms " + two.string() + " --ace-tol 1e-12");
    ASSERT_EQ(r.status, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_NEAR(j["pairs"][0]["rho"].get<double>(), 0.6, 1e-12);

    const auto diag = write_file("diag.csv", "0.5,0\n0,0.5\n");
    r = run("transforms " + diag.string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["pairs"][0]["rho"].get<double>(), 1.0, 1e-12);

    const auto indep = write_file("ind.csv", "0.12,0.18\n0.28,0.42\n");
    r = run("transforms " + indep.string());
    ASSERT_EQ(r.status, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_EQ(j["pairs"][0]["degenerate"], true);
    EXPECT_EQ(j["pairs"][0]["rho"].get<double>(), 0.0);
}

TEST(Cli, TransformsBlockMatchesLibrary) {
    depscale::testing::Rng rng(74);
    const auto joint = depscale::testing::random_joint(rng, 4, 4);
    const auto f = write_file("four.csv", matrix_csv(joint.probs()));
    const CliRun r = run("--seed 9 transforms " + f.string() + " --k 2");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out), depscale::report::transforms(csv::read_joint(f.string()), 2, 1e-10, 10000, 9));
}

TEST(Cli, TransformsNonConvergenceExitsNumerical) {
    depscale::testing::Rng rng(75);
    const auto joint = depscale::testing::random_joint(rng, 5, 5);
    const auto f = write_file("five.csv", matrix_csv(joint.probs()));
    const CliRun r = run("transforms " + f.string() + " --max-iter 1 --ace-tol 1e-15");
    EXPECT_EQ(r.status, 3);
    EXPECT_EQ(json::parse(r.err)["error"], "NonConvergence");
}

TEST(Cli, Oracle) {
    const auto f = write_file("two.csv", "0.4,0.1\n0.1,0.4\n");
    const CliRun r = run("oracle " + f.string() + " --order 0 --restarts 4");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["value"].get<double>(), 0.36, 1e-6);
    EXPECT_NEAR(j["spectral"].get<double>(), 0.36, 1e-12);
}
