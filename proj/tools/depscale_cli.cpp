// depscale: dependence indices of discrete joints, Gaussian covariances and
// binned samples.
//
//   depscale compute joint.csv --max-order 2
//   depscale estimate samples.csv --x a --y b --bins 16
//   depscale gaussian cov.csv --dim-x 1 --lambdas -1,0,1
//   depscale transforms joint.csv --k 2 --seed 7
//   depscale oracle joint.csv --order 1 --restarts 32
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include "report.hpp"

#include <depscale/csv.hpp>
#include <depscale/depscale.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using depscale::report::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string format = "json";
    double tol = depscale::kRankTolerance;
    std::uint64_t seed = 0;
    int max_order = 2;
};

void emit(const json& report, const std::string& format) {
    if (format == "csv")
        std::cout << depscale::report::to_csv(report);
    else
        std::cout << report.dump(2) << '\n';
}

int fail(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << depscale::report::error_json(code, message).dump() << '\n';
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kolmogorov-Renyi dependence index, maximal correlation and the m-dependence scale"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--tol", common.tol, "Threshold for vanishing singular values")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", common.seed, "Seed for randomized solvers")->capture_default_str();
    app.add_option("--max-order", common.max_order, "Highest m for D_m")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    std::string input;

    auto* compute = app.add_subcommand("compute", "Spectrum, R and D_0..D_M of a joint pmf CSV");
    compute->add_option("joint", input, "Joint pmf CSV (rows X, columns Y)")->required();

    std::string x_col;
    std::vector<std::string> y_cols;
    int bins = 8;
    int bins_x = 0;
    int bins_y = 0;
    std::string strategy = "quantile";
    bool no_header = false;
    auto* estimate = app.add_subcommand("estimate", "Plug-in profile of binned samples");
    estimate->add_option("samples", input, "Samples CSV")->required();
    estimate->add_option("--x", x_col, "X column (name or 0-based index)")->required();
    estimate->add_option("--y", y_cols, "Y column(s); several are binned jointly")->required();
    estimate->add_option("--bins", bins, "Bins per column")->capture_default_str();
    estimate->add_option("--bins-x", bins_x, "Bins for X (overrides --bins)");
    estimate->add_option("--bins-y", bins_y, "Bins per Y column (overrides --bins)");
    estimate->add_option("--strategy", strategy, "Binning strategy")
        ->check(CLI::IsMember({"quantile", "uniform", "categorical"}))
        ->capture_default_str();
    estimate->add_flag("--no-header", no_header, "First row is data, columns are named by index");

    long dim_x = 0;
    std::vector<double> lambdas;
    double var_z = 1.0;
    auto* gaussian = app.add_subcommand("gaussian", "Closed forms for a Gaussian covariance CSV");
    gaussian->add_option("covariance", input, "Full (m+n) x (m+n) covariance CSV")->required();
    gaussian->add_option("--dim-x", dim_x, "Number of X coordinates")->required();
    gaussian->add_option("--lambdas", lambdas, "Noise scales for R(X : Y + lambda Z)")->delimiter(',');
    gaussian->add_option("--var-z", var_z, "Variance of the Gaussian noise Z")->capture_default_str();

    int k = 1;
    int max_iter = 10000;
    double ace_tol = 1e-10;
    auto* transforms = app.add_subcommand("transforms", "Maximizing transform pairs by alternating conditional expectations");
    transforms->add_option("joint", input, "Joint pmf CSV")->required();
    transforms->add_option("--k", k, "Number of pairs")->capture_default_str();
    transforms->add_option("--max-iter", max_iter, "Sweep limit")->capture_default_str();
    transforms->add_option("--ace-tol", ace_tol, "Fixed-point residual tolerance")->capture_default_str();

    int order = 0;
    int restarts = 32;
    auto* oracle = app.add_subcommand("oracle", "Brute-force generalized-variance ascent for D_m");
    oracle->add_option("joint", input, "Joint pmf CSV")->required();
    oracle->add_option("--order", order, "m")->capture_default_str();
    oracle->add_option("--restarts", restarts, "Random restarts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what(), kExitInput);
    }

    try {
        json report;
        if (compute->parsed()) {
            report = depscale::report::compute(depscale::csv::read_joint(input), common.max_order, common.tol);
        } else if (estimate->parsed()) {
            const auto cols = depscale::csv::read_sample_columns(input, !no_header);
            std::vector<depscale::SampleColumn> ys;
            for (const auto& key : y_cols) ys.push_back(depscale::csv::select_column(cols, key));
            const depscale::SampleTable samples(depscale::csv::select_column(cols, x_col), std::move(ys));
            depscale::BinningSpec spec;
            const std::map<std::string, depscale::BinningStrategy> strategies{
                {"quantile", depscale::BinningStrategy::Quantile},
                {"uniform", depscale::BinningStrategy::UniformWidth},
                {"categorical", depscale::BinningStrategy::Categorical}};
            spec.strategy = strategies.at(strategy);
            spec.bins_x = bins_x > 0 ? bins_x : bins;
            spec.bins_y = bins_y > 0 ? bins_y : bins;
            report = depscale::report::estimate(samples, spec, common.max_order, common.tol);
        } else if (gaussian->parsed()) {
            const auto g = depscale::gaussian_from_covariance(depscale::csv::read_matrix(input), dim_x);
            report = depscale::report::gaussian(g, lambdas, var_z);
        } else if (transforms->parsed()) {
            bool failed = false;
            report = depscale::report::transforms(depscale::csv::read_joint(input), k, ace_tol, max_iter, common.seed,
                                                  &failed);
            if (failed) {
                emit(report, common.format);
                return fail("NonConvergence", "alternation did not reach the tolerance", kExitNumerical);
            }
        } else if (oracle->parsed()) {
            report = depscale::report::oracle(depscale::csv::read_joint(input), order, restarts, common.seed, common.tol);
        }
        emit(report, common.format);
        return 0;
    } catch (const depscale::Error& e) {
        return fail(std::string(depscale::to_string(e.code())), e.detail(),
                    depscale::is_numerical(e.code()) ? kExitNumerical : kExitInput);
    } catch (const std::exception& e) {
        return fail("InputError", e.what(), kExitInput);
    }
}
