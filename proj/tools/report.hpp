#ifndef DEPSCALE_TOOLS_REPORT_HPP
#define DEPSCALE_TOOLS_REPORT_HPP

#include <depscale/depscale.hpp>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

// JSON (schema "v1") and flat CSV renderings of library results. Every number
// is copied from a library call; nothing here does arithmetic.

namespace depscale::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "v1";

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline json header(const char* command) { return json{{"schema", kSchema}, {"command", command}}; }

inline json profile_json(const char* command, const SingularSpectrum& s, const DependenceProfile& p, bool complete) {
    json j = header(command);
    j["sigma0"] = s.sigma0;
    j["sigma"] = to_std(s.sigma);
    j["R"] = p.r;
    j["D"] = p.d;
    j["order"] = p.order ? json(*p.order) : json(nullptr);
    j["complete"] = complete;
    return j;
}

inline json compute(const DiscreteJoint& joint, int max_order, double tol) {
    const SingularSpectrum s = singular_spectrum(joint);
    const DependenceProfile p = dependence_scale(s, max_order, tol);
    return profile_json("compute", s, p, check_completeness(joint, tol).complete);
}

inline json estimate(const SampleTable& samples, const BinningSpec& spec, int max_order, double tol) {
    const EmpiricalJoint e = empirical_joint_report(samples, spec);
    const EstimateReport r = estimate_profile(samples, spec, max_order, tol);
    json j = profile_json("estimate", r.spectrum, r.profile, check_completeness(e.joint, tol).complete);
    j["n"] = r.n;
    j["bins"] = {r.bins_x, r.bins_y};
    j["bias_warning"] = r.bias_warning;
    j["warnings"] = r.warnings;
    return j;
}

inline json gaussian(const GaussianJoint& g, const std::vector<double>& lambdas, double var_z) {
    json j = header("gaussian");
    j["R"] = gaussian_r(g);
    j["D"] = gaussian_d(g);
    j["lambda_max"] = gaussian_lambda_max(g);
    if (!lambdas.empty()) {
        const NoiseCurve c = noise_curve(g, var_z, lambdas);
        j["noise_curve"] = {{"var_z", var_z}, {"lambda", c.lambdas}, {"R", c.r_values}};
    }
    return j;
}

inline json pair_json(const TransformPair& p) {
    return json{{"rho", p.rho},
                {"phi", to_std(p.phi.values)},
                {"psi", to_std(p.psi.values)},
                {"converged", p.converged},
                {"degenerate", p.degenerate},
                {"iterations", p.iterations}};
}

/// k = 1 runs the single-pair alternation, k > 1 the block version.
inline json transforms(const DiscreteJoint& joint, int k, double tol, int max_iter, std::uint64_t seed,
                       bool* failed = nullptr) {
    std::vector<TransformPair> pairs;
    if (k == 1)
        pairs.push_back(ace_pair(joint, tol, max_iter, seed));
    else
        pairs = ace_subspace(joint, k, tol, max_iter, seed);
    json j = header("transforms");
    j["k"] = k;
    j["seed"] = seed;
    j["pairs"] = json::array();
    bool any_failed = false;
    for (const auto& p : pairs) {
        j["pairs"].push_back(pair_json(p));
        if (!p.converged && !p.degenerate) any_failed = true;
    }
    if (failed) *failed = any_failed;
    return j;
}

inline json oracle(const DiscreteJoint& joint, int order, int restarts, std::uint64_t seed, double tol) {
    json j = header("oracle");
    j["order"] = order;
    j["restarts"] = restarts;
    j["seed"] = seed;
    j["value"] = gram_det_oracle(joint, order, restarts, seed);
    j["spectral"] = dependence_scale(joint, order, tol).d.back();
    return j;
}

inline json error_json(const std::string& code, const std::string& message) {
    json j{{"schema", kSchema}, {"error", code}, {"message", message}};
    return j;
}

/// Flattens a report into `key,index,value` rows. Arrays expand one row per
/// element, nested objects prefix their keys with `parent.`.
inline std::string to_csv(const json& j) {
    std::ostringstream out;
    out << "key,index,value\n";
    auto scalar = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return "";
        return v.dump();
    };
    auto emit = [&](auto&& self, const std::string& prefix, const json& node) -> void {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            const json& v = it.value();
            if (v.is_object()) {
                self(self, key, v);
            } else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (v[i].is_object()) {
                        self(self, key + "." + std::to_string(i), v[i]);
                    } else if (v[i].is_array()) {
                        for (std::size_t k = 0; k < v[i].size(); ++k)
                            out << key << '.' << i << ',' << k << ',' << scalar(v[i][k]) << '\n';
                    } else {
                        out << key << ',' << i << ',' << scalar(v[i]) << '\n';
                    }
                }
            } else {
                out << key << ",0," << scalar(v) << '\n';
            }
        }
    };
    emit(emit, "", j);
    return out.str();
}

}  // namespace depscale::report

#endif  // DEPSCALE_TOOLS_REPORT_HPP
