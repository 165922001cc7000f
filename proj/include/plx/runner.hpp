#ifndef PLX_RUNNER_HPP
#define PLX_RUNNER_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plx/domain.hpp"
#include "plx/expr.hpp"
#include "plx/plap.hpp"
#include "plx/problem_spec.hpp"

namespace plx {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One scenario file: which pipeline to run, on what grid, with what
/// exponents. Loaded from JSON; "auto" is accepted for lambda, sigma_bar
/// and rho.
struct RunConfig {
    enum class Mode { Cooperative, Competitive, Scalar, PerturbedBound, Refine };

    Mode mode = Mode::Scalar;
    Domain domain = Domain::interval(0.0, 1.0);
    int n = 129;
    ProblemSpec spec;                      // exponents, lambda, sigma, delta, ...
    SolverConfig solver;
    std::optional<ExprField> h, h_tilde;   // plain RHS (scalar / perturbed-bound)
    std::optional<ExprField> gamma;        // singular scalar exponent
    double eps = 0.01;                     // perturbed-bound strip width
    std::optional<double> eps_hi;          // upper end for the crossover search
    int levels = 4;                        // refinement levels

    static RunConfig load(const std::string& path);
    static RunConfig from_json(const nlohmann::json& j);
};

/// Outcome of a scenario: exit code per the contract (0 every certificate
/// passed, 1 a named certificate failed, 2 invalid configuration /
/// structure gate), the deterministic report, and the artifacts.
struct RunResult {
    int exit_code = 0;
    nlohmann::ordered_json report;
    std::shared_ptr<Grid> grid;                         // owns the grid the fields live on
    std::vector<std::pair<std::string, Field>> fields;  // -> fields/<name>.csv
    std::vector<double> sup_changes;                    // -> iterations.csv
    std::string summary;                                // one-line outcome
};

RunResult run_scenario(const RunConfig& cfg);
RunResult refine_scenario(const RunConfig& cfg, int levels);

/// Writes report.json, run_metadata.json (timestamp; kept out of
/// report.json so reruns are byte-identical), fields/*.csv and
/// iterations.csv under out_dir.
void write_outputs(const RunResult& res, const std::string& out_dir);

}  // namespace plx

#endif
