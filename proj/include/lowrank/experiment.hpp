#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowrank/eigen_iteration.hpp"
#include "lowrank/richardson.hpp"

namespace lowrank {

enum class ExperimentMode { linear, eigen, commuting, d_sweep, two_step, spectrum };

ExperimentMode mode_from_string(const std::string& name);
std::string to_string(ExperimentMode mode);

// One experiment cell, parsed from JSON. The operator/rhs/start/tensor specs
// stay as JSON subtrees; builder helpers turn them into objects on demand.
// See README for the schema.
struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentMode mode = ExperimentMode::linear;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int n_steps = 12;
    double eps_rank = kDefaultEpsRank;
    std::vector<std::vector<int>> splittings; // empty => TT family
    nlohmann::json operator_spec;
    nlohmann::json rhs_spec;
    nlohmann::json start_spec;
    nlohmann::json tensor_spec;               // spectrum mode only
    std::vector<int> d_list;                  // d_sweep
    int sweep_mode_size = 2;                  // per-mode dimension in the sweep
    int instances = 50;                       // two_step
    int samples = 3;                          // two_step starts per instance
    std::string out_dir = "out";
    std::string base_dir = ".";               // resolves relative csv paths

    static ExperimentConfig from_file(const std::string& path,
                                      std::optional<ExperimentMode> expected = std::nullopt);
    static ExperimentConfig from_json(const nlohmann::json& doc,
                                      std::optional<ExperimentMode> expected = std::nullopt);

    // Builds everything cheap (operator, splittings, rhs dims, guards) and
    // throws the usual reason codes on any inconsistency.
    void validate() const;

    std::vector<Splitting> monitored_splittings(const std::vector<int>& dims) const;
    KronSumOperator build_operator() const;
    RhsTensor build_rhs(const KronSumOperator& op) const;
    Tensor build_start(const KronSumOperator& op) const;
    Tensor build_tensor() const; // spectrum mode source
};

struct Verdict {
    bool pass = true;
    double worst_margin = 0.0; // max over r of measured/bound - 1
    long long worst_r = 0;

    const char* word() const { return pass ? "PASS" : "FAIL"; }
};

// PASS iff measured[i] <= bound[i] * (1 + rel_tol) for every i; entries whose
// bound is NaN are skipped. Indices are reported 1-based (as ranks r).
Verdict certify_dominance(const std::vector<double>& measured, const std::vector<double>& bound,
                          double rel_tol = 1e-9);

// Everything measured and bounded for one splitting.
struct SplittingReport {
    explicit SplittingReport(Splitting t_) : t(std::move(t_)) {}

    Splitting t;
    long long max_rank = 0; // D^{(t)}
    int operator_rank = 0;  // r_A^{(t)}
    int growth = 0;         // R^{(t)}
    bool identity_refined = false;

    std::vector<double> sigma;    // length D
    std::vector<double> tau;      // tau_1 .. tau_D
    std::vector<double> sigma_sq; // sigma_r^2, r = 1..D
    double entropy_paper = 0.0;
    double entropy_conventional = 0.0;
    double theta = 0.0;

    std::vector<double> bound_full;       // interpolated tail bound
    std::vector<double> bound_simplified; // algebraic tail bound
    std::vector<double> bound_main;       // mode-specific tail bound
    std::vector<double> bound_sv;         // singular-value-squared bound (NaN at r=1)

    // eigen mode extras
    double pi1_via_theta = 0.0, pi1_naive = 0.0, pi1_constructive = 0.0;
    std::vector<double> bound_main_naive, bound_main_constructive;
    double q2R = 0.0;                // hypothesis value q^2 R
    bool overlap_hypothesis = false; // q^2 R < 1
    double theta_lower = 0.0;
    std::vector<double> bound_overlap; // tail bound via the overlap bound

    // commuting mode
    double fitted_slope = 0.0;

    std::map<std::string, Verdict> verdicts;
    bool pass = true;
};

struct DecayReport {
    std::string name;
    ExperimentMode mode = ExperimentMode::linear;
    std::uint64_t seed = 0;
    double eps_rank = kDefaultEpsRank;

    SpectralData spectral; // linear-family runs
    bool has_eigen_setup = false;
    double lambda1 = 0.0, lambda2 = 0.0, delta = 0.0, Delta = 0.0, beta = 0.0;
    double q = 0.0;            // contraction factor used in the bounds
    double norm_u = 0.0;       // norm of the studied tensor
    double slope_limit = 0.0;  // ln q + 0.05 (commuting)

    std::vector<SplittingReport> splits;
    IterationTrace trace;
    bool has_trace = false;
    std::map<std::string, Verdict> run_verdicts; // contraction, rank_law, ...
    std::vector<std::string> notes;
    bool pass = true;

    nlohmann::json to_json(bool with_timestamp = true) const;
    // <out>/<name>.json, <name>_trace.csv, <name>_decay_<t>.csv
    void write(const std::string& out_dir) const;
};

struct SweepRow {
    int d = 0;
    double kappa = 0.0;
    double q = 0.0;
    double exponent_general = 0.0; // R = 5
    double exponent_refined = 0.0; // R = 4
    double kappa_dense = 0.0;      // exact condition number under the guard (0 if skipped)
    int median_mu = 0;
    std::vector<double> tau_median; // measured tails at t = {1..median_mu}
    bool pass = true;
};

struct SweepReport {
    std::string name;
    std::uint64_t seed = 0;
    double kappa_limit = 0.0;    // (Gamma_A + Gamma_B Gamma_C) / gamma_A
    double exponent_floor = 0.0; // exponent at the limiting kappa, R = 5
    std::vector<SweepRow> rows;
    bool pass = true;

    nlohmann::json to_json(bool with_timestamp = true) const;
    void write(const std::string& out_dir) const; // <name>.json + <name>_sweep.csv
};

struct TwoStepReport {
    std::string name;
    std::uint64_t seed = 0;
    struct Row {
        int instance = 0;
        double one_step = 0.0;
        double two_step = 0.0;
        bool pass = true;
    };
    std::vector<Row> rows;
    double max_one_step = 0.0;
    double max_two_step = 0.0;
    bool pass = true;

    nlohmann::json to_json(bool with_timestamp = true) const;
    void write(const std::string& out_dir) const;
};

DecayReport run_linear_experiment(const ExperimentConfig& cfg);
DecayReport run_eigen_experiment(const ExperimentConfig& cfg);
DecayReport run_commuting_experiment(const ExperimentConfig& cfg);
DecayReport run_spectrum_experiment(const ExperimentConfig& cfg);
SweepReport run_d_sweep(const ExperimentConfig& cfg, const std::vector<int>& d_list, int jobs = 1);
TwoStepReport run_two_step_experiment(const ExperimentConfig& cfg, int jobs = 1);

// Runs the cell(s) for cfg.mode, writes all report files, and returns whether
// every verdict passed. jobs > 1 evaluates independent cells concurrently
// (d_sweep rows, two_step instances); aggregation order stays deterministic.
bool run_and_write(const ExperimentConfig& cfg, int jobs = 1);

} // namespace lowrank
