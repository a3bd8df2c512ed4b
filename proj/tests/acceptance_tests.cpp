// Acceptance suite: one criterion per section, each printed as a single
// PASS/FAIL line with its runtime. The process exits nonzero if any
// criterion fails, so the suite doubles as a ctest entry.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/experiment.hpp"
#include "lowrank/io.hpp"
#include "oracles.hpp"

using namespace lowrank;
namespace fs = std::filesystem;

namespace {

struct Check {
    int failures = 0;
    std::string first_failure;

    void that(bool condition, const std::string& what) {
        if (!condition) {
            ++failures;
            if (first_failure.empty()) first_failure = what;
        }
    }
};

ExperimentConfig fixture(const char* name, ExperimentMode mode) {
    return ExperimentConfig::from_file((fs::path(LOWRANK_CONFIG_DIR) / name).string(), mode);
}

// criterion 1 ----------------------------------------------------------------

void parseval_and_svd_oracle(Check& check) {
    Rng dims_rng(0xACCE01);
    int tested = 0;
    while (tested < 100) {
        const int d = 2 + static_cast<int>(dims_rng.below(3)); // 2..4
        std::vector<int> dims;
        for (int mu = 0; mu < d; ++mu) dims.push_back(2 + static_cast<int>(dims_rng.below(4)));
        Rng entry_rng = Rng::stream(0xACCE02, static_cast<std::uint64_t>(tested));
        const Tensor u = oracles::random_tensor(dims, entry_rng);
        const Splitting t = Splitting::tt_prefix(1 + static_cast<int>(dims_rng.below(d - 1)), d);

        const SingularSpectrum spec = singular_spectrum(u, t);
        const std::vector<double> expected = oracles::jacobi_singular_values(unfold(u, t));
        check.that(spec.values.size() == expected.size(), "spectrum length");
        const double scale = expected.empty() ? 1.0 : expected.front();
        for (std::size_t k = 0; k < expected.size(); ++k)
            check.that(std::abs(spec.values[k] - expected[k]) <= 1e-10 * scale,
                       "oracle mismatch at k=" + std::to_string(k));

        double sum = 0.0;
        for (double s : spec.values) sum += s * s;
        const double norm_sq = u.norm() * u.norm();
        check.that(std::abs(sum - norm_sq) <= 1e-10 * norm_sq, "parseval");
        ++tested;
    }
}

// criteria 2 and 3 ------------------------------------------------------------

struct LinearFixtureRun {
    SpectralData sd;
    IterationTrace trace;
    std::vector<Splitting> splittings;
};

LinearFixtureRun run_linear_fixture(const ExperimentConfig& cfg) {
    const KronSumOperator op = cfg.build_operator();
    const std::vector<Splitting> splittings = cfg.monitored_splittings(op.dims());
    const RhsTensor rhs = cfg.build_rhs(op);
    const SpectralData sd = SpectralData::from_operator(op);
    IterationTrace trace =
        richardson_run(op, rhs, Tensor::zeros(op.dims()), sd, 12, splittings, cfg.eps_rank);
    return LinearFixtureRun{sd, std::move(trace), splittings};
}

void contraction_and_rank_law(Check& check) {
    for (const char* name : {"lyapunov.json", "laplace_nn_d4.json"}) {
        const LinearFixtureRun run = run_linear_fixture(fixture(name, ExperimentMode::linear));
        const double floor = 1e-13 * std::max(1.0, run.trace.fixed_point.norm());
        for (std::size_t n = 1; n < run.trace.steps.size(); ++n) {
            if (run.trace.steps[n - 1].error > floor)
                check.that(run.trace.steps[n].error <=
                               (run.sd.q + 1e-10) * run.trace.steps[n - 1].error,
                           std::string(name) + ": contraction at step " + std::to_string(n));
            for (std::size_t i = 0; i < run.splittings.size(); ++i) {
                const double power = std::pow(static_cast<double>(run.trace.books[i].growth),
                                              static_cast<double>(n));
                check.that(static_cast<double>(run.trace.steps[n].ranks[i]) <= power,
                           std::string(name) + ": rank law at step " + std::to_string(n));
            }
        }
    }
}

void bound_dominance(Check& check) {
    for (const char* name : {"lyapunov.json", "laplace_nn_d4.json"}) {
        const ExperimentConfig cfg = fixture(name, ExperimentMode::linear);
        const LinearFixtureRun run = run_linear_fixture(cfg);
        const double pi1 = run.trace.fixed_point.norm();
        for (std::size_t i = 0; i < run.splittings.size(); ++i) {
            const SingularSpectrum spec =
                singular_spectrum(run.trace.fixed_point, run.splittings[i]);
            const int growth = run.trace.books[i].growth;
            for (long long r = 1; r <= spec.dim(); ++r) {
                check.that(spec.tail(r) <=
                               linear_tail_bound(r, run.sd.q, growth, pi1) * (1 + 1e-9),
                           std::string(name) + ": tail bound at r=" + std::to_string(r));
                if (r >= 2) {
                    const double sv = spec.values[static_cast<std::size_t>(r - 1)];
                    check.that(sv * sv <= singular_value_sq_bound(r, run.sd.q, growth, 1.0, pi1) *
                                              (1 + 1e-9),
                               std::string(name) + ": sv bound at r=" + std::to_string(r));
                }
            }
            // anchor: at r = R^n the interpolated bound collapses to pi1 q^n,
            // bit for bit, thanks to the integer floor-log
            for (long long n = 0, p = 1; p <= 4 * spec.dim(); ++n, p *= growth)
                check.that(tail_bound_full(p, run.sd.q, growth, 1.0, pi1) ==
                               pi1 * pow_int(run.sd.q, n),
                           std::string(name) + ": anchor at R^" + std::to_string(n));
        }
    }
    // the anchor holds for pure arithmetic too, across growth factors
    for (long long growth : {2, 3, 5})
        for (double q : {0.1, 0.5, 0.9})
            for (long long n = 0, p = 1; n <= 12; ++n, p *= growth)
                check.that(tail_bound_full(p, q, static_cast<double>(growth), 1.0, 1.0) ==
                               pow_int(q, n),
                           "arithmetic anchor");
}

// criterion 4 -----------------------------------------------------------------

void example_structure(Check& check) {
    for (int d : {3, 4, 5}) {
        ModelParams params;
        params.dims = std::vector<int>(static_cast<std::size_t>(d), 2);
        params.seed = 1000 + static_cast<std::uint64_t>(d);
        params.gamma_a = 1.0;
        params.gamma_a_upper = 2.0;
        params.gamma_b_upper = 1.0;
        params.gamma_c_upper = 1.0;
        const KronSumOperator op = build_model(ModelKind::laplace_plus_nn, params);
        for (int mu = 1; mu < d; ++mu) {
            const Splitting t = Splitting::tt_prefix(mu, d);
            const int via_reshuffle = op.t_rank_via_reshuffle(t, 1e-10);
            check.that(via_reshuffle <= 3,
                       "d=" + std::to_string(d) + " operator rank at mu=" + std::to_string(mu));
            check.that(op.t_rank_via_gram(t, 1e-10) == via_reshuffle,
                       "d=" + std::to_string(d) + " gram/reshuffle agreement");
        }
    }

    const double kappa_limit = (2.0 + 1.0 * 1.0) / 1.0;
    for (int d = 2; d <= 8; ++d) {
        ModelParams params;
        params.dims = std::vector<int>(static_cast<std::size_t>(d), 2);
        params.seed = 2000 + static_cast<std::uint64_t>(d);
        params.gamma_a = 1.0;
        params.gamma_a_upper = 2.0;
        params.gamma_b_upper = 1.0;
        params.gamma_c_upper = 1.0;
        const KronSumOperator op = build_model(ModelKind::laplace_plus_nn, params);
        const double kappa = op.analytic_bounds()->Gamma / op.analytic_bounds()->gamma;
        check.that(kappa <= kappa_limit + 1e-12, "kappa bounded at d=" + std::to_string(d));
        check.that(std::abs(kappa - (3.0 - 1.0 / d)) <= 1e-12,
                   "kappa formula at d=" + std::to_string(d));
    }
}

// criterion 5 -----------------------------------------------------------------

void commuting_case(Check& check) {
    for (const char* name : {"commuting_d3.json", "commuting_d4.json"}) {
        const DecayReport report =
            run_commuting_experiment(fixture(name, ExperimentMode::commuting));
        for (std::size_t i = 0; i < report.splits.size(); ++i) {
            const auto& split = report.splits[i];
            const long long r0 = report.trace.steps[0].ranks[i];
            const long long rb = report.trace.books[i].rhs_rank;
            for (const auto& rec : report.trace.steps)
                check.that(rec.ranks[i] <= commuting_rank_bound(rec.step, r0, rb),
                           std::string(name) + ": additive law at step " +
                               std::to_string(rec.step));
            check.that(split.verdicts.at("slope").pass,
                       std::string(name) + ": slope at " + split.t.label() + " (fitted " +
                           format_double(split.fitted_slope) + " vs limit " +
                           format_double(report.slope_limit) + ")");
        }
    }
}

// criteria 6 and 7 ------------------------------------------------------------

void eigen_iteration_machinery(Check& check) {
    const ExperimentConfig cfg = fixture("eigen_d2.json", ExperimentMode::eigen);
    const DecayReport report = run_eigen_experiment(cfg);

    const auto& overlap = report.run_verdicts.at("overlap_conservation");
    check.that(overlap.pass, "overlap conservation (worst drift " +
                                 format_double(overlap.worst_margin) + ")");
    check.that(report.run_verdicts.at("contraction").pass, "per-step contraction");
    for (const auto& split : report.splits) {
        check.that(split.verdicts.at("tau_vs_main").pass,
                   "tail bound with pi1 = ||u||/theta at " + split.t.label());
    }
}

void overlap_bound(Check& check) {
    const ExperimentConfig cfg = fixture("eigen_d2.json", ExperimentMode::eigen);
    const DecayReport report = run_eigen_experiment(cfg);
    for (const auto& split : report.splits) {
        check.that(split.overlap_hypothesis,
                   "hypothesis q^2 R < 1 holds on the constructed instance (q2R = " +
                       format_double(split.q2R) + ")");
        if (!split.overlap_hypothesis) continue;
        check.that(split.theta * split.theta >=
                       split.theta_lower * split.theta_lower * (1 - 1e-12),
                   "theta^2 above its lower bound");
        check.that(split.verdicts.at("tau_vs_overlap").pass, "tail bound via the overlap bound");
    }

    // closed form: q = 0.3, R = 3 gives exponent 1 and theta^2 >= 1/6 exactly
    check.that(overlap_bound_exponent(0.3, 3.0) == 1, "exponent at q=0.3, R=3");
    const double theta = overlap_lower_bound(0.3, 3.0);
    check.that(theta * theta == 1.0 / 6.0, "theta^2 bound is exactly 1/6");
}

// criterion 8 -----------------------------------------------------------------

void two_step_remark(Check& check) {
    const ExperimentConfig cfg = fixture("two_step.json", ExperimentMode::two_step);
    const TwoStepReport report = run_two_step_experiment(cfg);
    check.that(report.rows.size() == 50, "50 instances");
    for (const auto& row : report.rows) {
        check.that(row.one_step <= 3.0,
                   "one-step factor at instance " + std::to_string(row.instance));
        check.that(row.two_step <= 6.0,
                   "two-step factor at instance " + std::to_string(row.instance));
    }
}

// criterion 9 -----------------------------------------------------------------

void determinism(Check& check) {
    const fs::path dir_a = fs::temp_directory_path() / "lowrank_accept_a";
    const fs::path dir_b = fs::temp_directory_path() / "lowrank_accept_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    const struct {
        const char* config;
        ExperimentMode mode;
    } fixtures[] = {
        {"lyapunov.json", ExperimentMode::linear},
        {"eigen_d2.json", ExperimentMode::eigen},
        {"commuting_d3.json", ExperimentMode::commuting},
    };
    for (const auto& [name, mode] : fixtures) {
        ExperimentConfig cfg = fixture(name, mode);
        cfg.out_dir = dir_a.string();
        run_and_write(cfg);
        cfg.out_dir = dir_b.string();
        run_and_write(cfg);
    }

    auto strip = [](const fs::path& path) {
        nlohmann::json doc = nlohmann::json::parse(read_text_file(path.string()));
        doc.at("environment").erase("timestamp");
        return doc.dump(2);
    };
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() == ".json") {
            check.that(strip(entry.path()) == strip(dir_b / name),
                       name + " identical once the timestamp is excluded");
        } else {
            check.that(read_text_file(entry.path().string()) ==
                           read_text_file((dir_b / name).string()),
                       "byte-identical " + name);
        }
    }
}

struct Criterion {
    int id;
    const char* label;
    double limit_seconds;
    std::function<void(Check&)> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Parseval and SVD against the one-sided Jacobi oracle", 10.0, parseval_and_svd_oracle},
        {2, "Richardson contraction and multiplicative rank law", 30.0, contraction_and_rank_law},
        {3, "tail/singular-value bound dominance with exact power anchors", 30.0, bound_dominance},
        {4, "L+V structure: operator t-rank <= 3 and bounded condition number", 60.0,
         example_structure},
        {5, "commuting case: additive ranks and geometric decay slope", 30.0, commuting_case},
        {6, "shifted eigen iteration: overlap, contraction, tail bound", 20.0,
         eigen_iteration_machinery},
        {7, "overlap lower bound under q^2 R < 1 with the closed-form anchor", 20.0,
         overlap_bound},
        {8, "two-step rank growth stays under 6 (one step under 3)", 30.0, two_step_remark},
        {9, "byte-identical reruns (timestamp excluded)", 30.0, determinism},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Check check;
        std::string error;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            ++check.failures;
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.limit_seconds) {
            ++check.failures;
            if (check.first_failure.empty())
                check.first_failure = "runtime " + format_double(elapsed) + "s over limit";
        }
        const bool pass = check.failures == 0;
        failed += pass ? 0 : 1;
        std::printf("[%s] criterion %d: %s (%.2fs, limit %.0fs)\n", pass ? "PASS" : "FAIL",
                    criterion.id, criterion.label, elapsed, criterion.limit_seconds);
        if (!pass) {
            if (!error.empty()) std::printf("       exception: %s\n", error.c_str());
            if (!check.first_failure.empty())
                std::printf("       first failure: %s (%d total)\n", check.first_failure.c_str(),
                            check.failures);
        }
    }
    if (failed == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failed);
    return 1;
}
