#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "lowrank/bounds.hpp"
#include "lowrank/kron.hpp"

namespace lowrank {

// Certified spectral interval of an SPD operator together with the optimal
// step and the resulting contraction factor.
struct SpectralData {
    double gamma = 0.0;
    double Gamma = 0.0;
    double kappa = 1.0;
    double alpha = 0.0; // 2 / (gamma + Gamma)
    double q = 0.0;     // (kappa - 1) / (kappa + 1)

    static SpectralData from_interval(double gamma, double Gamma);
    static SpectralData from_operator(const KronSumOperator& op);
};

// Per-splitting rank bookkeeping of a fixed-point run.
struct RankBook {
    Splitting t;
    long long max_rank;    // D^{(t)}
    int operator_rank;     // r_A^{(t)}
    int growth;            // R^{(t)} including the identity refinement
    bool identity_refined;
    long long rhs_rank;    // r_b^{(t)} (0 for the eigenvector iteration)
};

struct RankGrowth {
    int operator_rank;
    int growth;
    bool identity_refined;
};

// R^{(t)} for one Richardson step: r_A + 2 for linear systems, r_A + 1 for the
// shifted eigenvector iteration, one less in either case when some term is the
// identity on the t side or on the complement side.
RankGrowth rank_growth(const KronSumOperator& op, const Splitting& t, double eps_rank,
                       bool eigen_iteration);

struct StepRecord {
    int step = 0;
    double error = 0.0;
    double residual = 0.0;
    std::vector<long long> ranks;
    std::vector<long long> rank_bounds;
    double overlap = std::numeric_limits<double>::quiet_NaN();
    double q_step = std::numeric_limits<double>::quiet_NaN();
};

struct IterationTrace {
    std::vector<RankBook> books;
    std::vector<StepRecord> steps; // n = 0..n_steps
    std::vector<Tensor> iterates;
    Tensor fixed_point;            // the reference the error column measures against
    bool eigen_columns = false;

    // step,error,residual,rank_<t>,rank_bound_<t>,... (+overlap,q_step).
    void write_csv(std::ostream& out) const;
};

// Reference solution: dense factorization under the guard, conjugate gradients
// on apply() beyond it; relative residual 1e-12 either way.
Tensor dense_solve(const KronSumOperator& op, const Tensor& b);

// Exact (untruncated) Richardson iteration u <- u - alpha (A u - b) with rank
// bookkeeping per monitored splitting.
IterationTrace richardson_run(const KronSumOperator& op, const RhsTensor& rhs, const Tensor& u0,
                              const SpectralData& sd, int n_steps,
                              const std::vector<Splitting>& splittings,
                              double eps_rank = kDefaultEpsRank);

// Practical variant that truncates the iterate to the tolerance trunc_tol
// (relative to its leading singular value) after every step. The exact rank
// bookkeeping of richardson_run does not apply here.
IterationTrace richardson_run_truncated(const KronSumOperator& op, const RhsTensor& rhs,
                                        const Tensor& u0, const SpectralData& sd, int n_steps,
                                        const Splitting& t, double trunc_tol,
                                        double eps_rank = kDefaultEpsRank);

inline constexpr long long kIterateEntryGuard = 10'000'000;

} // namespace lowrank
