#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lowrank/spectrum.hpp"
#include "lowrank/tensor.hpp"

namespace lowrank {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// One elementary tensor-product term F_1 x F_2 x ... x F_d stored fully
// factored per mode; identity factors are flagged so rank bookkeeping can use
// the sharper growth bound.
struct ElementaryOp {
    std::vector<Eigen::MatrixXd> factors;
    std::vector<bool> identity_flags;

    // Flags are auto-detected by exact comparison, keeping the invariant
    // "flag set => factor is the identity" trivially true.
    static ElementaryOp from_factors(std::vector<Eigen::MatrixXd> factors);

    bool identity_on(const Splitting& t) const;
    bool identity_on_complement(const Splitting& t) const;
};

struct AnalyticBounds {
    double gamma = 0.0;
    double Gamma = 0.0;
    std::string note; // provenance of the bounds
};

class KronSumOperator {
public:
    static KronSumOperator from_terms(std::vector<int> dims, std::vector<ElementaryOp> terms,
                                      bool symmetry_declared,
                                      std::optional<AnalyticBounds> analytic = std::nullopt);

    const std::vector<int>& dims() const { return dims_; }
    long long total_dim() const { return product_of_dims(dims_); }
    const std::vector<ElementaryOp>& terms() const { return terms_; }
    bool symmetry_declared() const { return symmetry_declared_; }
    const std::optional<AnalyticBounds>& analytic_bounds() const { return analytic_; }

    // Mode-by-mode application; never assembles the full matrix.
    Tensor apply(const Tensor& u) const;

    // Brute-force oracle; guarded by kDenseGuard on the total dimension.
    Eigen::MatrixXd assemble_dense() const;

    // Minimal r with A = sum_{i<=r} A_i^{(t)} x A_i^{(t^c)} at the eps_rank
    // threshold. The Gram route handles up to kGramTermGuard terms without
    // assembling anything; the reshuffled matricization of the dense assembly
    // is the fallback (and the validation route at small sizes).
    int t_rank(const Splitting& t, double eps_rank = kDefaultEpsRank) const;
    int t_rank_via_gram(const Splitting& t, double eps_rank = kDefaultEpsRank) const;
    int t_rank_via_reshuffle(const Splitting& t, double eps_rank = kDefaultEpsRank) const;

    // Certified (gamma, Gamma): exact dense extremes under the guard,
    // otherwise analytic bounds cross-checked against power iteration.
    // gamma <= 0 is returned as-is; solvers reject indefinite operators.
    std::pair<double, double> spectral_interval() const;

    static constexpr long long kDenseGuard = 4096;
    static constexpr int kGramTermGuard = 64;

private:
    std::vector<int> dims_;
    std::vector<ElementaryOp> terms_;
    bool symmetry_declared_ = false;
    std::optional<AnalyticBounds> analytic_;
};

// Right-hand side with an optional per-splitting rank cache keyed by the
// splitting label.
struct RhsTensor {
    Tensor b;
    std::map<std::string, long long> declared_ranks;

    long long rank_for(const Splitting& t, double eps_rank) const {
        auto it = declared_ranks.find(t.label());
        return it != declared_ranks.end() ? it->second : t_rank(b, t, eps_rank);
    }
};

// Model problems -------------------------------------------------------------

enum class ModelKind {
    laplace_like,
    nn_interaction,
    laplace_plus_nn,
    lyapunov,
    generalized_lyapunov,
    diagonal_test,
};

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

struct ModelParams {
    std::vector<int> dims;

    // Explicit coefficients; leave empty to generate from the intervals below.
    std::vector<Eigen::MatrixXd> a_factors; // per mode (laplace family, diagonal_test)
    std::vector<Eigen::MatrixXd> b_factors; // modes 1..d-1 (interaction left)
    std::vector<Eigen::MatrixXd> c_factors; // modes 2..d   (interaction right)
    Eigen::MatrixXd a;                      // lyapunov family coefficient
    Eigen::MatrixXd c;                      // generalized lyapunov coefficient

    double gamma_a = 1.0;
    double gamma_a_upper = 2.0; // Gamma_A
    double gamma_b_upper = 0.0; // Gamma_B
    double gamma_c_upper = 0.0; // Gamma_C
    std::uint64_t seed = 0;
};

KronSumOperator build_model(ModelKind kind, const ModelParams& params);

} // namespace lowrank
