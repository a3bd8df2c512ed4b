#pragma once

#include <vector>

#include "lowrank/tensor.hpp"

namespace lowrank {

inline constexpr double kDefaultEpsRank = 1e-10;

// Singular values of the t-unfolding, nonincreasing, of length D^{(t)}.
struct SingularSpectrum {
    Splitting splitting;
    std::vector<double> values;
    double norm_h = 0.0; // ||u||_H

    long long dim() const { return static_cast<long long>(values.size()); }
    // Number of values above eps_rank * sigma_1; 0 for the zero tensor.
    long long numerical_rank(double eps_rank) const;
    // tau_r = sqrt(sum_{k>r} sigma_k^2); tau_0 = ||u||, tau_r = 0 for r >= D.
    double tail(long long r) const;
    std::vector<double> tail_curve() const; // tau_1 .. tau_D
};

SingularSpectrum singular_spectrum(const Tensor& u, const Splitting& t);

long long t_rank(const Tensor& u, const Splitting& t, double eps_rank = kDefaultEpsRank);
double tail_error(const Tensor& u, const Splitting& t, long long r);
// Best t-rank-r approximation by truncated SVD (ties resolved by the
// deterministic SVD ordering); exact copy for r >= D^{(t)}.
Tensor truncate(const Tensor& u, const Splitting& t, long long r);

struct EntropyPair {
    double paper_signed; // sum sigma_hat^2 * ln(sigma_hat^2), nonpositive
    double conventional; // the negation
};
EntropyPair von_neumann_entropy(const Tensor& u, const Splitting& t);

// sigma_1 / ||u||: largest overlap with a normalized t-rank-one tensor.
double overlap_theta(const Tensor& u, const Splitting& t);

// sqrt(sum_mu tau_{r_mu}^{({1..mu})}(u)^2) over the TT family of splittings.
double tt_aggregate_error(const Tensor& u, const std::vector<long long>& ranks);

void check_eps_rank(double eps_rank);

} // namespace lowrank
