#include "lowrank/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace lowrank {

void check_eps_rank(double eps_rank) {
    require(eps_rank > 0.0 && eps_rank < 1.0, errc::eps_rank_range,
            "eps_rank must lie in (0,1)");
}

namespace {

// Jacobi is near machine precision on the small unfoldings this library is
// used at; divide-and-conquer takes over for larger ones. Both are
// deterministic for a fixed input on a fixed build.
Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& m) {
    if (std::min(m.rows(), m.cols()) <= 512) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        require(svd.info() == Eigen::Success, errc::no_convergence, "SVD did not converge");
        return svd.singularValues();
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    require(svd.info() == Eigen::Success, errc::no_convergence, "SVD did not converge");
    return svd.singularValues();
}

} // namespace

long long SingularSpectrum::numerical_rank(double eps_rank) const {
    check_eps_rank(eps_rank);
    if (values.empty() || values.front() <= 0.0) return 0;
    const double threshold = eps_rank * values.front();
    long long r = 0;
    while (r < dim() && values[static_cast<std::size_t>(r)] > threshold) ++r;
    return r;
}

double SingularSpectrum::tail(long long r) const {
    require(r >= 0, errc::argument_domain, "tail index must be nonnegative");
    double sum = 0.0;
    for (long long k = dim() - 1; k >= r; --k) {
        const double s = values[static_cast<std::size_t>(k)];
        sum += s * s;
    }
    return std::sqrt(sum);
}

std::vector<double> SingularSpectrum::tail_curve() const {
    // curve[r-1] = tau_r for r = 1..D; suffix sums keep the tails consistent
    // with the spectrum entry by entry.
    std::vector<double> curve(values.size());
    double sum = 0.0;
    for (long long r = dim() - 1; r >= 0; --r) {
        curve[static_cast<std::size_t>(r)] = std::sqrt(sum);
        const double s = values[static_cast<std::size_t>(r)];
        sum += s * s;
    }
    return curve;
}

SingularSpectrum singular_spectrum(const Tensor& u, const Splitting& t) {
    Eigen::VectorXd sv = singular_values_of(unfold(u, t));
    const long long d_t = max_splitting_rank(u.dims(), t);
    std::vector<double> values(static_cast<std::size_t>(d_t), 0.0);
    for (long long k = 0; k < std::min<long long>(d_t, sv.size()); ++k)
        values[static_cast<std::size_t>(k)] = std::max(0.0, sv[k]);
    return SingularSpectrum{t, std::move(values), u.norm()};
}

long long t_rank(const Tensor& u, const Splitting& t, double eps_rank) {
    check_eps_rank(eps_rank);
    return singular_spectrum(u, t).numerical_rank(eps_rank);
}

double tail_error(const Tensor& u, const Splitting& t, long long r) {
    return singular_spectrum(u, t).tail(r);
}

namespace {

template <typename Svd>
Tensor truncate_with(const Eigen::MatrixXd& m, const Tensor& u, const Splitting& t, long long r) {
    Svd svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(svd.info() == Eigen::Success, errc::no_convergence, "SVD did not converge");
    const auto k = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd trunc = svd.matrixU().leftCols(k) *
                            svd.singularValues().head(k).asDiagonal() *
                            svd.matrixV().leftCols(k).transpose();
    return fold(trunc, u.dims(), t);
}

} // namespace

Tensor truncate(const Tensor& u, const Splitting& t, long long r) {
    require(r >= 1, errc::argument_domain, "truncation rank must be positive");
    if (r >= max_splitting_rank(u.dims(), t)) return u;
    const Eigen::MatrixXd m = unfold(u, t);
    if (std::min(m.rows(), m.cols()) <= 512)
        return truncate_with<Eigen::JacobiSVD<Eigen::MatrixXd>>(m, u, t, r);
    return truncate_with<Eigen::BDCSVD<Eigen::MatrixXd>>(m, u, t, r);
}

EntropyPair von_neumann_entropy(const Tensor& u, const Splitting& t) {
    const double norm = u.norm();
    require(norm > 0.0, errc::zero_tensor, "entropy of the zero tensor is undefined");
    const SingularSpectrum spec = singular_spectrum(u, t);
    double signed_sum = 0.0;
    for (double s : spec.values) {
        const double p = (s / norm) * (s / norm);
        if (p > 0.0) signed_sum += p * std::log(p);
    }
    return EntropyPair{signed_sum, -signed_sum};
}

double overlap_theta(const Tensor& u, const Splitting& t) {
    const double norm = u.norm();
    require(norm > 0.0, errc::zero_tensor, "overlap of the zero tensor is undefined");
    const SingularSpectrum spec = singular_spectrum(u, t);
    return std::min(1.0, spec.values.front() / norm);
}

double tt_aggregate_error(const Tensor& u, const std::vector<long long>& ranks) {
    require(u.order() >= 2, errc::argument_domain, "TT aggregation needs order >= 2");
    require(static_cast<int>(ranks.size()) == u.order() - 1, errc::dims_mismatch,
            "need one rank per TT splitting");
    double sum = 0.0;
    for (int mu = 1; mu < u.order(); ++mu) {
        require(ranks[static_cast<std::size_t>(mu - 1)] >= 1, errc::argument_domain,
                "TT ranks must be positive");
        const double tau = tail_error(u, Splitting::tt_prefix(mu, u.order()),
                                      ranks[static_cast<std::size_t>(mu - 1)]);
        sum += tau * tau;
    }
    return std::sqrt(sum);
}

} // namespace lowrank
