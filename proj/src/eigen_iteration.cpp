#include "lowrank/eigen_iteration.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lowrank/rng.hpp"

namespace lowrank {

std::tuple<double, double, double, Tensor> smallest_pair(const KronSumOperator& op) {
    require(op.symmetry_declared(), errc::not_symmetric, "eigen problems require a symmetric operator");
    require(op.total_dim() <= KronSumOperator::kDenseGuard, errc::capacity_exceeded,
            "eigen experiments run at desk scale (total dimension <= 4096)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.assemble_dense());
    require(es.info() == Eigen::Success, errc::no_convergence, "eigensolver failed");
    const auto& ev = es.eigenvalues();
    require(ev.size() >= 2, errc::operator_shape, "need at least two eigenvalues");
    const double lambda1 = ev(0);
    const double lambda2 = ev(1);
    const double gamma_top = ev(ev.size() - 1);
    require(lambda2 - lambda1 > 1e-8 * std::max(1.0, std::abs(lambda1)), errc::lambda1_degenerate,
            "smallest eigenvalue is not simple");

    Eigen::VectorXd v = es.eigenvectors().col(0);
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    v.normalize();

    Tensor u_star = Tensor::zeros(op.dims());
    u_star.vec() = v;
    const double resid = (op.apply(u_star) - lambda1 * u_star).norm();
    require(resid <= 1e-10 * std::max(1.0, std::abs(lambda1)), errc::no_convergence,
            "eigenpair residual above 1e-10");
    return {lambda1, lambda2, gamma_top, std::move(u_star)};
}

EigenSetup EigenSetup::from_operator(const KronSumOperator& op) {
    auto [lambda1, lambda2, gamma_top, u_star] = smallest_pair(op);
    EigenSetup setup;
    setup.lambda1 = lambda1;
    setup.lambda2 = lambda2;
    setup.Gamma = gamma_top;
    setup.delta = lambda2 - lambda1;
    setup.Delta = setup.delta / (gamma_top - lambda1);
    setup.beta = 2.0 / (setup.delta + gamma_top - lambda1);
    setup.q = (1.0 - setup.Delta) / (1.0 + setup.Delta);
    setup.u_star = std::move(u_star);
    require(setup.Delta > 0.0 && setup.Delta <= 1.0, errc::argument_domain,
            "relative gap must lie in (0,1]");
    return setup;
}

IterationTrace shifted_richardson_run(const EigenSetup& setup, const KronSumOperator& op,
                                      const Tensor& u0, int n_steps,
                                      const std::vector<Splitting>& splittings, double eps_rank,
                                      std::optional<double> target_coefficient) {
    require(u0.dims() == op.dims(), errc::dims_mismatch, "start dims do not match the operator");
    require(n_steps >= 0, errc::argument_domain, "n_steps must be nonnegative");
    require((static_cast<long long>(n_steps) + 1) * op.total_dim() <= kIterateEntryGuard,
            errc::capacity_exceeded, "dense iterates would exceed the entry guard");
    check_eps_rank(eps_rank);

    const double start_overlap = u0.dot(setup.u_star);
    const double coeff = target_coefficient.value_or(start_overlap);
    const double defect = std::abs(start_overlap - coeff);
    if (defect > 1e-10 * std::max(1.0, u0.norm())) {
        fail(errc::inadmissible_start,
             "start violates the affine slice: |<u0,u*> - c| = " + std::to_string(defect));
    }

    IterationTrace trace;
    trace.eigen_columns = true;
    trace.fixed_point = coeff * setup.u_star;
    for (const auto& t : splittings) {
        const RankGrowth growth = rank_growth(op, t, eps_rank, true);
        trace.books.push_back(RankBook{t, max_splitting_rank(op.dims(), t), growth.operator_rank,
                                       growth.growth, growth.identity_refined, 0});
    }

    std::vector<long long> bound(splittings.size());
    Tensor u = u0;
    double prev_error = 0.0;
    const double scale = 1.0 + setup.beta * setup.lambda1;
    for (int n = 0; n <= n_steps; ++n) {
        StepRecord rec;
        rec.step = n;
        rec.error = (u - trace.fixed_point).norm();
        rec.residual = (op.apply(u) - setup.lambda1 * u).norm();
        rec.overlap = u.dot(setup.u_star);
        if (n > 0 && prev_error > 0.0) rec.q_step = rec.error / prev_error;
        for (std::size_t i = 0; i < trace.books.size(); ++i) {
            const auto& book = trace.books[i];
            const long long measured = t_rank(u, book.t, eps_rank);
            if (n == 0)
                bound[i] = measured;
            else
                bound[i] = std::min(book.max_rank, static_cast<long long>(book.growth) * bound[i]);
            rec.ranks.push_back(measured);
            rec.rank_bounds.push_back(bound[i]);
        }
        trace.iterates.push_back(u);
        prev_error = rec.error;
        trace.steps.push_back(std::move(rec));
        if (n < n_steps) {
            Tensor au = op.apply(u);
            u *= scale;
            u -= setup.beta * au;
        }
    }
    return trace;
}

Tensor rank_one_start(const Tensor& u_star, const Tensor& u_hat0, const Splitting& t) {
    require(u_hat0.dims() == u_star.dims(), errc::dims_mismatch, "start dims mismatch");
    require(t_rank(u_hat0, t) == 1, errc::rank_one_required,
            "the unscaled start must have t-rank one");
    const double ip = u_star.dot(u_hat0);
    require(std::abs(ip) > 1e-12 * u_hat0.norm(), errc::orthogonal_start,
            "start is numerically orthogonal to the eigenvector");
    const double norm_sq = u_star.dot(u_star);
    return (norm_sq / ip) * u_hat0;
}

namespace {

// Leading singular pair of the t-unfolding as a unit t-rank-one tensor.
Tensor leading_pair(const Tensor& u, const Splitting& t) {
    Eigen::MatrixXd m = unfold(u, t);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(svd.info() == Eigen::Success, errc::no_convergence, "SVD did not converge");
    const Eigen::MatrixXd pair = svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
    return fold(pair, u.dims(), t);
}

} // namespace

Pi1Bounds pi1_upper_bounds(const Tensor& u_star, const Splitting& t) {
    const double norm = u_star.norm();
    require(norm > 0.0, errc::zero_tensor, "rank-one distance of the zero tensor is undefined");
    const double theta = overlap_theta(u_star, t);
    const double d_t = static_cast<double>(max_splitting_rank(u_star.dims(), t));
    const Tensor start = rank_one_start(u_star, leading_pair(u_star, t), t);
    return Pi1Bounds{norm / theta, std::sqrt(d_t) * norm, (start - u_star).norm()};
}

namespace {

void check_overlap_hypothesis(double q, double growth) {
    require(q >= 0.0 && q < 1.0, errc::argument_domain, "q must lie in [0,1)");
    require(growth > 1.0, errc::argument_domain, "rank growth factor must exceed 1");
    require(q * q * growth < 1.0, errc::hypothesis_unmet,
            "overlap bound requires q^2 R < 1");
}

} // namespace

long long overlap_bound_exponent(double q, double growth) {
    check_overlap_hypothesis(q, growth);
    if (q == 0.0) return 1;
    const double x = -std::log(2.0) / std::log(q * q * growth);
    const double nearest = std::nearbyint(x);
    long long n = std::abs(x - nearest) <= 1e-12 ? static_cast<long long>(nearest)
                                                 : static_cast<long long>(std::ceil(x));
    return std::max<long long>(1, n);
}

double overlap_lower_bound(double q, double growth) {
    const long long n = overlap_bound_exponent(q, growth);
    return std::sqrt(0.5 * pow_int(1.0 / growth, n));
}

double eigenvector_tail_bound(long long r, double q, double growth, double pi1) {
    return tail_bound_algebraic(r, q, growth, 1.0, pi1);
}

double eigenvector_tail_bound_via_overlap(long long r, double q, double growth, double norm_u) {
    check_overlap_hypothesis(q, growth);
    require(r >= 1, errc::argument_domain, "rank must be positive");
    const long long n = overlap_bound_exponent(q, growth);
    return std::sqrt(2.0) * std::sqrt(pow_int(growth, n)) * norm_u *
           std::pow(static_cast<double>(r), -decay_exponent(q, growth));
}

TwoStepProbe two_step_rank_probe(const KronSumOperator& op, const EigenSetup& setup,
                                 const Splitting& t, int samples, std::uint64_t seed,
                                 double eps_rank) {
    require(samples >= 1, errc::argument_domain, "need at least one sample");
    check_eps_rank(eps_rank);
    require(op.dims().size() == 2 && op.terms().size() == 3, errc::operator_shape,
            "two-step probe expects A1 x I + I x A2 + B x C");
    bool left_identity = false, right_identity = false, coupling = false;
    for (const auto& term : op.terms()) {
        const bool id0 = term.identity_flags[0];
        const bool id1 = term.identity_flags[1];
        if (!id0 && id1) left_identity = true;
        else if (id0 && !id1) right_identity = true;
        else if (!id0 && !id1) coupling = true;
    }
    require(left_identity && right_identity && coupling, errc::operator_shape,
            "two-step probe expects identity flags matching A1 x I + I x A2 + B x C");

    TwoStepProbe probe;
    const double scale = 1.0 + setup.beta * setup.lambda1;
    for (int s = 0; s < samples; ++s) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
        Tensor u_hat = Tensor::zeros(op.dims());
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Eigen::VectorXd x = rng.normal_vector(op.dims()[0]);
            Eigen::VectorXd y = rng.normal_vector(op.dims()[1]);
            u_hat = Tensor::rank_one({x, y});
            u_hat *= 1.0 / u_hat.norm();
            if (std::abs(setup.u_star.dot(u_hat)) > 1e-6) break;
            require(attempt + 1 < 1000, errc::orthogonal_start,
                    "could not draw a non-orthogonal rank-one start");
        }
        Tensor u0 = rank_one_start(setup.u_star, u_hat, t);
        Tensor u1 = scale * u0 - setup.beta * op.apply(u0);
        Tensor u2 = scale * u1 - setup.beta * op.apply(u1);
        const auto r0 = static_cast<double>(std::max<long long>(1, t_rank(u0, t, eps_rank)));
        probe.max_one_step_factor =
            std::max(probe.max_one_step_factor, static_cast<double>(t_rank(u1, t, eps_rank)) / r0);
        probe.max_two_step_factor =
            std::max(probe.max_two_step_factor, static_cast<double>(t_rank(u2, t, eps_rank)) / r0);
        ++probe.samples;
    }
    return probe;
}

} // namespace lowrank
