#include "lowrank/richardson.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "lowrank/io.hpp"

namespace lowrank {

SpectralData SpectralData::from_interval(double gamma, double Gamma) {
    require(gamma > 0.0, errc::not_spd, "operator must be positive definite (gamma > 0)");
    require(Gamma >= gamma, errc::argument_domain, "need Gamma >= gamma");
    SpectralData sd;
    sd.gamma = gamma;
    sd.Gamma = Gamma;
    sd.kappa = Gamma / gamma;
    sd.alpha = 2.0 / (gamma + Gamma);
    sd.q = contraction_rate(sd.kappa);
    return sd;
}

SpectralData SpectralData::from_operator(const KronSumOperator& op) {
    auto [gamma, Gamma] = op.spectral_interval();
    return from_interval(gamma, Gamma);
}

RankGrowth rank_growth(const KronSumOperator& op, const Splitting& t, double eps_rank,
                       bool eigen_iteration) {
    const int r_a = op.t_rank(t, eps_rank);
    bool refined = false;
    for (const auto& term : op.terms())
        if (term.identity_on(t) || term.identity_on_complement(t)) {
            refined = true;
            break;
        }
    const int base = eigen_iteration ? r_a + 1 : r_a + 2;
    return RankGrowth{r_a, refined ? base - 1 : base, refined};
}

void IterationTrace::write_csv(std::ostream& out) const {
    out << "step,error,residual";
    for (const auto& book : books)
        out << ",rank_" << book.t.label() << ",rank_bound_" << book.t.label();
    if (eigen_columns) out << ",overlap,q_step";
    out << "\n";
    for (const auto& rec : steps) {
        out << rec.step << ',' << format_double(rec.error) << ',' << format_double(rec.residual);
        for (std::size_t i = 0; i < books.size(); ++i)
            out << ',' << rec.ranks[i] << ',' << rec.rank_bounds[i];
        if (eigen_columns) out << ',' << format_double(rec.overlap) << ',' << format_double(rec.q_step);
        out << "\n";
    }
}

namespace {

Tensor cg_solve(const KronSumOperator& op, const Tensor& b, double rel_tol) {
    Tensor x = Tensor::zeros(b.dims());
    Tensor r = b;
    Tensor p = r;
    const double bnorm = b.norm();
    if (bnorm == 0.0) return x;
    double rs = r.dot(r);
    const long long max_iters = 20 * b.size() + 100;
    for (long long it = 0; it < max_iters; ++it) {
        if (std::sqrt(rs) <= rel_tol * bnorm) return x;
        Tensor ap = op.apply(p);
        const double denom = p.dot(ap);
        require(denom > 0.0, errc::not_spd, "conjugate gradients hit a nonpositive curvature");
        const double step = rs / denom;
        x += step * p;
        r -= step * ap;
        const double rs_next = r.dot(r);
        p *= rs_next / rs;
        p += r;
        rs = rs_next;
    }
    fail(errc::no_convergence, "conjugate gradients did not reach the 1e-12 residual");
}

} // namespace

Tensor dense_solve(const KronSumOperator& op, const Tensor& b) {
    require(b.dims() == op.dims(), errc::dims_mismatch, "rhs dims do not match the operator");
    const double bnorm = b.norm();

    if (op.total_dim() > KronSumOperator::kDenseGuard) return cg_solve(op, b, 1e-12);

    const Eigen::MatrixXd dense = op.assemble_dense();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(dense);
    require(ldlt.info() == Eigen::Success && ldlt.isPositive(), errc::not_spd,
            "dense solve requires a positive definite operator");
    Eigen::VectorXd x = ldlt.solve(b.vec());
    // A couple of refinement sweeps push the residual to the contract.
    for (int sweep = 0; sweep < 3; ++sweep) {
        Eigen::VectorXd res = b.vec() - dense * x;
        if (bnorm == 0.0 || res.norm() <= 1e-12 * bnorm) break;
        x += ldlt.solve(res).eval();
    }
    require(bnorm == 0.0 || (b.vec() - dense * x).norm() <= 1e-12 * bnorm, errc::no_convergence,
            "dense solve did not reach the 1e-12 residual");
    Tensor out = Tensor::zeros(op.dims());
    out.vec() = x;
    return out;
}

IterationTrace richardson_run(const KronSumOperator& op, const RhsTensor& rhs, const Tensor& u0,
                              const SpectralData& sd, int n_steps,
                              const std::vector<Splitting>& splittings, double eps_rank) {
    require(rhs.b.dims() == op.dims() && u0.dims() == op.dims(), errc::dims_mismatch,
            "operator, rhs and start must share dims");
    require(n_steps >= 0, errc::argument_domain, "n_steps must be nonnegative");
    require(sd.gamma > 0.0, errc::not_spd, "Richardson needs certified gamma > 0");
    require((static_cast<long long>(n_steps) + 1) * op.total_dim() <= kIterateEntryGuard,
            errc::capacity_exceeded, "dense iterates would exceed the entry guard");
    check_eps_rank(eps_rank);

    IterationTrace trace;
    trace.fixed_point = dense_solve(op, rhs.b);
    for (const auto& t : splittings) {
        const RankGrowth growth = rank_growth(op, t, eps_rank, false);
        trace.books.push_back(RankBook{t, max_splitting_rank(op.dims(), t), growth.operator_rank,
                                       growth.growth, growth.identity_refined,
                                       rhs.rank_for(t, eps_rank)});
    }

    std::vector<long long> bound(splittings.size());
    Tensor u = u0;
    double prev_error = 0.0;
    for (int n = 0; n <= n_steps; ++n) {
        StepRecord rec;
        rec.step = n;
        rec.error = (u - trace.fixed_point).norm();
        rec.residual = (op.apply(u) - rhs.b).norm();
        if (n > 0 && prev_error > 0.0) rec.q_step = rec.error / prev_error;
        for (std::size_t i = 0; i < trace.books.size(); ++i) {
            const auto& book = trace.books[i];
            const long long measured = t_rank(u, book.t, eps_rank);
            if (n == 0) {
                bound[i] = measured;
            } else {
                // One step maps rank r to at most r + r_A r + r_b, one r less
                // under the identity refinement; D^{(t)} always caps it.
                const long long factor = book.identity_refined ? book.operator_rank
                                                               : book.operator_rank + 1;
                bound[i] = std::min(book.max_rank, factor * bound[i] + book.rhs_rank);
            }
            rec.ranks.push_back(measured);
            rec.rank_bounds.push_back(bound[i]);
        }
        trace.iterates.push_back(u);
        prev_error = rec.error;
        trace.steps.push_back(std::move(rec));
        if (n < n_steps) {
            Tensor residual = op.apply(u);
            residual -= rhs.b;
            u -= sd.alpha * residual;
        }
    }
    return trace;
}

IterationTrace richardson_run_truncated(const KronSumOperator& op, const RhsTensor& rhs,
                                        const Tensor& u0, const SpectralData& sd, int n_steps,
                                        const Splitting& t, double trunc_tol, double eps_rank) {
    check_eps_rank(trunc_tol);
    IterationTrace trace;
    trace.fixed_point = dense_solve(op, rhs.b);
    const RankGrowth growth = rank_growth(op, t, eps_rank, false);
    const long long d_t = max_splitting_rank(op.dims(), t);
    trace.books.push_back(RankBook{t, d_t, growth.operator_rank, growth.growth,
                                   growth.identity_refined, rhs.rank_for(t, eps_rank)});
    Tensor u = u0;
    double prev_error = 0.0;
    for (int n = 0; n <= n_steps; ++n) {
        StepRecord rec;
        rec.step = n;
        rec.error = (u - trace.fixed_point).norm();
        rec.residual = (op.apply(u) - rhs.b).norm();
        if (n > 0 && prev_error > 0.0) rec.q_step = rec.error / prev_error;
        rec.ranks.push_back(t_rank(u, t, eps_rank));
        rec.rank_bounds.push_back(d_t);
        trace.iterates.push_back(u);
        prev_error = rec.error;
        trace.steps.push_back(std::move(rec));
        if (n < n_steps) {
            Tensor residual = op.apply(u);
            residual -= rhs.b;
            u -= sd.alpha * residual;
            const long long r = std::max<long long>(1, t_rank(u, t, trunc_tol));
            u = truncate(u, t, r);
        }
    }
    return trace;
}

} // namespace lowrank
