#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "lowrank/kron.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "laplace_like") return ModelKind::laplace_like;
    if (name == "nn_interaction") return ModelKind::nn_interaction;
    if (name == "laplace_plus_nn") return ModelKind::laplace_plus_nn;
    if (name == "lyapunov") return ModelKind::lyapunov;
    if (name == "generalized_lyapunov") return ModelKind::generalized_lyapunov;
    if (name == "diagonal_test") return ModelKind::diagonal_test;
    fail(errc::config_invalid, "unknown model kind '" + name + "'");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::laplace_like:         return "laplace_like";
        case ModelKind::nn_interaction:       return "nn_interaction";
        case ModelKind::laplace_plus_nn:      return "laplace_plus_nn";
        case ModelKind::lyapunov:             return "lyapunov";
        case ModelKind::generalized_lyapunov: return "generalized_lyapunov";
        case ModelKind::diagonal_test:        return "diagonal_test";
    }
    return "unknown";
}

namespace {

void check_symmetric_factor(const Eigen::MatrixXd& f, const char* what) {
    require(f.rows() == f.cols(), errc::construction,
            std::string(what) + " factor must be square");
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    require((f - f.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, errc::construction,
            std::string(what) + " factor must be symmetric");
}

std::pair<double, double> factor_extremes(const Eigen::MatrixXd& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
    require(es.info() == Eigen::Success, errc::no_convergence, "factor eigensolver failed");
    return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
}

Eigen::MatrixXd symmetrized(Eigen::MatrixXd f) { return 0.5 * (f + f.transpose()).eval(); }

struct LaplaceFamilyPieces {
    std::vector<Eigen::MatrixXd> a; // per mode
    std::vector<Eigen::MatrixXd> b; // modes 1..d-1
    std::vector<Eigen::MatrixXd> c; // modes 2..d
    double gamma_a, upper_a, upper_b, upper_c;
};

// Coefficients for L and V: explicit ones are validated and their spectral
// intervals measured; missing ones are generated with the declared interval
// endpoints pinned, so the declared bounds are tight.
LaplaceFamilyPieces laplace_pieces(ModelKind kind, const ModelParams& p, bool need_a, bool need_v) {
    const int d = static_cast<int>(p.dims.size());
    LaplaceFamilyPieces out;

    if (need_a) {
        if (!p.a_factors.empty()) {
            require(static_cast<int>(p.a_factors.size()) == d, errc::construction,
                    "need one A factor per mode");
            double lo = 0.0, hi = 0.0;
            for (int mu = 0; mu < d; ++mu) {
                check_symmetric_factor(p.a_factors[static_cast<std::size_t>(mu)], "A");
                require(p.a_factors[static_cast<std::size_t>(mu)].rows() == p.dims[static_cast<std::size_t>(mu)],
                        errc::construction, "A factor shape does not match dims");
                if (kind == ModelKind::diagonal_test)
                    require(p.a_factors[static_cast<std::size_t>(mu)].isDiagonal(0.0),
                            errc::construction, "diagonal_test factors must be diagonal");
                auto [flo, fhi] = factor_extremes(p.a_factors[static_cast<std::size_t>(mu)]);
                lo = mu == 0 ? flo : std::min(lo, flo);
                hi = mu == 0 ? fhi : std::max(hi, fhi);
                out.a.push_back(symmetrized(p.a_factors[static_cast<std::size_t>(mu)]));
            }
            out.gamma_a = lo;
            out.upper_a = hi;
        } else {
            require(p.gamma_a > 0.0 && p.gamma_a_upper >= p.gamma_a, errc::construction,
                    "generator needs 0 < gamma_A <= Gamma_A");
            for (int mu = 0; mu < d; ++mu) {
                Rng rng = Rng::stream(p.seed, 0x10 + static_cast<std::uint64_t>(mu));
                out.a.push_back(random_symmetric_with_spectrum(
                    p.dims[static_cast<std::size_t>(mu)], p.gamma_a, p.gamma_a_upper, rng));
            }
            out.gamma_a = p.gamma_a;
            out.upper_a = p.gamma_a_upper;
        }
    }

    if (need_v) {
        auto build_side = [&](const std::vector<Eigen::MatrixXd>& given, int count, int first_mode,
                              double upper, std::uint64_t tag, const char* what) {
            std::vector<Eigen::MatrixXd> side;
            double hi = 0.0;
            if (!given.empty()) {
                require(static_cast<int>(given.size()) == count, errc::construction,
                        std::string(what) + " factor count does not match the mode count");
                for (int k = 0; k < count; ++k) {
                    check_symmetric_factor(given[static_cast<std::size_t>(k)], what);
                    require(given[static_cast<std::size_t>(k)].rows() ==
                                p.dims[static_cast<std::size_t>(first_mode + k)],
                            errc::construction, std::string(what) + " factor shape mismatch");
                    auto [flo, fhi] = factor_extremes(given[static_cast<std::size_t>(k)]);
                    require(flo >= -1e-12 * std::max(1.0, std::abs(fhi)), errc::construction,
                            std::string(what) + " factors must be positive semidefinite");
                    hi = std::max(hi, fhi);
                    side.push_back(symmetrized(given[static_cast<std::size_t>(k)]));
                }
            } else {
                require(upper >= 0.0, errc::construction,
                        std::string(what) + " interval must be nonnegative");
                for (int k = 0; k < count; ++k) {
                    Rng rng = Rng::stream(p.seed, tag + static_cast<std::uint64_t>(k));
                    side.push_back(random_symmetric_with_spectrum(
                        p.dims[static_cast<std::size_t>(first_mode + k)], 0.0, upper, rng));
                }
                hi = upper;
            }
            return std::make_pair(side, hi);
        };
        auto [bs, bhi] = build_side(p.b_factors, d - 1, 0, p.gamma_b_upper, 0x200, "B");
        auto [cs, chi] = build_side(p.c_factors, d - 1, 1, p.gamma_c_upper, 0x300, "C");
        out.b = std::move(bs);
        out.c = std::move(cs);
        out.upper_b = bhi;
        out.upper_c = chi;
    }
    return out;
}

std::vector<ElementaryOp> laplace_terms(const std::vector<int>& dims,
                                        const std::vector<Eigen::MatrixXd>& a) {
    const int d = static_cast<int>(dims.size());
    std::vector<ElementaryOp> terms;
    for (int mu = 0; mu < d; ++mu) {
        std::vector<Eigen::MatrixXd> factors;
        for (int k = 0; k < d; ++k)
            factors.push_back(k == mu ? a[static_cast<std::size_t>(mu)]
                                      : Eigen::MatrixXd::Identity(dims[static_cast<std::size_t>(k)],
                                                                  dims[static_cast<std::size_t>(k)]));
        terms.push_back(ElementaryOp::from_factors(std::move(factors)));
    }
    return terms;
}

std::vector<ElementaryOp> interaction_terms(const std::vector<int>& dims,
                                            const std::vector<Eigen::MatrixXd>& b,
                                            const std::vector<Eigen::MatrixXd>& c) {
    const int d = static_cast<int>(dims.size());
    std::vector<ElementaryOp> terms;
    for (int mu = 0; mu + 1 < d; ++mu) {
        std::vector<Eigen::MatrixXd> factors;
        for (int k = 0; k < d; ++k) {
            if (k == mu)
                factors.push_back(b[static_cast<std::size_t>(mu)]);
            else if (k == mu + 1)
                factors.push_back(c[static_cast<std::size_t>(mu)]);
            else
                factors.push_back(Eigen::MatrixXd::Identity(dims[static_cast<std::size_t>(k)],
                                                            dims[static_cast<std::size_t>(k)]));
        }
        terms.push_back(ElementaryOp::from_factors(std::move(factors)));
    }
    return terms;
}

std::string bounds_note(const std::string& family, double ga, double ua, double ub, double uc) {
    std::ostringstream out;
    out << family << " bounds from intervals gamma_A=" << ga << " Gamma_A=" << ua;
    if (ub > 0.0 || uc > 0.0) out << " Gamma_B=" << ub << " Gamma_C=" << uc;
    return out.str();
}

} // namespace

KronSumOperator build_model(ModelKind kind, const ModelParams& p) {
    const int d = static_cast<int>(p.dims.size());
    require(d >= 1, errc::construction, "model needs at least one mode");

    switch (kind) {
        case ModelKind::laplace_like:
        case ModelKind::diagonal_test: {
            require(d >= 2, errc::construction, "laplace-like models need d >= 2");
            auto pieces = laplace_pieces(kind, p, true, false);
            AnalyticBounds bounds;
            if (kind == ModelKind::diagonal_test) {
                // Diagonal factors commute, so the extremes are exact sums.
                double lo = 0.0, hi = 0.0;
                for (const auto& a : pieces.a) {
                    lo += a.diagonal().minCoeff();
                    hi += a.diagonal().maxCoeff();
                }
                bounds = AnalyticBounds{lo, hi, "exact extremes of a diagonal Kronecker sum"};
            } else {
                bounds = AnalyticBounds{d * pieces.gamma_a, d * pieces.upper_a,
                                        bounds_note("laplace_like", pieces.gamma_a, pieces.upper_a, 0, 0)};
            }
            return KronSumOperator::from_terms(p.dims, laplace_terms(p.dims, pieces.a), true, bounds);
        }

        case ModelKind::nn_interaction: {
            require(d >= 2, errc::construction, "interaction models need d >= 2");
            auto pieces = laplace_pieces(kind, p, false, true);
            AnalyticBounds bounds{0.0, (d - 1) * pieces.upper_b * pieces.upper_c,
                                  bounds_note("nn_interaction", 0, 0, pieces.upper_b, pieces.upper_c)};
            return KronSumOperator::from_terms(p.dims, interaction_terms(p.dims, pieces.b, pieces.c),
                                               true, bounds);
        }

        case ModelKind::laplace_plus_nn: {
            require(d >= 2, errc::construction, "laplace_plus_nn needs d >= 2");
            auto pieces = laplace_pieces(kind, p, true, true);
            std::vector<ElementaryOp> terms = laplace_terms(p.dims, pieces.a);
            for (auto& term : interaction_terms(p.dims, pieces.b, pieces.c))
                terms.push_back(std::move(term));
            AnalyticBounds bounds{
                d * pieces.gamma_a,
                d * pieces.upper_a + (d - 1) * pieces.upper_b * pieces.upper_c,
                bounds_note("laplace_plus_nn", pieces.gamma_a, pieces.upper_a, pieces.upper_b,
                            pieces.upper_c)};
            return KronSumOperator::from_terms(p.dims, std::move(terms), true, bounds);
        }

        case ModelKind::lyapunov:
        case ModelKind::generalized_lyapunov: {
            require(d == 2 && p.dims[0] == p.dims[1], errc::construction,
                    "lyapunov models act on d = 2 with equal mode sizes");
            require(p.a.size() > 0, errc::construction, "lyapunov models need the coefficient A");
            check_symmetric_factor(p.a, "A");
            require(p.a.rows() == p.dims[0], errc::construction, "A shape does not match dims");
            const Eigen::MatrixXd a = symmetrized(p.a);
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p.dims[0], p.dims[0]);
            auto [alo, ahi] = factor_extremes(a);

            std::vector<ElementaryOp> terms;
            terms.push_back(ElementaryOp::from_factors({a, eye}));
            terms.push_back(ElementaryOp::from_factors({eye, a}));

            if (kind == ModelKind::lyapunov) {
                // The two terms commute: extremes are exact eigenvalue sums.
                AnalyticBounds bounds{2 * alo, 2 * ahi, "exact extremes of A (+) A"};
                return KronSumOperator::from_terms(p.dims, std::move(terms), true, bounds);
            }

            require(p.c.size() > 0, errc::construction, "generalized_lyapunov needs C");
            check_symmetric_factor(p.c, "C");
            require(p.c.rows() == p.dims[0], errc::construction, "C shape does not match dims");
            const Eigen::MatrixXd c = symmetrized(p.c);
            terms.push_back(ElementaryOp::from_factors({c, c}));
            auto [clo, chi] = factor_extremes(c);
            // Eigenvalues of C x C are the pairwise products; extremes of the
            // sum by eigenvalue addition bounds.
            const double pmin = std::min({clo * clo, clo * chi, chi * chi});
            const double pmax = std::max({clo * clo, clo * chi, chi * chi});
            AnalyticBounds bounds{2 * alo + std::min(0.0, pmin), 2 * ahi + std::max(0.0, pmax),
                                  "eigenvalue-sum bounds for A (+) A + C x C"};
            return KronSumOperator::from_terms(p.dims, std::move(terms), true, bounds);
        }
    }
    fail(errc::construction, "unhandled model kind");
}

} // namespace lowrank
