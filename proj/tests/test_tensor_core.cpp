#include <doctest.h>

#include <cmath>

#include "lowrank/spectrum.hpp"
#include "lowrank/tensor.hpp"
#include "oracles.hpp"

using namespace lowrank;

namespace {

Eigen::VectorXd unit(int n, int i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[i] = 1.0;
    return v;
}

} // namespace

TEST_CASE("splitting validation") {
    CHECK_NOTHROW(Splitting({1}, 2));
    CHECK_NOTHROW(Splitting({2, 1}, 3));
    CHECK_THROWS_WITH_AS(Splitting({}, 3), doctest::Contains("splitting_empty"), Error);
    CHECK_THROWS_WITH_AS(Splitting({1, 2}, 2), doctest::Contains("splitting_full"), Error);
    CHECK_THROWS_WITH_AS(Splitting({0}, 2), doctest::Contains("splitting_invalid"), Error);
    CHECK_THROWS_WITH_AS(Splitting({3}, 2), doctest::Contains("splitting_invalid"), Error);
    CHECK_THROWS_WITH_AS(Splitting({1, 1}, 3), doctest::Contains("splitting_invalid"), Error);
    CHECK(Splitting({1, 3}, 4).label() == "t=1-3");
    CHECK(Splitting({1, 3}, 4).complement() == std::vector<int>{2, 4});
}

TEST_CASE("unfold places a rank-one entry where the indices say") {
    // e1 x e2 in R^2 x R^2, t = {1}: single 1 at row 1, col 2 (1-based).
    const Tensor u = Tensor::rank_one({unit(2, 0), unit(2, 1)});
    const Eigen::MatrixXd m = unfold(u, Splitting({1}, 2));
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(0, 1) == 1.0);
    CHECK(m.cwiseAbs().sum() == 1.0);
}

TEST_CASE("unfold then fold is the identity") {
    Rng rng(7);
    const Tensor u = oracles::random_tensor({3, 2, 4}, rng);
    for (const auto& t : {Splitting({1}, 3), Splitting({2}, 3), Splitting({1, 3}, 3)}) {
        const Tensor back = fold(unfold(u, t), u.dims(), t);
        CHECK((back - u).norm() == 0.0);
    }
}

TEST_CASE("unfold matches the index-loop oracle on a 2x3x4 tensor") {
    Rng rng(21);
    const Tensor u = oracles::random_tensor({2, 3, 4}, rng);
    const Splitting t({1, 3}, 3);
    const Eigen::MatrixXd m = unfold(u, t);
    CHECK(m.rows() == 8);
    CHECK(m.cols() == 3);
    const Eigen::MatrixXd expected = oracles::unfold_by_index(u, {1, 3});
    CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unfold is an isometry") {
    Rng rng(3);
    const Tensor u = oracles::random_tensor({4, 3, 2, 3}, rng);
    for (const auto& t : Splitting::tt_family(4))
        CHECK(unfold(u, t).norm() == doctest::Approx(u.norm()).epsilon(1e-14));
}

TEST_CASE("singular spectrum of simple tensors") {
    const Splitting t({1}, 2);

    const Tensor rank1 = Tensor::rank_one({unit(3, 1), unit(4, 2)});
    const SingularSpectrum s1 = singular_spectrum(rank1, t);
    CHECK(s1.dim() == 3);
    CHECK(s1.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s1.values[1] == doctest::Approx(0.0));

    // (e1 x e1 + e2 x e2) / sqrt(2): two equal values 1/sqrt(2).
    Tensor sym = Tensor::rank_one({unit(2, 0), unit(2, 0)});
    sym += Tensor::rank_one({unit(2, 1), unit(2, 1)});
    sym *= 1.0 / std::sqrt(2.0);
    const SingularSpectrum s2 = singular_spectrum(sym, t);
    CHECK(s2.values[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(s2.values[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("singular spectrum matches the Jacobi oracle") {
    Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        const Tensor u = oracles::random_tensor({5, 5}, rng);
        const Splitting t({1}, 2);
        const SingularSpectrum spec = singular_spectrum(u, t);
        const std::vector<double> expected = oracles::jacobi_singular_values(unfold(u, t));
        REQUIRE(spec.values.size() == expected.size());
        for (std::size_t k = 0; k < expected.size(); ++k)
            CHECK(spec.values[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    }
}

TEST_CASE("parseval holds across splittings") {
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const Tensor u = oracles::random_tensor({3, 4, 2}, rng);
        const double norm_sq = u.norm() * u.norm();
        for (const auto& t :
             {Splitting({1}, 3), Splitting({2}, 3), Splitting({3}, 3), Splitting({1, 3}, 3)}) {
            const SingularSpectrum spec = singular_spectrum(u, t);
            double sum = 0.0;
            for (double s : spec.values) sum += s * s;
            CHECK(sum == doctest::Approx(norm_sq).epsilon(1e-10));
        }
    }
}

TEST_CASE("t_rank counts the numerical rank") {
    const Splitting t({1}, 2);
    CHECK(t_rank(Tensor::rank_one({unit(4, 1), unit(5, 0)}), t) == 1);
    CHECK(t_rank(Tensor::zeros({4, 5}), t) == 0);

    // three random rank-one terms in R^5 x R^5 are independent in general
    // position, and the residual spectrum collapses to round-off
    Rng rng(99);
    Tensor sum = Tensor::zeros({5, 5});
    for (int k = 0; k < 3; ++k)
        sum += Tensor::rank_one({rng.normal_vector(5), rng.normal_vector(5)});
    CHECK(t_rank(sum, t) == 3);
    const SingularSpectrum spec = singular_spectrum(sum, t);
    CHECK(spec.values[3] < 1e-10 * spec.values[0]);

    CHECK_THROWS_WITH_AS(t_rank(sum, t, 0.0), doctest::Contains("eps_rank_range"), Error);
    CHECK_THROWS_WITH_AS(t_rank(sum, t, 1.0), doctest::Contains("eps_rank_range"), Error);
}

TEST_CASE("tail errors") {
    const Splitting t({1}, 2);
    Rng rng(5);
    const Tensor u = oracles::random_tensor({4, 4}, rng);
    CHECK(tail_error(u, t, 0) == doctest::Approx(u.norm()).epsilon(1e-12));
    CHECK(tail_error(u, t, 4) == 0.0);
    CHECK(tail_error(u, t, 9) == 0.0);

    // explicit spectrum (1, 0.5): tau_1 = 0.5
    Tensor two = Tensor::rank_one({unit(2, 0), unit(2, 0)});
    Tensor second = Tensor::rank_one({unit(2, 1), unit(2, 1)});
    second *= 0.5;
    two += second;
    CHECK(tail_error(two, t, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tails are monotone and consistent with the spectrum") {
    Rng rng(17);
    const Tensor u = oracles::random_tensor({4, 3, 3}, rng);
    for (const auto& t : Splitting::tt_family(3)) {
        const SingularSpectrum spec = singular_spectrum(u, t);
        for (long long r = 0; r < spec.dim(); ++r) {
            CHECK(spec.tail(r) >= spec.tail(r + 1));
            const double diff = spec.tail(r) * spec.tail(r) - spec.tail(r + 1) * spec.tail(r + 1);
            const double expected = spec.values[static_cast<std::size_t>(r)] *
                                    spec.values[static_cast<std::size_t>(r)];
            CHECK(diff == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("truncate reaches the tail error") {
    const Splitting t({1}, 3);
    Rng rng(23);
    const Tensor u = oracles::random_tensor({4, 4, 4}, rng);
    const SingularSpectrum spec = singular_spectrum(u, t);
    const Tensor trunc = truncate(u, t, 2);
    CHECK((u - trunc).norm() == doctest::Approx(spec.tail(2)).epsilon(1e-10));

    const Tensor rank1 = Tensor::rank_one({unit(4, 0), unit(4, 1), unit(4, 2)});
    CHECK((truncate(rank1, t, 1) - rank1).norm() < 1e-14);
    CHECK((truncate(u, t, 4) - u).norm() == 0.0);
    CHECK((truncate(u, t, 99) - u).norm() == 0.0);
    CHECK_THROWS_WITH_AS(truncate(u, t, 0), doctest::Contains("argument_domain"), Error);
}

TEST_CASE("truncate beats random competitors") {
    Rng rng(31);
    const Splitting t({1}, 2);
    const Tensor u = oracles::random_tensor({6, 7}, rng); // D = 6
    for (long long r = 1; r < 6; ++r) {
        const double best = (u - truncate(u, t, r)).norm();
        for (int rep = 0; rep < 200; ++rep) {
            // competitor of t-rank at most r, scaled onto the right ballpark
            Tensor competitor = Tensor::zeros({6, 7});
            for (long long k = 0; k < r; ++k)
                competitor += Tensor::rank_one({rng.normal_vector(6), rng.normal_vector(7)});
            competitor *= u.norm() / competitor.norm();
            CHECK(best <= (u - competitor).norm() + 1e-12);
        }
    }
}

TEST_CASE("entropy conventions") {
    const Splitting t({1}, 2);

    const Tensor rank1 = Tensor::rank_one({unit(2, 0), unit(3, 1)});
    const EntropyPair e1 = von_neumann_entropy(rank1, t);
    CHECK(e1.paper_signed == doctest::Approx(0.0));
    CHECK(e1.conventional == doctest::Approx(0.0));

    Tensor sym = Tensor::rank_one({unit(2, 0), unit(2, 0)});
    sym += Tensor::rank_one({unit(2, 1), unit(2, 1)});
    sym *= 1.0 / std::sqrt(2.0);
    const EntropyPair e2 = von_neumann_entropy(sym, t);
    CHECK(e2.conventional == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(e2.paper_signed == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

    Rng rng(13);
    Tensor u = oracles::random_tensor({4, 5}, rng);
    u *= 1.0 / u.norm();
    const EntropyPair e3 = von_neumann_entropy(u, t);
    const auto sigma = oracles::jacobi_singular_values(unfold(u, t));
    CHECK(e3.paper_signed ==
          doctest::Approx(oracles::entropy_by_summation(sigma, 1.0)).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(von_neumann_entropy(Tensor::zeros({2, 2}), t),
                         doctest::Contains("zero_tensor"), Error);
}

TEST_CASE("entropy stays finite under algebraic decay with q^2 R < 1") {
    // sigma_r^2 following the squared-tail rate with q = 0.5, R = 3
    // (q^2 R = 0.75 < 1); the resulting entropy must be a finite number.
    const double q = 0.5, growth = 3.0;
    const double exponent = std::abs(std::log(q) / std::log(growth));
    const int n = 64;
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(n, n);
    for (int r = 1; r <= n; ++r) {
        const double sq =
            r == 1 ? 1.0 : std::pow(2.0 / (r - 1.0), 2.0 * exponent) / (q * q);
        diag(r - 1, r - 1) = std::sqrt(sq);
    }
    std::vector<double> data(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) data[static_cast<std::size_t>(i) * n + j] = diag(i, j);
    const Tensor u = Tensor::from_data({n, n}, std::move(data));
    const EntropyPair e = von_neumann_entropy(u, Splitting({1}, 2));
    CHECK(std::isfinite(e.conventional));
    CHECK(e.conventional > 0.0);
}

TEST_CASE("overlap theta") {
    const Splitting t({1}, 2);
    CHECK(overlap_theta(Tensor::rank_one({unit(3, 0), unit(3, 2)}), t) == doctest::Approx(1.0));

    Tensor sym = Tensor::rank_one({unit(2, 0), unit(2, 0)});
    sym += Tensor::rank_one({unit(2, 1), unit(2, 1)});
    sym *= 1.0 / std::sqrt(2.0);
    CHECK(overlap_theta(sym, t) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        Tensor u = oracles::random_tensor({3, 3}, rng);
        u *= 1.0 / u.norm();
        const double theta = overlap_theta(u, t);
        CHECK(theta >= 1.0 / std::sqrt(3.0) - 1e-12);
        CHECK(theta == doctest::Approx(oracles::jacobi_singular_values(unfold(u, t))[0])
                           .epsilon(1e-10));
    }
    CHECK_THROWS_WITH_AS(overlap_theta(Tensor::zeros({2, 2}), t),
                         doctest::Contains("zero_tensor"), Error);
}

TEST_CASE("overlap is at least 1/sqrt(D) for unit tensors") {
    Rng rng(123);
    for (int rep = 0; rep < 10; ++rep) {
        Tensor u = oracles::random_tensor({3, 2, 4}, rng);
        u *= 1.0 / u.norm();
        for (const auto& t : Splitting::tt_family(3)) {
            const double d_t = static_cast<double>(max_splitting_rank(u.dims(), t));
            CHECK(overlap_theta(u, t) >= 1.0 / std::sqrt(d_t) - 1e-12);
        }
    }
}

TEST_CASE("TT aggregate error") {
    Rng rng(55);
    const Tensor u3 = oracles::random_tensor({2, 2, 2}, rng);
    CHECK(tt_aggregate_error(u3, {8, 8}) == 0.0);

    const Tensor u2 = oracles::random_tensor({4, 3}, rng);
    CHECK(tt_aggregate_error(u2, {2}) ==
          doctest::Approx(tail_error(u2, Splitting({1}, 2), 2)).epsilon(1e-12));

    const double t1 = tail_error(u3, Splitting({1}, 3), 1);
    const double t2 = tail_error(u3, Splitting({1, 2}, 3), 1);
    CHECK(tt_aggregate_error(u3, {1, 1}) ==
          doctest::Approx(std::sqrt(t1 * t1 + t2 * t2)).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(tt_aggregate_error(u3, {1}), doctest::Contains("dims_mismatch"), Error);
    CHECK_THROWS_WITH_AS(tt_aggregate_error(u3, {1, 0}), doctest::Contains("argument_domain"),
                         Error);
}
