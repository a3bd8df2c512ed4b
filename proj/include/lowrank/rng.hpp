#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace lowrank {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded generator with a pinned bits-to-double mapping. mt19937_64 is fully
// specified by the standard and the mappings below avoid the
// implementation-defined std distributions, so equal seeds give equal streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    // Independent substream, e.g. one per experiment cell or per factor.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(splitmix64(seed) ^ splitmix64(0x9e3779b97f4a7c15ULL * (stream_id + 1) + 0x2545F4914F6CDD1DULL));
    }

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one value per call so replay does not depend on call pairing.
    double normal() {
        const double two_pi = 6.283185307179586476925286766559;
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    std::int64_t below(std::int64_t n) {
        return static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(n));
    }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Eigen::MatrixXd normal_matrix(int rows, int cols) {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = normal();
        return m;
    }

private:
    std::mt19937_64 eng_;
};

// Haar-ish random orthogonal matrix via QR with the sign convention that
// makes the factorization (and hence the sample) unique.
inline Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
    Eigen::MatrixXd g = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

// Symmetric matrix with prescribed eigenvalues; endpoints of [lo, hi] are hit
// exactly (for n >= 2) so declared spectral intervals are tight.
inline Eigen::MatrixXd random_symmetric_with_spectrum(int n, double lo, double hi, Rng& rng) {
    Eigen::VectorXd ev(n);
    if (n == 1) {
        ev[0] = lo;
    } else {
        ev[0] = lo;
        ev[n - 1] = hi;
        for (int i = 1; i + 1 < n; ++i) ev[i] = rng.uniform(lo, hi);
    }
    Eigen::MatrixXd q = random_orthogonal(n, rng);
    Eigen::MatrixXd a = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose()); // exact symmetry
}

} // namespace lowrank
