#pragma once

namespace lowrank {

// floor(log_R r): the largest n with R^n <= r, found by repeated
// multiplication (exact integer arithmetic when R is integral) so the result
// is bit-stable at r = R^n.
struct FloorLog {
    long long exponent;
    double power; // R^exponent
};
FloorLog floor_log(long long r, double ratio);

// base^n by repeated multiplication; n >= 0.
double pow_int(double base, long long n);

// |ln q / ln R|: the algebraic decay exponent shared by all tail bounds.
double decay_exponent(double q, double growth);

// (kappa - 1) / (kappa + 1) for kappa >= 1.
double contraction_rate(double kappa);

// Tail bound with the interpolation factor between rank powers:
// c * pi1 * sqrt(1 - (1-q^2)(r - R^n) / ((R-1) R^n)) * q^n, n = floor(log_R r).
double tail_bound_full(long long r, double q, double growth, double c, double pi1);

// Clean algebraic form c * pi1 * q^{-1} * r^{-|ln q / ln R|}; always at least
// tail_bound_full.
double tail_bound_algebraic(long long r, double q, double growth, double c, double pi1);

// Specialization used for linear systems: c = 1 and pi1 = ||u||.
double linear_tail_bound(long long r, double q, double growth, double norm_u);

// Bound on sigma_r^2 derived from the tail decay:
// c * pi1 * q^{-2} * (2/(r-1))^{2 |ln q / ln R|}, r >= 2.
double singular_value_sq_bound(long long r, double q, double growth, double c, double pi1);

// Additive rank growth of the commuting case: (n+1) r0 + n rb.
long long commuting_rank_bound(long long n, long long r0, long long rb);

} // namespace lowrank
