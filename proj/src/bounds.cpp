#include "lowrank/bounds.hpp"

#include <cmath>

#include "lowrank/error.hpp"

namespace lowrank {

namespace {

void check_qR(double q, double growth) {
    require(q > 0.0 && q < 1.0, errc::argument_domain, "q must lie in (0,1)");
    require(growth > 1.0, errc::argument_domain, "rank growth factor must exceed 1");
}

} // namespace

FloorLog floor_log(long long r, double ratio) {
    require(r >= 1, errc::argument_domain, "rank must be positive");
    require(ratio > 1.0, errc::argument_domain, "log base must exceed 1");
    if (ratio == std::floor(ratio) && ratio <= 9.0e18) {
        const auto base = static_cast<long long>(ratio);
        long long n = 0, power = 1;
        while (power <= r / base) {
            power *= base;
            ++n;
        }
        return FloorLog{n, static_cast<double>(power)};
    }
    long long n = 0;
    double power = 1.0;
    while (power * ratio <= static_cast<double>(r)) {
        power *= ratio;
        ++n;
    }
    return FloorLog{n, power};
}

double pow_int(double base, long long n) {
    require(n >= 0, errc::argument_domain, "exponent must be nonnegative");
    double out = 1.0;
    for (long long i = 0; i < n; ++i) out *= base;
    return out;
}

double decay_exponent(double q, double growth) {
    check_qR(q, growth);
    return std::abs(std::log(q) / std::log(growth));
}

double contraction_rate(double kappa) {
    require(kappa >= 1.0, errc::argument_domain, "condition number must be at least 1");
    return (kappa - 1.0) / (kappa + 1.0);
}

double tail_bound_full(long long r, double q, double growth, double c, double pi1) {
    check_qR(q, growth);
    require(r >= 1, errc::argument_domain, "rank must be positive");
    require(c > 0.0 && pi1 >= 0.0, errc::argument_domain, "need c > 0 and pi1 >= 0");
    const FloorLog fl = floor_log(r, growth);
    const double s = static_cast<double>(r) - fl.power;
    const double inside = 1.0 - ((1.0 - q * q) * s) / ((growth - 1.0) * fl.power);
    return c * pi1 * std::sqrt(inside) * pow_int(q, fl.exponent);
}

double tail_bound_algebraic(long long r, double q, double growth, double c, double pi1) {
    check_qR(q, growth);
    require(r >= 1, errc::argument_domain, "rank must be positive");
    require(c > 0.0 && pi1 >= 0.0, errc::argument_domain, "need c > 0 and pi1 >= 0");
    return c * pi1 / q * std::pow(static_cast<double>(r), -decay_exponent(q, growth));
}

double linear_tail_bound(long long r, double q, double growth, double norm_u) {
    return tail_bound_algebraic(r, q, growth, 1.0, norm_u);
}

double singular_value_sq_bound(long long r, double q, double growth, double c, double pi1) {
    check_qR(q, growth);
    require(r >= 2, errc::argument_domain, "singular value bound needs r >= 2");
    require(c > 0.0 && pi1 >= 0.0, errc::argument_domain, "need c > 0 and pi1 >= 0");
    const double ratio = 2.0 / static_cast<double>(r - 1);
    return c * pi1 / (q * q) * std::pow(ratio, 2.0 * decay_exponent(q, growth));
}

long long commuting_rank_bound(long long n, long long r0, long long rb) {
    require(n >= 0 && r0 >= 0 && rb >= 0, errc::argument_domain,
            "rank bound arguments must be nonnegative");
    return (n + 1) * r0 + n * rb;
}

} // namespace lowrank
