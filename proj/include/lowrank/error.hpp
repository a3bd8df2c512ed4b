#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

// Stable reason codes. The CLI prints these verbatim on the error stream so
// scripted callers can match on them; the full list is documented in README.
enum class errc {
    splitting_empty,
    splitting_full,
    splitting_invalid,
    dims_mismatch,
    capacity_exceeded,
    zero_tensor,
    eps_rank_range,
    argument_domain,
    no_convergence,
    not_symmetric,
    not_spd,
    lambda1_degenerate,
    orthogonal_start,
    rank_one_required,
    inadmissible_start,
    hypothesis_unmet,
    operator_shape,
    construction,
    analytic_mismatch,
    config_not_found,
    config_parse,
    config_invalid,
    io_error,
    usage,
};

inline const char* to_string(errc code) {
    switch (code) {
        case errc::splitting_empty:    return "splitting_empty";
        case errc::splitting_full:     return "splitting_full";
        case errc::splitting_invalid:  return "splitting_invalid";
        case errc::dims_mismatch:      return "dims_mismatch";
        case errc::capacity_exceeded:  return "capacity_exceeded";
        case errc::zero_tensor:        return "zero_tensor";
        case errc::eps_rank_range:     return "eps_rank_range";
        case errc::argument_domain:    return "argument_domain";
        case errc::no_convergence:     return "no_convergence";
        case errc::not_symmetric:      return "not_symmetric";
        case errc::not_spd:            return "not_spd";
        case errc::lambda1_degenerate: return "lambda1_degenerate";
        case errc::orthogonal_start:   return "orthogonal_start";
        case errc::rank_one_required:  return "rank_one_required";
        case errc::inadmissible_start: return "inadmissible_start";
        case errc::hypothesis_unmet:   return "hypothesis_unmet";
        case errc::operator_shape:     return "operator_shape";
        case errc::construction:       return "construction";
        case errc::analytic_mismatch:  return "analytic_mismatch";
        case errc::config_not_found:   return "config_not_found";
        case errc::config_parse:       return "config_parse";
        case errc::config_invalid:     return "config_invalid";
        case errc::io_error:           return "io_error";
        case errc::usage:              return "usage";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }
    const char* code_name() const noexcept { return to_string(code_); }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace lowrank
