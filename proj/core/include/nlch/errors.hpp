#pragma once

#include <stdexcept>
#include <string>

namespace nlch {

enum class errc {
    invalid_input,
    grid_mismatch,
    mean_not_zero,
    kernel_too_wide,
    symbol_negativity,
    domain_violation,
    step_diverged,
    config_error,
    verdict_failed,
    numerical,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::invalid_input: return "invalid_input";
    case errc::grid_mismatch: return "grid_mismatch";
    case errc::mean_not_zero: return "mean_not_zero";
    case errc::kernel_too_wide: return "kernel_too_wide";
    case errc::symbol_negativity: return "symbol_negativity";
    case errc::domain_violation: return "domain_violation";
    case errc::step_diverged: return "step_diverged";
    case errc::config_error: return "config_error";
    case errc::verdict_failed: return "verdict_failed";
    case errc::numerical: return "numerical";
    }
    return "unknown";
}

} // namespace nlch
