#pragma once

#include <stdexcept>
#include <string>

namespace mildnet {

// Contract violation: caller passed arguments outside an operation's domain.
struct contract_error : std::invalid_argument {
    explicit contract_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Incompatible dimensions between params, data, and mask series.
struct shape_error : contract_error {
    explicit shape_error(const std::string& msg) : contract_error(msg) {}
};

// Structural capacity shortfall (e.g. too few neurons per mask).
struct capacity_error : contract_error {
    explicit capacity_error(const std::string& msg) : contract_error(msg) {}
};

// A solver cannot run within its configured evaluation budget.
struct infeasible_solver_error : std::runtime_error {
    explicit infeasible_solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Perturbation requested but no qualifying inactive neuron exists.
struct stale_gd_error : std::runtime_error {
    explicit stale_gd_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Inner descent hit its iteration cap before reaching the gradient threshold.
struct nonconvergence_error : std::runtime_error {
    long long iterations = 0;
    double final_grad_norm = 0.0;
    nonconvergence_error(const std::string& msg, long long iters, double gnorm)
        : std::runtime_error(msg), iterations(iters), final_grad_norm(gnorm) {}
};

// Rejection sampling exceeded its attempt budget.
struct generation_error : std::runtime_error {
    explicit generation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries the 1-based line number when known.
struct parse_error : std::runtime_error {
    long line = 0;
    parse_error(const std::string& msg, long line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// A per-run resource budget (e.g. coefficient updates) was exhausted.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal invariant that is supposed to hold by construction failed.
struct invariant_error : std::logic_error {
    explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw contract_error(msg);
}

inline void require_invariant(bool cond, const std::string& msg) {
    if (!cond) throw invariant_error(msg);
}

}  // namespace mildnet
