#pragma once

#include <stdexcept>
#include <string>

namespace fsdl {

/// Shapes or grids of operands do not match.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An iterative or direct solver failed (singular pivot, no convergence).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Requested step exceeds the positivity/advection limit.
class StepSizeError : public std::runtime_error {
public:
    StepSizeError(const std::string& what, double admissible_dt)
        : std::runtime_error(what), admissible_dt_(admissible_dt) {}
    double admissible_dt() const noexcept { return admissible_dt_; }

private:
    double admissible_dt_;
};

/// Model hypotheses that a configuration or input may violate.
enum class Hypothesis {
    None,
    ParameterRange,  // eps >= 0, D > 0, b >= 0
    Source,          // f(x,0,c) >= 0 and f <= K_f (n + 1)
    Sensitivity,     // |S_ij| <= K_S
    Potential,       // phi with bounded gradient and Hessian
    InitialData,     // n0 >= 0, n0 not identically 0, c0 >= 0, u0 solenoidal
    QuasiBlowup,     // b in [0,1)
    Exponents,       // 1/lambda + N/(2q) < 1/2 and friends
    Syntax,
};

inline const char* hypothesis_name(Hypothesis h) {
    switch (h) {
    case Hypothesis::None: return "none";
    case Hypothesis::ParameterRange: return "parameter range";
    case Hypothesis::Source: return "source hypothesis (f)";
    case Hypothesis::Sensitivity: return "sensitivity hypothesis (S)";
    case Hypothesis::Potential: return "potential hypothesis (phi)";
    case Hypothesis::InitialData: return "initial data hypothesis (init)";
    case Hypothesis::QuasiBlowup: return "quasi-blowup hypothesis";
    case Hypothesis::Exponents: return "exponent condition";
    case Hypothesis::Syntax: return "syntax";
    }
    return "unknown";
}

/// Input rejected before any computation; names the violated hypothesis.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(Hypothesis h, const std::string& what)
        : std::invalid_argument(std::string(hypothesis_name(h)) + ": " + what), hypothesis_(h) {}
    explicit ValidationError(const std::string& what)
        : ValidationError(Hypothesis::None, what) {}
    Hypothesis hypothesis() const noexcept { return hypothesis_; }

private:
    Hypothesis hypothesis_;
};

}  // namespace fsdl
