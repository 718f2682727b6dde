#pragma once

// Convex phi-functions, their modular functionals, and the error norms used
// by the convergence experiments. The modular of a field is the Riemann sum
// of phi(lambda * |value|) over its evaluation grid; all comparisons in this
// project use the same grid, so the discretization bias cancels.

#include <optional>
#include <string>
#include <string_view>

#include "maxprod/operator.hpp"

namespace maxprod {

class PhiFunction {
public:
    enum class Family { Power, Zygmund, Exponential };

    static PhiFunction power(double p);                       // u^p, p >= 1
    static PhiFunction zygmund(double alpha, double beta);    // u^a log^b(u+e)
    static PhiFunction exponential(double gamma);             // exp(u^g) - 1

    // Accepts "power:<p>", "zygmund:<alpha>:<beta>", "exp:<gamma>".
    static std::optional<PhiFunction> parse(std::string_view spec);

    Family family() const { return family_; }
    bool satisfies_delta2() const { return family_ != Family::Exponential; }

    double operator()(double u) const;  // ContractError on negative u

    // Arguments above this saturate the Exponential family (exp overflow);
    // infinity for the other families.
    double saturation_threshold() const;

    std::string name() const;  // e.g. "power:2", usable as a CSV token

private:
    PhiFunction(Family family, double p1, double p2) : family_(family), p1_(p1), p2_(p2) {}

    Family family_;
    double p1_ = 0.0;
    double p2_ = 0.0;
};

struct ModularValue {
    double value = 0.0;   // +inf sentinel when saturated
    double lambda = 1.0;  // scaling applied to the argument
    bool saturated = false;
};

ModularValue modular(const PhiFunction& phi, const ScalarField& field, double lambda);

ScalarField difference(const ScalarField& a, const ScalarField& b);
double sup_error(const ScalarField& a, const ScalarField& b);
double lp_error(double p, const ScalarField& a, const ScalarField& b);

struct ModularInequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double psi_l1_norm = 0.0;
    bool pass = false;
    std::string to_text() const;
};

// Compares the modular of the operator difference against the kernel-weighted
// modular of the coefficient difference (taken as a piecewise-constant
// function on the lattice cells). Both coefficient grids must be unshifted
// and share one index set. Failure is a report entry, not an exception.
ModularInequalityReport modular_inequality_check(const PhiFunction& phi, double lambda,
                                                 const CoefficientGrid& f,
                                                 const CoefficientGrid& g,
                                                 const ProductKernel& kernel,
                                                 int resolution_per_axis,
                                                 double relative_slack = 1e-2);

}  // namespace maxprod
