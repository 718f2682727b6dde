#pragma once

// Sigmoidal activations and the kernels built from them.
//
// A sigmoidal function sigma rises from 0 at -inf to 1 at +inf. Its density
//   phi(x) = (sigma(x+1) - sigma(x-1)) / 2
// is a non-negative even bump, and the multivariate kernel is the coordinate
// product Psi(x) = phi(x_1) * ... * phi(x_s). Admissible activations satisfy
// three conditions: sigma - 1/2 is odd, phi is unimodal, and sigma decays at
// least polynomially at -inf.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "maxprod/errors.hpp"

namespace maxprod {

enum class SigmoidKind { Logistic, HyperbolicTangent, Ramp };

class SigmoidalKernel {
public:
    static SigmoidalKernel logistic();
    static SigmoidalKernel hyperbolic_tangent();
    static SigmoidalKernel ramp();

    // Accepts "logistic", "tanh", "ramp".
    static std::optional<SigmoidalKernel> from_name(std::string_view name);

    SigmoidKind kind() const { return kind_; }
    std::string_view name() const;

    // Declared decay exponent for the tail condition. Infinity for kernels
    // whose density has compact support (the tail condition is then vacuous).
    double decay_alpha() const { return decay_alpha_; }

    // Radius beyond which phi is exactly zero, when the support is compact.
    std::optional<double> support_radius() const { return support_radius_; }

    double sigma(double x) const;  // ContractError on non-finite x
    double phi(double x) const;    // even, non-negative, peak at 0

private:
    SigmoidalKernel(SigmoidKind kind, double decay_alpha,
                    std::optional<double> support_radius)
        : kind_(kind), decay_alpha_(decay_alpha), support_radius_(support_radius) {}

    SigmoidKind kind_;
    double decay_alpha_;
    std::optional<double> support_radius_;
};

// Coordinate-product kernel in dimension s.
class ProductKernel {
public:
    ProductKernel(SigmoidalKernel base, int dimension_s);

    const SigmoidalKernel& base() const { return base_; }
    int dimension() const { return dimension_; }

    double psi(std::span<const double> x) const;  // ContractError on size mismatch

    // phi(2)^s, the guaranteed lower bound for the evaluation denominator.
    double phi2_pow_s() const;

private:
    SigmoidalKernel base_;
    int dimension_;
};

// Composite-midpoint estimate of the integral of phi over
// [-truncation_radius, truncation_radius]. The s-dimensional product kernel
// has L1 norm (result)^s.
double phi_l1_norm(const SigmoidalKernel& kernel, double truncation_radius,
                   double step);

struct ConditionReport {
    bool odd_symmetry = false;      // sigma - 1/2 is odd
    bool density_unimodal = false;  // phi non-decreasing left of 0, non-increasing right
    bool tail_decay = false;        // sigma(x) * |x|^alpha bounded as x -> -inf

    double max_odd_defect = 0.0;
    double max_unimodal_defect = 0.0;
    double max_tail_product = 0.0;

    bool all_passed() const { return odd_symmetry && density_unimodal && tail_decay; }
    std::string to_text() const;  // "name: pass|fail" lines
};

// Numerical check of the admissibility conditions on a uniform sample grid
// over [-range_radius, range_radius]. Failures are report entries, never
// exceptions. The generic overload exists so that deliberately broken
// activations can be probed in tests; a compactly supported density passes
// the tail condition vacuously.
ConditionReport check_sigma_conditions(const std::function<double(double)>& sigma,
                                       double decay_alpha,
                                       std::optional<double> support_radius,
                                       int sample_count, double range_radius);

ConditionReport verify_sigma_conditions(const SigmoidalKernel& kernel,
                                        int sample_count, double range_radius);

}  // namespace maxprod
