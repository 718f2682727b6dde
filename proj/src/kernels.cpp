#include "maxprod/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace maxprod {

namespace {
constexpr double kOddSymmetryTol = 1e-9;
constexpr double kUnimodalTol = 1e-12;
constexpr double kTailProductBound = 1.0;
}  // namespace

SigmoidalKernel SigmoidalKernel::logistic() {
    return SigmoidalKernel(SigmoidKind::Logistic, 2.0, std::nullopt);
}

SigmoidalKernel SigmoidalKernel::hyperbolic_tangent() {
    return SigmoidalKernel(SigmoidKind::HyperbolicTangent, 2.0, std::nullopt);
}

SigmoidalKernel SigmoidalKernel::ramp() {
    // sigma has knees at +-3/2, so phi vanishes exactly for |x| >= 5/2.
    return SigmoidalKernel(SigmoidKind::Ramp,
                           std::numeric_limits<double>::infinity(), 2.5);
}

std::optional<SigmoidalKernel> SigmoidalKernel::from_name(std::string_view name) {
    if (name == "logistic") return logistic();
    if (name == "tanh") return hyperbolic_tangent();
    if (name == "ramp") return ramp();
    return std::nullopt;
}

std::string_view SigmoidalKernel::name() const {
    switch (kind_) {
        case SigmoidKind::Logistic: return "logistic";
        case SigmoidKind::HyperbolicTangent: return "tanh";
        case SigmoidKind::Ramp: return "ramp";
    }
    return "?";
}

double SigmoidalKernel::sigma(double x) const {
    if (!std::isfinite(x)) throw ContractError("sigma: non-finite input");
    switch (kind_) {
        case SigmoidKind::Logistic:
            return 1.0 / (1.0 + std::exp(-x));
        case SigmoidKind::HyperbolicTangent:
            return 0.5 * (std::tanh(x) + 1.0);
        case SigmoidKind::Ramp:
            if (x < -1.5) return 0.0;
            if (x > 1.5) return 1.0;
            return x / 3.0 + 0.5;
    }
    return 0.0;
}

double SigmoidalKernel::phi(double x) const {
    return std::max(0.0, 0.5 * (sigma(x + 1.0) - sigma(x - 1.0)));
}

ProductKernel::ProductKernel(SigmoidalKernel base, int dimension_s)
    : base_(base), dimension_(dimension_s) {
    if (dimension_s < 1) throw ContractError("product kernel dimension must be >= 1");
}

double ProductKernel::psi(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension_)
        throw ContractError("psi: point dimension does not match kernel dimension");
    double p = 1.0;
    for (double xi : x) p *= base_.phi(xi);
    return p;
}

double ProductKernel::phi2_pow_s() const {
    return std::pow(base_.phi(2.0), dimension_);
}

double phi_l1_norm(const SigmoidalKernel& kernel, double truncation_radius,
                   double step) {
    if (!(truncation_radius > 0.0) || !(step > 0.0))
        throw ContractError("phi_l1_norm: radius and step must be positive");
    const auto count = static_cast<long long>(
        std::llround(std::ceil(2.0 * truncation_radius / step)));
    const double h = 2.0 * truncation_radius / static_cast<double>(count);
    double sum = 0.0;
    for (long long i = 0; i < count; ++i) {
        const double x = -truncation_radius + (static_cast<double>(i) + 0.5) * h;
        sum += kernel.phi(x);
    }
    return sum * h;
}

std::string ConditionReport::to_text() const {
    std::ostringstream os;
    os << "sigma1_odd_symmetry: " << (odd_symmetry ? "pass" : "fail") << '\n'
       << "sigma2_density_unimodal: " << (density_unimodal ? "pass" : "fail") << '\n'
       << "sigma3_tail_decay: " << (tail_decay ? "pass" : "fail") << '\n';
    return os.str();
}

ConditionReport check_sigma_conditions(const std::function<double(double)>& sigma,
                                       double decay_alpha,
                                       std::optional<double> support_radius,
                                       int sample_count, double range_radius) {
    if (sample_count < 100)
        throw ContractError("check_sigma_conditions: need at least 100 samples");
    if (!(range_radius > 0.0))
        throw ContractError("check_sigma_conditions: range radius must be positive");

    ConditionReport report;
    auto phi = [&](double x) { return 0.5 * (sigma(x + 1.0) - sigma(x - 1.0)); };
    auto sample = [&](int j) {
        return -range_radius +
               2.0 * range_radius * static_cast<double>(j) /
                   static_cast<double>(sample_count - 1);
    };

    double odd_defect = 0.0;
    for (int j = 0; j < sample_count; ++j) {
        const double x = sample(j);
        odd_defect = std::max(odd_defect,
                              std::abs((sigma(x) - 0.5) + (sigma(-x) - 0.5)));
    }
    report.max_odd_defect = odd_defect;
    report.odd_symmetry = odd_defect <= kOddSymmetryTol;

    double unimodal_defect = 0.0;
    double prev_x = sample(0);
    double prev_phi = phi(prev_x);
    for (int j = 1; j < sample_count; ++j) {
        const double x = sample(j);
        const double p = phi(x);
        if (x <= 0.0) {
            unimodal_defect = std::max(unimodal_defect, prev_phi - p);
        } else if (prev_x >= 0.0) {
            unimodal_defect = std::max(unimodal_defect, p - prev_phi);
        }
        prev_x = x;
        prev_phi = p;
    }
    report.max_unimodal_defect = unimodal_defect;
    report.density_unimodal = unimodal_defect <= kUnimodalTol;

    if (support_radius) {
        report.max_tail_product = 0.0;
        report.tail_decay = true;
    } else {
        double tail = 0.0;
        for (int j = 0; j < sample_count; ++j) {
            const double x = sample(j);
            if (x > -2.0) continue;
            tail = std::max(tail, sigma(x) * std::pow(std::abs(x), decay_alpha));
        }
        report.max_tail_product = tail;
        report.tail_decay = std::isfinite(tail) && tail <= kTailProductBound;
    }
    return report;
}

ConditionReport verify_sigma_conditions(const SigmoidalKernel& kernel,
                                        int sample_count, double range_radius) {
    return check_sigma_conditions(
        [&kernel](double x) { return kernel.sigma(x); }, kernel.decay_alpha(),
        kernel.support_radius(), sample_count, range_radius);
}

}  // namespace maxprod
