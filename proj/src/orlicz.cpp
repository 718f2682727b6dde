#include "maxprod/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace maxprod {

namespace {

double parse_number(std::string_view text, bool& ok) {
    try {
        size_t consumed = 0;
        const double v = std::stod(std::string(text), &consumed);
        ok = consumed == text.size() && std::isfinite(v);
        return v;
    } catch (...) {
        ok = false;
        return 0.0;
    }
}

std::string trim_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_same_shape(const ScalarField& a, const ScalarField& b, const char* who) {
    if (!(a.domain == b.domain) || a.resolution != b.resolution)
        throw ContractError(std::string(who) + ": fields have mismatched domain or resolution");
}

}  // namespace

PhiFunction PhiFunction::power(double p) {
    if (!(p >= 1.0)) throw ContractError("power phi-function needs p >= 1");
    return PhiFunction(Family::Power, p, 0.0);
}

PhiFunction PhiFunction::zygmund(double alpha, double beta) {
    if (!(alpha >= 1.0) || !(beta > 0.0))
        throw ContractError("zygmund phi-function needs alpha >= 1 and beta > 0");
    return PhiFunction(Family::Zygmund, alpha, beta);
}

PhiFunction PhiFunction::exponential(double gamma) {
    if (!(gamma > 0.0)) throw ContractError("exponential phi-function needs gamma > 0");
    return PhiFunction(Family::Exponential, gamma, 0.0);
}

std::optional<PhiFunction> PhiFunction::parse(std::string_view spec) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    while (start <= spec.size()) {
        const size_t colon = spec.find(':', start);
        if (colon == std::string_view::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.empty()) return std::nullopt;
    bool ok = false;
    try {
        if (parts[0] == "power" && parts.size() == 2) {
            const double p = parse_number(parts[1], ok);
            if (ok) return power(p);
        } else if (parts[0] == "zygmund" && parts.size() == 3) {
            bool ok2 = false;
            const double a = parse_number(parts[1], ok);
            const double b = parse_number(parts[2], ok2);
            if (ok && ok2) return zygmund(a, b);
        } else if (parts[0] == "exp" && parts.size() == 2) {
            const double g = parse_number(parts[1], ok);
            if (ok) return exponential(g);
        }
    } catch (const ContractError&) {
        return std::nullopt;
    }
    return std::nullopt;
}

double PhiFunction::operator()(double u) const {
    if (!(u >= 0.0)) throw ContractError("phi-function argument must be non-negative");
    switch (family_) {
        case Family::Power:
            return std::pow(u, p1_);
        case Family::Zygmund:
            return std::pow(u, p1_) * std::pow(std::log(u + std::numbers::e), p2_);
        case Family::Exponential:
            return std::expm1(std::pow(u, p1_));
    }
    return 0.0;
}

double PhiFunction::saturation_threshold() const {
    if (family_ != Family::Exponential) return std::numeric_limits<double>::infinity();
    return std::pow(700.0, 1.0 / p1_);
}

std::string PhiFunction::name() const {
    switch (family_) {
        case Family::Power: return "power:" + trim_number(p1_);
        case Family::Zygmund: return "zygmund:" + trim_number(p1_) + ":" + trim_number(p2_);
        case Family::Exponential: return "exp:" + trim_number(p1_);
    }
    return "?";
}

ModularValue modular(const PhiFunction& phi, const ScalarField& field, double lambda) {
    if (!(lambda > 0.0)) throw ContractError("modular: lambda must be positive");
    double cell_volume = 1.0;
    for (size_t i = 0; i < field.resolution.size(); ++i) {
        cell_volume *= (field.domain.upper(static_cast<int>(i)) -
                        field.domain.lower(static_cast<int>(i))) /
                       static_cast<double>(field.resolution[i]);
    }
    const double saturation = phi.saturation_threshold();
    double sum = 0.0;
    for (double v : field.values) {
        if (!std::isfinite(v)) throw ContractError("modular: field contains non-finite values");
        const double u = lambda * std::abs(v);
        if (u > saturation)
            return {std::numeric_limits<double>::infinity(), lambda, true};
        sum += phi(u);
    }
    const double value = sum * cell_volume;
    if (!std::isfinite(value))
        return {std::numeric_limits<double>::infinity(), lambda, true};
    return {value, lambda, false};
}

ScalarField difference(const ScalarField& a, const ScalarField& b) {
    check_same_shape(a, b, "difference");
    ScalarField out(a.domain, a.resolution);
    for (size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
    return out;
}

double sup_error(const ScalarField& a, const ScalarField& b) {
    check_same_shape(a, b, "sup_error");
    double best = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        best = std::max(best, std::abs(a.values[i] - b.values[i]));
    return best;
}

double lp_error(double p, const ScalarField& a, const ScalarField& b) {
    if (!(p >= 1.0)) throw ContractError("lp_error: p must be >= 1");
    const ModularValue m = modular(PhiFunction::power(p), difference(a, b), 1.0);
    return std::pow(m.value, 1.0 / p);
}

std::string ModularInequalityReport::to_text() const {
    std::ostringstream os;
    os << "modular_inequality: " << (pass ? "pass" : "fail") << " (lhs=" << lhs
       << ", rhs=" << rhs << ", psi_l1=" << psi_l1_norm << ")";
    return os.str();
}

ModularInequalityReport modular_inequality_check(const PhiFunction& phi, double lambda,
                                                 const CoefficientGrid& f,
                                                 const CoefficientGrid& g,
                                                 const ProductKernel& kernel,
                                                 int resolution_per_axis,
                                                 double relative_slack) {
    if (!(f.indices() == g.indices()) || !(f.domain() == g.domain()))
        throw ContractError("modular_inequality_check: grids must share one index set");
    if (f.shift() != 0.0 || g.shift() != 0.0)
        throw ContractError("modular_inequality_check: grids must be non-negative (no shift)");
    if (resolution_per_axis < 2)
        throw ContractError("modular_inequality_check: resolution must be >= 2");

    const int s = kernel.dimension();
    const std::vector<int> resolution(s, resolution_per_axis);
    const ScalarField field_f = evaluate_grid(f, kernel, resolution);
    const ScalarField field_g = evaluate_grid(g, kernel, resolution);
    const ModularValue lhs = modular(phi, difference(field_f, field_g), lambda);

    const SigmoidalKernel& base = kernel.base();
    const double truncation = base.support_radius() ? *base.support_radius() * 2.0 : 20.0;
    const double l1 = std::pow(phi_l1_norm(base, truncation, 1e-3), s);

    const double amplification = lambda / kernel.phi2_pow_s();
    const double cell_volume =
        std::pow(1.0 / static_cast<double>(f.indices().n()), s);
    double coeff_modular = 0.0;
    for (long long i = 0; i < f.indices().size(); ++i)
        coeff_modular += phi(amplification * std::abs(f.values()[i] - g.values()[i]));
    coeff_modular *= cell_volume;

    ModularInequalityReport report;
    report.lhs = lhs.value;
    report.rhs = l1 * coeff_modular;
    report.psi_l1_norm = l1;
    report.pass = !lhs.saturated &&
                  report.lhs <= report.rhs * (1.0 + relative_slack) + 1e-15;
    return report;
}

}  // namespace maxprod
