#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "maxprod/orlicz.hpp"
#include "test_util.hpp"

using namespace maxprod;

namespace {

std::vector<PhiFunction> all_phi() {
    return {PhiFunction::power(1.0), PhiFunction::power(2.0),
            PhiFunction::zygmund(1.0, 1.0), PhiFunction::exponential(1.0)};
}

ScalarField constant_field(const BoxDomain& domain, std::vector<int> resolution,
                           double value) {
    ScalarField field(domain, std::move(resolution));
    for (auto& v : field.values) v = value;
    return field;
}

ScalarField random_field_1d(int resolution, std::mt19937_64& rng, double scale = 1.0) {
    ScalarField field(BoxDomain::interval(0.0, 1.0), {resolution});
    for (auto& v : field.values) v = scale * testutil::uniform01(rng);
    return field;
}

}  // namespace

TEST_CASE("phi-function point values") {
    CHECK(PhiFunction::power(2.0)(0.0) == 0.0);
    CHECK(PhiFunction::zygmund(1.0, 1.0)(1.0) ==
          doctest::Approx(std::log(1.0 + std::numbers::e)).epsilon(1e-12));
    CHECK(PhiFunction::exponential(1.0)(1.0) ==
          doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
}

TEST_CASE("phi-function rejects negative arguments and bad parameters") {
    CHECK_THROWS_AS(PhiFunction::power(2.0)(-0.1), ContractError);
    CHECK_THROWS_AS(PhiFunction::power(0.5), ContractError);
    CHECK_THROWS_AS(PhiFunction::zygmund(0.5, 1.0), ContractError);
    CHECK_THROWS_AS(PhiFunction::zygmund(1.0, 0.0), ContractError);
    CHECK_THROWS_AS(PhiFunction::exponential(0.0), ContractError);
}

TEST_CASE("phi-functions vanish only at zero, grow, and are convex") {
    std::mt19937_64 rng(5);
    for (const auto& phi : all_phi()) {
        CHECK(phi(0.0) == 0.0);
        double prev_u = 0.0;
        double prev_v = 0.0;
        for (int i = 1; i <= 60; ++i) {
            const double u = 0.05 * i;
            const double v = phi(u);
            CHECK(v > 0.0);
            CHECK(v >= prev_v);  // non-decreasing
            prev_u = u;
            prev_v = v;
        }
        (void)prev_u;
        for (int i = 0; i < 200; ++i) {
            const double u = 4.0 * testutil::uniform01(rng);
            const double v = 4.0 * testutil::uniform01(rng);
            const double mid = phi(0.5 * u + 0.5 * v);
            CHECK(mid <= 0.5 * phi(u) + 0.5 * phi(v) + 1e-12);
        }
    }
}

TEST_CASE("delta-2 flags match the families") {
    CHECK(PhiFunction::power(2.0).satisfies_delta2());
    CHECK(PhiFunction::zygmund(1.0, 1.0).satisfies_delta2());
    CHECK_FALSE(PhiFunction::exponential(1.0).satisfies_delta2());

    // power: phi(2u) = 2^p phi(u) exactly
    const PhiFunction p2 = PhiFunction::power(2.0);
    for (double u : {0.1, 1.0, 7.0, 300.0})
        CHECK(p2(2.0 * u) <= 4.0 * p2(u) * (1.0 + 1e-12));

    // zygmund: log(2u+e) <= (1+log 2) log(u+e), so M = 2^a (1+log 2)^b works
    const PhiFunction zyg = PhiFunction::zygmund(1.0, 1.0);
    const double zyg_m = 2.0 * (1.0 + std::numbers::ln2);
    for (int i = -6; i <= 3; ++i) {
        const double u = std::pow(10.0, i);
        CHECK(zyg(2.0 * u) <= zyg_m * zyg(u) * (1.0 + 1e-12));
    }

    // exponential: no fixed M works; u = 20 already defeats M = 1e6
    const PhiFunction ex = PhiFunction::exponential(1.0);
    CHECK(ex(40.0) > 1e6 * ex(20.0));
}

TEST_CASE("modular of constant fields") {
    const ScalarField unit2d = constant_field(BoxDomain::unit_square(), {21, 17}, 1.0);
    CHECK(modular(PhiFunction::power(2.0), unit2d, 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-12));

    const ScalarField c1d = constant_field(BoxDomain::interval(0.0, 1.0), {101}, 0.3);
    CHECK(modular(PhiFunction::power(1.0), c1d, 2.0).value ==
          doctest::Approx(0.6).epsilon(1e-12));

    const ScalarField one1d = constant_field(BoxDomain::interval(0.0, 1.0), {64}, 1.0);
    CHECK(modular(PhiFunction::zygmund(1.0, 1.0), one1d, 1.0).value ==
          doctest::Approx(std::log(1.0 + std::numbers::e)).epsilon(1e-12));
}

TEST_CASE("modular is monotone in the field magnitude") {
    std::mt19937_64 rng(17);
    for (const auto& phi : all_phi()) {
        const ScalarField big = random_field_1d(101, rng, 2.0);
        ScalarField small = big;
        for (auto& v : small.values) v *= testutil::uniform01(rng);
        CHECK(modular(phi, small, 1.0).value <= modular(phi, big, 1.0).value + 1e-15);
    }
}

TEST_CASE("power modular scales like lambda^p") {
    std::mt19937_64 rng(19);
    const ScalarField field = random_field_1d(101, rng);
    for (double p : {1.0, 2.0, 3.0}) {
        const PhiFunction phi = PhiFunction::power(p);
        const double base = modular(phi, field, 1.0).value;
        for (double lambda : {0.5, 2.0, 10.0}) {
            CHECK(modular(phi, field, lambda).value ==
                  doctest::Approx(std::pow(lambda, p) * base).epsilon(1e-12));
        }
    }
}

TEST_CASE("exponential modular saturates instead of overflowing") {
    const ScalarField hot = constant_field(BoxDomain::interval(0.0, 1.0), {16}, 800.0);
    const ModularValue m = modular(PhiFunction::exponential(1.0), hot, 1.0);
    CHECK(m.saturated);
    CHECK(std::isinf(m.value));

    const ScalarField warm = constant_field(BoxDomain::interval(0.0, 1.0), {16}, 2.0);
    const ModularValue ok = modular(PhiFunction::exponential(1.0), warm, 1.0);
    CHECK_FALSE(ok.saturated);
    CHECK(std::isfinite(ok.value));
}

TEST_CASE("sup and lp errors on simple fields") {
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    const ScalarField a = constant_field(domain, {101}, 0.7);
    const ScalarField b = constant_field(domain, {101}, 0.7);
    CHECK(sup_error(a, b) == 0.0);
    CHECK(lp_error(2.0, a, b) == 0.0);

    const ScalarField c = constant_field(domain, {101}, 0.45);
    CHECK(sup_error(a, c) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lp_error(2.0, a, c) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lp_error(1.0, a, c) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
    const ScalarField a = constant_field(BoxDomain::interval(0.0, 1.0), {101}, 1.0);
    const ScalarField b = constant_field(BoxDomain::interval(0.0, 1.0), {100}, 1.0);
    const ScalarField c = constant_field(BoxDomain::interval(0.0, 2.0), {101}, 1.0);
    CHECK_THROWS_AS(sup_error(a, b), ContractError);
    CHECK_THROWS_AS(lp_error(2.0, a, c), ContractError);
    CHECK_THROWS_AS(difference(a, b), ContractError);
}

TEST_CASE("high-order lp error approaches the sup error") {
    std::mt19937_64 rng(29);
    const ScalarField a = random_field_1d(201, rng);
    const ScalarField b = random_field_1d(201, rng);
    const double sup = sup_error(a, b);
    const double l64 = lp_error(64.0, a, b);
    CHECK(l64 <= sup * 1.0001);
    CHECK(l64 >= 0.9 * sup);
}

TEST_CASE("operator error vs reference verified against the exhaustive scan") {
    const auto f = [](double u) { return u * u; };
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    const CoefficientGrid grid = CoefficientGrid::from_function(f, 5, domain, 8);
    const ProductKernel kernel(SigmoidalKernel::ramp(), 1);
    const ScalarField approx = evaluate_grid(grid, kernel, {201});
    const ScalarField reference = sample_function(f, domain, 201);
    const double sup = sup_error(approx, reference);
    CHECK(sup > 0.0);
    CHECK(sup < 0.5);
}

TEST_CASE("modular inequality: equal grids give zero on both sides") {
    std::mt19937_64 rng(37);
    std::vector<double> values(10);
    for (auto& v : values) v = testutil::uniform01(rng);
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    const CoefficientGrid f = CoefficientGrid::from_values(values, 10, domain);
    const CoefficientGrid g = CoefficientGrid::from_values(values, 10, domain);
    const ProductKernel kernel(SigmoidalKernel::ramp(), 1);
    const auto report =
        modular_inequality_check(PhiFunction::power(2.0), 1.0, f, g, kernel, 256);
    CHECK(report.lhs == 0.0);
    CHECK(report.rhs == 0.0);
    CHECK(report.pass);
}

TEST_CASE("modular inequality holds on random grids") {
    std::mt19937_64 rng(43);
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    const std::vector<PhiFunction> phis = {PhiFunction::power(2.0),
                                           PhiFunction::exponential(1.0)};
    const std::vector<SigmoidalKernel> kernels = {SigmoidalKernel::ramp(),
                                                  SigmoidalKernel::logistic()};
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> fv(10), gv(10);
        for (auto& v : fv) v = testutil::uniform01(rng);
        for (auto& v : gv) v = testutil::uniform01(rng);
        const CoefficientGrid f = CoefficientGrid::from_values(fv, 10, domain);
        const CoefficientGrid g = CoefficientGrid::from_values(gv, 10, domain);
        for (const auto& base : kernels) {
            const ProductKernel kernel(base, 1);
            for (const auto& phi : phis) {
                const auto report =
                    modular_inequality_check(phi, 1.0, f, g, kernel, 256);
                CHECK(report.pass);
                CHECK(report.lhs <= report.rhs * 1.01 + 1e-15);
            }
        }
    }
}

TEST_CASE("modular inequality rejects shifted or mismatched grids") {
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);
    const CoefficientGrid pos =
        CoefficientGrid::from_values({1.0, 2.0, 3.0}, 3, domain);
    const CoefficientGrid neg =
        CoefficientGrid::from_values({-1.0, 2.0, 3.0}, 3, domain);
    const CoefficientGrid other =
        CoefficientGrid::from_values(std::vector<double>(5, 1.0), 5, domain);
    const ProductKernel kernel(SigmoidalKernel::ramp(), 1);
    CHECK_THROWS_AS(
        modular_inequality_check(PhiFunction::power(2.0), 1.0, pos, neg, kernel, 64),
        ContractError);
    CHECK_THROWS_AS(
        modular_inequality_check(PhiFunction::power(2.0), 1.0, pos, other, kernel, 64),
        ContractError);
}

TEST_CASE("phi-function specs parse") {
    CHECK(PhiFunction::parse("power:2").has_value());
    CHECK(PhiFunction::parse("zygmund:1:1").has_value());
    CHECK(PhiFunction::parse("exp:0.5").has_value());
    CHECK_FALSE(PhiFunction::parse("power").has_value());
    CHECK_FALSE(PhiFunction::parse("power:0.5").has_value());
    CHECK_FALSE(PhiFunction::parse("cosh:1").has_value());
    CHECK(PhiFunction::parse("power:2")->name() == "power:2");
}
