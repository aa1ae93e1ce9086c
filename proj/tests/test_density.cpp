#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "musurf/density.hpp"

using namespace musurf;

namespace {
const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt5 = std::sqrt(5.0);
}  // namespace

TEST_CASE("minimal surface density spot values") {
    EnergyDensity d = make_builtin("minimal");
    CHECK(d.g(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.g(1.0) == doctest::Approx(kSqrt2).epsilon(1e-14));
    CHECK(d.g1(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d.g1(2.0) == doctest::Approx(2.0 / kSqrt5).epsilon(1e-14));
    CHECK(d.bracket(2.0) == doctest::Approx(1.0 / kSqrt5).epsilon(1e-14));
    CHECK(d.xi(2.0) == doctest::Approx(1.0 / kSqrt5).epsilon(1e-14));
    CHECK(d.xi(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(d.theta(0.5)) < 1e-14);
    CHECK(std::abs(d.theta(7.0)) < 1e-14);
    CHECK(d.slope_at_infinity() == doctest::Approx(1.0));
}

TEST_CASE("mu family spot values at mu = 3") {
    EnergyDensity d = make_builtin("mu", 3.0);
    CHECK(d.g(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.g(2.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    CHECK(d.g1(2.0) == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(d.g2(2.0) == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
    CHECK(d.bracket(2.0) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
    CHECK(d.xi(2.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(d.theta(2.0) == doctest::Approx(20.0 / 81.0).epsilon(1e-12));
}

TEST_CASE("mu family: 1 - g' equals (1+t)^(1-mu) exactly") {
    for (double mu : {2.5, 3.0, 4.0}) {
        EnergyDensity d = make_builtin("mu", mu);
        for (double t : {0.0, 0.5, 1.0, 2.0, 10.0, 100.0}) {
            CHECK(1.0 - d.g1(t) ==
                  doctest::Approx(std::pow(1.0 + t, 1.0 - mu)).epsilon(1e-14));
        }
    }
}

TEST_CASE("mu_hat family at mu = 3 is the shifted minimal density") {
    EnergyDensity d = make_builtin("mu_hat", 3.0);
    CHECK(d.g1(2.0) == doctest::Approx(2.0 / kSqrt5).epsilon(1e-14));
    CHECK(d.g(2.0) == doctest::Approx(kSqrt5 - 1.0).epsilon(1e-11));
    CHECK(d.bracket(2.0) == doctest::Approx(1.0 / kSqrt5 - 1.0).epsilon(1e-14));
    CHECK(d.slope_at_infinity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diagnostics carries the flat-point limits") {
    EnergyDensity d = make_builtin("mu", 3.0);
    DensityDiagnostics dg = diagnostics(d, 0.0);
    CHECK(dg.xi == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dg.vartheta == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(dg.bracket == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dg.h == doctest::Approx(1.0).epsilon(1e-12));

    DensityDiagnostics d2 = diagnostics(d, 2.0);
    CHECK(d2.g == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    CHECK(d2.xi == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(d2.vartheta == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(d2.theta == doctest::Approx(20.0 / 81.0).epsilon(1e-12));
    // t R(t) = g'(t) [g(t) - t g'(t)]
    CHECK(2.0 * d2.remainder == doctest::Approx(d2.g1 * d2.bracket).epsilon(1e-13));

    CHECK_THROWS_AS(diagnostics(d, -1.0), std::invalid_argument);
}

TEST_CASE("xi is stable near zero") {
    for (const char* kind : {"minimal", "mu"}) {
        EnergyDensity d = make_builtin(kind, std::string(kind) == "mu"
                                                 ? std::optional<double>(3.0)
                                                 : std::nullopt);
        const double g20 = d.g2(0.0);
        CHECK(d.xi(1e-8) == doctest::Approx(g20).epsilon(1e-7));
        CHECK(d.xi(1e-12) == doctest::Approx(g20).epsilon(1e-10));
    }
}

TEST_CASE("bracket derivative matches -t g''") {
    const double s = 1e-5;
    for (auto [kind, mu] : std::vector<std::pair<std::string, std::optional<double>>>{
             {"minimal", std::nullopt}, {"mu", 2.5}, {"mu", 3.0}, {"mu_hat", 3.0}}) {
        EnergyDensity d = make_builtin(kind, mu);
        for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double fd = (d.bracket(t + s) - d.bracket(t - s)) / (2.0 * s);
            CHECK(std::abs(fd + t * d.g2(t)) < 1e-6);
        }
    }
}

TEST_CASE("xi_prime matches a finite difference of xi") {
    EnergyDensity d = make_builtin("mu", 3.0);
    const double s = 1e-6;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        const double fd = (d.xi(t + s) - d.xi(t - s)) / (2.0 * s);
        CHECK(d.xi_prime(t) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("builtin factory rejects bad arguments") {
    CHECK_THROWS_AS(make_builtin("mu", 1.5), ValidationError);
    CHECK_THROWS_AS(make_builtin("mu", 2.0), ValidationError);
    CHECK_THROWS_AS(make_builtin("mu"), ValidationError);
    CHECK_THROWS_AS(make_builtin("mu_hat", 1.9), ValidationError);
    CHECK_THROWS_AS(make_builtin("nope"), ValidationError);
}

TEST_CASE("validation passes for all builtins") {
    auto grid = default_sample_grid();
    for (auto [kind, mu] : std::vector<std::pair<std::string, std::optional<double>>>{
             {"minimal", std::nullopt}, {"mu", 2.5}, {"mu", 3.0}, {"mu_hat", 3.0}}) {
        EnergyDensity d = make_builtin(kind, mu);
        ValidationReport rep = validate(d, grid);
        INFO(d.name());
        for (const auto& c : rep.checks) {
            INFO(c.name, ": ", c.detail);
            CHECK(c.passed);
        }
        CHECK(rep.passed());
    }
}

TEST_CASE("validation flags the sub-quadratic exponent") {
    EnergyDensity d = make_mu_density(1.5);
    ValidationReport rep = validate(d, default_sample_grid());
    CHECK_FALSE(rep.passed());
    bool integrability_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "integrability" && !c.passed) integrability_failed = true;
    CHECK(integrability_failed);
    CHECK(rep.failures().size() >= 1);
}

TEST_CASE("normalize recovers the minimal density from mu_hat(3)") {
    EnergyDensity gm = make_builtin("minimal");
    EnergyDensity gh = normalize(make_builtin("mu_hat", 3.0));
    CHECK(gh.normalization_shift() == doctest::Approx(-1.0).epsilon(1e-10));
    for (double t = 0.0; t <= 100.0; t += 2.5)
        CHECK(std::abs(gh.g(t) - gm.g(t)) < 1e-10);
}

TEST_CASE("normalize is the identity on already normalized densities") {
    for (auto [kind, mu] : std::vector<std::pair<std::string, std::optional<double>>>{
             {"minimal", std::nullopt}, {"mu", 3.0}}) {
        EnergyDensity d = make_builtin(kind, mu);
        EnergyDensity n = normalize(d);
        CHECK(std::abs(n.normalization_shift()) < 1e-10);
        EnergyDensity n2 = normalize(n);
        for (double t : {0.0, 1.0, 10.0, 100.0})
            CHECK(std::abs(n2.g(t) - n.g(t)) < 1e-12);
    }
}

TEST_CASE("normalize rejects densities without unit slope at infinity") {
    CHECK_THROWS_AS(normalize(make_builtin("mu_hat", 4.0)), ValidationError);
}

TEST_CASE("shifted moves g and the bracket together") {
    EnergyDensity d = make_builtin("mu", 3.0).shifted(0.25);
    CHECK(d.g(2.0) == doctest::Approx(7.0 / 3.0 - 0.25).epsilon(1e-14));
    CHECK(d.bracket(2.0) == doctest::Approx(5.0 / 9.0 - 0.25).epsilon(1e-14));
    CHECK(d.g1(2.0) == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("recorded decay constants dominate bracket and 1 - g'") {
    for (double mu : {3.0}) {
        EnergyDensity d = make_builtin("mu", mu);
        auto ell = d.ellipticity_constants();
        REQUIRE(ell.has_value());
        auto [c1, c2] = *ell;
        CHECK(c1 > 0.0);
        CHECK(c2 > 0.0);
        for (double t : {1.0, 10.0, 100.0, 1000.0}) {
            CHECK(std::abs(d.bracket(t)) <= c1 * std::pow(t, 2.0 - mu) * (1.0 + 1e-12));
            CHECK(1.0 - d.g1(t) <= c2 * std::pow(t, 1.0 - mu) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("sample grid covers the requested range") {
    auto grid = default_sample_grid();
    REQUIRE(grid.size() >= 100);
    CHECK(grid.front() == doctest::Approx(0.0));
    CHECK(grid.back() >= 1000.0);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK_THROWS_AS(validate(make_builtin("minimal"), std::vector<double>{0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("adaptive Simpson quadrature") {
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-10));
}
