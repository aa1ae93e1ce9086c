#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "musurf/forms.hpp"

using namespace musurf;

TEST_CASE("asymptotic normal at a sampled gradient") {
    // u = 2x with the mu(3) density: N = (-8/9, 0, 5/9)
    GridSpec s = GridSpec::square(-1.0, 1.0, 11);
    SurfaceSolution sol =
        attach_fields(make_builtin("mu", 3.0), oracle_solution("affine", s, 2.0, 0.0, 0.0));
    ScalarField n1, n2, n3;
    asymptotic_normal(sol, n1, n2, n3);
    CHECK(n1.at(5, 5) == doctest::Approx(-8.0 / 9.0).epsilon(1e-13));
    CHECK(n2.at(5, 5) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(n3.at(5, 5) == doctest::Approx(5.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("the minimal density normal has unit length") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 21);
    ScalarField u = ScalarField::sample(
        s, [](double x, double y) { return std::sin(2.0 * x) + 0.7 * std::cos(y) + x * y; });
    SurfaceSolution sol = attach_fields(make_builtin("minimal"), u);
    ScalarField n1, n2, n3;
    asymptotic_normal(sol, n1, n2, n3);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double len =
                std::sqrt(n1.at(i, j) * n1.at(i, j) + n2.at(i, j) * n2.at(i, j) +
                          n3.at(i, j) * n3.at(i, j));
            CHECK(len == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("forms of a constant solution") {
    GridSpec s = GridSpec::square(0.0, 1.0, 9);
    SurfaceSolution sol = attach_fields(make_builtin("minimal"), ScalarField(s, 2.0));
    FormAssembly fa = assemble_forms(sol);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            CHECK(fa.alpha.p.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(fa.alpha.q.at(i, j) == doctest::Approx(-1.0).epsilon(1e-13));
            CHECK(fa.beta.p.at(i, j) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(fa.beta.q.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(fa.gamma.p.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(fa.gamma.q.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
        }
}

TEST_CASE("gamma of the unit tilt") {
    // u = x, minimal density: gamma = -(1/sqrt 2) dy
    GridSpec s = GridSpec::square(0.0, 1.0, 9);
    SurfaceSolution sol =
        attach_fields(make_builtin("minimal"), oracle_solution("affine", s, 1.0, 0.0, 0.0));
    FormAssembly fa = assemble_forms(sol);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            CHECK(fa.gamma.p.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(fa.gamma.q.at(i, j) ==
                  doctest::Approx(-1.0 / std::numbers::sqrt2).epsilon(1e-13));
        }
}

TEST_CASE("coefficient identities of the assembled forms") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 17);
    ScalarField u =
        ScalarField::sample(s, [](double x, double y) { return std::sin(x + 2.0 * y) + x * x; });
    for (auto [kind, mu] : std::vector<std::pair<std::string, std::optional<double>>>{
             {"minimal", std::nullopt}, {"mu", 3.0}}) {
        EnergyDensity d = make_builtin(kind, mu);
        SurfaceSolution sol = attach_fields(d, u);
        FormAssembly fa = assemble_forms(sol);
        for (int j = 0; j < s.ny; ++j)
            for (int i = 0; i < s.nx; ++i) {
                CHECK(fa.psi1.at(i, j) == doctest::Approx(fa.phi2.at(i, j)).epsilon(1e-14));
                const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
                const double t = std::hypot(ux, uy);
                const double xi = d.xi(t);
                const double vt = d.bracket(t) - xi;
                // g - Xi uy^2 = Xi (1 + ux^2) + vartheta, both routes
                CHECK(std::abs(fa.phi1.at(i, j) - (xi * (1.0 + ux * ux) + vt)) < 1e-12);
                CHECK(std::abs(fa.psi2.at(i, j) - (xi * (1.0 + uy * uy) + vt)) < 1e-12);
                // alpha and beta are sign and swap images of (phi, psi)
                CHECK(fa.alpha.p.at(i, j) == doctest::Approx(-fa.phi2.at(i, j)).epsilon(1e-14));
                CHECK(fa.alpha.q.at(i, j) == doctest::Approx(-fa.psi2.at(i, j)).epsilon(1e-14));
                CHECK(fa.beta.p.at(i, j) == doctest::Approx(fa.phi1.at(i, j)).epsilon(1e-14));
            }
    }
}

TEST_CASE("closedness residuals vanish on affine solutions") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 17);
    SurfaceSolution sol =
        attach_fields(make_builtin("mu", 2.5), oracle_solution("affine", s, 0.4, -1.1, 0.0));
    ClosednessReport rep = closedness_residuals(assemble_forms(sol), sol);
    CHECK(rep.max_d_alpha < 1e-12);
    CHECK(rep.max_d_beta < 1e-12);
    CHECK(rep.max_d_gamma < 1e-12);
}

TEST_CASE("closedness residuals are second order on the Scherk oracle") {
    EnergyDensity gm = make_builtin("minimal");
    auto run = [&gm](int n) {
        GridSpec s = GridSpec::square(-1.2, 1.2, n);
        SurfaceSolution sol = attach_fields(gm, oracle_solution("scherk", s));
        return closedness_residuals(assemble_forms(sol), sol);
    };
    ClosednessReport c33 = run(33), c65 = run(65);
    for (auto [coarse, fine] : {std::pair{c33.max_d_alpha, c65.max_d_alpha},
                                std::pair{c33.max_d_beta, c65.max_d_beta},
                                std::pair{c33.max_d_gamma, c65.max_d_gamma}}) {
        const double order = std::log2(coarse / fine);
        CHECK(order > 1.5);
        CHECK(order < 2.5);
    }
}

TEST_CASE("d gamma equals minus the strong residual") {
    GridSpec s = GridSpec::square(-1.2, 1.2, 25);
    SurfaceSolution sol = attach_fields(make_builtin("mu", 3.0), oracle_solution("scherk", s));
    ClosednessReport rep = closedness_residuals(assemble_forms(sol), sol);
    ScalarField r = strong_residual(sol);
    for (int j = 1; j + 1 < s.ny; ++j)
        for (int i = 1; i + 1 < s.nx; ++i)
            CHECK(rep.d_gamma.at(i, j) == doctest::Approx(-r.at(i, j)).epsilon(1e-14));
}

TEST_CASE("closedness needs a big enough grid") {
    GridSpec s = GridSpec::square(0.0, 1.0, 4);
    SurfaceSolution sol = attach_fields(make_builtin("minimal"), ScalarField(s, 0.0));
    CHECK_THROWS_AS(closedness_residuals(assemble_forms(sol), sol), std::invalid_argument);
}

TEST_CASE("density identities hold across the builtins") {
    const std::vector<double> ts{0.5, 1.0, 2.0, 5.0, 10.0};
    for (auto [kind, mu] : std::vector<std::pair<std::string, std::optional<double>>>{
             {"minimal", std::nullopt}, {"mu", 2.5}, {"mu", 3.0}, {"mu_hat", 3.0}}) {
        EnergyDensity d = make_builtin(kind, mu);
        IdentityReport rep = density_identities(d, ts);
        INFO(d.name());
        CHECK(rep.max_rel_vartheta_prime <= 1e-6);
        CHECK(rep.max_rel_t2 <= 1e-6);
        CHECK(rep.max_rel_t3 <= 1e-6);
    }
    CHECK_THROWS_AS(density_identities(make_builtin("minimal"), {0.0}), std::invalid_argument);
}
