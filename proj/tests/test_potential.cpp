#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "musurf/potential.hpp"

using namespace musurf;

TEST_CASE("staircase integration of exact forms") {
    GridSpec s = GridSpec::square(0.0, 1.0, 11);
    OneFormField dx{ScalarField(s, 1.0), ScalarField(s, 0.0)};
    PotentialField px = integrate_potential(dx, 0, 0);
    CHECK(px.path_discrepancy < 1e-14);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            CHECK(px.value.at(i, j) == doctest::Approx(s.x(i)).epsilon(1e-13));

    OneFormField dxy{ScalarField::sample(s, [](double, double y) { return y; }),
                     ScalarField::sample(s, [](double x, double) { return x; })};
    PotentialField pxy = integrate_potential(dxy, 0, 0);
    CHECK(pxy.path_discrepancy < 1e-13);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            CHECK(pxy.value.at(i, j) == doctest::Approx(s.x(i) * s.y(j)).epsilon(1e-12));

    CHECK_THROWS_AS(integrate_potential(dx, -1, 0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_potential(dx, 0, 11), std::invalid_argument);
}

TEST_CASE("constant solution recovers the identity potentials") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 21);
    SurfaceSolution sol = attach_fields(make_builtin("minimal"), ScalarField(s, 5.0));
    FormAssembly fa = assemble_forms(sol);
    PotentialSet ps = recover_xstar(sol, fa, 10, 10);  // anchor at the origin
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            CHECK(ps.b.at(i, j) == doctest::Approx(s.x(i)).epsilon(1e-13));
            CHECK(ps.a.at(i, j) == doctest::Approx(-s.y(j)).epsilon(1e-13));
            CHECK(ps.c.at(i, j) == doctest::Approx(0.0).epsilon(1e-13));
            const double e = 0.5 * (s.x(i) * s.x(i) + s.y(j) * s.y(j));
            CHECK(ps.E.at(i, j) == doctest::Approx(e).epsilon(1e-12));
        }
    CHECK(ps.path_discrepancy < 1e-12);
    HessReport hr = check_hessE(ps, sol);
    CHECK(hr.bound_violations == 0);
    CHECK(hr.min_eig_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hr.fd_mismatch_max < 1e-9);
}

TEST_CASE("hessian of E on tilted planes matches the diagonal examples") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 21);

    // u = x, minimal density: D^2 E = diag(sqrt 2, 1/sqrt 2)
    SurfaceSolution s1 =
        attach_fields(make_builtin("minimal"), oracle_solution("affine", s, 1.0, 0.0, 0.0));
    PotentialSet p1 = recover_xstar(s1, assemble_forms(s1), 10, 10);
    CHECK(p1.phi1.at(5, 5) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-13));
    CHECK(p1.psi2.at(5, 5) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-13));
    CHECK(p1.phi2.at(5, 5) == doctest::Approx(0.0).epsilon(1e-13));
    HessReport h1 = check_hessE(p1, s1);
    CHECK(h1.bound_violations == 0);
    CHECK(h1.min_eig_min == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(h1.fd_mismatch_max < 1e-9);

    // u = 2x, mu(3) density: D^2 E = diag(7/3, 5/9), min eigenvalue on the bound
    SurfaceSolution s2 =
        attach_fields(make_builtin("mu", 3.0), oracle_solution("affine", s, 2.0, 0.0, 0.0));
    PotentialSet p2 = recover_xstar(s2, assemble_forms(s2), 10, 10);
    CHECK(p2.phi1.at(5, 5) == doctest::Approx(7.0 / 3.0).epsilon(1e-13));
    CHECK(p2.psi2.at(5, 5) == doctest::Approx(5.0 / 9.0).epsilon(1e-13));
    HessReport h2 = check_hessE(p2, s2);
    CHECK(h2.bound_violations == 0);
    CHECK(h2.min_eig_min == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("theorem_main_sign flips the recovered triple") {
    GridSpec s = GridSpec::square(-1.0, 1.0, 11);
    SurfaceSolution sol =
        attach_fields(make_builtin("minimal"), oracle_solution("affine", s, 0.5, 0.5, 0.0));
    FormAssembly fa = assemble_forms(sol);
    PotentialSet plus = recover_xstar(sol, fa, 0, 0, false);
    PotentialSet minus = recover_xstar(sol, fa, 0, 0, true);
    for (int k = 0; k < s.size(); ++k) {
        CHECK(minus.a.values()[k] == doctest::Approx(-plus.a.values()[k]).epsilon(1e-14));
        CHECK(minus.b.values()[k] == doctest::Approx(-plus.b.values()[k]).epsilon(1e-14));
        CHECK(minus.c.values()[k] == doctest::Approx(-plus.c.values()[k]).epsilon(1e-14));
    }
}

TEST_CASE("anchor outside the grid throws") {
    GridSpec s = GridSpec::square(0.0, 1.0, 9);
    SurfaceSolution sol = attach_fields(make_builtin("minimal"), ScalarField(s, 0.0));
    FormAssembly fa = assemble_forms(sol);
    CHECK_THROWS_AS(recover_xstar(sol, fa, 9, 0), std::invalid_argument);
}

TEST_CASE("path independence and gradient consistency sharpen under refinement") {
    EnergyDensity gm = make_builtin("minimal");
    auto run = [&gm](int n, double& path, double& grad_err) {
        GridSpec s = GridSpec::square(-1.0, 1.0, n);
        SurfaceSolution sol = attach_fields(gm, oracle_solution("scherk", s));
        PotentialSet ps = recover_xstar(sol, assemble_forms(sol), 0, 0);
        path = ps.path_discrepancy;
        // grad E = (b, -a) up to the discretization error
        GradientPair gE = gradient(ps.E);
        grad_err = 0.0;
        for (int j = 0; j < s.ny; ++j)
            for (int i = 0; i < s.nx; ++i) {
                if (!well_inside(s, i, j)) continue;
                grad_err = std::max({grad_err, std::abs(gE.fx.at(i, j) - ps.b.at(i, j)),
                                     std::abs(gE.fy.at(i, j) + ps.a.at(i, j))});
            }
    };
    double p33, g33, p129, g129;
    run(33, p33, g33);
    run(129, p129, g129);
    // two halvings of h: at least order 1.8 on average
    CHECK(std::log2(p33 / p129) / 2.0 > 1.8);
    CHECK(std::log2(g33 / g129) / 2.0 > 1.8);
}

TEST_CASE("hessE check passes on a solved Scherk problem") {
    GridSpec s = GridSpec::square(-1.2, 1.2, 33);
    SurfaceSolution sol = solve_dirichlet(make_builtin("minimal"), s, make_boundary("scherk"));
    REQUIRE(sol.converged);
    PotentialSet ps = recover_xstar(sol, assemble_forms(sol), 0, 0);
    HessReport hr = check_hessE(ps, sol);
    CHECK(hr.bound_violations == 0);
    CHECK(hr.min_eig_min > 0.0);
}
