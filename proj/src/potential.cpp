#include "musurf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace musurf {

namespace {

// Trapezoid cumulative integral of one line of samples starting at k0.
void cumulative_line(const double* f, int n, int stride, double h, int k0, double* out,
                     int ostride) {
    out[k0 * ostride] = 0.0;
    for (int k = k0 + 1; k < n; ++k)
        out[k * ostride] = out[(k - 1) * ostride] + 0.5 * h * (f[(k - 1) * stride] + f[k * stride]);
    for (int k = k0 - 1; k >= 0; --k)
        out[k * ostride] = out[(k + 1) * ostride] - 0.5 * h * (f[k * stride] + f[(k + 1) * stride]);
}

ScalarField staircase(const OneFormField& w, int ai, int aj, bool x_first) {
    const GridSpec& s = w.spec();
    const double h = s.h();
    ScalarField E(s);
    if (x_first) {
        // along y = y(aj) in x, then vertically
        std::vector<double> row(s.nx);
        cumulative_line(&w.p.values()[s.index(0, aj)], s.nx, 1, h, ai, row.data(), 1);
        for (int i = 0; i < s.nx; ++i) {
            cumulative_line(&w.q.values()[s.index(i, 0)], s.ny, s.nx, h, aj,
                            &E.values()[s.index(i, 0)], s.nx);
            for (int j = 0; j < s.ny; ++j) E.at(i, j) += row[i];
        }
    } else {
        std::vector<double> col(s.ny);
        cumulative_line(&w.q.values()[s.index(ai, 0)], s.ny, s.nx, h, aj, col.data(), 1);
        for (int j = 0; j < s.ny; ++j) {
            cumulative_line(&w.p.values()[s.index(0, j)], s.nx, 1, h, ai,
                            &E.values()[s.index(0, j)], 1);
            for (int i = 0; i < s.nx; ++i) E.at(i, j) += col[j];
        }
    }
    return E;
}

}  // namespace

PotentialField integrate_potential(const OneFormField& form, int anchor_i, int anchor_j) {
    const GridSpec& s = form.spec();
    if (anchor_i < 0 || anchor_i >= s.nx || anchor_j < 0 || anchor_j >= s.ny)
        throw std::invalid_argument("integrate_potential: anchor outside grid");
    ScalarField e1 = staircase(form, anchor_i, anchor_j, true);
    ScalarField e2 = staircase(form, anchor_i, anchor_j, false);
    double disc = 0.0;
    for (int k = 0; k < s.size(); ++k)
        disc = std::max(disc, std::abs(e1.values()[k] - e2.values()[k]));
    return PotentialField{std::move(e1), disc};
}

PotentialSet recover_xstar(const SurfaceSolution& sol, const FormAssembly& fa, int anchor_i,
                           int anchor_j, bool theorem_main_sign) {
    const GridSpec& s = sol.u.spec();
    PotentialSet ps;
    ps.anchor_i = anchor_i;
    ps.anchor_j = anchor_j;
    ps.phi1 = fa.phi1;
    ps.phi2 = fa.phi2;
    ps.psi1 = fa.psi1;
    ps.psi2 = fa.psi2;

    PotentialField b = integrate_potential(OneFormField{fa.phi1, fa.phi2}, anchor_i, anchor_j);
    ScalarField neg_psi1(s), neg_psi2(s), neg_gp(s), neg_gq(s);
    for (int k = 0; k < s.size(); ++k) {
        neg_psi1.values()[k] = -fa.psi1.values()[k];
        neg_psi2.values()[k] = -fa.psi2.values()[k];
        neg_gp.values()[k] = -fa.gamma.p.values()[k];
        neg_gq.values()[k] = -fa.gamma.q.values()[k];
    }
    PotentialField a = integrate_potential(OneFormField{neg_psi1, neg_psi2}, anchor_i, anchor_j);
    PotentialField c = integrate_potential(OneFormField{neg_gp, neg_gq}, anchor_i, anchor_j);

    ps.a = std::move(a.value);
    ps.b = std::move(b.value);
    ps.c = std::move(c.value);
    if (theorem_main_sign) {
        for (int k = 0; k < s.size(); ++k) {
            ps.a.values()[k] = -ps.a.values()[k];
            ps.b.values()[k] = -ps.b.values()[k];
            ps.c.values()[k] = -ps.c.values()[k];
        }
    }

    ScalarField omega_p = ps.b, omega_q(s);
    for (int k = 0; k < s.size(); ++k) omega_q.values()[k] = -ps.a.values()[k];
    PotentialField E = integrate_potential(OneFormField{std::move(omega_p), std::move(omega_q)},
                                           anchor_i, anchor_j);
    ps.E = std::move(E.value);
    ps.path_discrepancy = std::max({a.path_discrepancy, b.path_discrepancy, c.path_discrepancy,
                                    E.path_discrepancy});

    HessianTriple hE = hessian(ps.E);
    ps.hessE_xx = std::move(hE.fxx);
    ps.hessE_xy = std::move(hE.fxy);
    ps.hessE_yy = std::move(hE.fyy);
    return ps;
}

HessReport check_hessE(const PotentialSet& ps, const SurfaceSolution& sol) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    HessReport rep;
    rep.min_eig_min = std::numeric_limits<double>::infinity();
    for (int j = 1; j + 1 < s.ny; ++j)
        for (int i = 1; i + 1 < s.nx; ++i) {
            const double p1 = ps.phi1.at(i, j), p2 = ps.phi2.at(i, j);
            const double q1 = ps.psi1.at(i, j), q2 = ps.psi2.at(i, j);
            const double off = 0.5 * (p2 + q1);
            const double mean = 0.5 * (p1 + q2);
            const double rad = std::hypot(0.5 * (p1 - q2), off);
            const double min_eig = mean - rad;
            rep.min_eig_min = std::min(rep.min_eig_min, min_eig);
            const double t = std::hypot(sol.ux.at(i, j), sol.uy.at(i, j));
            if (min_eig < d.bracket(t) - 1e-10) ++rep.bound_violations;
            // FD comparison only away from the boundary collar, where the
            // integrated E inherits a kink from the one-sided edge stencils
            if (well_inside(s, i, j))
                rep.fd_mismatch_max = std::max(
                    {rep.fd_mismatch_max, std::abs(ps.hessE_xx.at(i, j) - p1),
                     std::abs(ps.hessE_xy.at(i, j) - p2), std::abs(ps.hessE_yy.at(i, j) - q2)});
        }
    return rep;
}

}  // namespace musurf
