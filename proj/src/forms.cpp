#include "musurf/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace musurf {

void asymptotic_normal(const SurfaceSolution& sol, ScalarField& n1, ScalarField& n2,
                       ScalarField& n3) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    n1 = ScalarField(s);
    n2 = ScalarField(s);
    n3 = ScalarField(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
            const double t = std::hypot(ux, uy);
            const double xi = d.xi(t);
            n1.at(i, j) = -xi * ux;
            n2.at(i, j) = -xi * uy;
            n3.at(i, j) = d.bracket(t);  // Xi + vartheta collapses to g - t g'
        }
}

FormAssembly assemble_forms(const SurfaceSolution& sol) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    FormAssembly fa;
    asymptotic_normal(sol, fa.nhat1, fa.nhat2, fa.nhat3);
    fa.phi1 = ScalarField(s);
    fa.phi2 = ScalarField(s);
    fa.psi1 = ScalarField(s);
    fa.psi2 = ScalarField(s);
    ScalarField gamma_p(s), gamma_q(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
            const double t = std::hypot(ux, uy);
            const double xi = d.xi(t);
            const double g = d.g(t);
            fa.phi1.at(i, j) = g - xi * uy * uy;
            fa.phi2.at(i, j) = xi * ux * uy;
            fa.psi1.at(i, j) = fa.phi2.at(i, j);
            fa.psi2.at(i, j) = g - xi * ux * ux;
            gamma_p.at(i, j) = xi * uy;
            gamma_q.at(i, j) = -xi * ux;
        }
    ScalarField neg_phi2(s), neg_psi2(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            neg_phi2.at(i, j) = -fa.phi2.at(i, j);
            neg_psi2.at(i, j) = -fa.psi2.at(i, j);
        }
    fa.alpha = OneFormField{neg_phi2, neg_psi2};
    fa.beta = OneFormField{fa.phi1, fa.phi2};
    fa.gamma = OneFormField{std::move(gamma_p), std::move(gamma_q)};
    return fa;
}

namespace {

ScalarField exterior_derivative(const OneFormField& w) {
    GradientPair gq = gradient(w.q);
    GradientPair gp = gradient(w.p);
    ScalarField out(w.spec());
    const GridSpec& s = w.spec();
    for (int j = 1; j + 1 < s.ny; ++j)
        for (int i = 1; i + 1 < s.nx; ++i)
            out.at(i, j) = gq.fx.at(i, j) - gp.fy.at(i, j);
    return out;
}

}  // namespace

ClosednessReport closedness_residuals(const FormAssembly& fa, const SurfaceSolution& sol) {
    const GridSpec& s = fa.beta.spec();
    if (s.nx < 5 || s.ny < 5)
        throw std::invalid_argument("closedness_residuals: need at least a 5x5 grid");
    ClosednessReport rep;
    rep.grid_h = s.h();
    rep.d_alpha = exterior_derivative(fa.alpha);
    rep.d_beta = exterior_derivative(fa.beta);
    // d gamma is minus the divergence of Xi grad u, i.e. minus the strong
    // residual; evaluated through the same pointwise expansion
    ScalarField r = strong_residual(sol);
    rep.d_gamma = ScalarField(s);
    for (int j = 1; j + 1 < s.ny; ++j)
        for (int i = 1; i + 1 < s.nx; ++i) rep.d_gamma.at(i, j) = -r.at(i, j);
    // max-norms skip the boundary collar: the one-sided edge stencils feed
    // the differenced coefficients a different truncation constant there,
    // which would mask the interior convergence order
    for (int j = 1; j + 1 < s.ny; ++j)
        for (int i = 1; i + 1 < s.nx; ++i) {
            if (!well_inside(s, i, j)) continue;
            rep.max_d_alpha = std::max(rep.max_d_alpha, std::abs(rep.d_alpha.at(i, j)));
            rep.max_d_beta = std::max(rep.max_d_beta, std::abs(rep.d_beta.at(i, j)));
            rep.max_d_gamma = std::max(rep.max_d_gamma, std::abs(rep.d_gamma.at(i, j)));
        }
    return rep;
}

IdentityReport density_identities(const EnergyDensity& d, const std::vector<double>& t_samples,
                                  double fd_step) {
    IdentityReport rep;
    rep.fd_step = fd_step;
    auto vartheta = [&d](double t) { return d.bracket(t) - d.xi(t); };
    auto rel = [](double lhs, double rhs) {
        return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
    };
    for (double t : t_samples) {
        if (!(t > 0.0)) throw std::invalid_argument("density_identities: t samples must be positive");
        const double s = fd_step;
        const double xi = d.xi(t);
        const double xi_p = (d.xi(t + s) - d.xi(t - s)) / (2.0 * s);
        const double th_p = (vartheta(t + s) - vartheta(t - s)) / (2.0 * s);

        // vartheta'(t) = -[t Xi(t) + Xi'(t) (1 + t^2)]
        rep.max_rel_vartheta_prime =
            std::max(rep.max_rel_vartheta_prime, rel(th_p, -(t * xi + xi_p * (1.0 + t * t))));

        for (int k = 0; k < 8; ++k) {
            const double phi = k * 0.25 * std::numbers::pi;
            const double ux = t * std::cos(phi), uy = t * std::sin(phi);
            const double xpt = xi_p / t;
            const double tpt = th_p / t;
            // T2 from the d beta computation vs the Euler coefficient
            const double t2_lhs = -xpt * (1.0 + ux * ux) - tpt;
            const double t2_rhs = xi + xpt * uy * uy;
            rep.max_rel_t2 = std::max(rep.max_rel_t2, rel(t2_lhs, t2_rhs));
            // T3 vs the mixed Euler coefficient times uy
            const double t3_lhs =
                -xpt * ux * (1.0 + ux * ux) - xi * ux - tpt * ux + ux * uy * uy * xpt;
            const double t3_rhs = uy * (2.0 * ux * uy * xpt);
            rep.max_rel_t3 = std::max(rep.max_rel_t3, rel(t3_lhs, t3_rhs));
        }
    }
    return rep;
}

}  // namespace musurf
