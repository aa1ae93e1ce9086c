#pragma once

#include <vector>

#include "musurf/density.hpp"
#include "musurf/grid.hpp"
#include "musurf/solver.hpp"

namespace musurf {

/// The asymptotic normal together with the 1-forms alpha, beta, gamma and
/// their coefficient fields:
///   alpha = -Xi ux uy dx - [Xi (1+uy^2) + vartheta] dy
///   beta  =  [Xi (1+ux^2) + vartheta] dx + Xi ux uy dy
///   gamma =  Xi uy dx - Xi ux dy
///   phi1 = Xi (1+ux^2) + vartheta = g - Xi uy^2,   phi2 = psi1 = Xi ux uy,
///   psi2 = Xi (1+uy^2) + vartheta = g - Xi ux^2.
struct FormAssembly {
    ScalarField nhat1, nhat2, nhat3;
    OneFormField alpha, beta, gamma;
    ScalarField phi1, phi2, psi1, psi2;
};

struct ClosednessReport {
    ScalarField d_alpha, d_beta, d_gamma;  // discrete 2-form densities, interior nodes
    // max-norms over nodes well inside the rectangle (see well_inside)
    double max_d_alpha = 0.0, max_d_beta = 0.0, max_d_gamma = 0.0;
    double grid_h = 0.0;
};

struct IdentityReport {
    double max_rel_vartheta_prime = 0.0;  // vartheta' = -[t Xi + Xi' (1+t^2)]
    double max_rel_t2 = 0.0;              // T2 matches the second Euler coefficient
    double max_rel_t3 = 0.0;              // T3 matches uy * [2 ux uy Xi'/t]
    double fd_step = 1e-5;
};

/// N^ = (-Xi ux, -Xi uy, Xi + vartheta), with the g''(0) limit of Xi at
/// flat points.
void asymptotic_normal(const SurfaceSolution& sol, ScalarField& n1, ScalarField& n2,
                       ScalarField& n3);

FormAssembly assemble_forms(const SurfaceSolution& sol);

/// Discrete exterior derivative (dx q - dy p) of alpha and beta with the
/// same central stencils as the grid gradient; d gamma equals minus the
/// strong residual of the solution by construction.  Interior max-norms.
ClosednessReport closedness_residuals(const FormAssembly& fa, const SurfaceSolution& sol);

/// Finite-difference verification of the density identities feeding the
/// closedness proof, over a panel of gradient directions at each |t|.
IdentityReport density_identities(const EnergyDensity& d, const std::vector<double>& t_samples,
                                  double fd_step = 1e-5);

}  // namespace musurf
