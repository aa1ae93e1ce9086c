#pragma once

#include <utility>

#include "musurf/forms.hpp"
#include "musurf/grid.hpp"
#include "musurf/solver.hpp"

namespace musurf {

struct PotentialField {
    ScalarField value;
    double path_discrepancy = 0.0;  // max mismatch between the two staircase paths
};

/// X* = (a, b, c) plus the scalar potential E of omega = b dx - a dy,
/// gauged to 0 at the anchor node.  Signs follow the gradient-map
/// convention: grad b = (phi1, phi2), grad a = -(psi1, psi2), -dc = gamma.
struct PotentialSet {
    ScalarField a, b, c;
    ScalarField E;
    int anchor_i = 0, anchor_j = 0;
    ScalarField hessE_xx, hessE_xy, hessE_yy;  // finite differences of E
    ScalarField phi1, phi2, psi1, psi2;        // analytic D^2 E entries
    double path_discrepancy = 0.0;             // worst over all integrations
};

struct HessReport {
    double min_eig_min = 0.0;      // min over interior nodes of the smallest eigenvalue
    int bound_violations = 0;      // nodes with min-eig < (g - t g') - 1e-10
    double fd_mismatch_max = 0.0;  // FD Hessian of E vs analytic matrix, well inside
};

/// Trapezoidal line integral of a (discretely closed) form along the
/// staircase anchor -> (x, y0) -> (x, y); the transposed path is used to
/// measure path dependence.
PotentialField integrate_potential(const OneFormField& form, int anchor_i, int anchor_j);

PotentialSet recover_xstar(const SurfaceSolution& sol, const FormAssembly& fa, int anchor_i = 0,
                           int anchor_j = 0, bool theorem_main_sign = false);

HessReport check_hessE(const PotentialSet& ps, const SurfaceSolution& sol);

}  // namespace musurf
