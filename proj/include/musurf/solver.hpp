#pragma once

#include <functional>
#include <string>
#include <vector>

#include "musurf/density.hpp"
#include "musurf/grid.hpp"

namespace musurf {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveConfig {
    double tol_gradient = 1e-9;  // max-norm of the discrete energy gradient
    int max_iters = 100;
    double ls_shrink = 0.5;
    double ls_c1 = 1e-4;  // sufficient-decrease constant
};

/// A solution of the discrete Dirichlet problem together with its
/// derivative fields (regenerated from u by the grid operators).
struct SurfaceSolution {
    EnergyDensity density;
    ScalarField u;
    ScalarField ux, uy;
    ScalarField uxx, uxy, uyy;
    double energy = 0.0;
    double residual_norm = 0.0;  // max-norm of the strong-form residual, interior
    bool converged = false;
    int iterations = 0;
    std::vector<double> energy_history;
};

using BoundaryFn = std::function<double(double, double)>;

/// Wraps nodal samples of u into a SurfaceSolution (derivative fields,
/// energy, residual norm) without solving anything.  Used for oracle
/// fields and converse checks.
SurfaceSolution attach_fields(const EnergyDensity& d, const ScalarField& u);

/// Trapezoidal quadrature of g(|grad u|) over the rectangle, nodal
/// central-difference gradients.
double discrete_energy(const EnergyDensity& d, const ScalarField& u);

/// Gradient of discrete_energy w.r.t. every nodal value (adjoint of the
/// difference stencils applied to Xi(|G|) G times the quadrature weights).
ScalarField discrete_energy_gradient(const EnergyDensity& d, const ScalarField& u);

/// Damped Newton on the discrete energy, interior nodes as unknowns,
/// boundary nodes pinned to the boundary data.  Initial iterate is the
/// discrete harmonic extension of the boundary values unless an explicit
/// start field is supplied.
SurfaceSolution solve_dirichlet(const EnergyDensity& d, const GridSpec& spec,
                                const BoundaryFn& boundary, const SolveConfig& cfg = {},
                                const ScalarField* initial = nullptr);

/// Pointwise strong-form residual div{ Xi(|grad u|) grad u } via the
/// three-coefficient expansion; at flat points the isotropic limit
/// Xi(0) * Laplace(u).
ScalarField strong_residual(const SurfaceSolution& sol);

/// Analytic oracle fields: "affine" a x + b y + c, or "scherk"
/// log(cos y / cos x) (requires the rectangle inside |x|,|y| < pi/2).
ScalarField oracle_solution(const std::string& kind, const GridSpec& spec, double a = 0.0,
                            double b = 0.0, double c = 0.0);

/// Named boundary data: "affine" (a,b,c), "saddle" (x^2 - y^2),
/// "scherk", "radial" (slope * r).
BoundaryFn make_boundary(const std::string& name, double a = 0.0, double b = 0.0, double c = 0.0,
                         double slope = 1.0);

}  // namespace musurf
