#pragma once

#include <array>
#include <utility>

#include "musurf/potential.hpp"

namespace musurf {

struct Point2 {
    double x = 0.0, y = 0.0;
};

struct DecayFit {
    double d1 = 0.0, d2 = 0.0;  // envelope |Theta| <= d1 t^(2-mu) + d2 t^(-1)
    double slope = 0.0;         // log-log least-squares slope on the upper decade
    bool theta_identically_zero = false;
};

struct ChiSample {
    std::array<double, 3> chi{};  // (Lambda^-1, u o Lambda^-1)
    std::array<double, 3> X{}, Y{};
    double det_dl = 0.0;
};

/// The gradient map Lambda = id + grad E together with its Jacobian
/// determinant, image hull and the pointwise conformality-defect fields.
struct ReparamResult {
    ScalarField lambda1, lambda2;
    ScalarField det_dl;           // closed form, no differentiation of E
    double det_fd_mismatch = 0.0; // vs the FD Jacobian of the integrated map
    double image_x0 = 0, image_y0 = 0, image_x1 = 0, image_y1 = 0;
    ScalarField defect_dot, defect_diff;      // scaled algebraic residuals
    ScalarField scaled_dot, scaled_diff;      // defect quantities / (det DL)^2
    double margin_prop_min = 0.0;  // min of det_dl - [1 + Xi (1+t^2)]
    double cor8_c = 0.0;           // recorded c = min det_dl / (1 + |grad u|)
    DecayFit decay{};
};

std::pair<ScalarField, ScalarField> lambda_map(const PotentialSet& ps);

/// det D Lambda from the closed form (1 + g)(1 + [g - t g']), the
/// eigenvalue product of id + D^2 E, evaluated pointwise from the density.
ScalarField det_dlambda(const SurfaceSolution& sol);

double det_dlambda_value(const EnergyDensity& d, double t);

ReparamResult build_reparam(const SurfaceSolution& sol, const PotentialSet& ps);

/// Newton inversion of the interpolated Lambda with the analytic Jacobian
/// [[1+phi1, phi2], [psi1, 1+psi2]]; residual <= 1e-10 or SolveError.
Point2 lambda_inverse(const ReparamResult& rr, const PotentialSet& ps, double xhat, double yhat);

/// chi = (Lambda^-1, u o Lambda^-1) plus the columns X, Y of
/// det(D Lambda) * D chi evaluated at the preimage.
ChiSample chi_and_jacobian(const ReparamResult& rr, const PotentialSet& ps,
                           const SurfaceSolution& sol, double xhat, double yhat);

/// X and Y straight from the closed forms at one gradient value.
void xy_vectors(const EnergyDensity& d, double ux, double uy, std::array<double, 3>& X,
                std::array<double, 3>& Y);

/// Residual fields of X.Y = ux uy Theta and |X|^2 - |Y|^2 = (ux^2-uy^2) Theta,
/// scaled by max(1, |X||Y|).
std::pair<ScalarField, ScalarField> conformality_defect(const SurfaceSolution& sol);

DecayFit decay_fit(const EnergyDensity& d, double t_min, double t_max, int n_samples);

}  // namespace musurf
