#include "musurf/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace musurf {

std::pair<ScalarField, ScalarField> lambda_map(const PotentialSet& ps) {
    const GridSpec& s = ps.b.spec();
    ScalarField l1(s), l2(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            l1.at(i, j) = s.x(i) + ps.b.at(i, j);
            l2.at(i, j) = s.y(j) - ps.a.at(i, j);
        }
    return {std::move(l1), std::move(l2)};
}

double det_dlambda_value(const EnergyDensity& d, double t) {
    // (1 + phi1)(1 + psi2) - phi2 psi1 collapses to (1 + g)(1 + [g - t g']);
    // the Hessian of E has eigenvalues exactly g - t g' and g
    return (1.0 + d.g(t)) * (1.0 + d.bracket(t));
}

ScalarField det_dlambda(const SurfaceSolution& sol) {
    const GridSpec& s = sol.u.spec();
    ScalarField out(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            out.at(i, j) =
                det_dlambda_value(sol.density, std::hypot(sol.ux.at(i, j), sol.uy.at(i, j)));
    return out;
}

void xy_vectors(const EnergyDensity& d, double ux, double uy, std::array<double, 3>& X,
                std::array<double, 3>& Y) {
    const double t = std::hypot(ux, uy);
    const double xi = d.xi(t);
    const double g = d.g(t);
    const double third = 1.0 + g - xi * t * t;
    X = {1.0 + g - xi * ux * ux, -xi * ux * uy, ux * third};
    Y = {-xi * ux * uy, 1.0 + g - xi * uy * uy, uy * third};
}

std::pair<ScalarField, ScalarField> conformality_defect(const SurfaceSolution& sol) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    ScalarField dot(s), diff(s);
    std::array<double, 3> X, Y;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
            xy_vectors(d, ux, uy, X, Y);
            const double theta = d.theta(std::hypot(ux, uy));
            const double xy = X[0] * Y[0] + X[1] * Y[1] + X[2] * Y[2];
            const double xx = X[0] * X[0] + X[1] * X[1] + X[2] * X[2];
            const double yy = Y[0] * Y[0] + Y[1] * Y[1] + Y[2] * Y[2];
            const double scale = std::max(1.0, std::sqrt(xx * yy));
            dot.at(i, j) = (xy - ux * uy * theta) / scale;
            diff.at(i, j) = (xx - yy - (ux * ux - uy * uy) * theta) / scale;
        }
    return {std::move(dot), std::move(diff)};
}

ReparamResult build_reparam(const SurfaceSolution& sol, const PotentialSet& ps) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    ReparamResult rr;
    auto [l1, l2] = lambda_map(ps);
    rr.lambda1 = std::move(l1);
    rr.lambda2 = std::move(l2);
    rr.det_dl = det_dlambda(sol);

    GradientPair g1 = gradient(rr.lambda1);
    GradientPair g2 = gradient(rr.lambda2);
    rr.margin_prop_min = std::numeric_limits<double>::infinity();
    rr.cor8_c = std::numeric_limits<double>::infinity();
    rr.image_x0 = rr.image_y0 = std::numeric_limits<double>::infinity();
    rr.image_x1 = rr.image_y1 = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            rr.image_x0 = std::min(rr.image_x0, rr.lambda1.at(i, j));
            rr.image_x1 = std::max(rr.image_x1, rr.lambda1.at(i, j));
            rr.image_y0 = std::min(rr.image_y0, rr.lambda2.at(i, j));
            rr.image_y1 = std::max(rr.image_y1, rr.lambda2.at(i, j));
            const double t = std::hypot(sol.ux.at(i, j), sol.uy.at(i, j));
            const double det = rr.det_dl.at(i, j);
            rr.margin_prop_min =
                std::min(rr.margin_prop_min, det - (1.0 + d.xi(t) * (1.0 + t * t)));
            rr.cor8_c = std::min(rr.cor8_c, det / (1.0 + t));
            if (well_inside(s, i, j)) {
                const double det_fd = g1.fx.at(i, j) * g2.fy.at(i, j) -
                                      g1.fy.at(i, j) * g2.fx.at(i, j);
                rr.det_fd_mismatch = std::max(rr.det_fd_mismatch, std::abs(det_fd - det));
            }
        }

    auto [dot, diff] = conformality_defect(sol);
    rr.defect_dot = std::move(dot);
    rr.defect_diff = std::move(diff);
    rr.scaled_dot = ScalarField(s);
    rr.scaled_diff = ScalarField(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
            const double theta = d.theta(std::hypot(ux, uy));
            const double det2 = rr.det_dl.at(i, j) * rr.det_dl.at(i, j);
            rr.scaled_dot.at(i, j) = theta * ux * uy / det2;
            rr.scaled_diff.at(i, j) = theta * (ux * ux - uy * uy) / det2;
        }
    return rr;
}

Point2 lambda_inverse(const ReparamResult& rr, const PotentialSet& ps, double xhat, double yhat) {
    const GridSpec& s = rr.lambda1.spec();
    const double tol_hull = 1e-9 * (1.0 + std::abs(xhat) + std::abs(yhat));
    if (xhat < rr.image_x0 - tol_hull || xhat > rr.image_x1 + tol_hull ||
        yhat < rr.image_y0 - tol_hull || yhat > rr.image_y1 + tol_hull)
        throw std::domain_error(
            fmt::format("lambda_inverse: target ({}, {}) outside image hull", xhat, yhat));

    // start at the node whose image is closest to the target
    double best = std::numeric_limits<double>::infinity();
    double x = s.x0, y = s.y0;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double dist = std::hypot(rr.lambda1.at(i, j) - xhat, rr.lambda2.at(i, j) - yhat);
            if (dist < best) {
                best = dist;
                x = s.x(i);
                y = s.y(j);
            }
        }

    double res = best;
    for (int it = 0; it < 50; ++it) {
        const double f1 = interpolate(rr.lambda1, x, y) - xhat;
        const double f2 = interpolate(rr.lambda2, x, y) - yhat;
        res = std::hypot(f1, f2);
        if (res <= 1e-10) return {x, y};
        const double j11 = 1.0 + interpolate(ps.phi1, x, y);
        const double j12 = interpolate(ps.phi2, x, y);
        const double j21 = interpolate(ps.psi1, x, y);
        const double j22 = 1.0 + interpolate(ps.psi2, x, y);
        const double det = j11 * j22 - j12 * j21;
        double dx = -(j22 * f1 - j12 * f2) / det;
        double dy = -(-j21 * f1 + j11 * f2) / det;
        x = std::clamp(x + dx, s.x0, s.x1);
        y = std::clamp(y + dy, s.y0, s.y1);
    }
    throw SolveError(fmt::format(
        "lambda_inverse: no convergence for target ({}, {}), residual {:.3e}", xhat, yhat, res));
}

ChiSample chi_and_jacobian(const ReparamResult& rr, const PotentialSet& ps,
                           const SurfaceSolution& sol, double xhat, double yhat) {
    Point2 p = lambda_inverse(rr, ps, xhat, yhat);
    ChiSample out;
    out.chi = {p.x, p.y, interpolate(sol.u, p.x, p.y)};
    const double ux = interpolate(sol.ux, p.x, p.y);
    const double uy = interpolate(sol.uy, p.x, p.y);
    xy_vectors(sol.density, ux, uy, out.X, out.Y);
    out.det_dl = det_dlambda_value(sol.density, std::hypot(ux, uy));
    return out;
}

DecayFit decay_fit(const EnergyDensity& d, double t_min, double t_max, int n_samples) {
    if (!(t_min >= 1.0) || !(t_max > t_min) || n_samples < 4)
        throw std::invalid_argument("decay_fit: need 1 <= t_min < t_max and >= 4 samples");
    DecayFit fit;
    std::vector<double> ts(n_samples), th(n_samples);
    double max_abs = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        ts[k] = t_min * std::pow(t_max / t_min, double(k) / (n_samples - 1));
        th[k] = d.theta(ts[k]);
        max_abs = std::max(max_abs, std::abs(th[k]));
    }
    if (max_abs < 1e-12) {
        fit.theta_identically_zero = true;
        return fit;
    }
    // slope on the upper decade
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int k = 0; k < n_samples; ++k) {
        if (ts[k] < t_max / 10.0 || std::abs(th[k]) < 1e-300) continue;
        const double lx = std::log(ts[k]), ly = std::log(std::abs(th[k]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m >= 2) fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    const double mu = d.mu_exponent().value_or(3.0);
    double denom_max = 0.0;
    for (int k = 0; k < n_samples; ++k)
        denom_max = std::max(denom_max,
                             std::abs(th[k]) / (std::pow(ts[k], 2.0 - mu) + 1.0 / ts[k]));
    // equal-coefficient envelope: tightest d with |Theta| <= d (t^(2-mu) + 1/t)
    fit.d1 = fit.d2 = denom_max;
    return fit;
}

}  // namespace musurf
