#include "musurf/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace musurf {

namespace {

// Each grid cell splits into two triangles with a constant gradient,
// built from nodal differences.  This keeps the energy strictly convex
// on the pinned-boundary space (the per-element gradients vanish only on
// constants), so no spurious lattice modes survive.
struct Triangle {
    int n0, n1, n2;                     // flat node indices
    double bx0, bx1, bx2;               // d(gx)/d(u_nk)
    double by0, by1, by2;               // d(gy)/d(u_nk)
};

template <class F>
void for_each_triangle(const GridSpec& s, F&& fn) {
    const double inv_h = 1.0 / s.h();
    for (int j = 0; j + 1 < s.ny; ++j)
        for (int i = 0; i + 1 < s.nx; ++i) {
            const int n00 = s.index(i, j), n10 = s.index(i + 1, j);
            const int n01 = s.index(i, j + 1), n11 = s.index(i + 1, j + 1);
            // lower: gx = (u10-u00)/h, gy = (u01-u00)/h
            fn(Triangle{n00, n10, n01, -inv_h, inv_h, 0.0, -inv_h, 0.0, inv_h});
            // upper: gx = (u11-u01)/h, gy = (u11-u10)/h
            fn(Triangle{n11, n01, n10, inv_h, -inv_h, 0.0, inv_h, 0.0, -inv_h});
        }
}

}  // namespace

double discrete_energy(const EnergyDensity& d, const ScalarField& u) {
    const GridSpec& s = u.spec();
    const double area = 0.5 * s.h() * s.h();
    const std::vector<double>& v = u.values();
    double e = 0.0;
    for_each_triangle(s, [&](const Triangle& tr) {
        const double gx = tr.bx0 * v[tr.n0] + tr.bx1 * v[tr.n1] + tr.bx2 * v[tr.n2];
        const double gy = tr.by0 * v[tr.n0] + tr.by1 * v[tr.n1] + tr.by2 * v[tr.n2];
        e += area * d.g(std::hypot(gx, gy));
    });
    if (!std::isfinite(e)) throw SolveError("discrete_energy: non-finite value");
    return e;
}

ScalarField discrete_energy_gradient(const EnergyDensity& d, const ScalarField& u) {
    const GridSpec& s = u.spec();
    const double area = 0.5 * s.h() * s.h();
    const std::vector<double>& v = u.values();
    ScalarField grad(s);
    std::vector<double>& gv = grad.values();
    for_each_triangle(s, [&](const Triangle& tr) {
        const double gx = tr.bx0 * v[tr.n0] + tr.bx1 * v[tr.n1] + tr.bx2 * v[tr.n2];
        const double gy = tr.by0 * v[tr.n0] + tr.by1 * v[tr.n1] + tr.by2 * v[tr.n2];
        const double w = area * d.xi(std::hypot(gx, gy));
        const double vx = w * gx, vy = w * gy;
        gv[tr.n0] += tr.bx0 * vx + tr.by0 * vy;
        gv[tr.n1] += tr.bx1 * vx + tr.by1 * vy;
        gv[tr.n2] += tr.bx2 * vx + tr.by2 * vy;
    });
    return grad;
}

namespace {

// Interior-block Hessian of the discrete energy.  Exact: the energy is a
// per-element convex function of the element gradient, linear in u.
Eigen::SparseMatrix<double> assemble_hessian(const EnergyDensity& d, const ScalarField& u,
                                             const std::vector<int>& dof, int ndof) {
    const GridSpec& s = u.spec();
    const double area = 0.5 * s.h() * s.h();
    const std::vector<double>& v = u.values();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(s.size()) * 18);
    for_each_triangle(s, [&](const Triangle& tr) {
        const double gx = tr.bx0 * v[tr.n0] + tr.bx1 * v[tr.n1] + tr.bx2 * v[tr.n2];
        const double gy = tr.by0 * v[tr.n0] + tr.by1 * v[tr.n1] + tr.by2 * v[tr.n2];
        const double t = std::hypot(gx, gy);
        const double xi = d.xi(t);
        double m11 = area * xi, m22 = area * xi, m12 = 0.0;
        if (t > 1e-8) {
            const double aniso = area * d.xi_prime(t) / t;
            m11 += aniso * gx * gx;
            m22 += aniso * gy * gy;
            m12 = aniso * gx * gy;
        }
        const int nodes[3] = {tr.n0, tr.n1, tr.n2};
        const double bx[3] = {tr.bx0, tr.bx1, tr.bx2};
        const double by[3] = {tr.by0, tr.by1, tr.by2};
        for (int a = 0; a < 3; ++a) {
            const int ka = dof[nodes[a]];
            if (ka < 0) continue;
            for (int b = 0; b < 3; ++b) {
                const int kb = dof[nodes[b]];
                if (kb < 0) continue;
                trips.emplace_back(ka, kb,
                                   bx[a] * m11 * bx[b] + by[a] * m22 * by[b] +
                                       m12 * (bx[a] * by[b] + by[a] * bx[b]));
            }
        }
    });
    Eigen::SparseMatrix<double> H(ndof, ndof);
    H.setFromTriplets(trips.begin(), trips.end());
    return H;
}

ScalarField harmonic_extension(const GridSpec& s, const BoundaryFn& boundary) {
    ScalarField u(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            if (i == 0 || j == 0 || i == s.nx - 1 || j == s.ny - 1) u.at(i, j) = boundary(s.x(i), s.y(j));
    const int nxi = s.nx - 2, nyi = s.ny - 2;
    if (nxi <= 0 || nyi <= 0) return u;
    auto dof = [&](int i, int j) { return (i - 1) + nxi * (j - 1); };
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nxi * nyi);
    for (int j = 1; j <= nyi; ++j)
        for (int i = 1; i <= nxi; ++i) {
            const int r = dof(i, j);
            trips.emplace_back(r, r, 4.0);
            const int ni[4] = {i - 1, i + 1, i, i};
            const int nj[4] = {j, j, j - 1, j + 1};
            for (int k = 0; k < 4; ++k) {
                if (ni[k] == 0 || nj[k] == 0 || ni[k] == s.nx - 1 || nj[k] == s.ny - 1)
                    rhs[r] += u.at(ni[k], nj[k]);
                else
                    trips.emplace_back(r, dof(ni[k], nj[k]), -1.0);
            }
        }
    Eigen::SparseMatrix<double> A(nxi * nyi, nxi * nyi);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
    Eigen::VectorXd sol = chol.solve(rhs);
    for (int j = 1; j <= nyi; ++j)
        for (int i = 1; i <= nxi; ++i) u.at(i, j) = sol[dof(i, j)];
    return u;
}

}  // namespace

SurfaceSolution attach_fields(const EnergyDensity& d, const ScalarField& u) {
    SurfaceSolution sol{d, u, ScalarField{}, ScalarField{}, ScalarField{}, ScalarField{},
                        ScalarField{}, 0.0, 0.0, false, 0, {}};
    GradientPair g = gradient(u);
    HessianTriple hh = hessian(u);
    sol.ux = std::move(g.fx);
    sol.uy = std::move(g.fy);
    sol.uxx = std::move(hh.fxx);
    sol.uxy = std::move(hh.fxy);
    sol.uyy = std::move(hh.fyy);
    sol.energy = discrete_energy(d, u);
    sol.residual_norm = strong_residual(sol).max_abs_interior();
    return sol;
}

SurfaceSolution solve_dirichlet(const EnergyDensity& d, const GridSpec& spec,
                                const BoundaryFn& boundary, const SolveConfig& cfg,
                                const ScalarField* initial) {
    spec.check();
    if (spec.nx < 3 || spec.ny < 3)
        throw std::invalid_argument("solve_dirichlet: need at least 3 nodes per direction");

    ScalarField u = initial ? *initial : harmonic_extension(spec, boundary);
    if (initial) {  // pin boundary values regardless of the start field
        for (int j = 0; j < spec.ny; ++j)
            for (int i = 0; i < spec.nx; ++i)
                if (i == 0 || j == 0 || i == spec.nx - 1 || j == spec.ny - 1)
                    u.at(i, j) = boundary(spec.x(i), spec.y(j));
    }

    std::vector<int> dof(spec.size(), -1);
    std::vector<std::pair<int, int>> dof_nodes;
    for (int j = 1; j + 1 < spec.ny; ++j)
        for (int i = 1; i + 1 < spec.nx; ++i) {
            dof[spec.index(i, j)] = static_cast<int>(dof_nodes.size());
            dof_nodes.emplace_back(i, j);
        }
    const int ndof = static_cast<int>(dof_nodes.size());

    double energy = discrete_energy(d, u);
    std::vector<double> history{energy};
    bool converged = false;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        ScalarField grad = discrete_energy_gradient(d, u);
        Eigen::VectorXd gi(ndof);
        for (int k = 0; k < ndof; ++k) gi[k] = grad.at(dof_nodes[k].first, dof_nodes[k].second);
        if (gi.lpNorm<Eigen::Infinity>() <= cfg.tol_gradient) {
            converged = true;
            break;
        }

        Eigen::SparseMatrix<double> H = assemble_hessian(d, u, dof, ndof);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(H);
        Eigen::VectorXd dir;
        bool newton_ok = false;
        if (chol.info() == Eigen::Success) {
            dir = chol.solve(-gi);
            newton_ok = chol.info() == Eigen::Success && gi.dot(dir) < 0.0;
        }
        if (!newton_ok) dir = -gi;
        const double slope = gi.dot(dir);

        // near the minimum the predicted decrease drops below the rounding
        // level of the energy; take the plain Newton step there, since the
        // line search can no longer observe any decrease
        if (newton_ok && std::abs(slope) <= 1e-12 * (1.0 + std::abs(energy))) {
            for (int k = 0; k < ndof; ++k)
                u.at(dof_nodes[k].first, dof_nodes[k].second) += dir[k];
            energy = discrete_energy(d, u);
            history.push_back(energy);
            continue;
        }

        double step = 1.0;
        double new_energy = std::numeric_limits<double>::quiet_NaN();
        ScalarField trial = u;
        while (step > 1e-14) {
            for (int k = 0; k < ndof; ++k)
                trial.at(dof_nodes[k].first, dof_nodes[k].second) =
                    u.at(dof_nodes[k].first, dof_nodes[k].second) + step * dir[k];
            new_energy = discrete_energy(d, trial);
            if (std::isfinite(new_energy) && new_energy <= energy + cfg.ls_c1 * step * slope) break;
            step *= cfg.ls_shrink;
        }
        if (std::isnan(new_energy))
            throw SolveError("solve_dirichlet: NaN energy during line search");
        if (step <= 1e-14) break;  // no progress possible at this precision
        u = trial;
        energy = new_energy;
        history.push_back(energy);
    }

    SurfaceSolution sol = attach_fields(d, u);
    sol.converged = converged;
    sol.iterations = iter;
    sol.energy_history = std::move(history);
    return sol;
}

ScalarField strong_residual(const SurfaceSolution& sol) {
    const GridSpec& s = sol.u.spec();
    const EnergyDensity& d = sol.density;
    ScalarField r(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double ux = sol.ux.at(i, j), uy = sol.uy.at(i, j);
            const double t = std::hypot(ux, uy);
            const double uxx = sol.uxx.at(i, j), uxy = sol.uxy.at(i, j), uyy = sol.uyy.at(i, j);
            if (t < 1e-8) {
                r.at(i, j) = d.xi(0.0) * (uxx + uyy);
                continue;
            }
            const double xi = d.xi(t);
            const double xpt = d.xi_prime(t) / t;
            r.at(i, j) = uxx * (xi + xpt * ux * ux) + uyy * (xi + xpt * uy * uy) +
                         2.0 * uxy * ux * uy * xpt;
        }
    return r;
}

ScalarField oracle_solution(const std::string& kind, const GridSpec& spec, double a, double b,
                            double c) {
    spec.check();
    if (kind == "affine")
        return ScalarField::sample(spec, [a, b, c](double x, double y) { return a * x + b * y + c; });
    if (kind == "scherk") {
        const double lim = std::numbers::pi / 2.0;
        if (std::max({std::abs(spec.x0), std::abs(spec.x1), std::abs(spec.y0), std::abs(spec.y1)}) >=
            lim)
            throw std::domain_error("scherk oracle requires |x|,|y| < pi/2");
        return ScalarField::sample(spec,
                                   [](double x, double y) { return std::log(std::cos(y) / std::cos(x)); });
    }
    throw std::invalid_argument("oracle_solution: unknown kind " + kind);
}

BoundaryFn make_boundary(const std::string& name, double a, double b, double c, double slope) {
    if (name == "affine") return [a, b, c](double x, double y) { return a * x + b * y + c; };
    if (name == "saddle") return [](double x, double y) { return x * x - y * y; };
    if (name == "scherk")
        return [](double x, double y) { return std::log(std::cos(y) / std::cos(x)); };
    if (name == "radial") return [slope](double x, double y) { return slope * std::hypot(x, y); };
    throw std::invalid_argument("make_boundary: unknown boundary " + name);
}

}  // namespace musurf
