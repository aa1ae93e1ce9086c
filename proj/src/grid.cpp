#include "musurf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>

namespace musurf {

double GridSpec::h() const {
    check();
    return hx();
}

bool GridSpec::contains(double x, double y) const {
    const double tol = 1e-12 * std::max({std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1), 1.0});
    return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
}

void GridSpec::check() const {
    if (!(x1 > x0) || !(y1 > y0))
        throw std::invalid_argument("GridSpec: degenerate rectangle");
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("GridSpec: need at least 2 nodes per direction");
    if (std::abs(hx() - hy()) > 1e-12 * std::max(hx(), hy()))
        throw std::invalid_argument("GridSpec: anisotropic spacing");
}

ScalarField::ScalarField(const GridSpec& spec, double fill) : spec_(spec) {
    spec_.check();
    values_.assign(static_cast<size_t>(spec_.size()), fill);
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max_abs_interior() const {
    double m = 0.0;
    for (int j = 1; j + 1 < spec_.ny; ++j)
        for (int i = 1; i + 1 < spec_.nx; ++i)
            m = std::max(m, std::abs(at(i, j)));
    return m;
}

bool well_inside(const GridSpec& s, int i, int j, double frac) {
    if (i <= 0 || j <= 0 || i + 1 >= s.nx || j + 1 >= s.ny) return false;
    const double margin = frac * std::min(s.x1 - s.x0, s.y1 - s.y0);
    return s.x(i) >= s.x0 + margin && s.x(i) <= s.x1 - margin && s.y(j) >= s.y0 + margin &&
           s.y(j) <= s.y1 - margin;
}

namespace {

// First derivative along one line of samples, central in the interior,
// one-sided 3-point at the ends.
void diff_line(const double* f, int n, int stride, double h, double* out, int ostride) {
    if (n < 3) throw std::invalid_argument("gradient: grid too small (need >= 3 nodes)");
    auto v = [&](int k) { return f[k * stride]; };
    out[0] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    for (int k = 1; k + 1 < n; ++k)
        out[k * ostride] = (v(k + 1) - v(k - 1)) / (2.0 * h);
    out[(n - 1) * ostride] = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h);
}

// Second derivative along one line; 4-point one-sided at the ends when
// possible (second order), 3-point otherwise.
void diff2_line(const double* f, int n, int stride, double h, double* out, int ostride) {
    if (n < 3) throw std::invalid_argument("hessian: grid too small (need >= 3 nodes)");
    auto v = [&](int k) { return f[k * stride]; };
    const double h2 = h * h;
    if (n >= 4) {
        out[0] = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / h2;
        out[(n - 1) * ostride] = (2.0 * v(n - 1) - 5.0 * v(n - 2) + 4.0 * v(n - 3) - v(n - 4)) / h2;
    } else {
        out[0] = (v(0) - 2.0 * v(1) + v(2)) / h2;
        out[(n - 1) * ostride] = out[0];
    }
    for (int k = 1; k + 1 < n; ++k)
        out[k * ostride] = (v(k + 1) - 2.0 * v(k) + v(k - 1)) / h2;
}

}  // namespace

GradientPair gradient(const ScalarField& f) {
    const GridSpec& s = f.spec();
    const double h = s.h();
    GradientPair out{ScalarField(s), ScalarField(s)};
    std::vector<double> line(std::max(s.nx, s.ny));
    for (int j = 0; j < s.ny; ++j)
        diff_line(&f.values()[s.index(0, j)], s.nx, 1, h, &out.fx.values()[s.index(0, j)], 1);
    for (int i = 0; i < s.nx; ++i)
        diff_line(&f.values()[s.index(i, 0)], s.ny, s.nx, h, &out.fy.values()[s.index(i, 0)], s.nx);
    return out;
}

HessianTriple hessian(const ScalarField& f) {
    const GridSpec& s = f.spec();
    const double h = s.h();
    HessianTriple out{ScalarField(s), ScalarField(s), ScalarField(s)};
    for (int j = 0; j < s.ny; ++j)
        diff2_line(&f.values()[s.index(0, j)], s.nx, 1, h, &out.fxx.values()[s.index(0, j)], 1);
    for (int i = 0; i < s.nx; ++i)
        diff2_line(&f.values()[s.index(i, 0)], s.ny, s.nx, h, &out.fyy.values()[s.index(i, 0)], s.nx);
    // cross derivative by iterated central differences
    GradientPair g = gradient(f);
    for (int i = 0; i < s.nx; ++i)
        diff_line(&g.fx.values()[s.index(i, 0)], s.ny, s.nx, h, &out.fxy.values()[s.index(i, 0)], s.nx);
    return out;
}

namespace {

// Cubic Lagrange basis on 4 equally spaced nodes; u in units of h
// relative to the first stencil node.
void lagrange4(double u, double w[4]) {
    w[0] = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    w[1] = u * (u - 2.0) * (u - 3.0) / 2.0;
    w[2] = -u * (u - 1.0) * (u - 3.0) / 2.0;
    w[3] = u * (u - 1.0) * (u - 2.0) / 6.0;
}

}  // namespace

double interpolate(const ScalarField& f, double x, double y) {
    const GridSpec& s = f.spec();
    if (!s.contains(x, y))
        throw std::domain_error(fmt::format("interpolate: point ({}, {}) outside grid", x, y));
    const double h = s.h();
    const double sx = (x - s.x0) / h;
    const double sy = (y - s.y0) / h;
    int ci = std::clamp(static_cast<int>(std::floor(sx)), 0, s.nx - 2);
    int cj = std::clamp(static_cast<int>(std::floor(sy)), 0, s.ny - 2);
    int i0 = std::clamp(ci - 1, 0, std::max(0, s.nx - 4));
    int j0 = std::clamp(cj - 1, 0, std::max(0, s.ny - 4));
    int mi = std::min(4, s.nx - i0);
    int mj = std::min(4, s.ny - j0);
    if (mi < 4 || mj < 4) {
        // tiny grids: bilinear fallback
        double tx = sx - ci, ty = sy - cj;
        return (1 - tx) * (1 - ty) * f.at(ci, cj) + tx * (1 - ty) * f.at(ci + 1, cj) +
               (1 - tx) * ty * f.at(ci, cj + 1) + tx * ty * f.at(ci + 1, cj + 1);
    }
    double wx[4], wy[4];
    lagrange4(sx - i0, wx);
    lagrange4(sy - j0, wy);
    double val = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        for (int a = 0; a < 4; ++a) row += wx[a] * f.at(i0 + a, j0 + b);
        val += wy[b] * row;
    }
    return val;
}

void write_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << "x,y,value\n";
    const GridSpec& s = f.spec();
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            os << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.x(i), s.y(j), f.at(i, j));
}

}  // namespace musurf
