#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace musurf {

/// Uniform node-centered rectangular grid.  Spacing must be isotropic:
/// (x1-x0)/(nx-1) == (y1-y0)/(ny-1) within 1e-12 relative.
struct GridSpec {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    int nx = 2, ny = 2;

    double hx() const { return (x1 - x0) / (nx - 1); }
    double hy() const { return (y1 - y0) / (ny - 1); }
    double h() const;

    double x(int i) const { return x0 + i * hx(); }
    double y(int j) const { return y0 + j * hy(); }
    int size() const { return nx * ny; }
    int index(int i, int j) const { return i + nx * j; }

    bool contains(double x, double y) const;
    void check() const;

    static GridSpec square(double lo, double hi, int n) {
        return GridSpec{lo, lo, hi, hi, n, n};
    }
};

/// Scalar samples on a GridSpec, row-major in x.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& spec, double fill = 0.0);

    const GridSpec& spec() const { return spec_; }
    double& at(int i, int j) { return values_[spec_.index(i, j)]; }
    double at(int i, int j) const { return values_[spec_.index(i, j)]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double max_abs() const;
    double max_abs_interior() const;

    template <class F>
    static ScalarField sample(const GridSpec& spec, F&& f) {
        ScalarField out(spec);
        for (int j = 0; j < spec.ny; ++j)
            for (int i = 0; i < spec.nx; ++i)
                out.at(i, j) = f(spec.x(i), spec.y(j));
        return out;
    }

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Coefficient pair (p, q) of the 1-form p dx + q dy on a shared grid.
struct OneFormField {
    ScalarField p;
    ScalarField q;

    const GridSpec& spec() const { return p.spec(); }
};

struct GradientPair {
    ScalarField fx, fy;
};

struct HessianTriple {
    ScalarField fxx, fxy, fyy;
};

/// True when the node lies at least frac * min(extent) away from every
/// edge.  Max-norms of differentiated fields use this to skip the collar
/// where one-sided boundary stencils change the truncation constant.
bool well_inside(const GridSpec& s, int i, int j, double frac = 0.05);

/// Second-order central differences in the interior, one-sided
/// second-order 3-point stencils on the edges.  Exact on affine fields
/// everywhere and on quadratics at interior nodes.
GradientPair gradient(const ScalarField& f);

HessianTriple hessian(const ScalarField& f);

/// Tensor-product cubic Lagrange interpolation on the 4x4 node
/// neighborhood; reproduces cubics on interior cells and nodal values
/// exactly.  Throws std::domain_error outside the rectangle.
double interpolate(const ScalarField& f, double x, double y);

/// CSV dump, header "x,y,value", row-major.
void write_csv(const ScalarField& f, const std::string& path);

}  // namespace musurf
