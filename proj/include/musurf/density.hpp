#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace musurf {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GrowthBounds {
    double a = 1.0;  // lower slope, > 0
    double A = 1.0;  // upper slope, > 0
    double b = 0.0;  // lower offset, >= 0
    double B = 0.0;  // upper offset, >= 0
};

/// Pointwise diagnostics of a density at one argument t.
struct DensityDiagnostics {
    double t = 0.0;
    double g = 0.0, g1 = 0.0, g2 = 0.0;
    double xi = 0.0;        // g'(t)/t, limit g''(0) at t = 0
    double vartheta = 0.0;  // g - t g' - xi
    double h = 0.0;         // 1 - g'(t)
    double remainder = 0.0; // R(t), with t R(t) = g'(t) [g(t) - t g'(t)]
    double bracket = 0.0;   // g(t) - t g'(t)
    double theta = 0.0;     // conformality-defect factor
};

/// A convex linear-growth energy density g with g'(0) = 0, g'' > 0 and
/// finite \int_0^inf s g''(s) ds.  Immutable after construction.
class EnergyDensity {
public:
    using Fn = std::function<double(double)>;

    EnergyDensity(std::string name, Fn g, Fn g1, Fn g2, GrowthBounds bounds,
                  std::optional<Fn> bracket = std::nullopt,
                  std::optional<double> mu = std::nullopt,
                  double slope_at_infinity = 1.0);

    double g(double t) const { return g_(t); }
    double g1(double t) const { return g1_(t); }
    double g2(double t) const { return g2_(t); }

    /// g(t) - t g'(t); closed form when the family provides one.
    double bracket(double t) const;

    /// Xi(t) = g'(t)/t; at flat arguments the limit g''(0), and a
    /// midpoint evaluation g''(t/2) below t = 1e-6 to dodge cancellation.
    double xi(double t) const;

    /// Xi'(t) = (g''(t) - Xi(t)) / t.
    double xi_prime(double t) const;

    /// Theta(t) = [1 - g g'/t] + [(g - t g') - g'/t] [2 + (g - t g')].
    double theta(double t) const;

    const std::string& name() const { return name_; }
    const GrowthBounds& growth_bounds() const { return bounds_; }
    std::optional<double> mu_exponent() const { return mu_; }
    double normalization_shift() const { return shift_; }
    double slope_at_infinity() const { return slope_inf_; }
    std::optional<std::pair<double, double>> ellipticity_constants() const { return ellipticity_; }

    /// Copy with g replaced by g - k (brackets shift the same way).
    EnergyDensity shifted(double k) const;

private:
    friend EnergyDensity make_builtin(const std::string&, std::optional<double>);
    friend EnergyDensity make_mu_density(double);

    std::string name_;
    Fn g_, g1_, g2_;
    std::optional<Fn> bracket_;
    GrowthBounds bounds_;
    std::optional<double> mu_;
    double shift_ = 0.0;
    double slope_inf_ = 1.0;
    std::optional<std::pair<double, double>> ellipticity_;
};

/// Built-in families: "minimal" (sqrt(1+t^2)), "mu" (t + (1+t)^(2-mu)/(mu-2),
/// mu > 2) and "mu_hat" (double integral of (1+tau^2)^(-mu/2), mu > 2; g by
/// adaptive quadrature, g' and g'' in closed form where available).
EnergyDensity make_builtin(const std::string& kind, std::optional<double> mu = std::nullopt);

/// The mu family without the mu > 2 guard.  Exists so that validation of
/// densities violating the integrability condition can be exercised.
EnergyDensity make_mu_density(double mu);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const;
    std::vector<std::string> failures() const;
};

/// Samples covering [0, T], T >= 1e3: log-spaced tail plus a linear head.
std::vector<double> default_sample_grid(double t_max = 1000.0, int n = 2000);

/// Checks g'(0)=0, g''>0, the growth bounds, finiteness of the weighted
/// second-derivative integral (partial integral plus tail-exponent fit),
/// and monotone decrease of g - t g'.  Never throws on failure.
ValidationReport validate(const EnergyDensity& d, const std::vector<double>& sample_grid);

/// Subtracts K = lim_{t->inf}[g(t) - t g'(t)], estimated at the largest
/// sample argument with Richardson extrapolation.  Requires unit slope at
/// infinity (within 1e-8); throws ValidationError otherwise.
EnergyDensity normalize(const EnergyDensity& d, double t_max = 1e4);

DensityDiagnostics diagnostics(const EnergyDensity& d, double t);

/// Adaptive Simpson quadrature of f over [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

}  // namespace musurf
