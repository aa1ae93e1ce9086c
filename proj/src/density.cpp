#include "musurf/density.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace musurf {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 40);
}

EnergyDensity::EnergyDensity(std::string name, Fn g, Fn g1, Fn g2, GrowthBounds bounds,
                             std::optional<Fn> bracket, std::optional<double> mu,
                             double slope_at_infinity)
    : name_(std::move(name)),
      g_(std::move(g)),
      g1_(std::move(g1)),
      g2_(std::move(g2)),
      bracket_(std::move(bracket)),
      bounds_(bounds),
      mu_(mu),
      slope_inf_(slope_at_infinity) {}

double EnergyDensity::bracket(double t) const {
    if (bracket_) return (*bracket_)(t);
    return g_(t) - t * g1_(t);
}

double EnergyDensity::xi(double t) const {
    if (t <= 0.0) return g2_(0.0);
    if (t < 1e-6) return g2_(0.5 * t);  // midpoint of (1/t) \int_0^t g'' , second order in t
    return g1_(t) / t;
}

double EnergyDensity::xi_prime(double t) const {
    if (t < 1e-8) {
        // Xi'(0) = g'''(0)/2, via a symmetric difference of g'' at step 1e-4
        const double s = 1e-4;
        return 0.5 * (g2_(t + s) - g2_(std::max(t - s, 0.0))) /
               (s + std::min(t, s));
    }
    return (g2_(t) - xi(t)) / t;
}

double EnergyDensity::theta(double t) const {
    const double x = xi(t);
    const double br = bracket(t);
    return (1.0 - g_(t) * x) + (br - x) * (2.0 + br);
}

namespace {
std::optional<std::pair<double, double>> compute_ellipticity(const EnergyDensity& d);
}

EnergyDensity EnergyDensity::shifted(double k) const {
    EnergyDensity out = *this;
    auto g = g_;
    out.g_ = [g, k](double t) { return g(t) - k; };
    if (bracket_) {
        auto br = *bracket_;
        out.bracket_ = Fn([br, k](double t) { return br(t) - k; });
    }
    out.bounds_.b = bounds_.b + std::max(k, 0.0);
    out.bounds_.B = bounds_.B + std::max(-k, 0.0);
    out.shift_ = shift_ + k;
    out.ellipticity_ = compute_ellipticity(out);
    return out;
}

namespace {

std::optional<std::pair<double, double>> compute_ellipticity(const EnergyDensity& d) {
    auto mu = d.mu_exponent();
    if (!mu || *mu <= 2.0) return std::nullopt;
    // the decay class presumes lim [g - t g'] = 0; skip unnormalized densities
    if (std::abs(d.bracket(1e6)) > 1e-4) return std::nullopt;
    double c1 = 0.0, c2 = 0.0;
    for (double lt = 0.0; lt <= 6.0; lt += 0.01) {
        const double t = std::pow(10.0, lt);
        c1 = std::max(c1, std::abs(d.bracket(t)) * std::pow(t, *mu - 2.0));
        c2 = std::max(c2, (1.0 - d.g1(t)) * std::pow(t, *mu - 1.0));
    }
    return std::make_pair(c1 * (1.0 + 1e-9), c2 * (1.0 + 1e-9));
}

EnergyDensity make_minimal() {
    EnergyDensity d(
        "minimal", [](double t) { return std::sqrt(1.0 + t * t); },
        [](double t) { return t / std::sqrt(1.0 + t * t); },
        [](double t) { return std::pow(1.0 + t * t, -1.5); }, GrowthBounds{1.0, 1.0, 0.0, 1.0},
        EnergyDensity::Fn([](double t) { return 1.0 / std::sqrt(1.0 + t * t); }), 3.0, 1.0);
    return d;
}

EnergyDensity make_mu_impl(double mu) {
    if (mu <= 1.0 || mu == 2.0)
        throw ValidationError(fmt::format("mu density: exponent {} outside the admissible range", mu));
    GrowthBounds bounds{1.0, 1.0, 0.0, 0.0};
    if (mu > 2.0) {
        bounds.B = 1.0 / (mu - 2.0);
    } else {
        // 1 < mu < 2: g(t) = t - (1+t)^(2-mu)/(2-mu) dips below every line
        // t - b, so the lower slope must drop below 1
        bounds.a = 0.5;
        double b = 0.0;
        for (double lt = 0.0; lt <= 6.0; lt += 0.01) {
            const double t = std::pow(10.0, lt);
            b = std::max(b, 0.5 * t - (t + std::pow(1.0 + t, 2.0 - mu) / (mu - 2.0)));
        }
        bounds.b = b * (1.0 + 1e-9) + 1e-9;
    }
    EnergyDensity d(
        fmt::format("mu({:g})", mu),
        [mu](double t) { return t + std::pow(1.0 + t, 2.0 - mu) / (mu - 2.0); },
        [mu](double t) { return 1.0 - std::pow(1.0 + t, 1.0 - mu); },
        [mu](double t) { return (mu - 1.0) * std::pow(1.0 + t, -mu); }, bounds,
        EnergyDensity::Fn([mu](double t) {
            return std::pow(1.0 + t, 1.0 - mu) * ((mu - 1.0) * t + 1.0) / (mu - 2.0);
        }),
        mu, 1.0);
    return d;
}

EnergyDensity make_mu_hat(double mu) {
    // slope at infinity: \int_0^inf (1+tau^2)^(-mu/2) dtau
    const double slope = 0.5 * std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (mu - 1.0)) /
                         std::tgamma(0.5 * mu);
    EnergyDensity::Fn g2 = [mu](double t) { return std::pow(1.0 + t * t, -0.5 * mu); };
    EnergyDensity::Fn g1;
    if (mu == 3.0) {
        g1 = [](double t) { return t / std::sqrt(1.0 + t * t); };
    } else {
        g1 = [g2](double t) { return adaptive_simpson(g2, 0.0, t, 1e-13); };
    }
    EnergyDensity::Fn g = [g1](double t) { return adaptive_simpson(g1, 0.0, t, 1e-12); };
    // g(t) - t g'(t) = g(0) - \int_0^t s g''(s) ds, in closed form
    EnergyDensity::Fn br = [mu](double t) {
        return (1.0 - std::pow(1.0 + t * t, 0.5 * (2.0 - mu))) / (2.0 - mu);
    };
    return EnergyDensity(fmt::format("mu_hat({:g})", mu), std::move(g), std::move(g1),
                         std::move(g2), GrowthBounds{slope, slope, 1.0 / std::abs(mu - 2.0), 0.0},
                         std::move(br), mu, slope);
}

}  // namespace

EnergyDensity make_builtin(const std::string& kind, std::optional<double> mu) {
    if (kind == "minimal") {
        EnergyDensity d = make_minimal();
        d.ellipticity_ = compute_ellipticity(d);
        return d;
    }
    if (kind == "mu" || kind == "mu_hat") {
        if (!mu)
            throw ValidationError(kind + " density requires an exponent mu");
        if (!(*mu > 2.0))
            throw ValidationError(fmt::format(
                "{} density with mu = {:g} violates the integrability condition "
                "int_0^inf s g''(s) ds < inf (requires mu > 2)",
                kind, *mu));
        EnergyDensity d = (kind == "mu") ? make_mu_impl(*mu) : make_mu_hat(*mu);
        d.ellipticity_ = compute_ellipticity(d);
        return d;
    }
    throw ValidationError("unknown density kind: " + kind);
}

EnergyDensity make_mu_density(double mu) { return make_mu_impl(mu); }

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed) out.push_back(c.name + ": " + c.detail);
    return out;
}

std::vector<double> default_sample_grid(double t_max, int n) {
    std::vector<double> grid;
    grid.reserve(n);
    const int n_head = n / 4;
    for (int i = 0; i < n_head; ++i) grid.push_back(i * 1.0 / n_head);
    for (int i = 0; i <= n - n_head; ++i)
        grid.push_back(std::pow(10.0, std::log10(t_max) * i / (n - n_head)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

ValidationReport validate(const EnergyDensity& d, const std::vector<double>& sample_grid) {
    if (sample_grid.empty() || !std::is_sorted(sample_grid.begin(), sample_grid.end()) ||
        sample_grid.back() < 1e3)
        throw std::invalid_argument("validate: sample grid must be sorted and cover [0, 1e3]");

    ValidationReport rep;
    auto add = [&rep](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const double g1_0 = d.g1(0.0);
    add("gprime_zero", std::abs(g1_0) <= 1e-10, fmt::format("g'(0) = {:g}", g1_0));

    bool convex = true;
    double worst_g2 = std::numeric_limits<double>::infinity();
    for (double t : sample_grid) {
        if (t <= 0.0) continue;
        const double v = d.g2(t);
        worst_g2 = std::min(worst_g2, v);
        if (!(v > 0.0)) convex = false;
    }
    add("gpp_positive", convex, fmt::format("min g'' on samples = {:g}", worst_g2));

    const auto& gb = d.growth_bounds();
    bool growth_ok = true;
    for (double t : sample_grid) {
        const double g = d.g(t);
        const double slack = 1e-9 * (1.0 + std::abs(g));
        if (g < gb.a * t - gb.b - slack || g > gb.A * t + gb.B + slack) {
            growth_ok = false;
            break;
        }
    }
    add("growth_bounds", growth_ok,
        fmt::format("a={:g} A={:g} b={:g} B={:g}", gb.a, gb.A, gb.b, gb.B));

    // Partial integral of s g''(s): int_0^t = t g'(t) - g(t) + g(0).
    const double T = sample_grid.back();
    const double partial = T * d.g1(T) - d.g(T) + d.g(0.0);
    // tail exponent of s g''(s), least squares on the last decade
    double sxx = 0, sx = 0, sy = 0, sxy = 0;
    int m = 0;
    for (double t : sample_grid) {
        if (t < T / 10.0 || t <= 0.0) continue;
        const double w = t * d.g2(t);
        if (!(w > 0.0)) continue;
        const double lx = std::log(t), ly = std::log(w);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    double exponent = 0.0;
    bool tail_finite = false;
    if (m >= 2) {
        exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        tail_finite = exponent < -1.0 - 1e-2;
    }
    add("integrability", tail_finite && std::isfinite(partial),
        fmt::format("partial integral {:.6g}, tail exponent {:.4g} (finite iff < -1.01): "
                    "condition int_0^inf s g''(s) ds < inf",
                    partial, exponent));

    bool monotone = true;
    double prev = d.bracket(sample_grid.front());
    for (double t : sample_grid) {
        const double cur = d.bracket(t);
        if (cur > prev + 1e-10 * (1.0 + std::abs(prev))) {
            monotone = false;
            break;
        }
        prev = cur;
    }
    add("bracket_nonincreasing", monotone, "g - t g' must not increase");

    return rep;
}

namespace {

// One Aitken delta-squared sweep over a sequence converging to its limit.
std::vector<double> aitken(const std::vector<double>& a) {
    std::vector<double> out;
    for (size_t k = 0; k + 2 < a.size(); ++k) {
        const double den = a[k + 2] - 2.0 * a[k + 1] + a[k];
        if (std::abs(den) < 1e-300) {
            out.push_back(a[k + 2]);
            continue;
        }
        const double v = a[k + 2] - (a[k + 2] - a[k + 1]) * (a[k + 2] - a[k + 1]) / den;
        out.push_back(std::isfinite(v) ? v : a[k + 2]);
    }
    return out;
}

}  // namespace

EnergyDensity normalize(const EnergyDensity& d, double t_max) {
    if (std::abs(d.slope_at_infinity() - 1.0) > 1e-8)
        throw ValidationError(fmt::format(
            "normalize: slope at infinity {:.12g} != 1; pre-scale the density first",
            d.slope_at_infinity()));
    std::vector<double> seq;
    for (int k = 4; k >= 0; --k) seq.push_back(d.bracket(t_max / (1 << k)));
    std::vector<double> s1 = aitken(seq);
    std::vector<double> s2 = aitken(s1);
    const double K = s2.empty() ? (s1.empty() ? seq.back() : s1.back()) : s2.back();
    EnergyDensity out = d.shifted(K);
    return out;
}

DensityDiagnostics diagnostics(const EnergyDensity& d, double t) {
    if (t < 0.0) throw std::invalid_argument("diagnostics: t must be nonnegative");
    DensityDiagnostics out;
    out.t = t;
    out.g = d.g(t);
    out.g1 = d.g1(t);
    out.g2 = d.g2(t);
    out.xi = d.xi(t);
    out.bracket = d.bracket(t);
    out.vartheta = out.bracket - out.xi;
    out.h = 1.0 - out.g1;
    out.remainder = d.xi(t) * out.bracket;
    out.theta = d.theta(t);
    return out;
}

}  // namespace musurf
