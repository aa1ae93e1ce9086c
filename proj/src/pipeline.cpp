#include "musurf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>

#include "musurf/forms.hpp"
#include "musurf/potential.hpp"
#include "musurf/reparam.hpp"

namespace musurf {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kAllStages = {"solve", "forms",      "potential",
                                             "reparam", "identities", "decay"};

std::vector<std::string> close_dependencies(std::vector<std::string> stages) {
    auto need = [&stages](const std::string& s) {
        return std::find(stages.begin(), stages.end(), s) != stages.end();
    };
    auto add = [&stages, &need](const std::string& s) {
        if (!need(s)) stages.push_back(s);
    };
    if (need("reparam")) add("potential");
    if (need("potential")) add("forms");
    if (need("forms")) add("solve");
    // execution order
    std::vector<std::string> ordered;
    for (const auto& s : kAllStages)
        if (need(s)) ordered.push_back(s);
    if (ordered.size() != stages.size())
        throw std::invalid_argument("config: unknown stage name");
    return ordered;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    RunConfig cfg;
    if (j.contains("density")) {
        const auto& d = j.at("density");
        cfg.density_kind = d.value("kind", std::string("minimal"));
        if (d.contains("mu")) cfg.density_mu = d.at("mu").get<double>();
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        cfg.grid.x0 = g.value("x0", -1.0);
        cfg.grid.y0 = g.value("y0", -1.0);
        cfg.grid.x1 = g.value("x1", 1.0);
        cfg.grid.y1 = g.value("y1", 1.0);
        cfg.grid.nx = g.value("nx", 33);
        cfg.grid.ny = g.value("ny", 33);
        cfg.grid.check();
    }
    if (j.contains("boundary")) {
        const auto& b = j.at("boundary");
        cfg.boundary = b.value("name", std::string("scherk"));
        cfg.bnd_a = b.value("a", 0.0);
        cfg.bnd_b = b.value("b", 0.0);
        cfg.bnd_c = b.value("c", 0.0);
        cfg.bnd_slope = b.value("slope", 1.0);
    }
    if (j.contains("solve")) {
        const auto& s = j.at("solve");
        cfg.solve.tol_gradient = s.value("tol_gradient", 1e-9);
        cfg.solve.max_iters = s.value("max_iters", 100);
        cfg.solve.ls_shrink = s.value("line_search_shrink", 0.5);
        cfg.solve.ls_c1 = s.value("line_search_decrease", 1e-4);
        if (!(cfg.solve.tol_gradient > 0.0))
            throw std::invalid_argument("config: tol_gradient must be positive");
    }
    cfg.output_dir = j.value("outputs", std::string("musurf_out"));
    cfg.create_output_dir = j.value("create_outputs", true);
    if (j.contains("stages"))
        cfg.stages = j.at("stages").get<std::vector<std::string>>();
    else
        cfg.stages = kAllStages;
    cfg.stages = close_dependencies(cfg.stages);
    if (j.contains("grids")) cfg.refine_nodes = j.at("grids").get<std::vector<int>>();
    if (j.contains("decay")) {
        const auto& d = j.at("decay");
        cfg.decay_t_min = d.value("t_min", 1e2);
        cfg.decay_t_max = d.value("t_max", 1e4);
        cfg.decay_samples = d.value("samples", 200);
    }
    cfg.seed = j.value("seed", 12345u);
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    json j = json::parse(is);
    return from_json(j);
}

namespace {

// Result of the per-grid stage chain; flat enough to serialize directly.
struct GridRunOutput {
    ordered_json report;
    ScalarField u_field;
    bool have_u = false;
};

void write_potential_csv(const SurfaceSolution& sol, const PotentialSet& ps, const fs::path& dir);
void write_reparam_csv(const SurfaceSolution& sol, const ReparamResult& rr, const fs::path& dir);

GridRunOutput run_single_grid(const RunConfig& cfg, const EnergyDensity& density,
                              const GridSpec& grid, const fs::path& dir, bool is_last) {
    GridRunOutput out;
    out.report["grid"] = {{"nx", grid.nx}, {"ny", grid.ny}, {"h", grid.h()}};
    auto has_stage = [&cfg](const std::string& s) {
        return std::find(cfg.stages.begin(), cfg.stages.end(), s) != cfg.stages.end();
    };

    std::optional<SurfaceSolution> sol;
    std::optional<FormAssembly> fa;
    std::optional<PotentialSet> ps;

    if (has_stage("solve")) {
        Timer t;
        BoundaryFn bnd = make_boundary(cfg.boundary, cfg.bnd_a, cfg.bnd_b, cfg.bnd_c, cfg.bnd_slope);
        sol = solve_dirichlet(density, grid, bnd, cfg.solve);
        out.report["solve"] = {{"converged", sol->converged},
                               {"iterations", sol->iterations},
                               {"energy", sol->energy},
                               {"residual_norm", sol->residual_norm},
                               {"energy_monotone",
                                std::is_sorted(sol->energy_history.rbegin(),
                                               sol->energy_history.rend(),
                                               [](double a, double b) {
                                                   return a < b - 1e-12 * (1.0 + std::abs(b));
                                               })},
                               {"wall_time_s", t.seconds()}};
        out.u_field = sol->u;
        out.have_u = true;
        if (!sol->converged)
            throw SolveError(fmt::format("solver did not converge in {} iterations",
                                         cfg.solve.max_iters));
    }
    if (has_stage("forms")) {
        Timer t;
        fa = assemble_forms(*sol);
        ClosednessReport cr = closedness_residuals(*fa, *sol);
        out.report["forms"] = {{"h", cr.grid_h},
                               {"max_d_alpha", cr.max_d_alpha},
                               {"max_d_beta", cr.max_d_beta},
                               {"max_d_gamma", cr.max_d_gamma},
                               {"wall_time_s", t.seconds()}};
    }
    if (has_stage("potential")) {
        Timer t;
        ps = recover_xstar(*sol, *fa);
        HessReport hr = check_hessE(*ps, *sol);
        out.report["potential"] = {{"path_discrepancy", ps->path_discrepancy},
                                   {"min_eig_min", hr.min_eig_min},
                                   {"bound_violations", hr.bound_violations},
                                   {"fd_mismatch_max", hr.fd_mismatch_max},
                                   {"wall_time_s", t.seconds()}};
    }
    if (has_stage("potential") && is_last) write_potential_csv(*sol, *ps, dir);
    if (has_stage("reparam")) {
        Timer t;
        ReparamResult rr = build_reparam(*sol, *ps);
        if (is_last) write_reparam_csv(*sol, rr, dir);
        out.report["reparam"] = {{"det_fd_mismatch", rr.det_fd_mismatch},
                                 {"margin_prop_min", rr.margin_prop_min},
                                 {"cor8_c", rr.cor8_c},
                                 {"max_defect_dot", rr.defect_dot.max_abs()},
                                 {"max_defect_diff", rr.defect_diff.max_abs()},
                                 {"image",
                                  {{"x0", rr.image_x0},
                                   {"y0", rr.image_y0},
                                   {"x1", rr.image_x1},
                                   {"y1", rr.image_y1}}},
                                 {"wall_time_s", t.seconds()}};
    }
    return out;
}

void write_stage_csvs(const RunConfig& cfg, const EnergyDensity& density,
                      const std::vector<GridRunOutput>& runs, const fs::path& dir) {
    auto has_stage = [&cfg](const std::string& s) {
        return std::find(cfg.stages.begin(), cfg.stages.end(), s) != cfg.stages.end();
    };
    if (has_stage("solve") && !runs.empty() && runs.back().have_u) {
        std::ofstream os(dir / "solution.csv");
        os << "x,y,u\n";
        const ScalarField& u = runs.back().u_field;
        const GridSpec& s = u.spec();
        for (int j = 0; j < s.ny; ++j)
            for (int i = 0; i < s.nx; ++i)
                os << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.x(i), s.y(j), u.at(i, j));
    }
    if (has_stage("forms")) {
        std::ofstream os(dir / "closedness.csv");
        os << "h,max_d_alpha,max_d_beta,max_d_gamma\n";
        for (const auto& r : runs) {
            if (!r.report.contains("forms")) continue;
            const auto& f = r.report.at("forms");
            os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", f.at("h").get<double>(),
                              f.at("max_d_alpha").get<double>(), f.at("max_d_beta").get<double>(),
                              f.at("max_d_gamma").get<double>());
        }
    }
    if (has_stage("decay")) {
        std::ofstream os(dir / "decay.csv");
        os << "t,theta,fit_envelope\n";
        DecayFit fit = decay_fit(density, cfg.decay_t_min, cfg.decay_t_max, cfg.decay_samples);
        const double mu = density.mu_exponent().value_or(3.0);
        for (int k = 0; k < cfg.decay_samples; ++k) {
            const double t = cfg.decay_t_min *
                             std::pow(cfg.decay_t_max / cfg.decay_t_min,
                                      double(k) / (cfg.decay_samples - 1));
            const double env = fit.theta_identically_zero
                                   ? 0.0
                                   : fit.d1 * std::pow(t, 2.0 - mu) + fit.d2 / t;
            os << fmt::format("{:.17g},{:.17g},{:.17g}\n", t, density.theta(t), env);
        }
    }
}

void write_potential_csv(const SurfaceSolution& sol, const PotentialSet& ps, const fs::path& dir) {
    const GridSpec& s = sol.u.spec();
    std::ofstream os(dir / "potential.csv");
    os << "x,y,a,b,c,E\n";
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.x(i), s.y(j),
                              ps.a.at(i, j), ps.b.at(i, j), ps.c.at(i, j), ps.E.at(i, j));
}

void write_reparam_csv(const SurfaceSolution& sol, const ReparamResult& rr, const fs::path& dir) {
    const GridSpec& s = sol.u.spec();
    std::ofstream os(dir / "reparam.csv");
    os << "x,y,det_dl,margin_prop,margin_cor8\n";
    const EnergyDensity& d = sol.density;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const double t = std::hypot(sol.ux.at(i, j), sol.uy.at(i, j));
            const double det = rr.det_dl.at(i, j);
            os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.x(i), s.y(j), det,
                              det - (1.0 + d.xi(t) * (1.0 + t * t)), det - rr.cor8_c * (1.0 + t));
        }
}

}  // namespace

RunReport run_pipeline(const RunConfig& cfg) {
    RunReport out;
    ordered_json& rep = out.json;
    Timer total;
    rep["config"] = {{"density", {{"kind", cfg.density_kind}}},
                     {"boundary", cfg.boundary},
                     {"stages", cfg.stages},
                     {"seed", cfg.seed}};
    if (cfg.density_mu) rep["config"]["density"]["mu"] = *cfg.density_mu;
    if (const char* th = std::getenv("MUSURF_THREADS")) rep["config"]["threads"] = th;

    fs::path dir(cfg.output_dir);
    auto flush_report = [&rep, &dir, &total]() {
        rep["wall_time_s"] = total.seconds();
        std::ofstream os(dir / "report.json");
        os << rep.dump(2) << "\n";
    };

    try {
        std::error_code ec;
        if (!fs::exists(dir)) {
            if (!cfg.create_output_dir)
                throw std::runtime_error("output directory does not exist: " + cfg.output_dir);
            fs::create_directories(dir, ec);
            if (ec) throw std::runtime_error("cannot create output directory: " + ec.message());
        }

        EnergyDensity density = make_builtin(cfg.density_kind, cfg.density_mu);
        ValidationReport vr = validate(density, default_sample_grid());
        rep["validation"] = ordered_json::array();
        for (const auto& c : vr.checks)
            rep["validation"].push_back(
                {{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        if (!vr.passed()) throw ValidationError("density validation failed");

        if (std::find(cfg.stages.begin(), cfg.stages.end(), "identities") != cfg.stages.end()) {
            IdentityReport ir = density_identities(density, {0.5, 1.0, 2.0, 5.0, 10.0});
            rep["identities"] = {{"max_rel_vartheta_prime", ir.max_rel_vartheta_prime},
                                 {"max_rel_t2", ir.max_rel_t2},
                                 {"max_rel_t3", ir.max_rel_t3},
                                 {"fd_step", ir.fd_step}};
        }
        if (std::find(cfg.stages.begin(), cfg.stages.end(), "decay") != cfg.stages.end()) {
            DecayFit fit = decay_fit(density, cfg.decay_t_min, cfg.decay_t_max, cfg.decay_samples);
            rep["decay"] = {{"d1", fit.d1},
                            {"d2", fit.d2},
                            {"slope", fit.slope},
                            {"theta_identically_zero", fit.theta_identically_zero}};
        }

        std::vector<GridSpec> grids;
        if (cfg.refine_nodes.empty()) {
            grids.push_back(cfg.grid);
        } else {
            for (int n : cfg.refine_nodes) {
                GridSpec g = cfg.grid;
                g.nx = g.ny = n;
                g.check();
                grids.push_back(g);
            }
        }

        std::vector<GridRunOutput> runs;
        for (size_t k = 0; k < grids.size(); ++k)
            runs.push_back(run_single_grid(cfg, density, grids[k], dir, k + 1 == grids.size()));

        rep["runs"] = ordered_json::array();
        for (const auto& r : runs) rep["runs"].push_back(r.report);

        // observed closedness orders across an h-halving series
        if (runs.size() >= 2 && runs.front().report.contains("forms")) {
            ordered_json orders = ordered_json::array();
            for (size_t k = 1; k < runs.size(); ++k) {
                const auto& f0 = runs[k - 1].report.at("forms");
                const auto& f1 = runs[k].report.at("forms");
                auto order = [&](const char* key) {
                    return std::log2(f0.at(key).get<double>() / f1.at(key).get<double>());
                };
                orders.push_back({{"order_d_alpha", order("max_d_alpha")},
                                  {"order_d_beta", order("max_d_beta")},
                                  {"order_d_gamma", order("max_d_gamma")}});
            }
            rep["closedness_orders"] = orders;
        }

        write_stage_csvs(cfg, density, runs, dir);

        rep["status"] = "ok";
        out.exit_code = 0;
    } catch (const ValidationError& e) {
        rep["status"] = "validation_error";
        rep["error"] = e.what();
        out.exit_code = 2;
    } catch (const SolveError& e) {
        rep["status"] = "solver_error";
        rep["error"] = e.what();
        out.exit_code = 3;
    } catch (const std::exception& e) {
        rep["status"] = "error";
        rep["error"] = e.what();
        out.exit_code = 1;
    }

    std::error_code ec;
    if (fs::exists(dir, ec)) flush_report();
    return out;
}

}  // namespace musurf
