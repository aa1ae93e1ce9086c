#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "musurf/density.hpp"
#include "musurf/grid.hpp"
#include "musurf/solver.hpp"

namespace musurf {

/// One batch run: density + grid + boundary + solve settings + stages.
/// Parsed from a single top-level JSON object.
struct RunConfig {
    std::string density_kind = "minimal";
    std::optional<double> density_mu;
    GridSpec grid = GridSpec::square(-1.0, 1.0, 33);
    std::string boundary = "scherk";
    double bnd_a = 0.0, bnd_b = 0.0, bnd_c = 0.0, bnd_slope = 1.0;
    SolveConfig solve;
    std::string output_dir = "musurf_out";
    bool create_output_dir = true;
    std::vector<std::string> stages;  // dependency-closed, execution order
    std::vector<int> refine_nodes;    // optional h-halving series of node counts
    double decay_t_min = 1e2, decay_t_max = 1e4;
    int decay_samples = 200;
    unsigned seed = 12345;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path);
};

struct RunReport {
    nlohmann::ordered_json json;
    int exit_code = 0;
};

/// Executes the requested stages in dependency order, writes report.json
/// and the per-stage CSVs into the output directory.  Exit codes: 0 ok,
/// 1 I/O or config error, 2 density validation failure, 3 solver
/// non-convergence.  Partial outputs are retained with stage status.
RunReport run_pipeline(const RunConfig& cfg);

}  // namespace musurf
