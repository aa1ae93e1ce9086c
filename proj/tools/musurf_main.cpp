#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "musurf/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"musurf: mu-elliptic surface pipeline"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute a batch run from a JSON config");
    std::string config_path;
    std::string out_override;
    std::string stages_override;
    run->add_option("config", config_path, "path to the JSON config")->required();
    run->add_option("--out", out_override, "override the output directory");
    run->add_option("--stages", stages_override, "comma separated stage subset");

    CLI11_PARSE(app, argc, argv);

    try {
        musurf::RunConfig cfg = musurf::RunConfig::from_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (!stages_override.empty()) {
            std::vector<std::string> stages;
            size_t pos = 0;
            while (pos <= stages_override.size()) {
                size_t comma = stages_override.find(',', pos);
                if (comma == std::string::npos) comma = stages_override.size();
                if (comma > pos) stages.push_back(stages_override.substr(pos, comma - pos));
                pos = comma + 1;
            }
            // from_json closes stage dependencies, reuse that path
            nlohmann::json patch{{"stages", stages}};
            cfg.stages = musurf::RunConfig::from_json(patch).stages;
        }
        musurf::RunReport rep = musurf::run_pipeline(cfg);
        std::printf("%s\n", rep.json.value("status", std::string("unknown")).c_str());
        return rep.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "musurf: %s\n", e.what());
        return 1;
    }
}
