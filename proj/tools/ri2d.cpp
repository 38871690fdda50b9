#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "ri2d/experiments.hpp"
#include "ri2d/report.hpp"

using namespace ri2d;

namespace {

struct CliState {
    ExperimentConfig cfg;
    std::string config_path;
    std::string format_name;
    std::vector<std::string> overrides;
    bool to_stdout = false;
};

int run(CliState& st, const std::string& id)
{
    if (!st.config_path.empty()) {
        ExperimentConfig file_cfg = load_config_file(st.config_path);
        file_cfg.out_dir = st.cfg.out_dir.empty() ? file_cfg.out_dir : st.cfg.out_dir;
        st.cfg = file_cfg;
    }
    st.cfg.id = id;
    if (!st.format_name.empty()) st.cfg.format = parse_format(st.format_name);
    for (const std::string& kv : st.overrides) apply_override(st.cfg, kv);

    const ExperimentOutcome out = run_experiment(st.cfg);
    if (st.to_stdout || st.cfg.out_dir.empty()) {
        emit_report(out.table, st.cfg.format, std::cout);
    } else {
        const std::string path =
            write_report(out.table, st.cfg.format, st.cfg.out_dir, id);
        std::cout << path << "\n";
    }
    if (out.truncated > 0)
        std::cerr << "truncated replicas: " << out.truncated << " / "
                  << out.attempted << "\n";
    return out.truncation_exceeded ? 3 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"two-dimensional random-interlacement and excursion experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    CliState st;
    app.add_option("--config", st.config_path, "JSON config file");
    app.add_option("--seed", st.cfg.seed, "base RNG seed");
    app.add_option("--replicas", st.cfg.replicas,
                   "replica count (0 = per-experiment default)");
    app.add_option("--out", st.cfg.out_dir, "output directory");
    app.add_option("--cache", st.cfg.cache_dir, "cache directory for solver tables");
    app.add_option("--format", st.format_name, "csv | json | plotdata");
    app.add_option("--truncation-limit", st.cfg.truncation_limit,
                   "allowed fraction of truncated replicas");
    app.add_option("--set", st.overrides, "experiment parameter override key=value")
        ->take_all();
    app.add_flag("--stdout", st.to_stdout, "write the report to stdout");

    std::string chosen;
    for (const std::string& id : experiment_ids()) {
        CLI::App* sub = app.add_subcommand(id, "run experiment " + id);
        sub->callback([&chosen, id] { chosen = id; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run(st, chosen);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
