#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "mclab/config.hpp"
#include "mclab/errors.hpp"
#include "mclab/experiments.hpp"

using namespace mclab;

int main(int argc, char** argv) {
    CLI::App app{"monte carlo laboratory for random multiplicative functions"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int workers = 0;

    struct SubSpec {
        const char* name;
        const char* blurb;
    };
    const SubSpec subs[] = {
        {"clt", "paired partial sums, variance estimates and bracket process"},
        {"chaos", "inner vs outer chaos measure convergence sweep"},
        {"multifractal", "interval moments of the exponential measure"},
        {"coupling", "tilted-phase maximal coupling sweep"},
        {"analytics", "deterministic identity batch, no sampling"},
        {"dickman-table", "tabulate the generalized smoothness density"},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.blurb);
        sub->add_option("--config", config_path, "key = value parameter file");
        sub->add_option("--seed", seed, "master seed, overrides the config");
        sub->add_option("--out", out_dir, "directory for the csv/json outputs");
        sub->add_option("--workers", workers, "thread count, overrides the config");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        KeyValueConfig cfg =
            config_path.empty() ? KeyValueConfig() : KeyValueConfig::from_file(config_path);
        if (sub->count("--seed")) cfg.set("seed", std::to_string(seed));
        if (sub->count("--workers")) cfg.set("workers", std::to_string(workers));

        ResultRecord rec = run_experiment(sub->get_name(), cfg);

        std::size_t failed = 0;
        for (const auto& c : rec.checks) {
            if (!c.pass) ++failed;
            std::printf("[%s] %-34s value=%-14.8g reference=%-14.8g tolerance=%.3g", c.pass ? " ok " : "FAIL",
                        c.name.c_str(), c.value, c.reference, c.tolerance);
            if (!c.note.empty()) std::printf("  (%s)", c.note.c_str());
            std::printf("\n");
        }
        if (!out_dir.empty()) {
            write_record(rec, out_dir);
            std::printf("wrote %s/%s_rows.csv and %s/%s_summary.json\n", out_dir.c_str(), rec.experiment.c_str(),
                        out_dir.c_str(), rec.experiment.c_str());
        }
        if (rec.checks.empty())
            std::printf("PASS (no checks for this run)\n");
        else if (rec.all_pass)
            std::printf("PASS (%zu checks)\n", rec.checks.size());
        else
            std::printf("FAIL (%zu of %zu checks)\n", failed, rec.checks.size());
        return rec.all_pass ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
