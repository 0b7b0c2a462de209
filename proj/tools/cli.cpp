#include "rsbench_cli.hpp"

#include <cstdio>
#include <exception>
#include <new>

#include <CLI11.hpp>

#include <rsbench/error.hpp>

namespace rsbench::cli {

int main_entry(int argc, char** argv) {
    CLI::App app{"Range-search benchmarking toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RSBENCH_VERSION);

    RunOptions opts;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON configuration file")->required();
        sub->add_option("--out", out, "Output directory")->required();
        sub->add_option("--seed", seed, "Overrides the configuration's seed");
        sub->callback([&opts, sub, name] {
            opts.command = name;
            if (sub->count("--seed") > 0) {
                opts.seed = 0; // filled below
            }
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    opts.config_path = config;
    opts.out_dir = out;
    if (opts.seed) {
        opts.seed = seed;
    }

    try {
        run_command(opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "rsbench %s: %s error: %s\n", opts.command.c_str(), to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "rsbench %s: out of memory\n", opts.command.c_str());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rsbench %s: internal error: %s\n", opts.command.c_str(), e.what());
        return 4;
    }
    return 0;
}

} // namespace rsbench::cli
