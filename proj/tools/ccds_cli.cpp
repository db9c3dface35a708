#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccds/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> structure;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "Run config or scenario file (JSON)")->required();
    sub->add_option("--seed", f.seed, "Override the RNG seed");
    sub->add_option("--paths", f.paths, "Override the number of Monte Carlo paths");
    sub->add_option("--structure", f.structure, "baseline | tpa | ccds_chain | all");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--format", f.format, "csv | structured");
    sub->add_option("--threads", f.threads, "Worker threads for Monte Carlo work");
}

ccds::cli::RunConfig build_config(const Flags& f) {
    auto cfg = ccds::cli::load_run_config(f.config);
    if (f.seed) {
        cfg.mc.seed = *f.seed;
        cfg.sweep_seed = *f.seed;
    }
    if (f.paths) cfg.mc.n_paths = *f.paths;
    if (f.structure) cfg.structure = ccds::cli::parse_structure_option(*f.structure);
    if (f.out) cfg.output = *f.out;
    if (f.format) cfg.format = ccds::cli::parse_format(*f.format);
    if (f.threads) cfg.mc.threads = *f.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Close-out and CVA engine for securitisation swap structures with a CCDS chain"};
    app.require_subcommand(1);
    Flags flags;
    auto* resolve = app.add_subcommand("resolve", "Resolve C's default in a scenario file under each structure");
    auto* check = app.add_subcommand("check", "Run the close-out invariant suite over randomised scenarios");
    auto* cva = app.add_subcommand("cva", "Monte Carlo CVA and exposure profiles");
    auto* compare = app.add_subcommand("compare", "Per-structure comparison table for scenario files");
    for (auto* sub : {resolve, check, cva, compare}) add_flags(sub, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ccds::cli::kValidation;
    }

    ccds::cli::RunConfig cfg;
    const int load = ccds::cli::detail::guarded(std::cerr, [&] {
        cfg = build_config(flags);
        return static_cast<int>(ccds::cli::kOk);
    });
    if (load != ccds::cli::kOk) return load;

    if (resolve->parsed()) return ccds::cli::cmd_resolve(cfg, std::cout, std::cerr);
    if (check->parsed()) return ccds::cli::cmd_check(cfg, std::cout, std::cerr);
    if (cva->parsed()) return ccds::cli::cmd_cva(cfg, std::cout, std::cerr);
    return ccds::cli::cmd_compare(cfg, std::cout, std::cerr);
}
