#include "tipping/cli/commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Predicts crisis points and transient lifetimes with parameter-aware reservoir computers"};
    app.set_version_flag("--version", std::string(tipping::tool_version));
    app.require_subcommand(1, 1);

    tipping::Invocation inv;
    std::string out;
    std::size_t threads = 0;
    for (const char* name : {"simulate", "train", "crisis", "lifetimes", "tune"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", inv.config, "Experiment config (JSON)")->required();
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--threads", threads, "Parallel width")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tipping::exit_config;
    }
    inv.command = app.get_subcommands().front()->get_name();
    if (!out.empty()) inv.out = out;
    if (threads > 0) inv.threads = threads;
    return tipping::run(inv);
}
