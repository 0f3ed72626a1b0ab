#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relent/config.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw relent::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    std::vector<std::string> overrides;
};

int run(const std::string& command, const CommonArgs& args) {
    std::string text = read_file(args.config_path);
    for (const auto& assignment : args.overrides)
        text = relent::apply_override(text, assignment);

    relent::RunConfig config = relent::parse_config(text);
    if (!config.command.empty() && config.command != command)
        throw relent::ConfigError(".command: config names '" + config.command +
                                  "' but the CLI asked for '" + command + "'");
    config.command = command;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
    config.echo_json = relent::serialize_config(config);
    return relent::dispatch(config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative entropy laboratory for inhomogeneous balance laws"};
    app.require_subcommand(1);

    CommonArgs args;
    const std::vector<std::string> commands = {"audit",     "solve",       "identity",
                                               "stability", "convergence", "weakstrong"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "JSON config file")->required();
        sub->add_option("--out", args.out_dir, "output directory (overrides config)");
        sub->add_option("--seed", args.seed, "seed (overrides config)");
        sub->add_option("--set", args.overrides, "key.path=value overrides");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run(app.get_subcommands().front()->get_name(), args);
    } catch (const relent::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const relent::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
