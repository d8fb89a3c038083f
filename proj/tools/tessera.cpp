// tessera: batch runs, parameter sweeps and the session server.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error,
// 4 server port already in use.

#include <tessera/cli/commands.hpp>
#include <tessera/server/ws_server.hpp>

#include <boost/asio/signal_set.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace cli = tessera::cli;
namespace fs = std::filesystem;

namespace {

struct RunFlags {
    fs::path config;
    std::string model;
    std::optional<std::uint64_t> steps;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> params;
    std::string out;
    std::vector<std::string> layers;
    std::string timeline;
};

struct SweepFlags {
    fs::path spec;
    std::string out;
    unsigned jobs = 0;
};

struct ServeFlags {
    unsigned short port = 8765;
    std::string address = "127.0.0.1";
    fs::path models;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("tessera");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    const char* env = std::getenv("SIM_LOG_LEVEL");
    if (!env || !*env) return;
    const std::string level(env);
    if (level == "error") {
        spdlog::set_level(spdlog::level::err);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        throw cli::ConfigError("SIM_LOG_LEVEL must be error, info or debug, got '" + level + "'");
    }
}

cli::RunConfig build_run_config(const RunFlags& f) {
    cli::RunConfig c;
    if (!f.config.empty()) c = cli::run_config_from_json(cli::read_json_file(f.config), f.config.parent_path());
    if (!f.model.empty()) {
        if (!c.model.empty() && cli::find_model(c.model).name != cli::find_model(f.model).name) {
            throw cli::ConfigError("--model " + f.model + " conflicts with config model " + c.model);
        }
        c.model = f.model;
    }
    if (c.model.empty()) throw cli::ConfigError("no model given (use --model or a config file)");
    const tessera::Model& model = cli::find_model(c.model);
    c.model = model.name;
    for (const auto& kv : f.params) {
        auto [name, value] = cli::param_from_text(model, kv);
        c.params[name] = std::move(value);
    }
    if (f.steps) c.steps = *f.steps;
    if (!f.seeds.empty()) c.seeds = f.seeds;
    if (c.seeds.empty()) c.seeds = {0};
    if (!f.out.empty()) c.out = f.out;
    if (!f.layers.empty()) {
        c.layers.clear();
        for (const auto& l : f.layers) c.layers.push_back(cli::layer_from_text(l));
    }
    if (!f.timeline.empty()) c.timeline = fs::path(f.timeline);
    return c;
}

int cmd_run(const RunFlags& f) {
    const cli::RunConfig c = build_run_config(f);
    spdlog::info("run {} for {} ticks, {} seed(s)", c.model, c.steps, c.seeds.size());
    const auto files = cli::execute_run(c, [](const std::string& m) { spdlog::debug("{}", m); });
    spdlog::info("wrote {} probe file(s)", files.size());
    return cli::exit_ok;
}

int cmd_sweep(const SweepFlags& f) {
    cli::SweepSpec s = cli::sweep_from_json(cli::read_json_file(f.spec), f.spec.parent_path());
    if (!f.out.empty()) s.out = f.out;
    if (f.jobs > 0) s.jobs = f.jobs;
    if (s.base.seeds.empty()) s.base.seeds = {0};
    const auto combos = cli::combinations(s);
    spdlog::info("sweep {}: {} combination(s) x {} seed(s), {} job(s)", s.base.model, combos.size(),
                 s.base.seeds.size(), s.jobs);
    cli::execute_sweep(s, [](const std::string& m) { spdlog::debug("{}", m); });
    spdlog::info("summary written to {}", s.out.string());
    return cli::exit_ok;
}

int cmd_serve(const ServeFlags& f) {
    std::shared_ptr<const tessera::server::ParamDefaults> defaults;
    if (!f.models.empty()) {
        defaults = std::make_shared<const tessera::server::ParamDefaults>(cli::load_models_dir(f.models));
        spdlog::info("loaded defaults for {} model(s) from {}", defaults->size(), f.models.string());
    }
    namespace net = tessera::server::net;
    net::io_context ioc;
    std::unique_ptr<tessera::server::WsServer> server;
    try {
        server = std::make_unique<tessera::server::WsServer>(
            ioc, f.address, f.port, [](const std::string& m) { spdlog::info("{}", m); }, defaults);
    } catch (const boost::system::system_error& e) {
        if (e.code() == net::error::address_in_use) {
            spdlog::error("port {} is already in use", f.port);
            return cli::exit_port_in_use;
        }
        throw cli::RunError(std::string("cannot listen: ") + e.what());
    }
    net::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int sig) {
        spdlog::info("signal {} received, shutting down", sig);
        server->stop();
        ioc.stop();
    });
    server->start();
    spdlog::info("serving on ws://{}:{}/", f.address, server->port());
    ioc.run();
    spdlog::info("{} session(s) served", server->sessions_opened());
    return cli::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tessera: grid-based agent simulations with time travel"};
    app.require_subcommand(1);

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "run one configuration for one or more seeds");
    run_cmd->add_option("--config", run.config, "JSON run config; flags override its keys")->check(CLI::ExistingFile);
    run_cmd->add_option("--model", run.model, "game_of_life, pastoral or institutions");
    run_cmd->add_option("--steps", run.steps, "ticks to simulate");
    run_cmd->add_option("--seed", run.seeds, "seed (repeatable)")->take_all();
    run_cmd->add_option("--param", run.params, "name=value override (repeatable)");
    run_cmd->add_option("--out", run.out, "output prefix; writes <out>_seed<k>.csv");
    run_cmd->add_option("--layer", run.layers, "attr=path.asc raster layer (repeatable)");
    run_cmd->add_option("--timeline", run.timeline, "export every tick's snapshot under this directory");

    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid and write a summary CSV");
    sweep_cmd->add_option("--spec", sweep.spec, "JSON sweep spec")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sweep.out, "summary CSV path (overrides the spec)");
    sweep_cmd->add_option("--jobs", sweep.jobs, "parallel workers (overrides the spec)")->check(CLI::PositiveNumber);

    ServeFlags serve;
    auto* serve_cmd = app.add_subcommand("serve", "serve interactive sessions over WebSocket");
    serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)")->capture_default_str();
    serve_cmd->add_option("--address", serve.address, "bind address")->capture_default_str();
    serve_cmd->add_option("--models", serve.models, "directory of per-model parameter files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::exit_ok : cli::exit_config;
    }

    try {
        setup_logging();
        if (*run_cmd) return cmd_run(run);
        if (*sweep_cmd) return cmd_sweep(sweep);
        return cmd_serve(serve);
    } catch (const cli::ConfigError& e) {
        spdlog::error("{}", e.what());
        return cli::exit_config;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return cli::exit_runtime;
    }
}
