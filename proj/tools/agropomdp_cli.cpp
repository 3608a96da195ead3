// Command line front end: train, eval, compare, verify-rewards, sweep-w3,
// synth-weather.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/experiment/runner.hpp"
#include "agropomdp/weather/csv.hpp"
#include "agropomdp/weather/synth.hpp"

namespace {

using namespace agro;
using namespace agro::experiment;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::string out = "out";
    std::vector<std::string> overrides;
    std::string model_type;
    std::string model_path;
    std::optional<double> temperature_shift;
    std::optional<double> rain_scale;
    bool full_scale = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "Config file (key = value lines)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--episodes", o.episodes, "Training episodes");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--set", o.overrides, "Override a config key (key=value), repeatable");
    sub->add_flag("--full-scale", o.full_scale, "6000 episodes and full-size networks");
}

void add_weather(CLI::App* sub, Options& o) {
    sub->add_option("--temperature-shift", o.temperature_shift, "Add this many deg C to tmax and tmin");
    sub->add_option("--rain-scale", o.rain_scale, "Multiply rainfall by this factor in [0, 1]");
}

// Precedence: built-in defaults < --full-scale < config file < flags < --set.
ExperimentConfig resolve(const Options& o) {
    ExperimentConfig cfg;
    if (o.full_scale) cfg.use_full_scale();
    if (!o.config.empty()) cfg = load_config_file(o.config, cfg);
    if (o.seed) cfg.seed = *o.seed;
    if (o.episodes) cfg.agent.episodes = *o.episodes;
    if (!o.model_type.empty()) cfg.model = Codec<ModelKind>::parse(o.model_type);
    if (!o.model_path.empty()) cfg.model_path = o.model_path;
    if (o.temperature_shift) cfg.perturbation.temperature_shift = *o.temperature_shift;
    if (o.rain_scale) cfg.perturbation.rain_scale = *o.rain_scale;
    for (const auto& s : o.overrides) apply_entry(cfg, parse_override(s));
    cfg.validate();
    return cfg;
}

int exit_code(std::string_view category) {
    if (category == "usage") return 2;
    if (category == "config") return 3;
    if (category == "data") return 4;
    return 5;
}

int verify(const Options& o, bool write) {
    const auto checks = verify_rewards();
    const auto table = reward_check_table(checks);
    table.write(std::cout);
    if (write) {
        ensure_directory(o.out);
        table.save(fs::path(o.out) / "verify_rewards.csv");
    }
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.passed();
    std::cout << (ok ? "all gated identities hold within 2" : "reward identity check FAILED") << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nitrogen fertilisation agents on a surrogate maize environment"};
    app.set_version_flag("--version", AGROPOMDP_VERSION);
    app.require_subcommand(1);

    Options o;
    auto* train = app.add_subcommand("train", "Train one agent and write curve, model and evaluation");
    add_common(train, o);
    add_weather(train, o);
    train->add_option("--model-type", o.model_type, "MDP28, MDP10, POMDP28, POMDP10 or tabular-toy");

    auto* eval = app.add_subcommand("eval", "Greedy evaluation of a saved model or an expert plan");
    add_common(eval, o);
    add_weather(eval, o);
    eval->add_option("--model", o.model_path, "Model file written by train");
    eval->add_option("--model-type", o.model_type, "Observation mode of the model, or expert-1 / expert-2");

    auto* compare = app.add_subcommand("compare", "Train each model in experiment.models over experiment.seeds");
    add_common(compare, o);
    add_weather(compare, o);

    auto* sweep = app.add_subcommand("sweep-w3", "Train with w3 = m * w2 for each m in experiment.w3_multipliers");
    add_common(sweep, o);
    add_weather(sweep, o);
    sweep->add_option("--model-type", o.model_type, "Model to train at each multiplier");

    bool write_report = false;
    auto* verify_cmd = app.add_subcommand("verify-rewards", "Recompute published season rewards from outcomes");
    verify_cmd->add_option("--out", o.out, "Also write verify_rewards.csv here")
        ->each([&](const std::string&) { write_report = true; });

    int days = 204;
    auto* synth = app.add_subcommand("synth-weather", "Write a synthetic daily weather CSV");
    synth->add_option("--seed", o.seed, "Weather seed");
    synth->add_option("--days", days, "Number of days")->capture_default_str();
    synth->add_option("--out", o.out, "Output directory")->capture_default_str();
    add_weather(synth, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*verify_cmd) return verify(o, write_report);
        if (*synth) {
            weather::PerturbationSpec p;
            if (o.temperature_shift) p.temperature_shift = *o.temperature_shift;
            if (o.rain_scale) p.rain_scale = *o.rain_scale;
            const auto series = weather::perturb(weather::synthesize_weather(o.seed.value_or(1999), days), p);
            ensure_directory(o.out);
            const auto path = fs::path(o.out) / "weather.csv";
            write_atomic(path, [&](std::ostream& os) { weather::write_weather_csv(os, series); });
            std::cout << "wrote " << path.string() << " (" << series.size() << " days, " << series.label() << ")\n";
            return 0;
        }
        const auto cfg = resolve(o);
        const fs::path out(o.out);
        if (*train) {
            run_train(cfg, out, &std::cerr);
            std::cout << "wrote " << out.string() << '\n';
        } else if (*eval) {
            const auto ev = run_eval(cfg, out, &std::cout);
            (void)ev;
        } else if (*compare) {
            run_compare(cfg, out, &std::cout);
        } else if (*sweep) {
            run_sweep_w3(cfg, out, &std::cout);
        }
        return 0;
    } catch (const agro::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
}
