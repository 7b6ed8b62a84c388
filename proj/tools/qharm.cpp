// qharm: simulate three-phase signals and estimate harmonic frequencies.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qharm/experiment.hpp"

namespace {

struct Subcommand {
    CLI::App* app{nullptr};
    std::string config_path;
    std::map<std::string, std::string> flags;
};

Subcommand add_subcommand(CLI::App& root, const std::string& name, const std::string& help) {
    Subcommand sub;
    sub.app = root.add_subcommand(name, help);
    return sub;
}

void bind_flags(Subcommand& sub) {
    sub.app->add_option("--config", sub.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    for (const auto& key : qharm::setting_keys()) {
        sub.app->add_option("--" + key, sub.flags[key], "overrides '" + key + "' from the config");
    }
}

qharm::ExperimentConfig resolve(const Subcommand& sub) {
    auto config = qharm::ExperimentConfig::defaults();
    if (!sub.config_path.empty()) {
        std::ifstream is(sub.config_path);
        if (!is) {
            throw std::runtime_error("cannot read config '" + sub.config_path + "'");
        }
        qharm::apply_config_text(config, is, sub.config_path);
    }
    for (const auto& [key, value] : sub.flags) {
        if (sub.app->count("--" + key) > 0) {
            qharm::apply_setting(config, key, value);
        }
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quaternion-domain harmonic frequency estimation for three-phase power signals"};
    app.require_subcommand(1);

    auto simulate = add_subcommand(app, "simulate", "write three-phase, complex and quaternion series as CSV");
    auto spectrum = add_subcommand(app, "spectrum", "compute FT / MVDR / MUSIC spectra and classify the peaks");
    auto montecarlo = add_subcommand(app, "montecarlo", "frequency-error table over an SNR sweep");
    for (auto* sub : {&simulate, &spectrum, &montecarlo}) {
        bind_flags(*sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate.app->parsed()) {
            qharm::run_simulate(resolve(simulate), std::cout);
        } else if (spectrum.app->parsed()) {
            qharm::run_spectrum(resolve(spectrum), std::cout);
        } else if (montecarlo.app->parsed()) {
            qharm::run_montecarlo(resolve(montecarlo), std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "qharm: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
