// Command-line front end: simulate single scenarios, sweep a parameter,
// evaluate certificates, or run the built-in presets.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 certificate violation (with --strict, or a failing waypoint certificate).

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hkctrl/scenario.hpp"

namespace {

using namespace hkctrl;

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigError("--values must list at least one number");
    return out;
}

void check_strict(const ScenarioConfig& cfg, bool strict) {
    if (!strict) return;
    const Certificates c = emit_certificates(cfg);
    std::ostringstream why;
    if (c.margin_tau_pointwise <= 0.0 && cfg.model == ModelKind::pointwise)
        why << "tau_max exceeds the pointwise delay bound; ";
    if (cfg.model == ModelKind::distributed && c.margin_tau_distributed &&
        *c.margin_tau_distributed <= 0.0)
        why << "tau_max exceeds the distributed delay bound; ";
    if (cfg.policy.kind == "waypoint" && !c.halanay_ok) why << "settling certificate fails; ";
    const std::string msg = why.str();
    if (!msg.empty()) throw CertificateViolation(msg);
}

int do_simulate(const ScenarioConfig& cfg, const std::string& out_dir, bool strict) {
    check_strict(cfg, strict);
    RunResult result = run_scenario(cfg);
    write_outputs(result, out_dir);
    write_report_text(result, std::cout);
    std::cout << "wrote: " << out_dir << "/" << cfg.name << "_trajectory.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed opinion-dynamics simulator with leader control"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", axis, values_csv, emit_path, preset_name;
    bool strict = false;
    double preset_tau = 1.0;

    auto* sim = app.add_subcommand("simulate", "integrate one scenario from a config file");
    sim->add_option("config", config_path, "JSON scenario config")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--strict", strict, "fail when the delay certificates do not hold");

    auto* sweep = app.add_subcommand("sweep", "run one scenario per value of a parameter");
    sweep->add_option("config", config_path, "JSON scenario config")->required();
    sweep->add_option("--axis", axis, "tau | gamma | M | step | B")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto* cert = app.add_subcommand("certify", "evaluate certificates without simulating");
    cert->add_option("config", config_path, "JSON scenario config")->required();
    cert->add_flag("--strict", strict, "exit 4 when tau_max violates the applicable bound");

    auto* preset = app.add_subcommand("preset", "run a built-in scenario");
    preset->add_option("name", preset_name, "fig1 | fig2")->required();
    preset->add_option("--tau", preset_tau, "constant delay");
    preset->add_option("--out", out_dir, "output directory");
    preset->add_option("--emit-config", emit_path, "write the expanded config and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return do_simulate(load_config(config_path), out_dir, strict);

        if (sweep->parsed()) {
            const ScenarioConfig base = load_config(config_path);
            const std::vector<double> values = parse_values(values_csv);
            const auto results = run_sweep(base, axis, values);
            std::cout << axis << ",final_d0,consensus_time,fitted_rate,oscillatory\n";
            for (std::size_t k = 0; k < results.size(); ++k) {
                const auto& rep = results[k].report;
                write_outputs(results[k], out_dir);
                std::cout << values[k] << ","
                          << (rep.d0_series.empty() ? -1.0 : rep.d0_series.back()) << ","
                          << (rep.consensus_time ? *rep.consensus_time : -1.0) << ","
                          << (rep.rate_available ? rep.fitted_rate : 0.0) << ","
                          << (rep.oscillatory ? "true" : "false") << "\n";
            }
            return 0;
        }

        if (cert->parsed()) {
            const ScenarioConfig cfg = load_config(config_path);
            const Scenario sc = build_scenario(cfg);
            print_certificates(emit_certificates(cfg), sc.delay.tau_max(), std::cout);
            check_strict(cfg, strict);
            return 0;
        }

        if (preset->parsed()) {
            ScenarioConfig cfg;
            if (preset_name == "fig1")
                cfg = fig1_config(preset_tau);
            else if (preset_name == "fig2")
                cfg = fig2_config(preset_tau);
            else
                throw ConfigError("unknown preset: " + preset_name);
            if (!emit_path.empty()) {
                std::ofstream os(emit_path, std::ios::binary);
                if (!os) throw ConfigError("cannot write " + emit_path);
                os << config_to_text(cfg);
                std::cout << "wrote: " << emit_path << "\n";
                return 0;
            }
            return do_simulate(cfg, out_dir, strict);
        }
    } catch (const CertificateViolation& e) {
        std::cerr << "certificate violation: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const KernelViolation& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const HistoryUnderflow& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const StepSizeError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
