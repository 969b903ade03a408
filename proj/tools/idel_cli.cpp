// Command-line front end. Flags are assembled into a scenario document and
// handed to the shared library through the C interface; exit codes are the
// library's (0 ok, 2 validation, 3 escape/blow-up, 4 certificate violation).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idel.h"

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("cannot open " + path);
    json j;
    f >> j;
    return j;
}

json signal_from_string(const std::string& text, double amp) {
    if (text == "zero") return {{"kind", "zero"}};
    if (text == "step") return {{"kind", "step"}, {"height", amp}, {"at", 0.5}};
    if (text == "ramp") return {{"kind", "ramp"}, {"slope", amp}};
    if (text == "random") return {{"kind", "random"}, {"amp", amp}};
    if (text == "constant") return {{"kind", "constant"}, {"value", amp}};
    // numeric literal = constant
    try {
        return {{"kind", "constant"}, {"value", std::stod(text)}};
    } catch (...) {
        throw CLI::ValidationError("unknown signal spec: " + text);
    }
}

int run(const json& scenario, const std::string& out_dir) {
    const std::string text = scenario.dump();
    const int code = idel_run_scenario(text.c_str(), out_dir.c_str());
    if (code != 0) std::fprintf(stderr, "exit %d: %s\n", code, idel_last_error());
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"idel — integral delay equations and first-order hyperbolic transport"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string out_dir = "out";
    int K = 256;
    double T = 5.0;
    double tol = 1e-12;
    unsigned long long seed = 42;
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--K", K, "cells per delay unit")->capture_default_str();
    app.add_option("--T", T, "horizon")->capture_default_str();
    app.add_option("--tol", tol, "fixed-point tolerance")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();

    auto numerics = [&] {
        return json{{"K", K}, {"T", T}, {"tol", tol}, {"seed", seed}};
    };

    // simulate-ide ----------------------------------------------------------
    auto* sim_ide = app.add_subcommand("simulate-ide", "solve an integral delay equation");
    std::string sys_path, x0_spec = "constant", d_spec = "zero", u_spec = "zero";
    double x0_amp = 1.0, d_amp = 1.0, u_amp = 0.1;
    sim_ide->add_option("--system", sys_path, "system descriptor JSON file")->required();
    sim_ide->add_option("--x0", x0_spec, "initial history: constant|step|ramp|random|<number>");
    sim_ide->add_option("--x0-amp", x0_amp, "initial history amplitude");
    sim_ide->add_option("--d", d_spec, "disturbance signal");
    sim_ide->add_option("--d-amp", d_amp, "disturbance amplitude");
    sim_ide->add_option("--u", u_spec, "input signal");
    sim_ide->add_option("--u-amp", u_amp, "input amplitude");
    sim_ide->callback([&] {
        json scenario{{"kind", "simulate-ide"},
                      {"system", load_json_file(sys_path)},
                      {"x0", signal_from_string(x0_spec, x0_amp)},
                      {"input",
                       {{"d", signal_from_string(d_spec, d_amp)},
                        {"u", signal_from_string(u_spec, u_amp)}}},
                      {"numerics", numerics()}};
        std::exit(run(scenario, out_dir));
    });

    // simulate-pde ----------------------------------------------------------
    auto* sim_pde = app.add_subcommand("simulate-pde", "solve a hyperbolic system via its closure");
    std::vector<double> snaps;
    sim_pde->add_option("--system", sys_path, "system descriptor JSON file")->required();
    sim_pde->add_option("--x0", x0_spec, "initial profile: constant|step|ramp|random|<number>");
    sim_pde->add_option("--x0-amp", x0_amp, "initial profile amplitude");
    sim_pde->add_option("--d", d_spec, "disturbance signal");
    sim_pde->add_option("--d-amp", d_amp, "disturbance amplitude");
    sim_pde->add_option("--u", u_spec, "boundary input signal");
    sim_pde->add_option("--u-amp", u_amp, "boundary input amplitude");
    sim_pde->add_option("--snapshot", snaps, "profile snapshot times");
    sim_pde->callback([&] {
        json scenario{{"kind", "simulate-pde"},
                      {"system", load_json_file(sys_path)},
                      {"x0", signal_from_string(x0_spec, x0_amp)},
                      {"input",
                       {{"d", signal_from_string(d_spec, d_amp)},
                        {"u", signal_from_string(u_spec, u_amp)}}},
                      {"numerics", numerics()},
                      {"output", {{"snapshots", snaps}}}};
        std::exit(run(scenario, out_dir));
    });

    // convert -----------------------------------------------------------------
    auto* convert = app.add_subcommand("convert", "emit the closure IDE of a hyperbolic system");
    convert->add_option("--system", sys_path, "system descriptor JSON file")->required();
    convert->callback([&] {
        json scenario{{"kind", "convert"},
                      {"system", load_json_file(sys_path)},
                      {"numerics", numerics()}};
        std::exit(run(scenario, out_dir));
    });

    // check-razumikhin --------------------------------------------------------
    auto* raz = app.add_subcommand("check-razumikhin", "falsification run for an ISS certificate");
    std::string cert_path;
    int samples = 10000;
    raz->add_option("--system", sys_path, "system descriptor JSON file")->required();
    raz->add_option("--cert", cert_path, "certificate JSON file")->required();
    raz->add_option("--samples", samples, "sample count")->capture_default_str();
    raz->callback([&] {
        json scenario{{"kind", "check-razumikhin"},
                      {"system", load_json_file(sys_path)},
                      {"cert", load_json_file(cert_path)},
                      {"samples", samples},
                      {"numerics", numerics()}};
        std::exit(run(scenario, out_dir));
    });

    // feedback-demo -------------------------------------------------------------
    auto* demo = app.add_subcommand("feedback-demo", "boundary feedback for the recirculation plant");
    double g = 1.0, noise = 0.0;
    std::string controller = "kernel";
    demo->add_option("--g", g, "recirculation gain")->capture_default_str();
    demo->add_option("--controller", controller, "kernel|two-point|ide")->capture_default_str();
    demo->add_option("--x0", x0_spec, "initial profile: constant|step|ramp|random|<number>");
    demo->add_option("--x0-amp", x0_amp, "initial profile amplitude");
    demo->add_option("--noise", noise, "actuator error amplitude (random)");
    demo->add_option("--snapshot", snaps, "profile snapshot times");
    demo->callback([&] {
        json w = noise == 0.0 ? json{{"kind", "zero"}}
                              : json{{"kind", "random"}, {"amp", noise}};
        json scenario{{"kind", "feedback-demo"},
                      {"g", g},
                      {"controller", controller},
                      {"x0", signal_from_string(x0_spec, x0_amp)},
                      {"w", w},
                      {"numerics", numerics()},
                      {"output", {{"snapshots", snaps}}}};
        std::exit(run(scenario, out_dir));
    });

    // equivalence-audit ---------------------------------------------------------
    auto* audit = app.add_subcommand("equivalence-audit",
                                     "closure route vs upwind oracle at K and 2K");
    audit->add_option("--system", sys_path, "system descriptor JSON file")->required();
    audit->add_option("--x0", x0_spec, "initial profile");
    audit->add_option("--x0-amp", x0_amp, "initial profile amplitude");
    audit->add_option("--d", d_spec, "disturbance signal");
    audit->add_option("--d-amp", d_amp, "disturbance amplitude");
    audit->add_option("--u", u_spec, "boundary input signal");
    audit->add_option("--u-amp", u_amp, "boundary input amplitude");
    audit->callback([&] {
        json scenario{{"kind", "equivalence-audit"},
                      {"system", load_json_file(sys_path)},
                      {"x0", signal_from_string(x0_spec, x0_amp)},
                      {"input",
                       {{"d", signal_from_string(d_spec, d_amp)},
                        {"u", signal_from_string(u_spec, u_amp)}}},
                      {"numerics", numerics()}};
        std::exit(run(scenario, out_dir));
    });

    // run -------------------------------------------------------------------------
    auto* runner = app.add_subcommand("run", "run a scenario file");
    std::string scenario_path;
    runner->add_option("scenario", scenario_path, "scenario JSON file")->required();
    runner->callback([&] {
        std::exit(run(load_json_file(scenario_path), out_dir));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
