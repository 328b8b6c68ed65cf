#include "toricflow/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace toricflow;

namespace {

constexpr int kPass = 0;
constexpr int kToleranceFailure = 1;
constexpr int kConfigError = 2;

struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<double> tol;
    std::string svg;
    std::string tau;
    std::string out;
    bool negative_control = false;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path + ": cannot write file");
    f << text;
}

std::optional<Rational> tau_of(const Args& a, const ProblemConfig& cfg) {
    if (!a.tau.empty()) {
        try {
            return parse_rational(a.tau);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("--tau: ") + e.what());
        }
    }
    return cfg.options.tau;
}

int run(const std::string& command, const Args& a) {
    const ProblemConfig cfg = load_config(a.config);
    if (command == "check") {
        emit(dump(check_report(cfg)), a.out);
        return kPass;
    }
    if (command == "flow") {
        emit(dump(flow_report(cfg)), a.out);
        if (!a.svg.empty()) emit(render_svg(cfg), a.svg);
        return kPass;
    }
    if (command == "topology") {
        emit(dump(topology_report(cfg, tau_of(a, cfg))), a.out);
        return kPass;
    }
    if (command == "render") {
        const std::string svg = render_svg(cfg);
        emit(svg, a.svg.empty() ? a.out : a.svg);
        return kPass;
    }
    VerifyOptions opt;
    opt.seed = a.seed.value_or(cfg.options.seed.value_or(42));
    opt.samples = a.samples.value_or(cfg.options.samples.value_or(200));
    opt.tol = a.tol.value_or(cfg.options.tol.value_or(1e-3));
    opt.negative_control = a.negative_control || cfg.options.negative_control;
    if (cfg.options.box_lo) opt.sampling.box_lo = *cfg.options.box_lo;
    if (cfg.options.box_hi) opt.sampling.box_hi = *cfg.options.box_hi;
    const VerifyRun vr = verify_report(cfg, opt, tau_of(a, cfg));
    emit(dump(vr.report), a.out);
    return vr.pass ? kPass : kToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact toric slice flows and numerical Lagrangian identities"};
    app.require_subcommand(1);
    Args a;
    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {{"check", "validate the polytope, gamma, the special condition and the initial slice"},
                          {"flow", "exact event timeline and per-interval topology"},
                          {"topology", "real-form topology of the slice at --tau"},
                          {"verify", "numerical identity suite on seeded samples"},
                          {"render", "SVG panels of the slice over the timeline"}};
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", a.config, "problem configuration (.json or .toml)")->required();
        sub->add_option("--out", a.out, "write the report here instead of stdout");
        sub->add_option("--tau", a.tau, "exact time tau = 2 pi t as P/Q");
        if (std::string(s.name) == "verify") {
            sub->add_option("--seed", a.seed, "sampling seed (default 42)");
            sub->add_option("--samples", a.samples, "sample count (default 200)")->check(CLI::PositiveNumber);
            sub->add_option("--tol", a.tol, "tolerance of the finite-difference identities (default 1e-3)")->check(CLI::PositiveNumber);
            sub->add_flag("--negative-control", a.negative_control, "shift samples off the level set before the Lagrangian check");
        }
        if (std::string(s.name) == "flow" || std::string(s.name) == "render")
            sub->add_option("--svg", a.svg, "write the SVG rendering here");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, a);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DependentRows& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const EmptyLevelSet& e) {
        std::cerr << "error: " << command << ": " << e.what() << "\n";
        return kToleranceFailure;
    } catch (const StepSizeFailure& e) {
        std::cerr << "error: " << command << ": " << e.what() << "\n";
        return kToleranceFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kToleranceFailure;
    }
}
