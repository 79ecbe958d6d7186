// Command-line front end: spectrum, convergence and condition experiments.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "igaspec/experiment.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 1;

struct RawFlags {
    int dim = 1;
    int degree = 3;
    std::vector<int> elements;
    std::string quadrature = "blended";
    std::string penalty = "on";
    std::vector<int> modes{1, 6};
    std::string format = "csv";
    std::string out;
    int threads = 1;
};

void add_flags(CLI::App* cmd, RawFlags& f)
{
    cmd->add_option("--dim", f.dim, "Spatial dimension (1, 2 or 3)")->check(CLI::IsMember({1, 2, 3}));
    cmd->add_option("--degree", f.degree, "Spline degree p");
    cmd->add_option("--elements", f.elements, "Elements per axis; comma-separated list for convergence")
        ->delimiter(',')
        ->required();
    cmd->add_option("--quadrature", f.quadrature, "gauss or blended")->check(CLI::IsMember({"gauss", "blended"}));
    cmd->add_option("--penalty", f.penalty, "on or off")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--modes", f.modes, "Modes of interest, comma-separated")->delimiter(',');
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "Output path (default: standard output)");
    cmd->add_option("--threads", f.threads, "Worker threads");
}

igaspec::ExperimentConfig to_config(const RawFlags& f)
{
    igaspec::ExperimentConfig c;
    c.dimension = f.dim;
    c.degree = f.degree;
    c.elements = f.elements;
    c.quadrature = f.quadrature == "gauss" ? igaspec::QuadratureKind::Gauss : igaspec::QuadratureKind::Blended;
    c.penalty = f.penalty == "on";
    c.modes = f.modes;
    c.format = f.format == "json" ? igaspec::OutputFormat::Json : igaspec::OutputFormat::Csv;
    c.out = f.out;
    c.threads = f.threads;
    return c;
}

std::string describe(const igaspec::ExperimentConfig& c)
{
    std::ostringstream os;
    os << "[dim=" << c.dimension << " degree=" << c.degree << " elements=";
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
        os << (i ? "," : "") << c.elements[i];
    }
    os << " quadrature=" << igaspec::to_string(c.quadrature) << " penalty=" << igaspec::penalty_tag(c.penalty)
       << "]";
    return os.str();
}

void emit(const igaspec::ExperimentConfig& c, const std::string& content)
{
    if (c.out.empty()) {
        std::cout << content;
    } else {
        igaspec::write_atomic(c.out, content);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Isogeometric Laplace eigenvalue experiments with blended quadrature and boundary penalty"};
    app.require_subcommand(1);

    RawFlags flags;
    auto* spectrum = app.add_subcommand("spectrum", "Full spectrum with exact references and relative errors");
    auto* convergence = app.add_subcommand("convergence", "Errors and convergence rates over a mesh sequence");
    auto* condition = app.add_subcommand("condition", "Condition numbers against the standard Gauss baseline");
    for (auto* cmd : {spectrum, convergence, condition}) {
        add_flags(cmd, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    const auto config = to_config(flags);
    try {
        if (spectrum->parsed()) {
            emit(config, igaspec::render(igaspec::run_spectrum(config), config.format));
        } else if (convergence->parsed()) {
            emit(config, igaspec::render(igaspec::run_convergence(config), config.format));
        } else {
            emit(config, igaspec::render(igaspec::run_condition(config), config.format));
        }
    } catch (const igaspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const igaspec::DomainError& e) {
        std::cerr << "config error: " << e.what() << ' ' << describe(config) << '\n';
        return exit_config;
    } catch (const igaspec::UnsupportedDegreeError& e) {
        std::cerr << "config error: " << e.what() << ' ' << describe(config) << '\n';
        return exit_config;
    } catch (const igaspec::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << ' ' << describe(config) << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << ' ' << describe(config) << '\n';
        return exit_io;
    }
    return 0;
}
