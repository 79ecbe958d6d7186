#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "assembly.hpp"
#include "bspline.hpp"
#include "eigsolve.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "tensor.hpp"

namespace igaspec {

enum class QuadratureKind { Gauss, Blended };
enum class OutputFormat { Csv, Json };
enum class Command { Spectrum, Convergence, Condition };

inline std::string to_string(QuadratureKind q) { return q == QuadratureKind::Gauss ? "gauss" : "blended"; }
inline std::string penalty_tag(bool on) { return on ? "on" : "off"; }

struct ExperimentConfig {
    int dimension = 1;
    int degree = 3;
    std::vector<int> elements;
    QuadratureKind quadrature = QuadratureKind::Blended;
    bool penalty = true;
    std::vector<int> modes{1, 6};
    OutputFormat format = OutputFormat::Csv;
    std::string out; // empty: standard output
    int threads = 1;

    /// Interior degrees of freedom for an n-element-per-axis mesh.
    std::size_t dof_count(int n) const
    {
        std::size_t total = 1;
        for (int q = 0; q < dimension; ++q) {
            total *= static_cast<std::size_t>(n + degree - 2);
        }
        return total;
    }
};

/// Rejects invalid configurations before any computation, naming the
/// violated constraint.
inline void validate(const ExperimentConfig& c, Command cmd)
{
    if (c.dimension < 1 || c.dimension > 3) {
        throw ConfigError("--dim must be 1, 2 or 3");
    }
    if (c.degree < 1) {
        throw ConfigError("--degree must be >= 1");
    }
    if (c.quadrature == QuadratureKind::Blended && c.degree > 7) {
        throw ConfigError("--quadrature blended requires --degree in 1..7");
    }
    if (cmd == Command::Condition && c.degree > 7) {
        throw ConfigError("condition compares against the blended method, which requires --degree in 1..7");
    }
    if (c.elements.empty()) {
        throw ConfigError("--elements is required");
    }
    for (int n : c.elements) {
        if (n < 1) {
            throw ConfigError("--elements entries must be >= 1");
        }
        if (c.dof_count(n) == 0) {
            throw ConfigError("mesh with " + std::to_string(n) + " elements has no interior degrees of freedom");
        }
    }
    if (cmd == Command::Convergence) {
        if (c.elements.size() < 3) {
            throw ConfigError("convergence needs at least 3 meshes in --elements");
        }
        for (std::size_t i = 1; i < c.elements.size(); ++i) {
            if (c.elements[i] <= c.elements[i - 1]) {
                throw ConfigError("--elements must be strictly increasing for convergence");
            }
        }
        if (c.modes.empty()) {
            throw ConfigError("--modes must not be empty");
        }
        for (int m : c.modes) {
            if (m < 1 || static_cast<std::size_t>(m) > c.dof_count(c.elements.front())) {
                throw ConfigError("--modes entry " + std::to_string(m) + " exceeds the DOF count of the coarsest mesh");
            }
        }
    } else if (c.elements.size() != 1) {
        throw ConfigError("--elements takes a single value for this command");
    }
    if (c.threads < 1) {
        throw ConfigError("--threads must be >= 1");
    }
}

// ---------------------------------------------------------------------------
// Pipeline

inline SystemMatrices assemble_axis(int degree, int n, QuadratureKind q, bool penalty)
{
    const BSplineSpace space(degree, n);
    const auto pen = penalty ? PenaltyConfig::standard(degree) : PenaltyConfig::disabled();
    if (q == QuadratureKind::Gauss) {
        return assemble_1d_reference_gauss(space, pen);
    }
    return assemble_1d(space, optimal_blending(degree), pen);
}

inline Spectrum solve_axis(int degree, int n, QuadratureKind q, bool penalty, bool want_vectors)
{
    const auto sys = assemble_axis(degree, n, q, penalty);
    auto s = solve_generalized(sys.stiffness, sys.mass, want_vectors);
    s.info = {1, degree, {n}, to_string(q), penalty_tag(penalty)};
    return s;
}

/// Full spectrum on an n^d mesh; d >= 2 goes through spectral_sum.
inline Spectrum compute_spectrum(int dimension, int degree, int n, QuadratureKind q, bool penalty,
                                 bool want_vectors = false)
{
    auto axis = solve_axis(degree, n, q, penalty, want_vectors && dimension == 1);
    if (dimension == 1) {
        return axis;
    }
    return spectral_sum(std::vector<Spectrum>(static_cast<std::size_t>(dimension), axis));
}

struct SpectrumResult {
    int dimension = 1;
    int degree = 0;
    int elements = 0;
    std::string quadrature;
    std::string penalty;
    std::vector<EigenvalueError> rows;
};

inline SpectrumResult run_spectrum(const ExperimentConfig& c)
{
    validate(c, Command::Spectrum);
    const int n = c.elements.front();
    const auto s = compute_spectrum(c.dimension, c.degree, n, c.quadrature, c.penalty);
    return {c.dimension, c.degree, n, to_string(c.quadrature), penalty_tag(c.penalty),
            eigenvalue_errors(s, ExactSpectrum(c.dimension))};
}

struct ModeErrors {
    int mode = 0;
    double eigenvalue = 0.0;
    std::optional<double> h1;
    std::optional<double> l2;
};

struct ConvergenceRow {
    int elements = 0;
    double h = 0.0;
    std::vector<ModeErrors> modes;
};

struct RateEntry {
    int mode = 0;
    std::string quantity; // "eigenvalue", "h1", "l2"
    std::optional<double> rate;
};

struct ConvergenceResult {
    int dimension = 1;
    int degree = 0;
    std::string quadrature;
    std::string penalty;
    std::vector<ConvergenceRow> rows;
    std::vector<RateEntry> rates;
};

inline ConvergenceRow convergence_row(const ExperimentConfig& c, int n)
{
    const bool one_d = c.dimension == 1;
    const auto s = compute_spectrum(c.dimension, c.degree, n, c.quadrature, c.penalty, one_d);
    const auto errs = eigenvalue_errors(s, ExactSpectrum(c.dimension));
    ConvergenceRow row{n, 1.0 / n, {}};
    std::vector<EigenfunctionError> fn;
    if (one_d) {
        fn = eigenfunction_errors(s, BSplineSpace(c.degree, n), c.modes);
    }
    for (std::size_t i = 0; i < c.modes.size(); ++i) {
        ModeErrors me;
        me.mode = c.modes[i];
        me.eigenvalue = errs[static_cast<std::size_t>(c.modes[i] - 1)].relative_error;
        if (one_d) {
            me.h1 = fn[i].h1_seminorm;
            me.l2 = fn[i].l2_norm;
        }
        row.modes.push_back(me);
    }
    return row;
}

/// Fits one rate per (mode, quantity) column of the mesh rows.
inline std::vector<RateEntry> fit_rates(const std::vector<ConvergenceRow>& rows, double floor = saturation_floor)
{
    std::vector<RateEntry> rates;
    if (rows.empty()) {
        return rates;
    }
    std::vector<double> h;
    for (const auto& r : rows) {
        h.push_back(r.h);
    }
    for (std::size_t m = 0; m < rows.front().modes.size(); ++m) {
        const auto fit_column = [&](const std::string& name, auto getter) {
            std::vector<double> e;
            for (const auto& r : rows) {
                const std::optional<double> v = getter(r.modes[m]);
                if (!v) {
                    return;
                }
                e.push_back(*v);
            }
            rates.push_back({rows.front().modes[m].mode, name, convergence_rate(h, e, floor).rate});
        };
        fit_column("eigenvalue", [](const ModeErrors& x) { return std::optional<double>(x.eigenvalue); });
        fit_column("h1", [](const ModeErrors& x) { return x.h1; });
        fit_column("l2", [](const ModeErrors& x) { return x.l2; });
    }
    return rates;
}

inline ConvergenceResult run_convergence(const ExperimentConfig& c)
{
    validate(c, Command::Convergence);
    ConvergenceResult res{c.dimension, c.degree, to_string(c.quadrature), penalty_tag(c.penalty), {}, {}};
    res.rows.resize(c.elements.size());
    // Meshes are independent; results land in mesh order regardless of threads.
    for (std::size_t start = 0; start < c.elements.size(); start += static_cast<std::size_t>(c.threads)) {
        std::vector<std::future<ConvergenceRow>> jobs;
        const std::size_t stop = std::min(c.elements.size(), start + static_cast<std::size_t>(c.threads));
        for (std::size_t i = start; i < stop; ++i) {
            jobs.push_back(std::async(c.threads > 1 ? std::launch::async : std::launch::deferred,
                                      [&c, n = c.elements[i]] { return convergence_row(c, n); }));
        }
        for (std::size_t i = start; i < stop; ++i) {
            res.rows[i] = jobs[i - start].get();
        }
    }
    res.rates = fit_rates(res.rows);
    return res;
}

struct ConditionResult {
    int dimension = 1;
    int degree = 0;
    int elements = 0;
    std::string quadrature; // treated method
    std::string penalty;
    ConditionReport report;
};

/// Baseline is standard Gauss IGA without penalty; the treated method is the
/// configured quadrature and penalty.
inline ConditionResult run_condition(const ExperimentConfig& c)
{
    validate(c, Command::Condition);
    const int n = c.elements.front();
    const auto launch = c.threads > 1 ? std::launch::async : std::launch::deferred;
    auto baseline = std::async(launch, [&] { return compute_spectrum(c.dimension, c.degree, n, QuadratureKind::Gauss, false); });
    const auto treated = compute_spectrum(c.dimension, c.degree, n, c.quadrature, c.penalty);
    return {c.dimension, c.degree, n, to_string(c.quadrature), penalty_tag(c.penalty),
            condition_report(baseline.get(), treated)};
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string to_csv(const SpectrumResult& r)
{
    std::ostringstream os;
    os << "rank,normalized_rank,exact,approx,relative_error\n";
    for (const auto& e : r.rows) {
        os << e.rank << ',' << format_double(e.normalized_rank) << ',' << format_double(e.exact) << ','
           << format_double(e.approx) << ',' << format_double(e.relative_error) << '\n';
    }
    return os.str();
}

/// One row per mesh followed by a `rate` row; saturated fits read
/// `saturated`.
inline std::string to_csv(const ConvergenceResult& r)
{
    std::ostringstream os;
    os << "elements,h";
    for (const auto& rate : r.rates) {
        os << ",m" << rate.mode << '_' << rate.quantity;
    }
    os << '\n';
    const auto lookup = [](const ModeErrors& m, const std::string& q) -> std::optional<double> {
        if (q == "eigenvalue") {
            return m.eigenvalue;
        }
        return q == "h1" ? m.h1 : m.l2;
    };
    for (const auto& row : r.rows) {
        os << row.elements << ',' << format_double(row.h);
        for (const auto& rate : r.rates) {
            for (const auto& m : row.modes) {
                if (m.mode == rate.mode) {
                    os << ',' << format_double(*lookup(m, rate.quantity));
                    break;
                }
            }
        }
        os << '\n';
    }
    os << "rate,";
    for (const auto& rate : r.rates) {
        os << ',' << (rate.rate ? format_double(*rate.rate) : std::string("saturated"));
    }
    os << '\n';
    return os.str();
}

inline std::string to_csv(const ConditionResult& r)
{
    const auto& c = r.report;
    std::ostringstream os;
    os << "dim,degree,elements,lambda_min,lambda_max,lambda_min_tilde,lambda_max_tilde,gamma,gamma_tilde,rho,"
          "reduction_percent\n";
    os << r.dimension << ',' << r.degree << ',' << r.elements << ',' << format_double(c.lambda_min) << ','
       << format_double(c.lambda_max) << ',' << format_double(c.lambda_min_tilde) << ','
       << format_double(c.lambda_max_tilde) << ',' << format_double(c.gamma) << ',' << format_double(c.gamma_tilde)
       << ',' << format_double(c.rho) << ',' << format_double(c.reduction_percent) << '\n';
    return os.str();
}

using nlohmann::json;

inline json to_json(const SpectrumResult& r)
{
    json rows = json::array();
    for (const auto& e : r.rows) {
        rows.push_back({{"rank", e.rank},
                        {"normalized_rank", e.normalized_rank},
                        {"exact", e.exact},
                        {"approx", e.approx},
                        {"relative_error", e.relative_error}});
    }
    return {{"command", "spectrum"}, {"dim", r.dimension},         {"degree", r.degree},
            {"elements", r.elements}, {"quadrature", r.quadrature}, {"penalty", r.penalty},
            {"rows", rows}};
}

inline SpectrumResult spectrum_from_json(const json& j)
{
    SpectrumResult r;
    r.dimension = j.at("dim");
    r.degree = j.at("degree");
    r.elements = j.at("elements");
    r.quadrature = j.at("quadrature");
    r.penalty = j.at("penalty");
    for (const auto& e : j.at("rows")) {
        r.rows.push_back({e.at("rank"), e.at("normalized_rank"), e.at("exact"), e.at("approx"), e.at("relative_error")});
    }
    return r;
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline std::optional<double> optional_from_json(const json& j)
{
    return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

inline json to_json(const ConvergenceResult& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        json modes = json::array();
        for (const auto& m : row.modes) {
            modes.push_back({{"mode", m.mode}, {"eigenvalue", m.eigenvalue}, {"h1", optional_json(m.h1)},
                             {"l2", optional_json(m.l2)}});
        }
        rows.push_back({{"elements", row.elements}, {"h", row.h}, {"modes", modes}});
    }
    json rates = json::array();
    for (const auto& rate : r.rates) {
        rates.push_back({{"mode", rate.mode},
                         {"quantity", rate.quantity},
                         {"rate", optional_json(rate.rate)},
                         {"status", rate.rate ? "ok" : "saturated"}});
    }
    return {{"command", "convergence"}, {"dim", r.dimension}, {"degree", r.degree}, {"quadrature", r.quadrature},
            {"penalty", r.penalty},      {"rows", rows},       {"rates", rates}};
}

inline ConvergenceResult convergence_from_json(const json& j)
{
    ConvergenceResult r;
    r.dimension = j.at("dim");
    r.degree = j.at("degree");
    r.quadrature = j.at("quadrature");
    r.penalty = j.at("penalty");
    for (const auto& row : j.at("rows")) {
        ConvergenceRow cr{row.at("elements"), row.at("h"), {}};
        for (const auto& m : row.at("modes")) {
            cr.modes.push_back({m.at("mode"), m.at("eigenvalue"), optional_from_json(m.at("h1")),
                                optional_from_json(m.at("l2"))});
        }
        r.rows.push_back(std::move(cr));
    }
    for (const auto& rate : j.at("rates")) {
        r.rates.push_back({rate.at("mode"), rate.at("quantity"), optional_from_json(rate.at("rate"))});
    }
    return r;
}

inline json to_json(const ConditionResult& r)
{
    const auto& c = r.report;
    return {{"command", "condition"},
            {"dim", r.dimension},
            {"degree", r.degree},
            {"elements", r.elements},
            {"quadrature", r.quadrature},
            {"penalty", r.penalty},
            {"lambda_min", c.lambda_min},
            {"lambda_max", c.lambda_max},
            {"lambda_min_tilde", c.lambda_min_tilde},
            {"lambda_max_tilde", c.lambda_max_tilde},
            {"gamma", c.gamma},
            {"gamma_tilde", c.gamma_tilde},
            {"rho", c.rho},
            {"reduction_percent", c.reduction_percent}};
}

inline ConditionResult condition_from_json(const json& j)
{
    ConditionResult r;
    r.dimension = j.at("dim");
    r.degree = j.at("degree");
    r.elements = j.at("elements");
    r.quadrature = j.at("quadrature");
    r.penalty = j.at("penalty");
    r.report = {j.at("lambda_min"),  j.at("lambda_max"),  j.at("lambda_min_tilde"), j.at("lambda_max_tilde"),
                j.at("gamma"),       j.at("gamma_tilde"), j.at("rho"),              j.at("reduction_percent")};
    return r;
}

template <class Result>
std::string render(const Result& r, OutputFormat format)
{
    return format == OutputFormat::Csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

/// Writes to `path` through a temporary sibling and a rename, so a failed
/// run never leaves a partial file behind.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        os << content;
        os.flush();
        if (!os) {
            std::filesystem::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

} // namespace igaspec
