// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "igaspec/igaspec.hpp"
#include "oracles.hpp"

using namespace igaspec;

namespace {

// Pinned tolerances.
constexpr double quad_exact_tol = 1e-13;
constexpr double quad_table_tol = 1e-14;
constexpr double table2_factor = 2.0;
constexpr double table2_rate_tol = 0.5;
constexpr double fn_rate_tol = 0.6;
constexpr double table3_factor = 3.0;
constexpr double table3_rate_tol = 0.7;
constexpr double table4_rel_tol = 0.01;
constexpr double table4_pp_tol = 0.5;
constexpr double hat_tol = 1e-13;
constexpr double kron_tol = 1e-9;
constexpr double oracle_mass_tol = 1e-12;
constexpr double residual_tol = 1e-9;
constexpr double gram_tol = 1e-8;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " MISS[" << what << "]";
        }
    }
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string fix(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

Spectrum multi_d(int d, int p, int n, bool blended)
{
    return compute_spectrum(d, p, n, blended ? QuadratureKind::Blended : QuadratureKind::Gauss, blended);
}

bool within_factor(double v, double ref, double f) { return v >= ref / f && v <= ref * f; }

// ---------------------------------------------------------------------------

void criterion_quadrature(Outcome& o)
{
    double worst = 0.0;
    for (int m = 1; m <= 16; ++m) {
        const auto g = gauss_legendre(m);
        for (int k = 0; k <= 2 * m - 1; ++k) {
            worst = std::max(worst, std::abs(g.apply([k](double x) { return std::pow(x, k); }) - oracle::monomial_integral(k)));
        }
        if (m >= 2) {
            const auto l = gauss_lobatto(m);
            for (int k = 0; k <= 2 * m - 3; ++k) {
                worst = std::max(worst,
                                 std::abs(l.apply([k](double x) { return std::pow(x, k); }) - oracle::monomial_integral(k)));
            }
        }
    }
    o.check(worst <= quad_exact_tol, "monomial exactness");

    const double r70 = std::sqrt(70.0);
    const double a5 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b5 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double a4 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b4 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double s3 = std::sqrt(3.0) / 3.0;
    const double s35 = std::sqrt(0.6);
    const double s15 = std::sqrt(0.2);
    const double s37 = std::sqrt(3.0 / 7.0);
    struct Table {
        QuadratureRule rule;
        std::vector<double> nodes;
        std::vector<double> weights;
    };
    const std::vector<Table> tables{
        {gauss_legendre(1), {0.0}, {2.0}},
        {gauss_legendre(2), {-s3, s3}, {1.0, 1.0}},
        {gauss_legendre(3), {-s35, 0.0, s35}, {5.0 / 9, 8.0 / 9, 5.0 / 9}},
        {gauss_legendre(4), {-b4, -a4, a4, b4},
         {(18 - std::sqrt(30.0)) / 36, (18 + std::sqrt(30.0)) / 36, (18 + std::sqrt(30.0)) / 36,
          (18 - std::sqrt(30.0)) / 36}},
        {gauss_legendre(5), {-b5, -a5, 0.0, a5, b5},
         {(322 - 13 * r70) / 900, (322 + 13 * r70) / 900, 128.0 / 225, (322 + 13 * r70) / 900,
          (322 - 13 * r70) / 900}},
        {gauss_lobatto(2), {-1.0, 1.0}, {1.0, 1.0}},
        {gauss_lobatto(3), {-1.0, 0.0, 1.0}, {1.0 / 3, 4.0 / 3, 1.0 / 3}},
        {gauss_lobatto(4), {-1.0, -s15, s15, 1.0}, {1.0 / 6, 5.0 / 6, 5.0 / 6, 1.0 / 6}},
        {gauss_lobatto(5), {-1.0, -s37, 0.0, s37, 1.0}, {0.1, 49.0 / 90, 32.0 / 45, 49.0 / 90, 0.1}},
    };
    double table_worst = 0.0;
    for (const auto& t : tables) {
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            table_worst = std::max({table_worst, std::abs(t.rule.nodes[i] - t.nodes[i]),
                                    std::abs(t.rule.weights[i] - t.weights[i])});
        }
    }
    o.check(table_worst <= quad_table_tol, "tabulated rules");
    o.detail << " monomial_max_err=" << sci(worst) << " table_max_err=" << sci(table_worst);
}

struct Table2Block {
    int p;
    std::vector<int> meshes;
    std::vector<double> lambda1;
    std::vector<double> lambda6;
    double rate1;
    double rate_h1;
    double rate_l2;
};

const std::vector<Table2Block>& table2()
{
    static const std::vector<Table2Block> t{
        {3, {5, 10, 20, 40}, {3.52e-7, 1.32e-9, 5.09e-12, 1.12e-13}, {3.05e-1, 3.21e-3, 9.57e-6, 3.45e-8}, 8.04, 3.05, 4.08},
        {4, {5, 10, 20}, {6.90e-9, 6.31e-12, 5.75e-14}, {3.05e-1, 7.59e-4, 4.42e-7}, 10.09, 4.11, 5.16},
        {5, {5, 10, 20}, {1.13e-10, 1.15e-14, 1.27e-14}, {3.06e-1, 1.41e-4, 1.72e-8}, 13.26, 5.16, 6.22},
    };
    return t;
}

ExperimentConfig table2_config(const Table2Block& b)
{
    ExperimentConfig c;
    c.degree = b.p;
    c.elements = b.meshes;
    c.modes = {1, 6};
    return c;
}

std::optional<double> find_rate(const ConvergenceResult& r, int mode, const std::string& q)
{
    for (const auto& e : r.rates) {
        if (e.mode == mode && e.quantity == q) {
            return e.rate;
        }
    }
    return std::nullopt;
}

std::string rate_text(const std::optional<double>& r) { return r ? fix(*r) : std::string("saturated"); }

void criterion_table2(Outcome& o)
{
    for (const auto& b : table2()) {
        const auto r = run_convergence(table2_config(b));
        o.detail << " p=" << b.p << ":";
        for (std::size_t i = 0; i < b.meshes.size(); ++i) {
            const auto& m = r.rows[i].modes;
            const double e1 = m[0].eigenvalue;
            const double e6 = m[1].eigenvalue;
            const std::string tag = "p=" + std::to_string(b.p) + " n=" + std::to_string(b.meshes[i]);
            if (e1 > saturation_floor) {
                o.check(within_factor(e1, b.lambda1[i], table2_factor), tag + " l1=" + sci(e1));
            } else {
                o.detail << " [n=" << b.meshes[i] << " l1=" << sci(e1) << " at floor, excluded]";
            }
            if (e6 > saturation_floor) {
                o.check(within_factor(e6, b.lambda6[i], table2_factor), tag + " l6=" + sci(e6));
            } else {
                o.detail << " [n=" << b.meshes[i] << " l6=" << sci(e6) << " at floor, excluded]";
            }
        }
        const auto r1 = find_rate(r, 1, "eigenvalue");
        o.check(r1 && std::abs(*r1 - b.rate1) <= table2_rate_tol,
                "p=" + std::to_string(b.p) + " rate " + rate_text(r1) + " vs " + fix(b.rate1));
        o.detail << " rate1=" << rate_text(r1) << " (ref " << fix(b.rate1) << ") rate6=" << rate_text(find_rate(r, 6, "eigenvalue"));
    }
}

void criterion_eigenfunction_rates(Outcome& o)
{
    for (const auto& b : table2()) {
        auto c = table2_config(b);
        c.modes = {1};
        const auto r = run_convergence(c);
        const auto h1 = find_rate(r, 1, "h1");
        const auto l2 = find_rate(r, 1, "l2");
        const std::string tag = "p=" + std::to_string(b.p);
        o.check(h1 && std::abs(*h1 - b.rate_h1) <= fn_rate_tol, tag + " H1 " + rate_text(h1));
        o.check(l2 && std::abs(*l2 - b.rate_l2) <= fn_rate_tol, tag + " L2 " + rate_text(l2));
        o.detail << ' ' << tag << " H1=" << rate_text(h1) << " (ref " << fix(b.rate_h1) << ") L2=" << rate_text(l2)
                 << " (ref " << fix(b.rate_l2) << ")";
    }
}

void criterion_table3(Outcome& o)
{
    struct Block {
        int d;
        int p;
        std::vector<int> meshes;
        std::vector<double> lambda1;
        double rate;
    };
    const std::vector<Block> blocks{
        {2, 3, {3, 6, 12, 24}, {2.28e-5, 8.05e-8, 3.07e-10, 1.31e-12}, 8.02},
        {2, 4, {3, 6, 12, 24}, {1.32e-6, 1.09e-9, 1.07e-12, 1.35e-14}, 10.12},
        {2, 5, {3, 6, 12, 24}, {6.55e-8, 1.29e-11, 5.21e-14, 9.45e-14}, 7.95},
        {3, 3, {2, 4, 8, 16}, {6.78e-4, 2.15e-6, 7.94e-9, 3.06e-11}, 8.13},
        {3, 4, {2, 4, 8, 16}, {1.00e-4, 6.74e-8, 5.96e-11, 3.00e-15}, 11.5},
        {3, 5, {2, 4, 8, 16}, {1.28e-5, 1.79e-9, 5.30e-13, 4.66e-15}, 12.26},
    };
    for (const auto& b : blocks) {
        ExperimentConfig c;
        c.dimension = b.d;
        c.degree = b.p;
        c.elements = b.meshes;
        c.modes = {1};
        const auto r = run_convergence(c);
        const std::string tag = "d=" + std::to_string(b.d) + " p=" + std::to_string(b.p);
        o.detail << ' ' << tag << ":";
        for (std::size_t i = b.meshes.size() - 2; i < b.meshes.size(); ++i) {
            const double e = r.rows[i].modes[0].eigenvalue;
            if (e > saturation_floor) {
                o.check(within_factor(e, b.lambda1[i], table3_factor),
                        tag + " n=" + std::to_string(b.meshes[i]) + " l1=" + sci(e));
                o.detail << " n=" << b.meshes[i] << " l1=" << sci(e);
            } else {
                o.detail << " [n=" << b.meshes[i] << " l1=" << sci(e) << " at floor, excluded]";
            }
        }
        const auto rate = find_rate(r, 1, "eigenvalue");
        o.check(rate && std::abs(*rate - b.rate) <= table3_rate_tol, tag + " rate " + rate_text(rate) + " vs " + fix(b.rate));
        o.detail << " rate=" << rate_text(rate) << " (ref " << fix(b.rate) << ")";
    }
}

void criterion_table4(Outcome& o)
{
    struct Row {
        int d;
        int p;
        int n;
        double lmin;
        double lmax;
        double lmax_tilde;
        double pct;
    };
    const std::vector<Row> rows{
        {1, 3, 100, 9.87, 1.46e5, 9.87e4, 32.17},  {1, 4, 100, 9.87, 2.45e5, 9.87e4, 59.69},
        {1, 5, 100, 9.87, 3.93e5, 1.00e5, 74.47},  {2, 3, 48, 1.97e1, 6.71e4, 4.55e4, 32.17},
        {2, 4, 48, 1.97e1, 1.13e5, 4.55e4, 59.69}, {2, 5, 48, 1.97e1, 1.81e5, 4.57e4, 74.77},
        {3, 3, 16, 2.96e1, 1.12e4, 7.58e3, 32.23}, {3, 4, 16, 2.96e1, 1.88e4, 7.58e3, 59.72},
        {3, 5, 16, 2.96e1, 3.02e4, 7.59e3, 74.89},
    };
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    for (const auto& row : rows) {
        ExperimentConfig c;
        c.dimension = row.d;
        c.degree = row.p;
        c.elements = {row.n};
        const auto r = run_condition(c).report;
        const std::string tag = "d=" + std::to_string(row.d) + " p=" + std::to_string(row.p);
        o.check(rel(r.lambda_min, row.lmin) <= table4_rel_tol, tag + " lmin=" + sci(r.lambda_min));
        o.check(rel(r.lambda_max, row.lmax) <= table4_rel_tol, tag + " lmax=" + sci(r.lambda_max));
        o.check(rel(r.lambda_max_tilde, row.lmax_tilde) <= table4_rel_tol, tag + " lmax~=" + sci(r.lambda_max_tilde));
        o.check(std::abs(r.reduction_percent - row.pct) <= table4_pp_tol, tag + " pct=" + fix(r.reduction_percent));
        o.detail << ' ' << tag << " pct=" << fix(r.reduction_percent) << "(ref " << fix(row.pct) << ")";
    }
}

void criterion_outliers(Outcome& o)
{
    for (int d : {1, 2}) {
        const int n = d == 1 ? 100 : 20;
        const ExactSpectrum ex(d);
        for (int p : {3, 4, 5}) {
            const auto base = multi_d(d, p, n, false);
            const auto treated = multi_d(d, p, n, true);
            const auto mb = outlier_metric(base, ex);
            const auto mt = outlier_metric(treated, ex);
            const double max_b = std::max(mb.top_max, mb.bulk_max);
            const double max_t = std::max(mt.top_max, mt.bulk_max);
            const std::string tag = "d=" + std::to_string(d) + " p=" + std::to_string(p);
            o.check(mb.flagged, tag + " standard not flagged (ratio " + fix(mb.top_max / mb.bulk_max) + ")");
            o.check(!mt.flagged, tag + " treated flagged (ratio " + fix(mt.top_max / mt.bulk_max) + ")");
            o.check(max_t < max_b, tag + " treated max not below standard");
            o.detail << ' ' << tag << " ratio_std=" << fix(mb.top_max / mb.bulk_max)
                     << " ratio_blend=" << fix(mt.top_max / mt.bulk_max) << " max_std=" << sci(max_b)
                     << " max_blend=" << sci(max_t);
        }
    }
}

DenseMatrix mass_oracle(int p, int n)
{
    const BSplineSpace space(p, n);
    const auto& knots = space.knot_vector().knots();
    const auto rule = gauss_legendre(20);
    const int nd = space.n_dof_interior();
    DenseMatrix m(static_cast<std::size_t>(nd));
    std::vector<double> phi(static_cast<std::size_t>(nd));
    for (int e = 0; e < n; ++e) {
        const double a = static_cast<double>(e) / n;
        const double b = static_cast<double>(e + 1) / n;
        for (std::size_t l = 0; l < rule.size(); ++l) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[l];
            const double w = 0.5 * (b - a) * rule.weights[l];
            for (int i = 0; i < nd; ++i) {
                phi[static_cast<std::size_t>(i)] = oracle::cox_de_boor(knots, i + 1, p, x);
            }
            for (int i = 0; i < nd; ++i) {
                for (int j = 0; j < nd; ++j) {
                    m(i, j) += w * phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
                }
            }
        }
    }
    return m;
}

void criterion_oracles(Outcome& o)
{
    // (a) hat functions
    double hat_worst = 0.0;
    for (int n : {2, 4, 7, 16}) {
        const double h = 1.0 / n;
        const auto sys = assemble_1d(BSplineSpace(1, n), gauss_legendre(2), PenaltyConfig::disabled());
        for (std::size_t i = 0; i < sys.mass.size(); ++i) {
            for (std::size_t j = 0; j < sys.mass.size(); ++j) {
                const bool diag = i == j;
                const bool off = i + 1 == j || j + 1 == i;
                const double m = diag ? 4.0 * h / 6.0 : (off ? h / 6.0 : 0.0);
                const double k = diag ? 2.0 / h : (off ? -1.0 / h : 0.0);
                hat_worst = std::max({hat_worst, std::abs(sys.mass(i, j) - m), std::abs(sys.stiffness(i, j) - k)});
            }
        }
    }
    o.check(hat_worst <= hat_tol, "(a) hat matrices " + sci(hat_worst));

    // (b) Kronecker materialization against spectral_sum
    double kron_worst = 0.0;
    std::string kron_where;
    for (int d : {2, 3}) {
        for (int p : {3, 4}) {
            for (int n : {3, 4, 5}) {
                const auto axis = assemble_axis(p, n, QuadratureKind::Blended, true);
                const auto [k, m] = materialize(TensorSystem{std::vector<SystemMatrices>(static_cast<std::size_t>(d), axis)});
                const auto full = solve_generalized(k, m, false);
                const auto one = solve_generalized(axis.stiffness, axis.mass, false);
                const auto sums = spectral_sum(std::vector<std::vector<double>>(static_cast<std::size_t>(d), one.eigenvalues));
                double worst = 0.0;
                for (std::size_t i = 0; i < sums.size(); ++i) {
                    worst = std::max(worst, std::abs(full.eigenvalues[i] - sums[i]) / sums[i]);
                }
                if (worst > kron_tol) {
                    kron_where += " d=" + std::to_string(d) + ",p=" + std::to_string(p) + ",n=" + std::to_string(n) + ":" + sci(worst);
                }
                kron_worst = std::max(kron_worst, worst);
            }
        }
    }
    o.check(kron_worst <= kron_tol, "(b) spectral_sum vs materialized" + kron_where);

    // (c) G_{p+1} mass against a 20-point oracle
    double mass_worst = 0.0;
    for (int p = 1; p <= 7; ++p) {
        for (int n : {3, 8, 13}) {
            const auto sys = assemble_1d_reference_gauss(BSplineSpace(p, n), PenaltyConfig::disabled());
            const auto ref = mass_oracle(p, n);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                for (std::size_t j = 0; j < ref.size(); ++j) {
                    mass_worst = std::max(mass_worst, std::abs(sys.mass(i, j) - ref(i, j)));
                }
            }
        }
    }
    o.check(mass_worst <= oracle_mass_tol, "(c) mass oracle " + sci(mass_worst));
    o.detail << " hat=" << sci(hat_worst) << " kron=" << sci(kron_worst) << " mass=" << sci(mass_worst);
}

void criterion_solver(Outcome& o)
{
    double res_worst = 0.0;
    double gram_worst = 0.0;
    for (int p = 1; p <= 7; ++p) {
        for (int n : {10, 50, 100, 200}) {
            for (bool blended : {false, true}) {
                const auto sys = assemble_axis(p, n, blended ? QuadratureKind::Blended : QuadratureKind::Gauss, blended);
                const auto k = sys.stiffness.to_dense();
                const auto m = sys.mass.to_dense();
                Spectrum s;
                try {
                    s = solve_generalized(k, m, true);
                } catch (const NumericError& e) {
                    o.check(false, "p=" + std::to_string(p) + " n=" + std::to_string(n) + " " + e.what());
                    continue;
                }
                for (std::size_t i = 0; i < s.size(); ++i) {
                    res_worst = std::max(res_worst, relative_residual(k, m, s.eigenvalues[i], s.eigenvectors[i]));
                }
                const std::size_t nn = s.size();
                const std::size_t bw = sys.mass.bandwidth();
                std::vector<std::vector<double>> mu(nn, std::vector<double>(nn));
                for (std::size_t b = 0; b < nn; ++b) {
                    for (std::size_t i = 0; i < nn; ++i) {
                        double acc = 0.0;
                        for (std::size_t j = i > bw ? i - bw : 0; j < std::min(nn, i + bw + 1); ++j) {
                            acc += m(i, j) * s.eigenvectors[b][j];
                        }
                        mu[b][i] = acc;
                    }
                }
                for (std::size_t a = 0; a < nn; ++a) {
                    for (std::size_t b = a; b < nn; ++b) {
                        double g = 0.0;
                        for (std::size_t i = 0; i < nn; ++i) {
                            g += s.eigenvectors[a][i] * mu[b][i];
                        }
                        gram_worst = std::max(gram_worst, std::abs(g - (a == b ? 1.0 : 0.0)));
                    }
                }
            }
        }
    }
    o.check(res_worst <= residual_tol, "residual " + sci(res_worst));
    o.check(gram_worst <= gram_tol, "gram " + sci(gram_worst));
    o.detail << " max_residual=" << sci(res_worst) << " max_gram_defect=" << sci(gram_worst);
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"1 quadrature exactness", criterion_quadrature},
        {"2 1D eigenvalue errors and rates", criterion_table2},
        {"3 1D eigenfunction rates", criterion_eigenfunction_rates},
        {"4 2D/3D eigenvalue errors and rates", criterion_table3},
        {"5 condition numbers", criterion_table4},
        {"6 outlier elimination", criterion_outliers},
        {"7 oracle equivalence", criterion_oracles},
        {"8 solver contract", criterion_solver},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %s (%.2fs):%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
