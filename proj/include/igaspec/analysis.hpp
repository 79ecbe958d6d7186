#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "bspline.hpp"
#include "eigsolve.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace igaspec {

/// Errors at or below this level are treated as machine-precision saturated.
inline constexpr double saturation_floor = 1e-13;

struct ExactMode {
    double eigenvalue;
    std::array<int, 3> indices{0, 0, 0}; // unused trailing entries are 0
};

/// Exact Dirichlet Laplace eigenpairs on the unit box [0,1]^d:
/// lambda = (j^2 + k^2 + l^2) pi^2, u = prod sqrt(2) sin(j pi x).
class ExactSpectrum {
public:
    explicit ExactSpectrum(int dimension) : d_(dimension)
    {
        if (dimension < 1 || dimension > 3) {
            throw DomainError("ExactSpectrum: dimension must be 1, 2 or 3");
        }
    }

    int dimension() const noexcept { return d_; }

    /// The `count` smallest exact eigenvalues, ascending. Ties are ordered by
    /// index tuple.
    std::vector<ExactMode> modes(std::size_t count) const
    {
        if (count == 0) {
            return {};
        }
        if (d_ == 1) {
            std::vector<ExactMode> out;
            out.reserve(count);
            for (std::size_t j = 1; j <= count; ++j) {
                out.push_back({static_cast<double>(j * j) * pi2, {static_cast<int>(j), 0, 0}});
            }
            return out;
        }
        // The box {1..m}^d holds m^d >= count tuples, all with sum of
        // squares <= d m^2, so every tuple below that bound is a candidate.
        std::size_t m = 1;
        while (ipow(m, d_) < count) {
            ++m;
        }
        const long long bound = static_cast<long long>(d_) * static_cast<long long>(m * m);
        const int jmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(bound)))) + 1;
        std::vector<std::pair<long long, std::array<int, 3>>> tuples;
        const int kmax = d_ >= 2 ? jmax : 1;
        const int lmax = d_ >= 3 ? jmax : 1;
        for (int l = 1; l <= lmax; ++l) {
            for (int k = 1; k <= kmax; ++k) {
                for (int j = 1; j <= jmax; ++j) {
                    long long s = 1LL * j * j;
                    if (d_ >= 2) {
                        s += 1LL * k * k;
                    }
                    if (d_ >= 3) {
                        s += 1LL * l * l;
                    }
                    if (s <= bound) {
                        tuples.push_back({s, {j, d_ >= 2 ? k : 0, d_ >= 3 ? l : 0}});
                    }
                }
            }
        }
        if (tuples.size() < count) {
            throw NumericError("ExactSpectrum: enumeration truncated below requested count");
        }
        std::sort(tuples.begin(), tuples.end());
        std::vector<ExactMode> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back({static_cast<double>(tuples[i].first) * pi2, tuples[i].second});
        }
        return out;
    }

    std::vector<double> eigenvalues(std::size_t count) const
    {
        std::vector<double> out;
        out.reserve(count);
        for (const auto& m : modes(count)) {
            out.push_back(m.eigenvalue);
        }
        return out;
    }

    /// Unit-L2 1D eigenfunction sqrt(2) sin(j pi x) and its derivative.
    static double eigenfunction_1d(int j, double x) { return std::numbers::sqrt2 * std::sin(j * std::numbers::pi * x); }
    static double eigenfunction_1d_derivative(int j, double x)
    {
        return std::numbers::sqrt2 * j * std::numbers::pi * std::cos(j * std::numbers::pi * x);
    }

private:
    static constexpr double pi2 = std::numbers::pi * std::numbers::pi;

    static std::size_t ipow(std::size_t b, int e)
    {
        std::size_t r = 1;
        for (int i = 0; i < e; ++i) {
            r *= b;
        }
        return r;
    }

    int d_;
};

struct EigenvalueError {
    std::size_t rank;       // 1-based
    double normalized_rank; // rank / N
    double exact;
    double approx;
    double relative_error;
};

/// Relative eigenvalue errors |approx_j - exact_j| / exact_j, pairing both
/// sorted spectra by rank.
inline std::vector<EigenvalueError> eigenvalue_errors(const std::vector<double>& approx, const ExactSpectrum& exact)
{
    const std::size_t n = approx.size();
    const auto ex = exact.eigenvalues(n);
    std::vector<EigenvalueError> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({i + 1, static_cast<double>(i + 1) / static_cast<double>(n), ex[i], approx[i],
                       std::abs(approx[i] - ex[i]) / ex[i]});
    }
    return out;
}

inline std::vector<EigenvalueError> eigenvalue_errors(const Spectrum& spectrum, const ExactSpectrum& exact)
{
    return eigenvalue_errors(spectrum.eigenvalues, exact);
}

struct EigenfunctionError {
    int mode; // 1-based
    double h1_seminorm;
    double l2_norm;
};

/// H1-seminorm and L2 errors of 1D discrete eigenfunctions. The discrete
/// function is rescaled to unit L2 norm and its sign aligned with
/// sqrt(2) sin(j pi x) before differencing; integrals use (p+4)-point Gauss
/// per element.
inline std::vector<EigenfunctionError> eigenfunction_errors(const Spectrum& spectrum, const BSplineSpace& space,
                                                            const std::vector<int>& modes)
{
    if (!spectrum.has_vectors()) {
        throw DomainError("eigenfunction_errors: spectrum carries no eigenvectors");
    }
    const auto& kv = space.knot_vector();
    const int p = space.degree();
    const auto rule = gauss_legendre(p + 4);

    struct Sample {
        double weight;
        double x;
        BasisDerivatives basis;
    };
    std::vector<Sample> samples;
    for (int e = 0; e < space.n_elements(); ++e) {
        const auto er = map_to_element(rule, kv.element_begin(e), kv.element_end(e), e);
        for (std::size_t l = 0; l < er.nodes.size(); ++l) {
            samples.push_back({er.weights[l], er.nodes[l], eval_basis_derivatives(kv, er.nodes[l], 1, e)});
        }
    }

    std::vector<EigenfunctionError> out;
    for (int mode : modes) {
        if (mode < 1 || static_cast<std::size_t>(mode) > spectrum.eigenvectors.size()) {
            throw IndexError("eigenfunction_errors: mode out of range");
        }
        const auto& coeffs = spectrum.eigenvectors[static_cast<std::size_t>(mode - 1)];
        std::vector<double> val(samples.size());
        std::vector<double> der(samples.size());
        double norm2 = 0.0;
        double inner = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const auto& b = samples[s].basis;
            double v = 0.0;
            double dv = 0.0;
            for (int a = 0; a <= p; ++a) {
                const int i = space.interior_index(b.first + a);
                if (i >= 0) {
                    v += coeffs[static_cast<std::size_t>(i)] * b.ders[0][a];
                    dv += coeffs[static_cast<std::size_t>(i)] * b.ders[1][a];
                }
            }
            val[s] = v;
            der[s] = dv;
            norm2 += samples[s].weight * v * v;
            inner += samples[s].weight * v * ExactSpectrum::eigenfunction_1d(mode, samples[s].x);
        }
        if (!(norm2 > 0.0)) {
            throw NumericError("eigenfunction_errors: discrete eigenfunction has zero norm");
        }
        const double scale = (inner < 0.0 ? -1.0 : 1.0) / std::sqrt(norm2);
        double h1 = 0.0;
        double l2 = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double ev = ExactSpectrum::eigenfunction_1d(mode, samples[s].x) - scale * val[s];
            const double ed = ExactSpectrum::eigenfunction_1d_derivative(mode, samples[s].x) - scale * der[s];
            l2 += samples[s].weight * ev * ev;
            h1 += samples[s].weight * ed * ed;
        }
        out.push_back({mode, std::sqrt(h1), std::sqrt(l2)});
    }
    return out;
}

/// Fitted convergence rate; `rate` is empty when fewer than two points lie
/// above the saturation floor.
struct RateFit {
    std::optional<double> rate;
    std::size_t points_used = 0;

    bool saturated() const noexcept { return !rate.has_value(); }
};

/// Least-squares slope of log(error) against log(h) over the meshes whose
/// error exceeds `floor`.
inline RateFit convergence_rate(const std::vector<double>& h, const std::vector<double>& errors,
                                double floor = saturation_floor)
{
    if (h.size() != errors.size()) {
        throw DomainError("convergence_rate: mesh sizes and errors differ in length");
    }
    if (h.size() < 2) {
        throw DomainError("convergence_rate: at least two meshes required");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (errors[i] > floor && std::isfinite(errors[i])) {
            xs.push_back(std::log(h[i]));
            ys.push_back(std::log(errors[i]));
        }
    }
    RateFit fit;
    fit.points_used = xs.size();
    if (xs.size() < 2) {
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        throw DomainError("convergence_rate: mesh sizes must differ");
    }
    fit.rate = sxy / sxx;
    return fit;
}

/// Condition numbers of a baseline and a treated spectrum and the resulting
/// reduction ratio rho = gamma / gamma_tilde and percentage 100 (1 - 1/rho).
struct ConditionReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_min_tilde = 0.0;
    double lambda_max_tilde = 0.0;
    double gamma = 0.0;
    double gamma_tilde = 0.0;
    double rho = 0.0;
    double reduction_percent = 0.0;
};

inline ConditionReport condition_report(const std::vector<double>& baseline, const std::vector<double>& treated)
{
    if (baseline.empty() || treated.empty()) {
        throw InvalidSpectrumError("condition_report: empty spectrum");
    }
    const auto check = [](const std::vector<double>& s) {
        for (double v : s) {
            if (!(v > 0.0)) {
                throw InvalidSpectrumError("condition_report: nonpositive eigenvalue");
            }
        }
    };
    check(baseline);
    check(treated);
    ConditionReport r;
    r.lambda_min = *std::min_element(baseline.begin(), baseline.end());
    r.lambda_max = *std::max_element(baseline.begin(), baseline.end());
    r.lambda_min_tilde = *std::min_element(treated.begin(), treated.end());
    r.lambda_max_tilde = *std::max_element(treated.begin(), treated.end());
    r.gamma = r.lambda_max / r.lambda_min;
    r.gamma_tilde = r.lambda_max_tilde / r.lambda_min_tilde;
    r.rho = r.gamma / r.gamma_tilde;
    r.reduction_percent = 100.0 * (1.0 - 1.0 / r.rho);
    return r;
}

inline ConditionReport condition_report(const Spectrum& baseline, const Spectrum& treated)
{
    return condition_report(baseline.eigenvalues, treated.eigenvalues);
}

/// Largest relative eigenvalue error over the top 5% of ranks and over the
/// remaining 95%; an outlier layer is flagged when the former exceeds ten
/// times the latter.
struct OutlierMetric {
    double top_max = 0.0;
    double bulk_max = 0.0;
    bool flagged = false;
};

inline constexpr std::size_t outlier_top_percent = 5;
inline constexpr double outlier_ratio = 10.0;

inline OutlierMetric outlier_metric(const std::vector<double>& approx, const ExactSpectrum& exact)
{
    const std::size_t n = approx.size();
    if (n < 20) {
        throw DomainError("outlier_metric: at least 20 modes required");
    }
    const auto errs = eigenvalue_errors(approx, exact);
    const std::size_t top = (n * outlier_top_percent + 99) / 100;
    OutlierMetric m;
    for (std::size_t i = 0; i < n; ++i) {
        double& slot = i >= n - top ? m.top_max : m.bulk_max;
        slot = std::max(slot, errs[i].relative_error);
    }
    m.flagged = m.top_max > outlier_ratio * m.bulk_max;
    return m;
}

inline OutlierMetric outlier_metric(const Spectrum& spectrum, const ExactSpectrum& exact)
{
    return outlier_metric(spectrum.eigenvalues, exact);
}

} // namespace igaspec
