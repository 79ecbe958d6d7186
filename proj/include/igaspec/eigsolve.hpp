#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace igaspec {

/// Provenance attached to a computed spectrum.
struct SpectrumInfo {
    int dimension = 1;
    int degree = 0;
    std::vector<int> elements; // per axis
    std::string quadrature;
    std::string penalty;
};

/// Ascending eigenvalues and, optionally, M-orthonormal eigenvectors
/// (eigenvectors[i] belongs to eigenvalues[i]).
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    SpectrumInfo info;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    bool has_vectors() const noexcept { return !eigenvectors.empty(); }
};

namespace detail {

/// Lower Cholesky factor of a symmetric positive definite matrix whose
/// nonzeros lie within `bandwidth` of the diagonal.
inline DenseMatrix cholesky_lower(const DenseMatrix& a, std::size_t bandwidth)
{
    const std::size_t n = a.size();
    DenseMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k0 = j > bandwidth ? j - bandwidth : 0;
        double d = a(j, j);
        for (std::size_t k = k0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw DefinitenessError("mass matrix is not positive definite", j);
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        const std::size_t i_end = std::min(n, j + bandwidth + 1);
        for (std::size_t i = j + 1; i < i_end; ++i) {
            const std::size_t ki = i > bandwidth ? i - bandwidth : 0;
            double s = a(i, j);
            for (std::size_t k = std::max(k0, ki); k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / ljj;
        }
    }
    return l;
}

/// Solves L x = b in place.
inline void forward_solve(const DenseMatrix& l, std::vector<double>& b)
{
    const std::size_t n = l.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= l(i, k) * b[k];
        }
        b[i] = s / l(i, i);
    }
}

/// Solves L^T x = b in place.
inline void backward_solve_transposed(const DenseMatrix& l, std::vector<double>& b)
{
    const std::size_t n = l.size();
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= l(k, ii) * b[k];
        }
        b[ii] = s / l(ii, ii);
    }
}

/// Householder reduction of the symmetric matrix held in v to tridiagonal
/// form. On return d is the diagonal, e[1..n-1] the subdiagonal and v the
/// accumulated orthogonal transformation.
inline void tridiagonalize(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e)
{
    const std::size_t n = v.size();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 0) {
        return;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) {
            scale += std::abs(d[k]);
        }
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] = 0.0;
            }
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) {
                e[j] -= hh * d[j];
            }
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) {
                    v(k, j) -= (f * e[k] + g * d[k]);
                }
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) {
                d[k] = v(k, i + 1) / h;
            }
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) {
                    g += v(k, i + 1) * v(k, j);
                }
                for (std::size_t k = 0; k <= i; ++k) {
                    v(k, j) -= g * d[k];
                }
            }
        }
        for (std::size_t k = 0; k <= i; ++k) {
            v(k, i + 1) = 0.0;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on the tridiagonal (d, e), accumulating the
/// rotations into v. Eigenvalues are left in d (unsorted).
inline void tridiagonal_ql(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e)
{
    const std::size_t n = d.size();
    if (n == 0) {
        return;
    }
    for (std::size_t i = 1; i < n; ++i) {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) {
                break;
            }
            ++m;
        }
        if (m == n) {
            m = n - 1;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60) {
                    throw NumericError("tridiagonal QL iteration did not converge");
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

inline std::size_t band_of(const DenseMatrix& a)
{
    const std::size_t n = a.size();
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + bw + 1; j < n; ++j) {
            if (a(i, j) != 0.0 || a(j, i) != 0.0) {
                bw = j - i;
            }
        }
    }
    return bw;
}

} // namespace detail

/// Full spectrum of K u = lambda M u for symmetric K and symmetric positive
/// definite M: M = L L^T, C = L^{-1} K L^{-T}, Householder tridiagonalization
/// and implicit QL on C, then u = L^{-T} v. Eigenvalues ascending; each
/// eigenvector is scaled so its largest-magnitude entry is positive.
inline Spectrum solve_generalized(const DenseMatrix& stiffness, const DenseMatrix& mass, bool want_vectors = true)
{
    const std::size_t n = stiffness.size();
    if (mass.size() != n) {
        throw DomainError("solve_generalized: stiffness and mass dimensions differ");
    }
    const DenseMatrix l = detail::cholesky_lower(mass, detail::band_of(mass));

    // c = L^{-1} K L^{-T}, built column by column.
    DenseMatrix y(n); // y = L^{-1} K (row i of y^T is column i of y)
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = stiffness(i, j);
        }
        detail::forward_solve(l, col);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, j) = col[i];
        }
    }
    DenseMatrix c(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = y(j, i);
        }
        detail::forward_solve(l, col);
        for (std::size_t i = 0; i < n; ++i) {
            c(i, j) = col[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = c(j, i) = avg;
        }
    }

    std::vector<double> d;
    std::vector<double> e;
    detail::tridiagonalize(c, d, e);
    detail::tridiagonal_ql(c, d, e);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    Spectrum out;
    out.eigenvalues.reserve(n);
    for (std::size_t k : order) {
        out.eigenvalues.push_back(d[k]);
    }
    if (want_vectors) {
        out.eigenvectors.reserve(n);
        for (std::size_t k : order) {
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = c(i, k);
            }
            detail::backward_solve_transposed(l, col);
            std::size_t imax = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (std::abs(col[i]) > std::abs(col[imax])) {
                    imax = i;
                }
            }
            if (n > 0 && col[imax] < 0.0) {
                for (double& v : col) {
                    v = -v;
                }
            }
            out.eigenvectors.push_back(col);
        }
    }
    return out;
}

inline Spectrum solve_generalized(const SymBandMatrix& stiffness, const SymBandMatrix& mass, bool want_vectors = true)
{
    return solve_generalized(stiffness.to_dense(), mass.to_dense(), want_vectors);
}

/// Extremal eigenvalues (smallest, largest) of the generalized problem.
template <class Matrix>
std::pair<double, double> smallest_and_largest(const Matrix& stiffness, const Matrix& mass)
{
    const auto s = solve_generalized(stiffness, mass, false);
    if (s.eigenvalues.empty()) {
        throw DomainError("smallest_and_largest: empty problem");
    }
    return {s.eigenvalues.front(), s.eigenvalues.back()};
}

/// ||K u - lambda M u|| / (||K|| ||u||), Frobenius norm for ||K||.
inline double relative_residual(const DenseMatrix& stiffness, const DenseMatrix& mass, double lambda,
                                const std::vector<double>& u)
{
    const std::size_t n = u.size();
    double r2 = 0.0;
    double u2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += (stiffness(i, j) - lambda * mass(i, j)) * u[j];
        }
        r2 += s * s;
        u2 += u[i] * u[i];
    }
    return std::sqrt(r2) / (stiffness.norm() * std::sqrt(u2));
}

} // namespace igaspec
