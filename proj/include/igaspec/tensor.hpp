#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "assembly.hpp"
#include "eigsolve.hpp"
#include "errors.hpp"
#include "matrix.hpp"

namespace igaspec {

/// Multi-dimensional system on a tensor-product mesh, held as per-axis 1D
/// factor pairs. Flattening convention: the x index varies fastest, so the
/// global index of (ix, iy, iz) is ix + Nx * (iy + Ny * iz).
struct TensorSystem {
    std::vector<SystemMatrices> axes; // x, y, z

    int dimension() const noexcept { return static_cast<int>(axes.size()); }

    std::size_t total_size() const noexcept
    {
        std::size_t n = 1;
        for (const auto& a : axes) {
            n *= a.mass.size();
        }
        return n;
    }
};

inline constexpr std::size_t default_materialize_cap = 20000;

/// Standard Kronecker product: (A (x) B)(i*nb + k, j*nb + l) = A(i,j) B(k,l).
inline DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b)
{
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    DenseMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < nb; ++k) {
                for (std::size_t l = 0; l < nb; ++l) {
                    out(i * nb + k, j * nb + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

/// Global stiffness and mass of a 2D/3D tensor system:
///   K = sum_q (K_q on axis q, M on the other axes),  M = prod_q M_q,
/// with entries indexed by the x-fastest flattening.
inline std::pair<DenseMatrix, DenseMatrix> materialize(const TensorSystem& system,
                                                       std::size_t cap = default_materialize_cap)
{
    const int d = system.dimension();
    if (d < 2 || d > 3) {
        throw DomainError("materialize: dimension must be 2 or 3");
    }
    const std::size_t total = system.total_size();
    if (total > cap) {
        throw ResourceError("materialize: global size " + std::to_string(total) + " exceeds cap "
                            + std::to_string(cap) + "; use spectral_sum for the spectrum instead");
    }

    std::vector<std::size_t> dims;
    std::vector<std::size_t> bws;
    for (const auto& a : system.axes) {
        dims.push_back(a.mass.size());
        bws.push_back(a.mass.bandwidth());
    }
    const auto unflatten = [&](std::size_t g) {
        std::vector<std::size_t> idx(dims.size());
        for (std::size_t q = 0; q < dims.size(); ++q) {
            idx[q] = g % dims[q];
            g /= dims[q];
        }
        return idx;
    };

    DenseMatrix k(total);
    DenseMatrix m(total);
    for (std::size_t r = 0; r < total; ++r) {
        const auto ri = unflatten(r);
        for (std::size_t c = 0; c < total; ++c) {
            const auto ci = unflatten(c);
            bool in_band = true;
            for (std::size_t q = 0; q < dims.size(); ++q) {
                in_band = in_band && system.axes[q].mass.in_band(ri[q], ci[q]);
            }
            if (!in_band) {
                continue;
            }
            double mass = 1.0;
            double stiff = 0.0;
            for (std::size_t q = 0; q < dims.size(); ++q) {
                double term = system.axes[q].stiffness(ri[q], ci[q]);
                for (std::size_t o = 0; o < dims.size(); ++o) {
                    if (o != q) {
                        term *= system.axes[o].mass(ri[o], ci[o]);
                    }
                }
                stiff += term;
                mass *= system.axes[q].mass(ri[q], ci[q]);
            }
            k(r, c) = stiff;
            m(r, c) = mass;
        }
    }
    return {std::move(k), std::move(m)};
}

/// All sums of one eigenvalue per axis, sorted ascending.
inline std::vector<double> spectral_sum(const std::vector<std::vector<double>>& axis_eigenvalues)
{
    std::vector<double> sums{0.0};
    for (const auto& axis : axis_eigenvalues) {
        std::vector<double> next;
        next.reserve(sums.size() * axis.size());
        // Previous axes vary fastest, matching the x-fastest flattening.
        for (double v : axis) {
            for (double s : sums) {
                next.push_back(s + v);
            }
        }
        sums = std::move(next);
    }
    if (axis_eigenvalues.empty()) {
        sums.clear();
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

inline Spectrum spectral_sum(const std::vector<Spectrum>& axes)
{
    std::vector<std::vector<double>> values;
    values.reserve(axes.size());
    for (const auto& a : axes) {
        values.push_back(a.eigenvalues);
    }
    Spectrum out;
    out.eigenvalues = spectral_sum(values);
    if (!axes.empty()) {
        out.info = axes.front().info;
        out.info.dimension = static_cast<int>(axes.size());
        out.info.elements.clear();
        for (const auto& a : axes) {
            out.info.elements.insert(out.info.elements.end(), a.info.elements.begin(), a.info.elements.end());
        }
    }
    return out;
}

/// Eigenvector of the tensor system for the per-axis mode indices `modes`
/// (x first), formed as the outer product of the 1D eigenvectors.
inline std::vector<double> tensor_eigenvector(const std::vector<Spectrum>& axes, const std::vector<std::size_t>& modes)
{
    if (modes.size() != axes.size()) {
        throw DomainError("tensor_eigenvector: one mode index per axis required");
    }
    std::vector<double> out{1.0};
    for (std::size_t q = 0; q < axes.size(); ++q) {
        if (!axes[q].has_vectors() || modes[q] >= axes[q].size()) {
            throw IndexError("tensor_eigenvector: axis mode unavailable");
        }
        const auto& v = axes[q].eigenvectors[modes[q]];
        std::vector<double> next;
        next.reserve(out.size() * v.size());
        for (double vi : v) {
            for (double o : out) {
                next.push_back(o * vi);
            }
        }
        out = std::move(next);
    }
    return out;
}

} // namespace igaspec
