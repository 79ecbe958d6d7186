#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "bspline.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "quadrature.hpp"

namespace igaspec {

/// Boundary penalty settings. alpha = floor((p-1)/2) penalty orders; order l
/// penalizes the 2l-th derivatives at both endpoints.
struct PenaltyConfig {
    bool enabled = false;
    int alpha = 0;
    std::vector<double> eta_a;
    std::vector<double> eta_b;

    static int alpha_for_degree(int p) { return p >= 1 ? (p - 1) / 2 : 0; }

    /// Default coefficients (all ones) for a degree-p space.
    static PenaltyConfig standard(int p, bool enabled = true)
    {
        const int alpha = alpha_for_degree(p);
        return {enabled, alpha, std::vector<double>(static_cast<std::size_t>(alpha), 1.0),
                std::vector<double>(static_cast<std::size_t>(alpha), 1.0)};
    }

    static PenaltyConfig disabled() { return {}; }
};

/// Stiffness / mass pair of the 1D generalized eigenproblem.
struct SystemMatrices {
    SymBandMatrix stiffness;
    SymBandMatrix mass;
};

namespace detail {

inline void check_assembly_inputs(const BSplineSpace& space, const AnyRule& rule, const PenaltyConfig& penalty)
{
    const int p = space.degree();
    for (const auto& c : constituents(rule)) {
        if (static_cast<int>(c.rule->size()) < p + 1) {
            throw InsufficientExactnessError("assemble_1d: each quadrature constituent needs at least p+1 = "
                                             + std::to_string(p + 1) + " points");
        }
    }
    if (penalty.enabled) {
        if (penalty.alpha != PenaltyConfig::alpha_for_degree(p)) {
            throw ConfigError("assemble_1d: penalty alpha " + std::to_string(penalty.alpha)
                              + " does not match floor((p-1)/2) for p = " + std::to_string(p));
        }
        if (penalty.eta_a.size() != static_cast<std::size_t>(penalty.alpha)
            || penalty.eta_b.size() != static_cast<std::size_t>(penalty.alpha)) {
            throw ConfigError("assemble_1d: penalty coefficient sequences must have alpha entries");
        }
    }
}

} // namespace detail

/// Adds scale * [w^{(2l)}(0) v^{(2l)}(0) + w^{(2l)}(1) v^{(2l)}(1)] for one
/// penalty order l to `target`.
inline void add_boundary_penalty(SymBandMatrix& target, const BSplineSpace& space, int order, double scale)
{
    const auto bd = boundary_derivatives(space, 2 * order);
    const std::size_t n = target.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n && target.in_band(i, j); ++j) {
            const double v = bd.at_zero[i] * bd.at_zero[j] + bd.at_one[i] * bd.at_one[j];
            if (v != 0.0) {
                target.add(i, j, scale * v);
            }
        }
    }
}

/// Stiffness and mass matrices of the Dirichlet spline space under `rule`,
/// optionally with the boundary penalty terms
///   K += eta_a[l] pi^2 h^{6l-3} (boundary 2l-th derivative products)
///   M += eta_b[l]      h^{6l-1} (same products).
/// Blended rules contribute eta times the first rule plus (1 - eta) times the
/// second, accumulated per element.
inline SystemMatrices assemble_1d(const BSplineSpace& space, const AnyRule& rule, const PenaltyConfig& penalty)
{
    detail::check_assembly_inputs(space, rule, penalty);
    const int p = space.degree();
    const auto& kv = space.knot_vector();
    const auto n = static_cast<std::size_t>(space.n_dof_interior());
    SystemMatrices out{SymBandMatrix(n, static_cast<std::size_t>(p)), SymBandMatrix(n, static_cast<std::size_t>(p))};

    const auto parts = constituents(rule);
    std::vector<double> kloc((p + 1) * (p + 1));
    std::vector<double> mloc((p + 1) * (p + 1));
    for (int e = 0; e < space.n_elements(); ++e) {
        std::fill(kloc.begin(), kloc.end(), 0.0);
        std::fill(mloc.begin(), mloc.end(), 0.0);
        for (const auto& part : parts) {
            const auto er = map_to_element(*part.rule, kv.element_begin(e), kv.element_end(e), e);
            for (std::size_t l = 0; l < er.nodes.size(); ++l) {
                const auto bd = eval_basis_derivatives(kv, std::clamp(er.nodes[l], 0.0, 1.0), 1, e);
                const double w = part.factor * er.weights[l];
                for (int a = 0; a <= p; ++a) {
                    for (int b = a; b <= p; ++b) {
                        kloc[a * (p + 1) + b] += w * bd.ders[1][a] * bd.ders[1][b];
                        mloc[a * (p + 1) + b] += w * bd.ders[0][a] * bd.ders[0][b];
                    }
                }
            }
        }
        // Element e supports global basis functions e .. e+p.
        for (int a = 0; a <= p; ++a) {
            const int ia = space.interior_index(e + a);
            if (ia < 0) {
                continue;
            }
            for (int b = a; b <= p; ++b) {
                const int ib = space.interior_index(e + b);
                if (ib < 0) {
                    continue;
                }
                out.stiffness.add(ia, ib, kloc[a * (p + 1) + b]);
                out.mass.add(ia, ib, mloc[a * (p + 1) + b]);
            }
        }
    }

    if (penalty.enabled) {
        const double h = space.h();
        const double pi2 = std::numbers::pi * std::numbers::pi;
        for (int l = 1; l <= penalty.alpha; ++l) {
            const auto idx = static_cast<std::size_t>(l - 1);
            add_boundary_penalty(out.stiffness, space, l, penalty.eta_a[idx] * pi2 * std::pow(h, 6 * l - 3));
            add_boundary_penalty(out.mass, space, l, penalty.eta_b[idx] * std::pow(h, 6 * l - 1));
        }
    }
    return out;
}

/// Standard IGA baseline: full Gauss rule G_{p+1}.
inline SystemMatrices assemble_1d_reference_gauss(const BSplineSpace& space, const PenaltyConfig& penalty)
{
    return assemble_1d(space, gauss_legendre(space.degree() + 1), penalty);
}

} // namespace igaspec
