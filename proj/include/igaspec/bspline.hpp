#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace igaspec {

/// Open uniform knot vector on [0,1]: end knots repeated p+1 times, simple
/// uniformly spaced interior knots (maximal C^{p-1} continuity).
class KnotVector {
public:
    KnotVector(int degree, int n_elements) : degree_(degree), n_elements_(n_elements)
    {
        if (degree < 1) {
            throw DomainError("KnotVector: degree must be >= 1");
        }
        if (n_elements < 1) {
            throw DomainError("KnotVector: n_elements must be >= 1");
        }
        knots_.reserve(static_cast<std::size_t>(n_elements + 2 * degree + 1));
        for (int i = 0; i < degree; ++i) {
            knots_.push_back(0.0);
        }
        for (int e = 0; e <= n_elements; ++e) {
            knots_.push_back(static_cast<double>(e) / n_elements);
        }
        knots_.back() = 1.0;
        for (int i = 0; i < degree; ++i) {
            knots_.push_back(1.0);
        }
    }

    int degree() const noexcept { return degree_; }
    int n_elements() const noexcept { return n_elements_; }
    double h() const noexcept { return 1.0 / n_elements_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    double operator[](std::size_t i) const { return knots_[i]; }

    /// Number of degree-p basis functions, n_elements + p.
    int n_basis() const noexcept { return n_elements_ + degree_; }

    /// Left end of element e.
    double element_begin(int e) const noexcept { return static_cast<double>(e) / n_elements_; }
    double element_end(int e) const noexcept { return e + 1 == n_elements_ ? 1.0 : static_cast<double>(e + 1) / n_elements_; }

    /// Element containing x; the last element is closed on the right.
    int element_of(double x) const noexcept
    {
        const int e = static_cast<int>(x * n_elements_);
        return std::clamp(e, 0, n_elements_ - 1);
    }

private:
    int degree_;
    int n_elements_;
    std::vector<double> knots_;
};

/// One nonzero basis function at an evaluation point.
struct BasisValue {
    int index; // global basis index in [0, n_basis)
    double value;
};

/// All nonzero basis functions at a point together with derivatives up to
/// a requested order: ders[k][i] is the k-th derivative of basis first + i.
struct BasisDerivatives {
    int first = 0;
    std::vector<std::vector<double>> ders;
};

/// Spline space with homogeneous Dirichlet conditions: the first and last
/// basis functions (the only ones nonzero on the boundary) are removed.
class BSplineSpace {
public:
    explicit BSplineSpace(KnotVector knots) : knots_(std::move(knots)) {}
    BSplineSpace(int degree, int n_elements) : knots_(degree, n_elements) {}

    const KnotVector& knot_vector() const noexcept { return knots_; }
    int degree() const noexcept { return knots_.degree(); }
    int n_elements() const noexcept { return knots_.n_elements(); }
    double h() const noexcept { return knots_.h(); }
    int n_basis() const noexcept { return knots_.n_basis(); }
    int n_dof_interior() const noexcept { return knots_.n_basis() - 2; }

    /// Interior index of a global basis index, or -1 for the two removed functions.
    int interior_index(int global) const noexcept
    {
        return (global <= 0 || global >= n_basis() - 1) ? -1 : global - 1;
    }

private:
    KnotVector knots_;
};

/// Derivatives 0..max_order of the p+1 basis functions supported on the
/// element containing x (Cox-de Boor triangle plus the standard derivative
/// recursion on the divided differences). Passing `element` evaluates the
/// polynomial pieces of that element, which matters for points on element
/// boundaries.
inline BasisDerivatives eval_basis_derivatives(const KnotVector& kv, double x, int max_order, int element = -1)
{
    const int p = kv.degree();
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("eval_basis: x must lie in [0,1]");
    }
    if (max_order < 0 || max_order > p) {
        throw UnsupportedOrderError("eval_basis: derivative order must be in [0, p]");
    }
    if (element >= kv.n_elements()) {
        throw IndexError("eval_basis: element index out of range");
    }
    const int span = (element >= 0 ? element : kv.element_of(x)) + p;
    const auto& U = kv.knots();

    // ndu holds basis values (upper triangle) and knot differences (lower).
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisDerivatives out;
    out.first = span - p;
    out.ders.assign(max_order + 1, std::vector<double>(p + 1, 0.0));
    for (int j = 0; j <= p; ++j) {
        out.ders[0][j] = ndu[j][p];
    }

    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= max_order; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }

    double factor = p;
    for (int k = 1; k <= max_order; ++k) {
        for (double& v : out.ders[k]) {
            v *= factor;
        }
        factor *= (p - k);
    }
    return out;
}

/// r-th derivative of every basis function whose support contains x.
inline std::vector<BasisValue> eval_basis(const BSplineSpace& space, double x, int derivative_order)
{
    const auto bd = eval_basis_derivatives(space.knot_vector(), x, derivative_order);
    std::vector<BasisValue> out;
    out.reserve(bd.ders[derivative_order].size());
    for (std::size_t i = 0; i < bd.ders[derivative_order].size(); ++i) {
        out.push_back({bd.first + static_cast<int>(i), bd.ders[derivative_order][i]});
    }
    return out;
}

/// r-th derivatives of the interior basis functions at x = 0 and x = 1,
/// indexed by interior index.
struct BoundaryDerivatives {
    std::vector<double> at_zero;
    std::vector<double> at_one;
};

inline BoundaryDerivatives boundary_derivatives(const BSplineSpace& space, int derivative_order)
{
    if (derivative_order < 0 || derivative_order > space.degree()) {
        throw UnsupportedOrderError("boundary_derivatives: derivative order must be in [0, p]");
    }
    const auto n = static_cast<std::size_t>(space.n_dof_interior());
    BoundaryDerivatives out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const auto scatter = [&](double x, std::vector<double>& dst) {
        for (const auto& bv : eval_basis(space, x, derivative_order)) {
            const int i = space.interior_index(bv.index);
            if (i >= 0) {
                dst[static_cast<std::size_t>(i)] = bv.value;
            }
        }
    };
    scatter(0.0, out.at_zero);
    scatter(1.0, out.at_one);
    return out;
}

/// Value (or derivative) of the spline with interior coefficients `coeffs` at x.
inline double eval_spline(const BSplineSpace& space, const std::vector<double>& coeffs, double x, int derivative_order = 0)
{
    double s = 0.0;
    for (const auto& bv : eval_basis(space, x, derivative_order)) {
        const int i = space.interior_index(bv.index);
        if (i >= 0) {
            s += coeffs[static_cast<std::size_t>(i)] * bv.value;
        }
    }
    return s;
}

} // namespace igaspec
