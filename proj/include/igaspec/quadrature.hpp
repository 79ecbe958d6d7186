#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace igaspec {

enum class QuadratureFamily { GaussLegendre, GaussLobatto };

/// Nodes (ascending) and weights on the reference interval [-1,1].
struct QuadratureRule {
    QuadratureFamily family = QuadratureFamily::GaussLegendre;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }

    double apply(const std::function<double(double)>& f) const
    {
        double s = 0.0;
        for (std::size_t l = 0; l < nodes.size(); ++l) {
            s += weights[l] * f(nodes[l]);
        }
        return s;
    }
};

/// eta * rule1 + (1 - eta) * rule2. Kept as two separate point sets; eta may
/// be negative.
struct BlendedRule {
    QuadratureRule rule1;
    QuadratureRule rule2;
    double eta = 1.0;

    double apply(const std::function<double(double)>& f) const
    {
        return eta * rule1.apply(f) + (1.0 - eta) * rule2.apply(f);
    }
};

using AnyRule = std::variant<QuadratureRule, BlendedRule>;

/// A reference rule paired with the factor its contribution is scaled by.
struct WeightedRule {
    double factor;
    const QuadratureRule* rule;
};

inline std::vector<WeightedRule> constituents(const AnyRule& rule)
{
    if (const auto* q = std::get_if<QuadratureRule>(&rule)) {
        return {{1.0, q}};
    }
    const auto& b = std::get<BlendedRule>(rule);
    return {{b.eta, &b.rule1}, {1.0 - b.eta, &b.rule2}};
}

namespace detail {

/// P_n(x) and P_{n-1}(x) by the three-term recurrence.
inline std::pair<double, double> legendre_pair(int n, double x)
{
    double p_prev = 1.0;
    double p = x;
    if (n == 0) {
        return {1.0, 0.0};
    }
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    return {p, p_prev};
}

constexpr int max_newton_iterations = 100;
constexpr double newton_tolerance = 1e-15;

/// Builds a symmetric rule from the nonnegative half of its nodes.
inline QuadratureRule mirror(QuadratureFamily family, int m, const std::vector<std::pair<double, double>>& half)
{
    QuadratureRule rule;
    rule.family = family;
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < half.size(); ++i) {
        // half[i] is the i-th node counted from the right end.
        const auto [x, w] = half[i];
        const std::size_t right = static_cast<std::size_t>(m) - 1 - i;
        rule.nodes[right] = x;
        rule.weights[right] = w;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
    }
    if (m % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
    }
    return rule;
}

} // namespace detail

/// m-point Gauss-Legendre rule: Newton iteration on the roots of P_m with
/// trigonometric initial guesses.
inline QuadratureRule gauss_legendre(int m)
{
    if (m < 1) {
        throw DomainError("gauss_legendre: m must be >= 1");
    }
    std::vector<std::pair<double, double>> half;
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        if (m % 2 == 1 && i == m / 2) {
            x = 0.0;
        }
        bool converged = false;
        double dp = 0.0;
        for (int it = 0; it < detail::max_newton_iterations; ++it) {
            const auto [p, p_prev] = detail::legendre_pair(m, x);
            dp = m * (x * p - p_prev) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= detail::newton_tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericError("gauss_legendre: Newton iteration did not converge");
        }
        const auto [p, p_prev] = detail::legendre_pair(m, x);
        dp = m * (x * p - p_prev) / (x * x - 1.0);
        half.emplace_back(std::abs(x), 2.0 / ((1.0 - x * x) * dp * dp));
    }
    return detail::mirror(QuadratureFamily::GaussLegendre, m, half);
}

/// m-point Gauss-Lobatto rule: endpoints plus the extrema of P_{m-1}.
inline QuadratureRule gauss_lobatto(int m)
{
    if (m < 2) {
        throw DomainError("gauss_lobatto: m must be >= 2");
    }
    const int n = m - 1;
    const double end_weight = 2.0 / (n * (n + 1.0));
    std::vector<std::pair<double, double>> half;
    half.emplace_back(1.0, end_weight);
    for (int i = 1; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * i / n);
        if (m % 2 == 1 && i == m / 2) {
            x = 0.0;
        }
        bool converged = false;
        for (int it = 0; it < detail::max_newton_iterations; ++it) {
            // Newton on (1 - x^2) P_n'(x) = n (P_{n-1} - x P_n).
            const auto [p, p_prev] = detail::legendre_pair(n, x);
            const double dx = (x * p - p_prev) / ((n + 1.0) * p);
            x -= dx;
            if (std::abs(dx) <= detail::newton_tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericError("gauss_lobatto: Newton iteration did not converge");
        }
        const double p = detail::legendre_pair(n, x).first;
        half.emplace_back(std::abs(x), end_weight / (p * p));
    }
    return detail::mirror(QuadratureFamily::GaussLobatto, m, half);
}

/// Optimal blending parameter for degree-p elements, p in 1..7.
inline double optimal_eta(int p)
{
    static constexpr std::array<double, 7> table{
        1.0 / 2.0, 1.0 / 3.0, -3.0 / 2.0, -79.0 / 5.0, -174.0, -91177.0 / 35.0, -105013.0 / 2.0};
    if (p < 1 || p > 7) {
        throw UnsupportedDegreeError("optimal_blending: degree must be in 1..7");
    }
    return table[static_cast<std::size_t>(p - 1)];
}

/// eta(p) G_{p+1} + (1 - eta(p)) L_{p+1}.
inline BlendedRule optimal_blending(int p)
{
    const double eta = optimal_eta(p);
    return BlendedRule{gauss_legendre(p + 1), gauss_lobatto(p + 1), eta};
}

/// A reference rule pushed forward to one mesh element.
struct ElementRule {
    int element = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

struct BlendedElementRule {
    ElementRule rule1;
    ElementRule rule2;
    double eta = 1.0;
};

/// Affine map [-1,1] -> [a,b]; weights scale by the Jacobian (b-a)/2.
inline ElementRule map_to_element(const QuadratureRule& rule, double a, double b, int element = 0)
{
    if (!(a < b)) {
        throw DomainError("map_to_element: degenerate element (a >= b)");
    }
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    ElementRule out;
    out.element = element;
    out.nodes.reserve(rule.size());
    out.weights.reserve(rule.size());
    for (std::size_t l = 0; l < rule.size(); ++l) {
        out.nodes.push_back(mid + half * rule.nodes[l]);
        out.weights.push_back(half * rule.weights[l]);
    }
    return out;
}

inline BlendedElementRule map_to_element(const BlendedRule& rule, double a, double b, int element = 0)
{
    return {map_to_element(rule.rule1, a, b, element), map_to_element(rule.rule2, a, b, element), rule.eta};
}

} // namespace igaspec
