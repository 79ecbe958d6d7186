#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace igaspec {

/// Shortest-form-independent decimal with 17 significant digits.
inline std::string format_double(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Row-major dense square matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

    bool is_symmetric() const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                if ((*this)(i, j) != (*this)(j, i)) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Frobenius norm.
    double norm() const
    {
        double s = 0.0;
        for (double v : data_) {
            s += v * v;
        }
        return std::sqrt(s);
    }

    DenseMatrix& operator*=(double s)
    {
        for (double& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Symmetric band matrix storing the upper band: entry (i, i+k) for
/// 0 <= k <= bandwidth.
class SymBandMatrix {
public:
    SymBandMatrix() = default;
    SymBandMatrix(std::size_t n, std::size_t bandwidth)
        : n_(n), bw_(bandwidth), data_(n * (bandwidth + 1), 0.0)
    {
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t bandwidth() const noexcept { return bw_; }

    bool in_band(std::size_t i, std::size_t j) const noexcept
    {
        return (i <= j ? j - i : i - j) <= bw_;
    }

    double operator()(std::size_t i, std::size_t j) const
    {
        if (i > j) {
            std::swap(i, j);
        }
        if (j - i > bw_) {
            return 0.0;
        }
        return data_[i * (bw_ + 1) + (j - i)];
    }

    /// Adds v to the unordered pair {i, j}.
    void add(std::size_t i, std::size_t j, double v)
    {
        if (i > j) {
            std::swap(i, j);
        }
        if (j - i > bw_) {
            throw IndexError("SymBandMatrix::add: entry outside band");
        }
        data_[i * (bw_ + 1) + (j - i)] += v;
    }

    void set(std::size_t i, std::size_t j, double v)
    {
        if (i > j) {
            std::swap(i, j);
        }
        if (j - i > bw_) {
            throw IndexError("SymBandMatrix::set: entry outside band");
        }
        data_[i * (bw_ + 1) + (j - i)] = v;
    }

    DenseMatrix to_dense() const
    {
        DenseMatrix d(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < std::min(n_, i + bw_ + 1); ++j) {
                d(i, j) = d(j, i) = (*this)(i, j);
            }
        }
        return d;
    }

    /// Text dump: header line `n bandwidth`, then one line per row i holding
    /// A(i,i), ..., A(i, min(n-1, i+bandwidth)) with 17 significant digits.
    void write_text(std::ostream& os) const
    {
        os << n_ << ' ' << bw_ << '\n';
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t last = std::min(n_ - 1, i + bw_);
            for (std::size_t j = i; j <= last; ++j) {
                os << format_double((*this)(i, j)) << (j == last ? '\n' : ' ');
            }
        }
    }

    static SymBandMatrix read_text(std::istream& is)
    {
        std::size_t n = 0;
        std::size_t bw = 0;
        if (!(is >> n >> bw)) {
            throw ConfigError("SymBandMatrix::read_text: bad header");
        }
        SymBandMatrix m(n, bw);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j <= std::min(n - 1, i + bw); ++j) {
                double v = 0.0;
                if (!(is >> v)) {
                    throw ConfigError("SymBandMatrix::read_text: truncated band data");
                }
                m.set(i, j, v);
            }
        }
        return m;
    }

    friend bool operator==(const SymBandMatrix&, const SymBandMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::size_t bw_ = 0;
    std::vector<double> data_;
};

} // namespace igaspec
