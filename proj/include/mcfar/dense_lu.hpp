// SPDX-License-Identifier: Apache-2.0
//
// LU factorisation with partial pivoting for the small dense systems that
// couple receivers (N is at most a few dozen).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mcfar {

template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    double norm1() const {
        double best = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
            best = std::max(best, col);
        }
        return best;
    }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

template <typename T>
class DenseLU {
public:
    /// Returns std::nullopt when a pivot is exactly zero or non-finite.
    static std::optional<DenseLU> factor(DenseMatrix<T> a) {
        const std::size_t n = a.size();
        DenseLU lu;
        lu.anorm_ = a.norm1();
        lu.perm_.resize(n);
        for (std::size_t i = 0; i < n; ++i) lu.perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(a(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                if (std::abs(a(i, k)) > best) {
                    best = std::abs(a(i, k));
                    p = i;
                }
            }
            if (!(best > 0.0) || !std::isfinite(best)) return std::nullopt;
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
                std::swap(lu.perm_[k], lu.perm_[p]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                a(i, k) /= a(k, k);
                for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
            }
        }
        lu.lu_ = std::move(a);
        return lu;
    }

    std::vector<T> solve(std::span<const T> b) const {
        const std::size_t n = lu_.size();
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    /// 1-norm condition number, from the explicit inverse (fine for small N).
    double condition() const {
        const std::size_t n = lu_.size();
        DenseMatrix<T> inv(n);
        std::vector<T> e(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), T{});
            e[j] = T{1};
            const auto col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        }
        return anorm_ * inv.norm1();
    }

    T determinant() const {
        T det{1};
        for (std::size_t i = 0; i < lu_.size(); ++i) det *= lu_(i, i);
        std::size_t swaps = 0;
        std::vector<bool> seen(perm_.size(), false);
        for (std::size_t i = 0; i < perm_.size(); ++i) {
            if (seen[i]) continue;
            std::size_t len = 0;
            for (std::size_t j = i; !seen[j]; j = perm_[j], ++len) seen[j] = true;
            swaps += len - 1;
        }
        return swaps % 2 == 0 ? det : -det;
    }

private:
    DenseMatrix<T> lu_;
    std::vector<std::size_t> perm_;
    double anorm_ = 0.0;
};

}  // namespace mcfar
