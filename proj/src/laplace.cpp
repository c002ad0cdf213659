// SPDX-License-Identifier: Apache-2.0
#include "mcfar/laplace.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mcfar/error.hpp"

namespace mcfar {

namespace {

constexpr int kMinStehfestOrder = 8;
constexpr int kMaxStehfestOrder = 18;
constexpr int kMinTalbotNodes = 8;
constexpr int kMaxTalbotNodes = 64;

long double factorial(int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<long double> stehfest_weights(int order) {
    const int half = order / 2;
    std::vector<long double> v(order);
    for (int k = 1; k <= order; ++k) {
        long double sum = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            sum += std::pow(static_cast<long double>(j), half) * factorial(2 * j) /
                   (factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) * factorial(2 * j - k));
        }
        v[k - 1] = ((k + half) % 2 == 0 ? 1.0L : -1.0L) * sum;
    }
    return v;
}

// Weights for every admissible order, built once in extended precision.
const std::vector<long double>& cached_stehfest_weights(int order) {
    static const auto table = [] {
        std::array<std::vector<long double>, kMaxStehfestOrder + 1> t;
        for (int n = kMinStehfestOrder; n <= kMaxStehfestOrder; n += 2) t[n] = stehfest_weights(n);
        return t;
    }();
    return table[order];
}

[[noreturn]] void report_overflow(const char* method, double t, Complex s, Complex value) {
    std::ostringstream os;
    os << method << " inversion at t = " << t << ": non-finite transform value " << value << " at node s = " << s;
    throw convergence_error(os.str());
}

double invert_stehfest(const LaplaceFn& f, double t, int order) {
    const auto& weights = cached_stehfest_weights(order);
    const long double step = std::numbers::ln2_v<long double> / t;
    long double acc = 0.0L;
    for (int k = 1; k <= order; ++k) {
        const Complex s(static_cast<double>(k * step), 0.0);
        const Complex value = f(s);
        if (!std::isfinite(value.real())) report_overflow("Gaver-Stehfest", t, s, value);
        acc += weights[k - 1] * static_cast<long double>(value.real());
    }
    return static_cast<double>(step * acc);
}

// Fixed Talbot contour s(theta) = r theta (cot theta + i), r = 2M / (5t).
double invert_talbot(const LaplaceFn& f, double t, int nodes) {
    const double r = 2.0 * nodes / (5.0 * t);
    const Complex f0 = f(Complex(r, 0.0));
    if (!std::isfinite(f0.real())) report_overflow("Talbot", t, Complex(r, 0.0), f0);
    double acc = 0.5 * f0.real() * std::exp(r * t);
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / nodes;
        const double cot = std::cos(theta) / std::sin(theta);
        const Complex s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const Complex value = f(s);
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) report_overflow("Talbot", t, s, value);
        acc += (std::exp(t * s) * value * Complex(1.0, sigma)).real();
    }
    return r / nodes * acc;
}

}  // namespace

std::string to_string(InversionMethod method) {
    return method == InversionMethod::talbot ? "talbot" : "gaver-stehfest";
}

InversionMethod parse_inversion_method(const std::string& name) {
    if (name == "talbot") return InversionMethod::talbot;
    if (name == "gaver-stehfest" || name == "stehfest") return InversionMethod::gaver_stehfest;
    throw parse_error("unknown inversion method '" + name + "' (expected talbot or gaver-stehfest)");
}

void validate(const InversionConfig& cfg) {
    if (cfg.method == InversionMethod::gaver_stehfest) {
        if (cfg.order % 2 != 0 || cfg.order < kMinStehfestOrder || cfg.order > kMaxStehfestOrder)
            throw invariant_error("Gaver-Stehfest order must be even and within [8, 18], got " +
                                  std::to_string(cfg.order));
    } else if (cfg.order < kMinTalbotNodes || cfg.order > kMaxTalbotNodes) {
        throw invariant_error("Talbot node count must be within [8, 64], got " + std::to_string(cfg.order));
    }
    if (!(cfg.abs_tol > 0.0)) throw invariant_error("inversion abs_tol must be positive");
}

Complex p_bar_laplace(Complex s, double x, double a, double diffusion_d) {
    if (s == Complex(0.0, 0.0)) throw invariant_error("p_bar_laplace has a pole at s = 0; use final_value");
    if (!(x >= a)) throw invariant_error("p_bar_laplace requires x >= a");
    return a / (s * x) * std::exp(-(x - a) * std::sqrt(s / diffusion_d));
}

double p_bar_laplace(double s, double x, double a, double diffusion_d) {
    if (s == 0.0) throw invariant_error("p_bar_laplace has a pole at s = 0; use final_value");
    if (!(x >= a)) throw invariant_error("p_bar_laplace requires x >= a");
    return a / (s * x) * std::exp(-(x - a) * std::sqrt(s / diffusion_d));
}

double invert(const LaplaceFn& f, double t, const InversionConfig& cfg) {
    if (!(t > 0.0) || !std::isfinite(t)) throw invariant_error("inversion time must be positive and finite");
    validate(cfg);
    return cfg.method == InversionMethod::talbot ? invert_talbot(f, t, cfg.order)
                                                 : invert_stehfest(f, t, cfg.order);
}

double final_value(const LaplaceFn& f, double abs_tol, double s0, int max_refinements) {
    // s f(s) is analytic in sqrt(s) for every transform built here, so each
    // halving of s shrinks the expansion variable by sqrt(2).
    constexpr int kMaxColumns = 6;
    const double rho = std::numbers::sqrt2;
    std::vector<double> prev;
    double last = 0.0;
    double s = s0;
    for (int k = 0; k <= max_refinements; ++k, s *= 0.5) {
        const Complex value = f(Complex(s, 0.0));
        if (!std::isfinite(value.real())) throw convergence_error("final_value: non-finite transform value");
        std::vector<double> row{s * value.real()};
        for (int m = 1; m <= std::min(k, kMaxColumns); ++m) {
            const double factor = std::pow(rho, m) - 1.0;
            row.push_back(row[m - 1] + (row[m - 1] - prev[m - 1]) / factor);
        }
        const double estimate = row.back();
        if (k >= 2 && std::abs(estimate - last) < abs_tol) return estimate;
        last = estimate;
        prev = std::move(row);
    }
    std::ostringstream os;
    os << "final_value did not converge after " << max_refinements << " refinements (last estimate " << last << ")";
    throw convergence_error(os.str());
}

}  // namespace mcfar
