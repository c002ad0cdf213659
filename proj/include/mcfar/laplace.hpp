// SPDX-License-Identifier: Apache-2.0
//
// Laplace-domain primitives and numerical inversion.
#pragma once

#include <complex>
#include <functional>
#include <string>

namespace mcfar {

using Complex = std::complex<double>;

/// Laplace-domain scalar function. Must be analytic for Re(s) > 0 (and along
/// the Talbot contour, which stays clear of the negative real axis) and safe
/// to call concurrently from several threads.
using LaplaceFn = std::function<Complex(Complex)>;

enum class InversionMethod { talbot, gaver_stehfest };

std::string to_string(InversionMethod method);
InversionMethod parse_inversion_method(const std::string& name);

struct InversionConfig {
    InversionMethod method = InversionMethod::talbot;
    /// Node count for Talbot; number of terms (even, 8..18) for Gaver-Stehfest.
    int order = 32;
    /// Target accuracy. Used as the stopping threshold by final_value().
    double abs_tol = 1e-10;

    static InversionConfig gaver_stehfest(int order = 14) {
        return {InversionMethod::gaver_stehfest, order, 1e-10};
    }
};

/// Throws Error{invariant} for out-of-range settings.
void validate(const InversionConfig& cfg);

/// Transform of the lone-receiver hitting probability (a/x) erfc((x-a)/sqrt(4Dt)):
/// (a / (s x)) exp(-(x - a) sqrt(s / D)).
Complex p_bar_laplace(Complex s, double x, double a, double diffusion_d);
double p_bar_laplace(double s, double x, double a, double diffusion_d);

/// Inverse Laplace transform of `f` at time t > 0.
double invert(const LaplaceFn& f, double t, const InversionConfig& cfg = {});

/// lim_{s->0+} s f(s), by Richardson extrapolation in sqrt(s) over
/// s_k = s0 2^-k. Throws Error{convergence} after `max_refinements` halvings.
double final_value(const LaplaceFn& f, double abs_tol = 1e-10, double s0 = 1e-3, int max_refinements = 40);

}  // namespace mcfar
