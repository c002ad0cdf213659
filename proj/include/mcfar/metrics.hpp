// SPDX-License-Identifier: Apache-2.0
//
// Security (malicious-receiver influence) and cooperation (array gain)
// figures of merit. Pass t = +infinity for the eventual (t -> inf) values;
// those are taken from the s -> 0 limit of the coupled system, not from a
// large-t inversion.
#pragma once

#include <cstddef>

#include "mcfar/geometry.hpp"
#include "mcfar/laplace.hpp"

namespace mcfar {

struct InfluenceResult {
    double t = 0.0;
    double q = 0.0;  ///< relative loss of the target's hitting probability
    std::size_t target = 0;
};

struct ArrayGainResult {
    double t = 0.0;
    double s_gain = 0.0;
    std::size_t n_receivers = 0;
};

/// q = (p_single(t, r_target) - h_target(t)) / p_single(t, r_target).
/// Throws Error{invariant} when p_single underflows to zero.
InfluenceResult malicious_influence(double t, const SystemGeometry& geom, std::size_t target,
                                    const InversionConfig& cfg = {});

/// 1 / (1 + R / 2a).
InfluenceResult malicious_influence_asymptotic_symmetric(double a, double big_r);

/// sum_i h_i(t) / (a / r_1), with r_1 the first receiver's distance.
ArrayGainResult array_gain(double t, const SystemGeometry& geom, const InversionConfig& cfg = {});

/// 3 / (1 + 2a / R).
ArrayGainResult array_gain_asymptotic_symmetric(double a, double big_r);

}  // namespace mcfar
