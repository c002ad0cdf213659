// SPDX-License-Identifier: Apache-2.0
#include "mcfar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcfar/channel.hpp"
#include "mcfar/error.hpp"

namespace mcfar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_time(double t) {
    if (!(t > 0.0)) throw invariant_error("time must be positive (or +inf)");
}

void check_lengths(double a, double big_r) {
    if (!(a > 0.0)) throw invariant_error("radius must be positive");
    if (!(big_r > 0.0)) throw invariant_error("R must be positive");
}

}  // namespace

InfluenceResult malicious_influence(double t, const SystemGeometry& geom, std::size_t target,
                                    const InversionConfig& cfg) {
    check_time(t);
    const NFarSystem system(geom);
    if (target >= system.size()) throw invariant_error("target receiver out of range");
    const double r = system.report().r[target];
    const double a = geom.radius_a;

    InfluenceResult out{t, 0.0, target};
    if (t == kInf) {
        const double alone = a / r;
        out.q = (alone - system.asymptotic()[target]) / alone;
        return out;
    }
    const double alone = hit_single(t, r, a, geom.diffusion_d);
    if (!(alone > 0.0))
        throw invariant_error("malicious influence undefined: lone-receiver probability is zero at t = " +
                              std::to_string(t));
    // The numerator is inverted directly from the loss transform.
    const double lost = invert(system.loss_transform(target), t, cfg);
    out.q = std::clamp(lost / alone, 0.0, 1.0);
    return out;
}

InfluenceResult malicious_influence_asymptotic_symmetric(double a, double big_r) {
    check_lengths(a, big_r);
    return {kInf, 1.0 / (1.0 + big_r / (2.0 * a)), 0};
}

ArrayGainResult array_gain(double t, const SystemGeometry& geom, const InversionConfig& cfg) {
    check_time(t);
    const NFarSystem system(geom);
    const double denominator = geom.radius_a / system.report().r[0];

    double total = 0.0;
    if (t == kInf) {
        for (double h : system.asymptotic()) total += h;
    } else {
        for (std::size_t i = 0; i < system.size(); ++i) total += invert(system.transform(i), t, cfg);
    }
    return {t, total / denominator, system.size()};
}

ArrayGainResult array_gain_asymptotic_symmetric(double a, double big_r) {
    check_lengths(a, big_r);
    return {kInf, 3.0 / (1.0 + 2.0 * a / big_r), 3};
}

}  // namespace mcfar
