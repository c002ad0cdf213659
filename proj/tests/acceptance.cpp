// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcfar/channel.hpp"
#include "mcfar/cli/commands.hpp"
#include "mcfar/error.hpp"
#include "mcfar/metrics.hpp"
#include "mcfar/simulator.hpp"

using namespace mcfar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    return out;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1));
    return out;
}

SystemGeometry three_far() { return make_geometry({{25, 0, 0}, {-25, 5, 0}, {20, -15, 10}}, 5.0, 100.0); }

Outcome inversion_oracle() {
    const double a = 5, x = 25, d = 100;
    struct Pair {
        LaplaceFn f;
        std::function<double(double)> exact;
    };
    const std::vector<Pair> pairs{
        {[](Complex s) { return 1.0 / s; }, [](double) { return 1.0; }},
        {[](Complex s) { return 1.0 / (s * s); }, [](double t) { return t; }},
        {[](Complex s) { return 1.0 / (s + 2.0); }, [](double t) { return std::exp(-2.0 * t); }},
        {[](Complex s) { return 1.0 / std::sqrt(s); }, [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); }},
        {[](Complex s) { return std::exp(-std::sqrt(s)) / s; },
         [](double t) { return std::erfc(1.0 / (2.0 * std::sqrt(t))); }},
        {[=](Complex s) { return p_bar_laplace(s, x, a, d); },
         [=](double t) { return a / x * std::erfc((x - a) / std::sqrt(4.0 * d * t)); }},
    };
    const auto start = std::chrono::steady_clock::now();
    double worst = 0;
    for (const auto& p : pairs)
        for (double t : log_grid(1e-3, 10, 100)) worst = std::max(worst, std::abs(invert(p.f, t) - p.exact(t)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst < 1e-6 && secs < 1.0, "max error " + num(worst) + ", " + num(secs) + " s"};
}

Outcome cross_model_identity() {
    const auto start = std::chrono::steady_clock::now();
    double worst_n = 0, worst_sym = 0;
    for (double a : {2.0, 4.0, 6.0}) {
        const auto g = uca_geometry(10, 20, a, 100);
        const auto rep = validate(g);
        for (double t : log_grid(0.01, 10, 50)) {
            const double three = hit_three(t, g, 0);
            worst_n = std::max(worst_n, std::abs(three - hit_n(t, g, 0)));
            const auto sym = hit_symmetric(t, rep.r[0], rep.proxy_r[0][1], a, 100);
            if (!sym.converged) return {false, "symmetric series did not converge"};
            worst_sym = std::max(worst_sym, std::abs(sym.value - three));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst_n < 1e-9 && worst_sym < 1e-4 && secs < 10.0,
            "|three - n| " + num(worst_n) + ", |symmetric - three| " + num(worst_sym) + ", " + num(secs) + " s"};
}

Outcome two_receiver_series() {
    const auto g = leading_receivers(three_far(), 2);
    double worst = 0;
    for (double t : log_grid(0.01, 1, 50)) {
        for (std::size_t k = 0; k < 2; ++k) {
            const auto series = hit_two(t, g, k);
            if (!series.converged) return {false, "series did not converge"};
            const double inverted = invert([&](Complex s) { return n_far_transforms(g, s)[k]; }, t);
            worst = std::max(worst, std::abs(series.value - inverted));
        }
    }
    return {worst < 1e-4, "max difference " + num(worst)};
}

Outcome three_far_simulation() {
    const auto start = std::chrono::steady_clock::now();
    const auto g = three_far();
    SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.trials = 200000;
    cfg.seed = 42;
    cfg.record_times = lin_grid(0.05, 1.0, 10);
    cfg.t_max = 1.0;
    const auto est = simulate(g, cfg);
    bool ok = true;
    double worst_ratio = 0, worst = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < cfg.record_times.size(); ++k) {
            const double err = std::abs(hit_three(cfg.record_times[k], g, i) - est.probability(i, k));
            const double bound = std::max(0.01, 3 * est.ci_halfwidth[i][k]);
            ok = ok && err < bound;
            worst = std::max(worst, err);
            worst_ratio = std::max(worst_ratio, err / bound);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {ok && secs < 300.0,
            "max error " + num(worst) + " (" + num(worst_ratio) + " of bound), " + num(secs) + " s"};
}

Outcome error_map() {
    GridFamily family;
    family.x = 10;
    family.ys = lin_grid(-20, 20, 5);
    family.zs = family.ys;
    family.fixed = {{10, 14.14, 14.14}, {10, 14.14, -14.14}};
    SimConfig sim;
    sim.dt = 1e-4;
    sim.trials = 10000;
    sim.seed = 7;
    const auto map = estimate_error_map(family, 1.0, sim);
    int ok = 0, warned = 0, excluded = 0;
    for (const auto& c : map.cells) {
        ok += c.status == CellStatus::ok;
        warned += c.status == CellStatus::warned;
        excluded += c.status == CellStatus::excluded;
    }
    const double worst = map.max_error_ok_cells();
    return {ok > 0 && worst < 0.02, "max error " + num(worst) + " over " + std::to_string(ok) + " cells (" +
                                        std::to_string(warned) + " warned, " + std::to_string(excluded) +
                                        " excluded)"};
}

Outcome eventual_fraction() {
    const double a = 5;
    const auto g = uca_geometry(10, 20, a, 100);
    // Re-derived from coordinates: r = |A1|, R = |B1 - A2| with B1 = A1 (1 - a / r).
    const Vec3 a1 = g.center(0), a2 = g.center(1);
    const double r = std::sqrt(a1.x * a1.x + a1.y * a1.y + a1.z * a1.z);
    const Vec3 b1 = (1 - a / r) * a1;
    const double big_r = std::sqrt((b1.x - a2.x) * (b1.x - a2.x) + (b1.y - a2.y) * (b1.y - a2.y) +
                                   (b1.z - a2.z) * (b1.z - a2.z));
    const double expected = (a / r) / (1 + 2 * a / big_r);
    double worst = 0;
    for (double h : hit_n_asymptotic(g)) worst = std::max(worst, std::abs(h - expected));
    const bool lengths = std::abs(r - 22.3607) < 1e-4 && std::abs(big_r - 30.93) < 5e-3;
    return {worst < 1e-10 && lengths, "r " + num(r) + ", R " + num(big_r) + ", max deviation " + num(worst)};
}

Outcome eventual_gain() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double largest = 0;
    for (int k = 0; k < 100; ++k) {
        const double a = 0.5 + 9.5 * unit(rng);
        const double big_r = 2 * a * (1 + 1e-6 + 1000 * unit(rng) * unit(rng));
        largest = std::max(largest, array_gain_asymptotic_symmetric(a, big_r).s_gain);
    }
    const double far = array_gain_asymptotic_symmetric(1.0, 1e4).s_gain;
    return {largest < 3.0 && std::abs(far - 3.0) < 1e-3,
            "largest of 100 " + std::to_string(largest) + ", at R = 1e4 a " + std::to_string(far)};
}

Outcome influence_vs_angle() {
    const double r = 20, a = 5;
    const double lo = 2 * std::asin(a / r) + 0.1;
    // Beyond pi - asin(a/r) the two competitors overlap; pi itself makes them coincide.
    const double hi = std::numbers::pi - std::asin(a / r) - 1e-3;
    double previous = 2;
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 20; ++k) {
        const double theta = lo + (hi - lo) * k / 20;
        const double q = malicious_influence(1.0, angular_layout(r, theta, a, 100), 0).q;
        if (q > previous) {
            ok = false;
            detail = "increase at theta " + num(theta);
        }
        previous = q;
        if (k == 1) detail = "q from " + num(q);
    }
    if (ok) detail += " to " + num(previous) + " over theta in (" + num(lo) + ", " + num(hi) + "]";
    return {ok, detail};
}

Outcome competitor_ordering() {
    const auto g = uca_geometry(10, 20, 4, 100);
    const NFarSystem one_competitor(leading_receivers(g, 2));
    const NFarSystem two_competitors(g);
    // h1(m=0) - h1(m=1) and h1(m=1) - h1(m=2), each without subtracting.
    const LaplaceFn gap01 = one_competitor.added_receiver_loss_transform(1, 0);
    const LaplaceFn gap12 = two_competitors.added_receiver_loss_transform(2, 0);
    // Direct differences of the curves must match the gaps; at small t the gaps
    // are far below the resolution of the curves themselves (~1e-21 at 7e-6).
    bool ok = true;
    double mismatch = 0;
    for (double t : lin_grid(0.1, 1.0, 10)) {
        const double h0 = hit_single(t, validate(g).r[0], 4, 100);
        const double h1 = hit_n(t, leading_receivers(g, 2), 0);
        const double h2 = hit_n(t, g, 0);
        const double d01 = invert(gap01, t), d12 = invert(gap12, t);
        ok = ok && d01 > 0 && d12 > 0;
        mismatch = std::max({mismatch, std::abs(h0 - h1 - d01), std::abs(h1 - h2 - d12)});
    }
    ok = ok && mismatch < 1e-12;
    const double g01_lo = invert(gap01, 0.1), g01_hi = invert(gap01, 1.0);
    const double g12_lo = invert(gap12, 0.1), g12_hi = invert(gap12, 1.0);
    ok = ok && g01_hi > g01_lo && g12_hi > g12_lo;
    return {ok, "gaps at t=0.1: " + num(g01_lo) + ", " + num(g12_lo) + "; at t=1: " + num(g01_hi) + ", " +
                    num(g12_hi) + "; direct-difference mismatch " + num(mismatch)};
}

Outcome dominance() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coord(-40.0, 40.0);
    std::uniform_real_distribution<double> radius(2.0, 5.0);
    std::uniform_real_distribution<double> diffusion(50.0, 200.0);
    std::uniform_int_distribution<int> count(2, 5);
    const std::vector<double> times{0.1, 0.5, 1.0, 5.0};
    int built = 0, attempts = 0, violations = 0;
    double worst = 0, largest_total = 0;
    while (built < 50 && attempts < 100000) {
        ++attempts;
        const double a = radius(rng);
        const int n = count(rng);
        std::vector<Vec3> centers;
        for (int i = 0; i < n; ++i) centers.push_back({coord(rng), coord(rng), coord(rng)});
        SystemGeometry g;
        try {
            g = make_geometry(centers, a, diffusion(rng));
        } catch (const Error&) {
            continue;
        }
        if (validate(g).warned()) continue;
        ++built;
        double total = 0;
        for (double h : hit_n_asymptotic(g)) total += h;
        largest_total = std::max(largest_total, total);
        if (!(total < 1.0)) ++violations;
        for (std::size_t drop = 1; drop < g.size(); ++drop) {
            SystemGeometry reduced = g;
            reduced.receivers.erase(reduced.receivers.begin() + static_cast<long>(drop));
            for (double t : times) {
                const double deficit = hit_n(t, g, 0) - hit_n(t, reduced, 0);
                worst = std::max(worst, deficit);
                if (deficit > 1e-6) ++violations;
            }
        }
    }
    return {built == 50 && violations == 0,
            std::to_string(built) + " geometries, " + std::to_string(violations) + " violations, largest decrease " +
                num(worst) + ", largest eventual total " + num(largest_total)};
}

Outcome determinism() {
    const std::string geometry = std::string(MCFAR_DATA_DIR) + "/three_far.json";
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "2", "8"}) {
        const char* argv[] = {"mcfar", "sim",   geometry.c_str(), "--trials", "20000", "--seed",
                              "42",    "--record", "0.1,0.25,0.5,1", "--workers", workers};
        std::ostringstream out, err;
        if (cli::run(static_cast<int>(std::size(argv)), argv, out, err) != 0) return {false, err.str()};
        outputs.push_back(out.str());
    }
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    return {same && !outputs[0].empty(), same ? "identical CSV under 1, 2 and 8 workers" : "CSV differs"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "inversion oracle", inversion_oracle},
        {2, "cross-model identity", cross_model_identity},
        {3, "two-receiver series vs 2x2 system", two_receiver_series},
        {4, "three-receiver model vs simulation", three_far_simulation},
        {5, "error map on non-warned cells", error_map},
        {6, "eventual fraction, symmetric layout", eventual_fraction},
        {7, "eventual array gain below 3", eventual_gain},
        {8, "influence nonincreasing in angle", influence_vs_angle},
        {9, "ordering with 0, 1, 2 competitors", competitor_ordering},
        {10, "dominance property", dominance},
        {11, "simulator determinism", determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
