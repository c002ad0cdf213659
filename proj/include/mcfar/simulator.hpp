// SPDX-License-Identifier: Apache-2.0
//
// Particle-based Brownian-motion Monte Carlo. Each trial releases one molecule
// at the origin, adds an independent N(0, 2 D dt) displacement per coordinate
// every step, and is absorbed by the first receiver whose centre lies within
// distance a of a step endpoint. Absorption is only tested at step endpoints.
//
// Reproducibility: trial k draws from its own boost::random::mt19937_64 seeded
// with trial_seed(seed, k), through boost::random::normal_distribution<double>
// (ziggurat). Results are bit-identical for any worker count.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcfar/geometry.hpp"
#include "mcfar/laplace.hpp"

namespace mcfar {

struct SimConfig {
    double dt = 1e-4;
    double t_max = 1.0;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 42;
    std::vector<double> record_times;  ///< ascending, each <= t_max
    unsigned workers = 0;              ///< 0: one per hardware thread
    bool keep_trial_records = false;
};

/// Returns advisory warnings (coarse dt); throws Error{invariant} when invalid.
std::vector<std::string> validate(const SimConfig& cfg, const SystemGeometry& geom);

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

struct TrialRecord {
    std::uint64_t trial = 0;
    int receiver = -1;  ///< 1-based label, -1 when not absorbed by t_max
    double absorption_time = 0.0;
};

struct SimEstimate {
    std::vector<double> record_times;
    std::vector<int> receivers;                        ///< 1-based labels
    std::vector<std::vector<std::uint64_t>> hits;      ///< [receiver][time], cumulative
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> not_absorbed;           ///< per time: trials - sum_i hits
    std::uint64_t escaped = 0;                         ///< never absorbed by t_max
    std::vector<std::vector<double>> ci_halfwidth;     ///< 95 %, normal approximation
    std::vector<std::string> warnings;
    std::vector<TrialRecord> trial_records;            ///< filled when keep_trial_records

    double probability(std::size_t receiver, std::size_t time) const;
    /// Not yet absorbed at record time k but absorbed before t_max.
    std::uint64_t still_diffusing(std::size_t time) const { return not_absorbed[time] - escaped; }
};

SimEstimate simulate(const SystemGeometry& geom, const SimConfig& cfg);

/// CSV with columns trial,receiver_index,absorption_time (inf for escapes).
void write_trial_records(std::ostream& out, const SimEstimate& estimate);

// ---------------------------------------------------------------------------
// Absolute-error map over a y,z grid (one receiver moved in the plane x = const)

struct GridFamily {
    double x = 10.0;                 ///< plane of the moving receiver
    std::vector<double> ys;
    std::vector<double> zs;
    std::vector<Vec3> fixed;         ///< receivers 2..N, in order
    double radius_a = 5.0;
    double diffusion_d = 100.0;
};

enum class CellStatus { ok, warned, excluded };

std::string to_string(CellStatus status);

struct ErrorCell {
    double y = 0.0;
    double z = 0.0;
    CellStatus status = CellStatus::ok;
    std::string note;
    std::vector<double> analytical;  ///< per receiver, receiver 1 is the moving one
    std::vector<double> simulated;
    std::vector<double> ci_halfwidth;
    std::vector<double> abs_error;
};

struct ErrorMap {
    double t = 0.0;
    std::vector<ErrorCell> cells;  ///< row-major: ys outer, zs inner

    /// Largest |analytical - simulated| over every receiver of every ok cell.
    double max_error_ok_cells() const;
};

ErrorMap estimate_error_map(const GridFamily& family, double t, const SimConfig& sim,
                            const InversionConfig& inversion = {});

}  // namespace mcfar
