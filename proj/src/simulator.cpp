// SPDX-License-Identifier: Apache-2.0
#include "mcfar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "mcfar/channel.hpp"
#include "mcfar/error.hpp"
#include "mcfar/parallel.hpp"

namespace mcfar {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Step index k covers time k * dt. The epsilon absorbs t / dt round-off.
std::uint64_t step_at_or_before(double t, double dt) {
    return static_cast<std::uint64_t>(std::floor(t / dt + 1e-9));
}

std::uint64_t step_count(double t_max, double dt) {
    return static_cast<std::uint64_t>(std::ceil(t_max / dt - 1e-9));
}

struct TrialOutcome {
    int receiver = -1;  // 0-based slot, -1 if never absorbed
    std::uint64_t step = 0;
};

class Walker {
public:
    Walker(const SystemGeometry& geom, double dt, std::uint64_t steps)
        : steps_(steps), sigma_(std::sqrt(2.0 * geom.diffusion_d * dt)), a2_(geom.radius_a * geom.radius_a) {
        for (const auto& r : geom.receivers) centers_.push_back(r.center);
    }

    TrialOutcome run(std::uint64_t seed) const {
        boost::random::mt19937_64 engine(seed);
        boost::random::normal_distribution<double> normal(0.0, sigma_);
        double x = 0.0, y = 0.0, z = 0.0;
        for (std::uint64_t step = 1; step <= steps_; ++step) {
            x += normal(engine);
            y += normal(engine);
            z += normal(engine);
            int hit = -1;
            double best = a2_;
            for (std::size_t i = 0; i < centers_.size(); ++i) {
                const double dx = x - centers_[i].x, dy = y - centers_[i].y, dz = z - centers_[i].z;
                const double d2 = dx * dx + dy * dy + dz * dz;
                // Strict < keeps the lower index on exact ties.
                if (d2 < best) {
                    best = d2;
                    hit = static_cast<int>(i);
                }
            }
            if (hit >= 0) return {hit, step};
        }
        return {};
    }

private:
    std::vector<Vec3> centers_;
    std::uint64_t steps_;
    double sigma_;
    double a2_;
};

}  // namespace

std::vector<std::string> validate(const SimConfig& cfg, const SystemGeometry& geom) {
    validate(geom);
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw invariant_error("simulation dt must be positive");
    if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw invariant_error("simulation t_max must be positive");
    if (cfg.trials < 1) throw invariant_error("simulation needs at least one trial");
    if (cfg.record_times.empty()) throw invariant_error("simulation needs at least one record time");
    for (std::size_t k = 0; k < cfg.record_times.size(); ++k) {
        const double t = cfg.record_times[k];
        if (!(t > 0.0)) throw invariant_error("record times must be positive");
        if (k > 0 && !(t > cfg.record_times[k - 1])) throw invariant_error("record times must be strictly ascending");
        if (t > cfg.t_max * (1.0 + 1e-12)) throw invariant_error("record times must not exceed t_max");
    }
    std::vector<std::string> warnings;
    const double step = std::sqrt(2.0 * geom.diffusion_d * cfg.dt);
    if (!(step < geom.radius_a / 2.0)) {
        std::ostringstream os;
        os << "step size sqrt(2 D dt) = " << step << " is not below a/2 = " << geom.radius_a / 2.0
           << "; endpoint absorption detection will be biased";
        warnings.push_back(os.str());
    }
    return warnings;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    // splitmix64 finaliser over (seed, trial).
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SimEstimate::probability(std::size_t receiver, std::size_t time) const {
    return static_cast<double>(hits.at(receiver).at(time)) / static_cast<double>(trials);
}

SimEstimate simulate(const SystemGeometry& geom, const SimConfig& cfg) {
    SimEstimate out;
    out.warnings = validate(cfg, geom);
    const std::size_t n = geom.size();
    const std::size_t n_times = cfg.record_times.size();
    const std::uint64_t steps = step_count(cfg.t_max, cfg.dt);
    std::vector<std::uint64_t> record_steps;
    for (double t : cfg.record_times) record_steps.push_back(std::min(step_at_or_before(t, cfg.dt), steps));

    const Walker walker(geom, cfg.dt, steps);
    const unsigned workers = resolve_workers(cfg.workers);
    // first_hits[w][i][k]: trials absorbed by receiver i first counted at record time k.
    std::vector<std::vector<std::vector<std::uint64_t>>> first_hits(
        workers, std::vector<std::vector<std::uint64_t>>(n, std::vector<std::uint64_t>(n_times + 1, 0)));
    std::vector<TrialOutcome> outcomes(cfg.keep_trial_records ? cfg.trials : 0);

    parallel_blocks(cfg.trials, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        auto& local = first_hits[w];
        for (std::size_t trial = begin; trial < end; ++trial) {
            const TrialOutcome o = walker.run(trial_seed(cfg.seed, trial));
            if (cfg.keep_trial_records) outcomes[trial] = o;
            if (o.receiver < 0) continue;
            const auto k = static_cast<std::size_t>(
                std::lower_bound(record_steps.begin(), record_steps.end(), o.step) - record_steps.begin());
            ++local[static_cast<std::size_t>(o.receiver)][k];
        }
    });

    out.record_times = cfg.record_times;
    out.trials = cfg.trials;
    out.hits.assign(n, std::vector<std::uint64_t>(n_times, 0));
    out.ci_halfwidth.assign(n, std::vector<double>(n_times, 0.0));
    std::uint64_t absorbed_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.receivers.push_back(geom.receivers[i].index);
        std::uint64_t running = 0;
        for (std::size_t k = 0; k <= n_times; ++k) {
            for (unsigned w = 0; w < workers; ++w) running += first_hits[w][i][k];
            if (k < n_times) out.hits[i][k] = running;
        }
        absorbed_total += running;
    }
    out.escaped = cfg.trials - absorbed_total;
    out.not_absorbed.assign(n_times, cfg.trials);
    for (std::size_t k = 0; k < n_times; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            out.not_absorbed[k] -= out.hits[i][k];
            const double p = out.probability(i, k);
            out.ci_halfwidth[i][k] = kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.trials));
        }
    }
    if (cfg.keep_trial_records) {
        out.trial_records.reserve(outcomes.size());
        for (std::size_t trial = 0; trial < outcomes.size(); ++trial) {
            const TrialOutcome& o = outcomes[trial];
            if (o.receiver < 0)
                out.trial_records.push_back({trial, -1, std::numeric_limits<double>::infinity()});
            else
                out.trial_records.push_back({trial, geom.receivers[static_cast<std::size_t>(o.receiver)].index,
                                             static_cast<double>(o.step) * cfg.dt});
        }
    }
    return out;
}

void write_trial_records(std::ostream& out, const SimEstimate& estimate) {
    out << "trial,receiver_index,absorption_time\n";
    char buf[64];
    for (const auto& rec : estimate.trial_records) {
        if (std::isinf(rec.absorption_time))
            out << rec.trial << ',' << rec.receiver << ",inf\n";
        else {
            std::snprintf(buf, sizeof buf, "%.12g", rec.absorption_time);
            out << rec.trial << ',' << rec.receiver << ',' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

std::string to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::warned: return "warned";
        case CellStatus::excluded: return "excluded";
    }
    return "unknown";
}

double ErrorMap::max_error_ok_cells() const {
    double worst = 0.0;
    for (const auto& cell : cells)
        if (cell.status == CellStatus::ok)
            for (double e : cell.abs_error) worst = std::max(worst, e);
    return worst;
}

ErrorMap estimate_error_map(const GridFamily& family, double t, const SimConfig& sim, const InversionConfig& inversion) {
    if (family.ys.empty() || family.zs.empty()) throw invariant_error("error map needs a non-empty y,z grid");
    ErrorMap map;
    map.t = t;
    SimConfig cfg = sim;
    cfg.record_times = {t};
    cfg.t_max = t;
    cfg.keep_trial_records = false;

    for (double y : family.ys) {
        for (double z : family.zs) {
            ErrorCell cell;
            cell.y = y;
            cell.z = z;
            std::vector<Vec3> centers{{family.x, y, z}};
            centers.insert(centers.end(), family.fixed.begin(), family.fixed.end());
            SystemGeometry geom;
            GeometryReport report;
            try {
                geom = make_geometry(centers, family.radius_a, family.diffusion_d);
                report = validate(geom);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::invariant) throw;
                cell.status = CellStatus::excluded;
                cell.note = e.what();
                map.cells.push_back(std::move(cell));
                continue;
            }
            if (report.warned()) {
                cell.status = CellStatus::warned;
                cell.note = report.warnings.front();
            }
            const NFarSystem system(geom);
            for (std::size_t i = 0; i < geom.size(); ++i) {
                const LaplaceFn f = geom.size() == 3 ? three_far_transform(geom, i) : system.transform(i);
                cell.analytical.push_back(invert(f, t, inversion));
            }
            const SimEstimate est = simulate(geom, cfg);
            for (std::size_t i = 0; i < geom.size(); ++i) {
                cell.simulated.push_back(est.probability(i, 0));
                cell.ci_halfwidth.push_back(est.ci_halfwidth[i][0]);
                cell.abs_error.push_back(std::abs(cell.analytical[i] - cell.simulated[i]));
            }
            map.cells.push_back(std::move(cell));
        }
    }
    return map;
}

}  // namespace mcfar
