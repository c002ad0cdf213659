// SPDX-License-Identifier: Apache-2.0
#include "mcfar/cli/sweep.hpp"

#include <cmath>
#include <ostream>

#include "mcfar/error.hpp"
#include "mcfar/metrics.hpp"
#include "mcfar/parallel.hpp"

namespace mcfar::cli {

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::time: return "time";
        case SweepAxis::diffusion: return "diffusion";
        case SweepAxis::radius: return "radius";
        case SweepAxis::angle: return "angle";
        case SweepAxis::grid_yz: return "grid-yz";
        case SweepAxis::malicious_count: return "malicious-count";
    }
    return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
    for (auto axis : {SweepAxis::time, SweepAxis::diffusion, SweepAxis::radius, SweepAxis::angle, SweepAxis::grid_yz,
                      SweepAxis::malicious_count})
        if (to_string(axis) == name) return axis;
    throw parse_error("unknown sweep axis '" + name + "'");
}

namespace {

std::string layout_of(const json& geometry) {
    if (geometry.contains("layout")) {
        if (!geometry["layout"].is_string()) throw parse_error("geometry.layout must be a string");
        return geometry["layout"].get<std::string>();
    }
    return "explicit";
}

double required(const json& doc, const std::string& key) {
    const auto v = optional_number(doc, key);
    if (!v) throw parse_error("geometry layout needs numeric field '" + key + "'");
    return *v;
}

struct CellParams {
    std::optional<double> a;
    std::optional<double> d;
    std::optional<double> theta;
    std::optional<Vec3> moving;
};

// Builds the geometry for one sweep cell; overrides replace layout values.
SystemGeometry build_geometry(const json& g, const CellParams& p) {
    const std::string layout = layout_of(g);
    if (layout == "explicit") {
        json doc = g;
        if (p.a) doc["radius_a"] = *p.a;
        if (p.d) doc["diffusion_d"] = *p.d;
        return geometry_from_json(doc);
    }
    const double a = p.a.value_or(required(g, "a"));
    const double d = p.d.value_or(required(g, "D"));
    if (layout == "uca") return uca_geometry(required(g, "w"), required(g, "d"), a, d);
    if (layout == "angle") {
        if (!p.theta) throw invariant_error("the angle layout needs an angle");
        return angular_layout(required(g, "r"), *p.theta, a, d);
    }
    if (layout == "grid-yz") {
        if (!p.moving) throw invariant_error("the grid-yz layout is only usable with the grid-yz axis");
        std::vector<Vec3> centers{*p.moving};
        json fixed = g.contains("fixed") ? g["fixed"] : json::array();
        json tmp = {{"receivers", fixed}, {"radius_a", a}, {"diffusion_d", d}};
        for (const auto& c : geometry_from_json(tmp).receivers) centers.push_back(c.center);
        return make_geometry(centers, a, d);
    }
    throw parse_error("unknown geometry layout '" + layout + "'");
}

std::string series_label(const std::optional<std::string>& parameter, std::optional<double> value) {
    if (!parameter || !value) return "";
    return (*parameter == "radius_a" ? "a=" : "D=") + fmt(*value);
}

std::string join_label(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + ";" + b;
}

Model resolve_model(const std::string& name, const SystemGeometry& geom) {
    if (name == "auto") return select_model(geom);
    const Model m = parse_model(name);
    check_model_compatible(m, geom);
    return m;
}

struct UnitResult {
    std::vector<SweepRow> rows;
    std::string log;
};

}  // namespace

SweepSpec sweep_from_json(const json& doc, const std::filesystem::path& base_dir, const NumericOptions& flags) {
    if (!doc.is_object()) throw parse_error("sweep spec must be a JSON object");
    SweepSpec spec;
    const auto axis = optional_string(doc, "axis");
    if (!axis) throw parse_error("sweep spec needs an 'axis'");
    spec.axis = parse_axis(*axis);
    if (!doc.contains("range")) throw parse_error("sweep spec needs a 'range'");
    spec.range = grid_from_json(doc["range"]);
    spec.range.values();  // count >= 2, start < stop

    if (!doc.contains("geometry")) throw parse_error("sweep spec needs a 'geometry'");
    spec.geometry = doc["geometry"].is_string() ? load_json_file(base_dir / doc["geometry"].get<std::string>())
                                                : doc["geometry"];
    if (!spec.geometry.is_object()) throw parse_error("sweep geometry must be an object or a file path");

    if (doc.contains("models")) {
        if (!doc["models"].is_array() || doc["models"].empty())
            throw parse_error("'models' must be a non-empty array of model names");
        spec.models.clear();
        for (const auto& m : doc["models"]) {
            if (!m.is_string()) throw parse_error("model names must be strings");
            const std::string name = m.get<std::string>();
            if (name != "auto") {
                if (parse_model(name) == Model::simulation)
                    throw parse_error("request simulation through the 'sim' block, not 'models'");
            }
            spec.models.push_back(name);
        }
    }
    if (const auto t = optional_number(doc, "t")) spec.t = *t;
    if (!(spec.t > 0.0)) throw invariant_error("sweep evaluation time t must be positive");

    if (doc.contains("series")) {
        const json& s = doc["series"];
        const auto parameter = optional_string(s, "parameter");
        if (!parameter || (*parameter != "radius_a" && *parameter != "diffusion_d"))
            throw parse_error("series.parameter must be 'radius_a' or 'diffusion_d'");
        if (!s.contains("values") || !s["values"].is_array() || s["values"].empty())
            throw parse_error("series.values must be a non-empty array");
        spec.series_parameter = parameter;
        for (const auto& v : s["values"]) {
            if (!v.is_number()) throw parse_error("series values must be numbers");
            spec.series_values.push_back(v.get<double>());
        }
        if ((*parameter == "radius_a" && spec.axis == SweepAxis::radius) ||
            (*parameter == "diffusion_d" && spec.axis == SweepAxis::diffusion))
            throw invariant_error("series parameter duplicates the sweep axis");
    }

    spec.channel = resolve_channel_options(flags, doc);
    const json sim_doc = doc.contains("sim") ? doc["sim"] : json::object();
    if (flags.workers) spec.workers = *flags.workers;
    else if (const auto w = optional_number(sim_doc, "workers")) spec.workers = static_cast<unsigned>(*w);
    if (const auto tol = flags.tol ? flags.tol : optional_number(doc, "tol")) spec.tol = *tol;
    if (doc.contains("sim")) spec.sim = resolve_sim_config(flags, sim_doc, {spec.t});

    const std::string layout = layout_of(spec.geometry);
    if (spec.axis == SweepAxis::angle && layout != "angle")
        throw invariant_error("angle sweeps require the 'angle' geometry layout");
    if (spec.axis == SweepAxis::grid_yz) {
        if (layout != "grid-yz") throw invariant_error("grid-yz sweeps require the 'grid-yz' geometry layout");
        if (!spec.sim) throw invariant_error("grid-yz sweeps compare against simulation and need a 'sim' block");
    }
    if (spec.axis != SweepAxis::grid_yz && layout == "grid-yz")
        throw invariant_error("the grid-yz layout is only usable with the grid-yz axis");
    if (spec.axis != SweepAxis::angle && layout == "angle")
        throw invariant_error("the angle layout is only usable with the angle axis");
    return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream& log) {
    if (spec.axis == SweepAxis::grid_yz) throw invariant_error("use run_error_map for grid-yz sweeps");
    const std::vector<double> axis_values = spec.range.values();
    std::vector<std::optional<double>> series;
    if (spec.series_parameter)
        for (double v : spec.series_values) series.emplace_back(v);
    else
        series.emplace_back(std::nullopt);

    const bool over_time = spec.axis == SweepAxis::time || spec.axis == SweepAxis::malicious_count;

    // One unit per series value (time-like axes) or per (series, axis value).
    struct Unit {
        std::optional<double> series_value;
        std::optional<double> axis_value;
    };
    std::vector<Unit> units;
    for (const auto& s : series) {
        if (over_time)
            units.push_back({s, std::nullopt});
        else
            for (double v : axis_values) units.push_back({s, v});
    }

    const auto evaluate = [&](std::size_t u) {
        const Unit& unit = units[u];
        UnitResult out;
        CellParams params;
        if (spec.series_parameter && unit.series_value) {
            if (*spec.series_parameter == "radius_a") params.a = unit.series_value;
            else params.d = unit.series_value;
        }
        if (spec.axis == SweepAxis::diffusion) params.d = unit.axis_value;
        if (spec.axis == SweepAxis::radius) params.a = unit.axis_value;
        if (spec.axis == SweepAxis::angle) params.theta = unit.axis_value;
        const std::string base_label = series_label(spec.series_parameter, unit.series_value);

        SystemGeometry geom;
        try {
            geom = build_geometry(spec.geometry, params);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::invariant) throw;
            out.log = "excluded " + to_string(spec.axis) + " cell" +
                      (unit.axis_value ? " at " + fmt(*unit.axis_value) : std::string{}) +
                      (base_label.empty() ? "" : " (" + base_label + ")") + ": " + e.what() + "\n";
            return out;
        }

        const std::vector<double> times = over_time ? axis_values : std::vector<double>{spec.t};
        const auto emit = [&](double axis_value, const std::string& label, int receiver, const std::string& model,
                              const std::string& metric, double value) {
            out.rows.push_back({axis_value, label, receiver, model, metric, value});
        };
        const auto axis_value_at = [&](std::size_t k) { return over_time ? times[k] : *unit.axis_value; };

        // Geometries evaluated in this unit: the full one, or receiver 1 plus m competitors.
        std::vector<std::pair<std::string, SystemGeometry>> variants;
        if (spec.axis == SweepAxis::malicious_count) {
            for (std::size_t m = 0; m < geom.size(); ++m)
                variants.emplace_back(join_label(base_label, "m=" + std::to_string(m)),
                                      leading_receivers(geom, m + 1));
        } else {
            variants.emplace_back(base_label, geom);
        }

        for (const auto& [label, g] : variants) {
            const std::optional<std::size_t> only =
                spec.axis == SweepAxis::malicious_count ? std::optional<std::size_t>{0} : std::nullopt;
            for (const auto& name : spec.models) {
                const Model model = resolve_model(name, g);
                const HittingCurve curve = hitting_curve(g, times, model, spec.channel, only);
                for (std::size_t k = 0; k < times.size(); ++k)
                    for (std::size_t i = 0; i < curve.receivers.size(); ++i)
                        emit(axis_value_at(k), label, curve.receivers[i], to_string(model), "prob",
                             curve.probs[i][k]);
            }
            if (spec.axis == SweepAxis::angle) {
                const double q = malicious_influence(spec.t, g, 0, spec.channel.inversion).q;
                emit(axis_value_at(0), label, g.receivers[0].index, to_string(Model::n_general), "q", q);
            }
            if (spec.sim) {
                SimConfig cfg = *spec.sim;
                cfg.record_times = times;
                cfg.t_max = times.back();
                const SimEstimate est = simulate(g, cfg);
                for (std::size_t k = 0; k < times.size(); ++k) {
                    for (std::size_t i = 0; i < est.receivers.size(); ++i) {
                        if (only && i != *only) continue;
                        emit(axis_value_at(k), label, est.receivers[i], "simulation", "prob_hat",
                             est.probability(i, k));
                        emit(axis_value_at(k), label, est.receivers[i], "simulation", "ci_halfwidth",
                             est.ci_halfwidth[i][k]);
                    }
                }
            }
        }
        return out;
    };

    // Simulations parallelise internally; avoid nesting thread pools.
    const unsigned workers = spec.sim ? 1u : spec.workers;
    const auto results = parallel_map<UnitResult>(units.size(), workers, evaluate);
    std::vector<SweepRow> rows;
    for (const auto& r : results) {
        log << r.log;
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "axis_value,series,receiver,model,metric,value\n";
    for (const auto& r : rows)
        out << fmt(r.axis_value) << ',' << r.series << ',' << r.receiver << ',' << r.model << ',' << r.metric << ','
            << fmt(r.value) << '\n';
}

ErrorMap run_error_map(const SweepSpec& spec) {
    if (spec.axis != SweepAxis::grid_yz) throw invariant_error("error maps need the grid-yz axis");
    if (!spec.sim) throw invariant_error("error maps need a 'sim' block");
    const json& g = spec.geometry;
    GridFamily family;
    family.x = required(g, "x");
    family.radius_a = required(g, "a");
    family.diffusion_d = required(g, "D");
    family.ys = spec.range.values();
    family.zs = family.ys;
    if (g.contains("fixed")) {
        json tmp = {{"receivers", g["fixed"]}, {"radius_a", family.radius_a}, {"diffusion_d", family.diffusion_d}};
        for (const auto& r : geometry_from_json(tmp).receivers) family.fixed.push_back(r.center);
    }
    SimConfig sim = *spec.sim;
    if (spec.workers) sim.workers = spec.workers;
    return estimate_error_map(family, spec.t, sim, spec.channel.inversion);
}

void write_error_map_csv(std::ostream& out, const ErrorMap& map) {
    out << "y,z,status,receiver,analytical,simulated,ci_halfwidth,abs_error\n";
    for (const auto& cell : map.cells) {
        if (cell.status == CellStatus::excluded) {
            out << fmt(cell.y) << ',' << fmt(cell.z) << ",excluded,,,,,\n";
            continue;
        }
        for (std::size_t i = 0; i < cell.abs_error.size(); ++i)
            out << fmt(cell.y) << ',' << fmt(cell.z) << ',' << to_string(cell.status) << ',' << i + 1 << ','
                << fmt(cell.analytical[i]) << ',' << fmt(cell.simulated[i]) << ',' << fmt(cell.ci_halfwidth[i]) << ','
                << fmt(cell.abs_error[i]) << '\n';
    }
}

}  // namespace mcfar::cli
