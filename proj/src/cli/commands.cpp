// SPDX-License-Identifier: Apache-2.0
#include "mcfar/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "mcfar/cli/sweep.hpp"

namespace mcfar::cli {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parse: return exit_parse;
        case ErrorKind::invariant: return exit_invariant;
        case ErrorKind::convergence: return exit_convergence;
        case ErrorKind::tolerance: return exit_tolerance;
    }
    return exit_usage;
}

namespace {

std::optional<std::uint64_t> optional_count(const json& doc, const std::string& key) {
    const auto v = optional_number(doc, key);
    if (!v) return std::nullopt;
    if (*v < 0.0 || *v != std::floor(*v) || *v > 1.8e19)
        throw parse_error("setting '" + key + "' must be a non-negative integer");
    return static_cast<std::uint64_t>(*v);
}

template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& file, T fallback) {
    if (flag) return *flag;
    if (file) return *file;
    return fallback;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// Runs a command body and maps library errors onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

Model model_for(const std::optional<std::string>& flag, const json& doc, const SystemGeometry& geom) {
    const std::string name = pick(flag, optional_string(doc, "model"), std::string{"auto"});
    if (name == "auto") return select_model(geom);
    const Model model = parse_model(name);
    if (model == Model::simulation) throw invariant_error("use the sim command for simulation estimates");
    check_model_compatible(model, geom);
    return model;
}

std::vector<double> times_for(const std::optional<std::string>& flag, const json& doc, const std::string& key) {
    if (flag) return parse_time_list(*flag);
    if (doc.contains(key)) return time_list_from_json(doc[key]);
    return {};
}

std::optional<std::size_t> target_for(const std::optional<int>& flag, const json& doc, const SystemGeometry& geom) {
    std::optional<double> value;
    if (flag) value = *flag;
    else value = optional_number(doc, "target");
    if (!value) return std::nullopt;
    if (*value != std::floor(*value) || *value < 1 || *value > static_cast<double>(geom.size()))
        throw invariant_error("target must be a receiver label in 1.." + std::to_string(geom.size()));
    return static_cast<std::size_t>(*value) - 1;
}

}  // namespace

ChannelOptions resolve_channel_options(const NumericOptions& flags, const json& doc) {
    ChannelOptions opt;
    if (const auto m = flags.inv_method ? flags.inv_method : optional_string(doc, "inv_method")) {
        opt.inversion.method = parse_inversion_method(*m);
        if (opt.inversion.method == InversionMethod::gaver_stehfest) opt.inversion.order = 14;
    }
    const auto file_order = optional_number(doc, "inv_order");
    if (flags.inv_order) opt.inversion.order = *flags.inv_order;
    else if (file_order) {
        if (*file_order != std::floor(*file_order)) throw parse_error("setting 'inv_order' must be an integer");
        opt.inversion.order = static_cast<int>(*file_order);
    }
    opt.inversion.abs_tol = pick(flags.inv_tol, optional_number(doc, "inv_tol"), opt.inversion.abs_tol);
    opt.series.rel_tol = pick(flags.series_tol, optional_number(doc, "series_tol"), opt.series.rel_tol);
    const auto file_terms = optional_number(doc, "max_terms");
    if (flags.max_terms) opt.series.max_terms = *flags.max_terms;
    else if (file_terms) {
        if (*file_terms != std::floor(*file_terms)) throw parse_error("setting 'max_terms' must be an integer");
        opt.series.max_terms = static_cast<int>(*file_terms);
    }
    validate(opt.inversion);
    validate(opt.series);
    return opt;
}

SimConfig resolve_sim_config(const NumericOptions& flags, const json& doc, std::vector<double> record) {
    SimConfig cfg;
    cfg.dt = pick(flags.dt, optional_number(doc, "dt"), cfg.dt);
    cfg.trials = pick(flags.trials, optional_count(doc, "trials"), cfg.trials);
    cfg.seed = pick(flags.seed, optional_count(doc, "seed"), cfg.seed);
    const auto file_workers = optional_count(doc, "workers");
    cfg.workers = flags.workers ? *flags.workers : file_workers ? static_cast<unsigned>(*file_workers) : 0u;
    const auto t_max = flags.t_max ? flags.t_max : optional_number(doc, "t_max");
    if (record.empty()) {
        cfg.t_max = t_max.value_or(cfg.t_max);
        if (!(cfg.t_max > 0.0)) throw invariant_error("simulation t_max must be positive");
        for (int k = 1; k <= 10; ++k) record.push_back(cfg.t_max * k / 10.0);
        record.back() = cfg.t_max;
    } else {
        cfg.t_max = t_max.value_or(record.back());
    }
    cfg.record_times = std::move(record);
    return cfg;
}

int cmd_validate(const std::string& geometry, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SystemGeometry geom = geometry_from_json(load_json_file(geometry));
        const GeometryReport report = validate(geom);
        const std::size_t n = geom.size();
        out << "receivers " << n << "\nradius_a " << fmt(geom.radius_a) << "\ndiffusion_d " << fmt(geom.diffusion_d)
            << "\n\nr\n";
        for (std::size_t i = 0; i < n; ++i) out << "FAR" << i + 1 << ' ' << fmt(report.r[i]) << '\n';
        const auto matrix = [&](const char* name, const std::vector<std::vector<double>>& m) {
            out << '\n' << name << '\n';
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << (i == j ? "-" : fmt(m[i][j]));
                out << '\n';
            }
        };
        matrix("phi", report.phi);
        matrix("proxy_r", report.proxy_r);
        out << "\nsymmetric " << (is_symmetric(report) ? "yes" : "no") << '\n';
        out << "status " << (report.warned() ? "valid-with-warnings" : "valid") << '\n';
        for (const auto& w : report.warnings) out << "warning " << w << '\n';
        print_warnings(report.warnings, err);
        return int{exit_ok};
    });
}

int cmd_hit(const HitArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const json doc = load_json_file(args.geometry);
        const SystemGeometry geom = geometry_from_json(doc);
        print_warnings(validate(geom).warnings, err);
        const ChannelOptions options = resolve_channel_options(args.numeric, doc);
        const Model model = model_for(args.model, doc, geom);
        const auto target = target_for(args.target, doc, geom);
        const std::vector<double> times = times_for(args.times, doc, "times");
        if (times.empty()) throw parse_error("no evaluation times; pass --times or set 'times' in the file");

        const HittingCurve curve = hitting_curve(geom, times, model, options, target);
        out << "time,receiver,prob,model\n";
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < curve.receivers.size(); ++i)
                out << fmt(times[k]) << ',' << curve.receivers[i] << ',' << fmt(curve.probs[i][k]) << ','
                    << to_string(curve.model) << '\n';
        return int{exit_ok};
    });
}

int cmd_sim(const SimArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const json doc = load_json_file(args.geometry);
        const SystemGeometry geom = geometry_from_json(doc);
        print_warnings(validate(geom).warnings, err);
        const SimConfig cfg_base = resolve_sim_config(args.numeric, doc, times_for(args.record, doc, "record"));
        SimConfig cfg = cfg_base;
        cfg.keep_trial_records = args.trials_csv.has_value();
        const SimEstimate est = simulate(geom, cfg);
        print_warnings(est.warnings, err);

        out << "time,receiver,prob_hat,ci_halfwidth\n";
        for (std::size_t k = 0; k < est.record_times.size(); ++k)
            for (std::size_t i = 0; i < est.receivers.size(); ++i)
                out << fmt(est.record_times[k]) << ',' << est.receivers[i] << ',' << fmt(est.probability(i, k)) << ','
                    << fmt(est.ci_halfwidth[i][k]) << '\n';
        if (args.trials_csv) {
            std::ofstream trials(*args.trials_csv);
            if (!trials) throw invariant_error("cannot write '" + *args.trials_csv + "'");
            write_trial_records(trials, est);
        }
        err << "trials " << est.trials << ", escaped " << est.escaped << '\n';
        return int{exit_ok};
    });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::filesystem::path path(args.spec);
        const SweepSpec spec = sweep_from_json(load_json_file(path), path.parent_path(), args.numeric);
        if (spec.axis == SweepAxis::grid_yz) {
            const ErrorMap map = run_error_map(spec);
            for (const auto& cell : map.cells)
                if (!cell.note.empty())
                    err << "cell y=" << fmt(cell.y) << " z=" << fmt(cell.z) << ' ' << to_string(cell.status) << ": "
                        << cell.note << '\n';
            write_error_map_csv(out, map);
            return int{exit_ok};
        }
        write_sweep_csv(out, run_sweep(spec, err));
        return int{exit_ok};
    });
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::filesystem::path path(args.input);
        const json doc = load_json_file(path);

        if (doc.is_object() && doc.contains("axis")) {
            const SweepSpec spec = sweep_from_json(doc, path.parent_path(), args.numeric);
            if (spec.axis != SweepAxis::grid_yz) throw invariant_error("compare accepts only grid-yz sweep specs");
            const ErrorMap map = run_error_map(spec);
            write_error_map_csv(out, map);
            std::size_t warned = 0;
            double worst_warned = 0.0;
            for (const auto& cell : map.cells) {
                if (cell.status != CellStatus::warned) continue;
                ++warned;
                for (double e : cell.abs_error) worst_warned = std::max(worst_warned, e);
            }
            double worst = map.max_error_ok_cells();
            err << "max_abs_error " << fmt(worst) << " (tol " << fmt(spec.tol) << ", " << warned << " warned cells"
                << (args.strict ? "" : " exempt") << ", worst warned " << fmt(worst_warned) << ")\n";
            if (args.strict) worst = std::max(worst, worst_warned);
            if (worst > spec.tol)
                throw tolerance_error("max abs error " + fmt(worst) + " exceeds tol " + fmt(spec.tol));
            return int{exit_ok};
        }

        const SystemGeometry geom = geometry_from_json(doc);
        const GeometryReport report = validate(geom);
        print_warnings(report.warnings, err);
        const ChannelOptions options = resolve_channel_options(args.numeric, doc);
        const Model model = model_for(args.model, doc, geom);
        const double tol = pick(args.numeric.tol, optional_number(doc, "tol"), 0.02);

        const SimConfig cfg = resolve_sim_config(args.numeric, doc, times_for(args.times, doc, "times"));
        const HittingCurve curve = hitting_curve(geom, cfg.record_times, model, options);
        const SimEstimate est = simulate(geom, cfg);
        print_warnings(est.warnings, err);

        double worst = 0.0;
        out << "time,receiver,model,analytical,simulated,ci_halfwidth,abs_error\n";
        for (std::size_t k = 0; k < cfg.record_times.size(); ++k) {
            for (std::size_t i = 0; i < geom.size(); ++i) {
                const double analytical = curve.probs[i][k];
                const double simulated = est.probability(i, k);
                const double error = std::abs(analytical - simulated);
                worst = std::max(worst, error);
                out << fmt(cfg.record_times[k]) << ',' << curve.receivers[i] << ',' << to_string(model) << ','
                    << fmt(analytical) << ',' << fmt(simulated) << ',' << fmt(est.ci_halfwidth[i][k]) << ','
                    << fmt(error) << '\n';
            }
        }
        err << "max_abs_error " << fmt(worst) << " (tol " << fmt(tol) << ")\n";
        if (report.warned() && !args.strict) {
            err << "tolerance check skipped: geometry has warnings (use --strict to enforce)\n";
            return int{exit_ok};
        }
        if (worst > tol) throw tolerance_error("max abs error " + fmt(worst) + " exceeds tol " + fmt(tol));
        return int{exit_ok};
    });
}

namespace {

void add_channel_flags(CLI::App* app, NumericOptions& n) {
    app->add_option("--inv-method", n.inv_method, "talbot | gaver-stehfest");
    app->add_option("--inv-order", n.inv_order, "Talbot nodes or Stehfest terms");
    app->add_option("--inv-tol", n.inv_tol, "inversion target accuracy");
    app->add_option("--series-tol", n.series_tol, "relative truncation tolerance of erfc series");
    app->add_option("--max-terms", n.max_terms, "series term limit");
}

void add_sim_flags(CLI::App* app, NumericOptions& n) {
    app->add_option("--dt", n.dt, "simulation time step [s]");
    app->add_option("--trials", n.trials, "number of released molecules");
    app->add_option("--seed", n.seed, "base RNG seed");
    app->add_option("--t-max", n.t_max, "simulation horizon [s]");
    app->add_option("--workers", n.workers, "worker threads (0: all cores)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Channel models for molecular communication with fully-absorbing receivers", "mcfar"};
    app.require_subcommand(1);

    std::string validate_file;
    auto* validate_cmd = app.add_subcommand("validate", "check a geometry file and print distances and angles");
    validate_cmd->add_option("geometry", validate_file, "geometry JSON")->required();

    HitArgs hit;
    auto* hit_cmd = app.add_subcommand("hit", "analytical hitting probabilities as CSV");
    hit_cmd->add_option("geometry", hit.geometry, "geometry JSON")->required();
    hit_cmd->add_option("--target", hit.target, "receiver label (default: all)");
    hit_cmd->add_option("--times", hit.times, "t1,t2,... or start:stop:count[:log]");
    hit_cmd->add_option("--model", hit.model, "auto | single | two | three | symmetric | n-general");
    add_channel_flags(hit_cmd, hit.numeric);

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("sim", "Monte Carlo hitting probabilities as CSV");
    sim_cmd->add_option("geometry", sim.geometry, "geometry JSON")->required();
    sim_cmd->add_option("--record", sim.record, "record times, as for --times");
    sim_cmd->add_option("--trials-csv", sim.trials_csv, "write per-trial absorption records here");
    add_sim_flags(sim_cmd, sim.numeric);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep spec");
    sweep_cmd->add_option("spec", sweep.spec, "sweep JSON")->required();
    add_channel_flags(sweep_cmd, sweep.numeric);
    add_sim_flags(sweep_cmd, sweep.numeric);
    sweep_cmd->add_option("--tol", sweep.numeric.tol, "absolute error tolerance");

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "analytical vs simulation error report");
    compare_cmd->add_option("input", compare.input, "geometry JSON or grid-yz sweep JSON")->required();
    compare_cmd->add_option("--times", compare.times, "comparison times");
    compare_cmd->add_option("--model", compare.model, "analytical model (default auto)");
    compare_cmd->add_option("--tol", compare.numeric.tol, "max absolute error (default 0.02)");
    compare_cmd->add_flag("--strict", compare.strict, "enforce --tol on warned geometries too");
    add_channel_flags(compare_cmd, compare.numeric);
    add_sim_flags(compare_cmd, compare.numeric);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << sub->help();
        else
            err << app.help();
        return exit_usage;
    }

    if (validate_cmd->parsed()) return cmd_validate(validate_file, out, err);
    if (hit_cmd->parsed()) return cmd_hit(hit, out, err);
    if (sim_cmd->parsed()) return cmd_sim(sim, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
    return cmd_compare(compare, out, err);
}

}  // namespace mcfar::cli
