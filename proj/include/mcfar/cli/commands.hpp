// SPDX-License-Identifier: Apache-2.0
//
// Subcommands of the `mcfar` tool. Each cmd_* writes data (CSV or the
// validation report) to `out`, diagnostics to `err`, and returns the process
// exit code; errors never escape.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcfar/channel.hpp"
#include "mcfar/cli/io.hpp"
#include "mcfar/error.hpp"
#include "mcfar/simulator.hpp"

namespace mcfar::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_parse = 2,
    exit_invariant = 3,
    exit_convergence = 4,
    exit_tolerance = 5,
};

int exit_code_for(ErrorKind kind);

/// Numeric settings that may appear both as flags and in the input document.
/// A flag that is set wins over the document value.
struct NumericOptions {
    std::optional<std::string> inv_method;
    std::optional<int> inv_order;
    std::optional<double> inv_tol;
    std::optional<double> series_tol;
    std::optional<int> max_terms;
    std::optional<double> dt;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_max;
    std::optional<double> tol;
    std::optional<unsigned> workers;
};

ChannelOptions resolve_channel_options(const NumericOptions& flags, const json& doc);

/// `record` empty means: 10 evenly spaced times up to t_max.
SimConfig resolve_sim_config(const NumericOptions& flags, const json& doc, std::vector<double> record);

struct HitArgs {
    std::string geometry;
    std::optional<int> target;  ///< 1-based; all receivers when empty
    std::optional<std::string> times;
    std::optional<std::string> model;  ///< auto when empty
    NumericOptions numeric;
};

struct SimArgs {
    std::string geometry;
    std::optional<std::string> record;
    std::optional<std::string> trials_csv;
    NumericOptions numeric;
};

struct SweepArgs {
    std::string spec;
    NumericOptions numeric;
};

struct CompareArgs {
    std::string input;  ///< geometry file, or a grid-yz sweep spec
    std::optional<std::string> times;
    std::optional<std::string> model;
    bool strict = false;  ///< enforce --tol even on warned geometries
    NumericOptions numeric;
};

int cmd_validate(const std::string& geometry, std::ostream& out, std::ostream& err);
int cmd_hit(const HitArgs& args, std::ostream& out, std::ostream& err);
int cmd_sim(const SimArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcfar::cli
