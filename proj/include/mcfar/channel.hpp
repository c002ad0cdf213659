// SPDX-License-Identifier: Apache-2.0
//
// Hitting-probability models for a point transmitter and N fully-absorbing
// spherical receivers. Receiver indices are 0-based.
//
// Multi-receiver models replace the (unknown) absorption point on a competing
// receiver j by its surface point nearest the transmitter. In the Laplace
// domain this gives, for every receiver i,
//
//     H_i(s) + sum_{j != i} s P(s, R_ji) H_j(s) = P(s, r_i),
//
// where P(s, x) is p_bar_laplace and R_ji = proxy_distance(j, i).
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcfar/geometry.hpp"
#include "mcfar/laplace.hpp"

namespace mcfar {

enum class Model { single, two, three, symmetric, n_general, simulation };

std::string to_string(Model model);
Model parse_model(const std::string& name);

/// Truncation of the infinite erfc series.
struct SeriesConfig {
    double rel_tol = 1e-12;
    int max_terms = 200;
};

void validate(const SeriesConfig& cfg);

struct SeriesValue {
    double value = 0.0;
    int terms = 0;                 ///< number of terms summed
    double remainder_bound = 0.0;  ///< magnitude bound on the omitted tail
    bool converged = false;
};

/// Lone receiver at distance r: (a/r) erfc((r - a) / sqrt(4 D t)). t may be +inf.
double hit_single(double t, double r, double a, double diffusion_d);

/// Two-receiver image-like series. `target` selects which receiver is FAR_1.
SeriesValue hit_two(double t, const SystemGeometry& geom, std::size_t target, const SeriesConfig& cfg = {});

/// Closed-form 3x3 solution for H_target(s) (numerator over determinant).
LaplaceFn three_far_transform(const SystemGeometry& geom, std::size_t target);
double hit_three(double t, const SystemGeometry& geom, std::size_t target, const InversionConfig& cfg = {});

/// Three receivers equidistant from the transmitter (r) and from each other (R).
SeriesValue hit_symmetric(double t, double r, double big_r, double a, double diffusion_d,
                          const SeriesConfig& cfg = {});
/// (a/r) / (1 + 2a/R).
double hit_symmetric_asymptotic(double r, double big_r, double a);

/// The coupled N-receiver Laplace system for one geometry. Immutable and
/// cheap to copy; transforms handed out share the precomputed distances.
class NFarSystem {
public:
    explicit NFarSystem(const SystemGeometry& geom);

    std::size_t size() const;
    const GeometryReport& report() const;

    /// H_1(s) .. H_N(s). Throws Error{convergence} if the system is singular.
    std::vector<Complex> transforms(Complex s) const;

    /// P(s, r_i) - H_i(s), evaluated as sum_j s P(s, R_ji) H_j(s) so that tiny
    /// losses are not lost to cancellation.
    std::vector<Complex> loss_transforms(Complex s) const;

    LaplaceFn transform(std::size_t target) const;
    LaplaceFn loss_transform(std::size_t target) const;

    /// Transform of h_target(without `added`) - h_target(with `added`): the
    /// probability the extra receiver `added` takes from `target`. Computed
    /// directly from the difference of the two systems, without cancellation.
    LaplaceFn added_receiver_loss_transform(std::size_t added, std::size_t target) const;

    /// Eventual absorption fractions: the s -> 0 limit of the system,
    /// h_i + sum_{j != i} (a / R_ji) h_j = a / r_i.
    std::vector<double> asymptotic() const;

private:
    struct Data;
    std::shared_ptr<const Data> data_;
};

std::vector<Complex> n_far_transforms(const SystemGeometry& geom, Complex s);
double hit_n(double t, const SystemGeometry& geom, std::size_t target, const InversionConfig& cfg = {});
std::vector<double> hit_n_asymptotic(const SystemGeometry& geom);

/// Per-receiver probabilities on a caller-supplied time grid.
struct HittingCurve {
    std::vector<double> times;
    std::vector<int> receivers;             ///< 1-based labels, one per row of `probs`
    std::vector<std::vector<double>> probs;  ///< [receiver][time]
    Model model = Model::n_general;
};

struct ChannelOptions {
    InversionConfig inversion;
    SeriesConfig series;
};

/// Most specific model for the geometry: symmetric for a symmetric 3-receiver
/// layout, otherwise the exact-N form (single / two / three), else n-general.
Model select_model(const SystemGeometry& geom, double symmetry_rel_tol = 1e-9);

/// Throws Error{invariant} if `model` cannot be applied to `geom`.
void check_model_compatible(Model model, const SystemGeometry& geom, double symmetry_rel_tol = 1e-9);

/// Evaluates `model` for one receiver (or all when `target` is empty).
HittingCurve hitting_curve(const SystemGeometry& geom, std::span<const double> times, Model model,
                           const ChannelOptions& options = {}, std::optional<std::size_t> target = std::nullopt);

}  // namespace mcfar
