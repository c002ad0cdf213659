// SPDX-License-Identifier: Apache-2.0
#include "mcfar/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcfar/dense_lu.hpp"
#include "mcfar/error.hpp"

namespace mcfar {

namespace {

// Probabilities from numerical inversion may dip a hair below zero at very
// small t; anything beyond this slack is reported rather than clamped.
constexpr double kProbabilitySlack = 1e-9;

double erfc_argument(double length, double t, double diffusion_d) {
    return length / std::sqrt(4.0 * diffusion_d * t);
}

void check_time(double t) {
    if (!(t > 0.0)) throw invariant_error("time must be positive");
}

void check_target(const SystemGeometry& geom, std::size_t target) {
    if (target >= geom.size())
        throw invariant_error("target receiver " + std::to_string(target + 1) + " out of range (N = " +
                              std::to_string(geom.size()) + ")");
}

}  // namespace

std::string to_string(Model model) {
    switch (model) {
        case Model::single: return "single";
        case Model::two: return "two";
        case Model::three: return "three";
        case Model::symmetric: return "symmetric";
        case Model::n_general: return "n-general";
        case Model::simulation: return "simulation";
    }
    return "unknown";
}

Model parse_model(const std::string& name) {
    if (name == "single") return Model::single;
    if (name == "two") return Model::two;
    if (name == "three") return Model::three;
    if (name == "symmetric") return Model::symmetric;
    if (name == "n-general") return Model::n_general;
    if (name == "simulation") return Model::simulation;
    throw parse_error("unknown model '" + name + "'");
}

void validate(const SeriesConfig& cfg) {
    if (!(cfg.rel_tol > 0.0)) throw invariant_error("series rel_tol must be positive");
    if (cfg.max_terms < 1) throw invariant_error("series max_terms must be at least 1");
}

double hit_single(double t, double r, double a, double diffusion_d) {
    check_time(t);
    if (!(r > a)) throw invariant_error("hit_single requires r > a");
    return a / r * std::erfc(erfc_argument(r - a, t, diffusion_d));
}

SeriesValue hit_two(double t, const SystemGeometry& geom, std::size_t target, const SeriesConfig& cfg) {
    check_time(t);
    validate(cfg);
    if (geom.size() != 2) throw invariant_error("hit_two requires exactly two receivers");
    check_target(geom, target);
    const GeometryReport rep = validate(geom);
    const std::size_t other = 1 - target;
    const double a = geom.radius_a;
    const double d = geom.diffusion_d;
    const double r1 = rep.r[target];
    const double r2 = rep.r[other];
    const double r12 = rep.proxy_r[target][other];
    const double r21 = rep.proxy_r[other][target];

    const double ratio = a * a / (r12 * r21);
    const double second_scale = a * a / (r2 * r21);
    SeriesValue out;
    double envelope = 1.0;
    for (int n = 0; n < cfg.max_terms; ++n) {
        const double direct = a / r1 * std::erfc(erfc_argument(r1 - a + n * (r21 - a) + n * (r12 - a), t, d));
        const double via_other =
            second_scale * std::erfc(erfc_argument(r2 - a + (n + 1) * (r21 - a) + n * (r12 - a), t, d));
        out.value += envelope * (direct - via_other);
        out.terms = n + 1;
        if (envelope < cfg.rel_tol && ratio < 1.0) {
            out.converged = true;
            break;
        }
        envelope *= ratio;
    }
    out.remainder_bound = ratio < 1.0 ? envelope * ratio * (a / r1) / (1.0 - ratio)
                                      : std::numeric_limits<double>::infinity();
    return out;
}

LaplaceFn three_far_transform(const SystemGeometry& geom, std::size_t target) {
    if (geom.size() != 3) throw invariant_error("three-receiver transform requires exactly three receivers");
    check_target(geom, target);
    const GeometryReport rep = validate(geom);

    // Cyclic relabelling puts `target` in slot 0.
    std::array<std::size_t, 3> idx{target, (target + 1) % 3, (target + 2) % 3};
    std::array<double, 3> r{};
    std::array<std::array<double, 3>, 3> big_r{};
    for (std::size_t i = 0; i < 3; ++i) {
        r[i] = rep.r[idx[i]];
        for (std::size_t j = 0; j < 3; ++j) big_r[i][j] = i == j ? 0.0 : rep.proxy_r[idx[i]][idx[j]];
    }
    const double a = geom.radius_a;
    const double d = geom.diffusion_d;

    return [r, big_r, a, d](Complex s) {
        const auto p = [&](double x) { return p_bar_laplace(s, x, a, d); };
        const Complex p1 = p(r[0]), p2 = p(r[1]), p3 = p(r[2]);
        const Complex p12 = p(big_r[0][1]), p21 = p(big_r[1][0]);
        const Complex p13 = p(big_r[0][2]), p31 = p(big_r[2][0]);
        const Complex p23 = p(big_r[1][2]), p32 = p(big_r[2][1]);

        const Complex alpha = p2 * p21 + p3 * p31;
        const Complex beta = -p1 * p23 * p32 + p2 * p23 * p31 + p3 * p32 * p21;
        const Complex gamma = p12 * p21 + p32 * p23 + p13 * p31;
        const Complex delta = p12 * p23 * p31 + p13 * p32 * p21;
        return (p1 - s * alpha + s * s * beta) / (1.0 - s * s * gamma + s * s * s * delta);
    };
}

double hit_three(double t, const SystemGeometry& geom, std::size_t target, const InversionConfig& cfg) {
    check_time(t);
    return invert(three_far_transform(geom, target), t, cfg);
}

SeriesValue hit_symmetric(double t, double r, double big_r, double a, double diffusion_d, const SeriesConfig& cfg) {
    check_time(t);
    validate(cfg);
    if (!(r > a)) throw invariant_error("hit_symmetric requires r > a");
    if (!(big_r > a)) throw invariant_error("hit_symmetric requires R > a");
    const double ratio = -2.0 * a / big_r;
    const auto term = [&](int n) {
        return a / r * std::pow(ratio, n) * std::erfc(erfc_argument(r - a + n * (big_r - a), t, diffusion_d));
    };

    SeriesValue out;
    bool truncated = false;
    for (int n = 0; n < cfg.max_terms; ++n) {
        const double value = term(n);
        out.value += value;
        out.terms = n + 1;
        if (std::abs(value) <= cfg.rel_tol * std::abs(out.value)) {
            truncated = true;
            break;
        }
    }
    // Alternating with decreasing magnitudes when 2a/R < 1: the first omitted
    // term bounds the tail.
    out.remainder_bound = std::abs(term(out.terms));
    out.converged = truncated && std::abs(ratio) < 1.0;
    return out;
}

double hit_symmetric_asymptotic(double r, double big_r, double a) {
    if (!(a > 0.0)) throw invariant_error("radius must be positive");
    if (!(r > a)) throw invariant_error("hit_symmetric_asymptotic requires r > a");
    if (!(big_r > 0.0)) throw invariant_error("hit_symmetric_asymptotic requires R > 0");
    return (a / r) / (1.0 + 2.0 * a / big_r);
}

// ---------------------------------------------------------------------------
// General N-receiver system
// ---------------------------------------------------------------------------

struct NFarSystem::Data {
    GeometryReport report;
    double a = 0.0;
    double d = 0.0;

    std::size_t n() const { return report.r.size(); }

    // Coupling coefficient of H_j in the equation for receiver i.
    Complex coupling(Complex s, std::size_t i, std::size_t j) const {
        return s * p_bar_laplace(s, report.proxy_r[j][i], a, d);
    }

    DenseMatrix<Complex> matrix(Complex s, std::span<const std::size_t> members) const {
        DenseMatrix<Complex> m = DenseMatrix<Complex>::identity(members.size());
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = 0; j < members.size(); ++j)
                if (i != j) m(i, j) = coupling(s, members[i], members[j]);
        return m;
    }

    DenseLU<Complex> factor(Complex s, std::span<const std::size_t> members) const {
        DenseMatrix<Complex> m = matrix(s, members);
        auto lu = DenseLU<Complex>::factor(m);
        if (!lu) {
            std::ostringstream os;
            os << "singular receiver coupling system at s = " << s;
            throw convergence_error(os.str());
        }
        const double cond = lu->condition();
        if (!std::isfinite(cond) || cond > 1e14) {
            std::ostringstream os;
            os << "ill-conditioned receiver coupling system at s = " << s << " (condition estimate " << cond << ")";
            throw convergence_error(os.str());
        }
        return std::move(*lu);
    }

    std::vector<std::size_t> all() const {
        std::vector<std::size_t> v(n());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
        return v;
    }

    std::vector<Complex> solve(Complex s) const {
        const auto members = all();
        std::vector<Complex> b(n());
        for (std::size_t i = 0; i < n(); ++i) b[i] = p_bar_laplace(s, report.r[i], a, d);
        return factor(s, members).solve(b);
    }
};

NFarSystem::NFarSystem(const SystemGeometry& geom) {
    auto data = std::make_shared<Data>();
    data->report = validate(geom);
    data->a = geom.radius_a;
    data->d = geom.diffusion_d;
    data_ = std::move(data);
}

std::size_t NFarSystem::size() const { return data_->n(); }

const GeometryReport& NFarSystem::report() const { return data_->report; }

std::vector<Complex> NFarSystem::transforms(Complex s) const {
    if (s == Complex(0.0, 0.0)) throw invariant_error("n-receiver transforms are singular at s = 0; use asymptotic()");
    return data_->solve(s);
}

std::vector<Complex> NFarSystem::loss_transforms(Complex s) const {
    const auto h = transforms(s);
    std::vector<Complex> loss(h.size(), Complex{});
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j)
            if (i != j) loss[i] += data_->coupling(s, i, j) * h[j];
    return loss;
}

LaplaceFn NFarSystem::transform(std::size_t target) const {
    if (target >= size()) throw invariant_error("target receiver out of range");
    return [data = data_, target](Complex s) { return data->solve(s)[target]; };
}

LaplaceFn NFarSystem::loss_transform(std::size_t target) const {
    if (target >= size()) throw invariant_error("target receiver out of range");
    return [self = *this, target](Complex s) { return self.loss_transforms(s)[target]; };
}

LaplaceFn NFarSystem::added_receiver_loss_transform(std::size_t added, std::size_t target) const {
    if (target >= size() || added >= size()) throw invariant_error("receiver index out of range");
    if (added == target) throw invariant_error("the added receiver must differ from the target");
    std::vector<std::size_t> rest;
    std::size_t target_slot = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (i == added) continue;
        if (i == target) target_slot = rest.size();
        rest.push_back(i);
    }
    // Subtracting the two systems row by row: A_rest * delta = c_added * H_added.
    return [data = data_, rest, added, target_slot](Complex s) {
        const Complex h_added = data->solve(s)[added];
        std::vector<Complex> rhs(rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) rhs[i] = data->coupling(s, rest[i], added) * h_added;
        if (rest.size() == 1) return rhs[0];
        return data->factor(s, rest).solve(rhs)[target_slot];
    };
}

std::vector<double> NFarSystem::asymptotic() const {
    const std::size_t n = size();
    const auto& rep = data_->report;
    DenseMatrix<double> m = DenseMatrix<double>::identity(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = data_->a / rep.r[i];
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) m(i, j) = data_->a / rep.proxy_r[j][i];
    }
    auto lu = DenseLU<double>::factor(m);
    if (!lu || !std::isfinite(lu->condition()) || lu->condition() > 1e14)
        throw convergence_error("singular limiting (s -> 0) receiver coupling system");
    return lu->solve(b);
}

std::vector<Complex> n_far_transforms(const SystemGeometry& geom, Complex s) {
    return NFarSystem(geom).transforms(s);
}

double hit_n(double t, const SystemGeometry& geom, std::size_t target, const InversionConfig& cfg) {
    check_time(t);
    check_target(geom, target);
    return invert(NFarSystem(geom).transform(target), t, cfg);
}

std::vector<double> hit_n_asymptotic(const SystemGeometry& geom) { return NFarSystem(geom).asymptotic(); }

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

Model select_model(const SystemGeometry& geom, double symmetry_rel_tol) {
    const GeometryReport rep = validate(geom);
    switch (geom.size()) {
        case 1: return Model::single;
        case 2: return Model::two;
        case 3: return is_symmetric(rep, symmetry_rel_tol) ? Model::symmetric : Model::three;
        default: return Model::n_general;
    }
}

void check_model_compatible(Model model, const SystemGeometry& geom, double symmetry_rel_tol) {
    const GeometryReport rep = validate(geom);
    const std::size_t n = geom.size();
    const auto fail = [&](const char* need) {
        throw invariant_error("model '" + to_string(model) + "' requires " + need + ", geometry has " +
                              std::to_string(n) + " receiver(s)");
    };
    switch (model) {
        case Model::single:
            if (n != 1) fail("exactly one receiver");
            break;
        case Model::two:
            if (n != 2) fail("exactly two receivers");
            break;
        case Model::three:
            if (n != 3) fail("exactly three receivers");
            break;
        case Model::symmetric:
            if (n != 3 || !is_symmetric(rep, symmetry_rel_tol))
                fail("three receivers equidistant from the transmitter and from each other");
            break;
        case Model::n_general: break;
        case Model::simulation: throw invariant_error("the simulation model is produced by the simulator");
    }
}

HittingCurve hitting_curve(const SystemGeometry& geom, std::span<const double> times, Model model,
                           const ChannelOptions& options, std::optional<std::size_t> target) {
    check_model_compatible(model, geom);
    validate(options.inversion);
    validate(options.series);
    if (target) check_target(geom, *target);
    for (std::size_t k = 0; k < times.size(); ++k) {
        check_time(times[k]);
        if (k > 0 && !(times[k] > times[k - 1])) throw invariant_error("time grid must be strictly ascending");
    }

    HittingCurve curve;
    curve.model = model;
    curve.times.assign(times.begin(), times.end());
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < geom.size(); ++i)
        if (!target || *target == i) rows.push_back(i);

    const GeometryReport rep = validate(geom);
    const double a = geom.radius_a;
    const double d = geom.diffusion_d;
    std::optional<NFarSystem> system;
    if (model == Model::n_general) system.emplace(geom);

    for (std::size_t i : rows) {
        LaplaceFn transform;
        if (model == Model::three) transform = three_far_transform(geom, i);
        if (model == Model::n_general) transform = system->transform(i);

        std::vector<double> row;
        row.reserve(times.size());
        for (double t : times) {
            double p = 0.0;
            const auto series = [&](const SeriesValue& v) {
                if (!v.converged)
                    throw convergence_error("series did not converge within " + std::to_string(v.terms) +
                                            " terms (partial value " + std::to_string(v.value) + ")");
                return v.value;
            };
            switch (model) {
                case Model::single: p = hit_single(t, rep.r[i], a, d); break;
                case Model::two: p = series(hit_two(t, geom, i, options.series)); break;
                case Model::symmetric:
                    p = series(hit_symmetric(t, rep.r[i], rep.proxy_r[0][1], a, d, options.series));
                    break;
                case Model::three:
                case Model::n_general: p = invert(transform, t, options.inversion); break;
                case Model::simulation: break;
            }
            if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack || !std::isfinite(p)) {
                std::ostringstream os;
                os << "model " << to_string(model) << " produced probability " << p << " at t = " << t
                   << " for receiver " << i + 1;
                throw convergence_error(os.str());
            }
            row.push_back(std::clamp(p, 0.0, 1.0));
        }
        curve.receivers.push_back(geom.receivers[i].index);
        curve.probs.push_back(std::move(row));
    }
    return curve;
}

}  // namespace mcfar
