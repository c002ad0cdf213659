// SPDX-License-Identifier: Apache-2.0
#include "mcfar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcfar/error.hpp"

namespace mcfar {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

namespace {

void check_index(const SystemGeometry& geom, std::size_t i) {
    if (i >= geom.size()) {
        std::ostringstream os;
        os << "receiver index " << i + 1 << " out of range (N = " << geom.size() << ")";
        throw invariant_error(os.str());
    }
}

void check_pair(const SystemGeometry& geom, std::size_t i, std::size_t j) {
    check_index(geom, i);
    check_index(geom, j);
    if (i == j) throw invariant_error("pairwise quantity requested for identical receivers");
}

std::string label(const SystemGeometry& geom, std::size_t i) {
    return "FAR" + std::to_string(geom.receivers[i].index);
}

}  // namespace

SystemGeometry make_geometry(const std::vector<Vec3>& centers, double radius_a, double diffusion_d) {
    SystemGeometry geom;
    geom.radius_a = radius_a;
    geom.diffusion_d = diffusion_d;
    geom.receivers.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        geom.receivers.push_back({centers[i], static_cast<int>(i + 1)});
    validate(geom);
    return geom;
}

SystemGeometry uca_geometry(double w, double d, double radius_a, double diffusion_d) {
    std::vector<Vec3> centers;
    for (int i = 0; i < 3; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / 3.0;
        centers.push_back({w, d * std::cos(angle), d * std::sin(angle)});
    }
    return make_geometry(centers, radius_a, diffusion_d);
}

SystemGeometry angular_layout(double r, double theta, double radius_a, double diffusion_d) {
    return make_geometry({{r, 0.0, 0.0},
                          {r * std::cos(theta), r * std::sin(theta), 0.0},
                          {r * std::cos(theta), -r * std::sin(theta), 0.0}},
                         radius_a, diffusion_d);
}

SystemGeometry leading_receivers(const SystemGeometry& geom, std::size_t count) {
    if (count == 0 || count > geom.size()) throw invariant_error("receiver subset size out of range");
    SystemGeometry out = geom;
    out.receivers.resize(count);
    return out;
}

double radial_distance(const SystemGeometry& geom, std::size_t i) {
    check_index(geom, i);
    return norm(geom.center(i));
}

double angle_between(const SystemGeometry& geom, std::size_t i, std::size_t j) {
    check_pair(geom, i, j);
    const double ri = radial_distance(geom, i);
    const double rj = radial_distance(geom, j);
    if (ri == 0.0 || rj == 0.0) throw invariant_error("angle undefined for a receiver centred at the transmitter");
    const double c = std::clamp(dot(geom.center(i), geom.center(j)) / (ri * rj), -1.0, 1.0);
    return std::acos(c);
}

double proxy_distance(const SystemGeometry& geom, std::size_t i, std::size_t j) {
    check_pair(geom, i, j);
    const double a = geom.radius_a;
    const double near_i = radial_distance(geom, i) - a;
    const double rj = radial_distance(geom, j);
    const double phi = angle_between(geom, i, j);
    const double sq = near_i * near_i + rj * rj - 2.0 * near_i * rj * std::cos(phi);
    return std::sqrt(std::max(sq, 0.0));
}

GeometryReport validate(const SystemGeometry& geom) {
    const double a = geom.radius_a;
    if (!(a > 0.0) || !std::isfinite(a)) throw invariant_error("radius_a must be positive");
    if (!(geom.diffusion_d > 0.0) || !std::isfinite(geom.diffusion_d))
        throw invariant_error("diffusion_d must be positive");
    if (geom.receivers.empty()) throw invariant_error("geometry has no receivers");

    const std::size_t n = geom.size();
    GeometryReport report;
    report.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& c = geom.center(i);
        if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.z))
            throw invariant_error(label(geom, i) + " has a non-finite centre");
        report.r[i] = norm(c);
        if (!(report.r[i] > a)) {
            std::ostringstream os;
            os << "transmitter lies inside or on " << label(geom, i) << " (r = " << report.r[i] << ", a = " << a << ")";
            throw invariant_error(os.str());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sep = distance(geom.center(i), geom.center(j));
            if (!(sep > 2.0 * a)) {
                std::ostringstream os;
                os << label(geom, i) << " and " << label(geom, j) << " overlap (centre distance " << sep
                   << " <= 2a = " << 2.0 * a << ")";
                throw invariant_error(os.str());
            }
        }
    }

    report.phi.assign(n, std::vector<double>(n, 0.0));
    report.proxy_r.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            report.phi[i][j] = angle_between(geom, i, j);
            report.proxy_r[i][j] = proxy_distance(geom, i, j);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sep = distance(geom.center(i), geom.center(j));
            if (sep < 4.0 * a) {
                std::ostringstream os;
                os << label(geom, i) << " and " << label(geom, j) << " are close (centre distance " << sep
                   << " < 4a); closest-point approximation may be inaccurate";
                report.warnings.push_back(os.str());
            }
        }
    }
    // Shadowing: the nearer sphere intrudes into the cone the farther sphere
    // subtends at the transmitter.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !(report.r[i] < report.r[j])) continue;
            const double half_width = std::asin(a / report.r[j]) + std::asin(a / report.r[i]);
            if (report.phi[i][j] < half_width) {
                report.warnings.push_back(label(geom, i) + " shadows " + label(geom, j) +
                                          " from the transmitter; closest-point approximation may be inaccurate");
            }
        }
    }
    return report;
}

bool is_symmetric(const GeometryReport& report, double rel_tol) {
    const std::size_t n = report.r.size();
    if (n < 2) return false;
    const auto close = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    };
    for (std::size_t i = 1; i < n; ++i)
        if (!close(report.r[i], report.r[0])) return false;
    const double ref = report.proxy_r[0][1];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !close(report.proxy_r[i][j], ref)) return false;
    return true;
}

}  // namespace mcfar
