// SPDX-License-Identifier: Apache-2.0
//
// Transmitter/receiver scene. The point transmitter sits at the origin; every
// receiver is a fully-absorbing sphere of common radius `radius_a`.
// Units: micrometers, seconds, micrometers^2/second.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mcfar {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

struct Receiver {
    Vec3 center;
    int index = 0;  ///< 1-based label, as printed in reports and CSV output
};

/// Plain scene description. Construct through make_geometry() or uca_geometry()
/// to get invariant checking; the channel and simulator entry points re-check.
struct SystemGeometry {
    std::vector<Receiver> receivers;
    double radius_a = 0.0;
    double diffusion_d = 0.0;

    std::size_t size() const { return receivers.size(); }
    const Vec3& center(std::size_t i) const { return receivers.at(i).center; }
};

/// Builds a geometry with labels 1..N and validates it (throws on violation).
SystemGeometry make_geometry(const std::vector<Vec3>& centers, double radius_a, double diffusion_d);

/// Receivers on a circle of radius `d` centred at [w,0,0] in the plane x = w.
SystemGeometry uca_geometry(double w, double d, double radius_a, double diffusion_d);

/// Intended receiver at [r,0,0]; two competitors at [r cos t, +/- r sin t, 0].
SystemGeometry angular_layout(double r, double theta, double radius_a, double diffusion_d);

/// The first `count` receivers of `geom` (higher-index receivers removed).
SystemGeometry leading_receivers(const SystemGeometry& geom, std::size_t count);

/// Receiver indices in the functions below are 0-based.
double radial_distance(const SystemGeometry& geom, std::size_t i);
double angle_between(const SystemGeometry& geom, std::size_t i, std::size_t j);

/// Distance from the surface point of receiver i nearest the transmitter to the
/// centre of receiver j. Not symmetric in (i, j).
double proxy_distance(const SystemGeometry& geom, std::size_t i, std::size_t j);

struct GeometryReport {
    std::vector<double> r;
    std::vector<std::vector<double>> phi;      ///< diagonal is 0 and unused
    std::vector<std::vector<double>> proxy_r;  ///< diagonal is 0 and unused
    std::vector<std::string> warnings;

    bool warned() const { return !warnings.empty(); }
};

/// Checks the invariants (throws Error{invariant}) and computes all distances
/// and angles. Near-contact pairs and line-of-sight shadowing produce warnings.
GeometryReport validate(const SystemGeometry& geom);

/// True when all r_i agree and all R_ij (i != j) agree within `rel_tol`.
bool is_symmetric(const GeometryReport& report, double rel_tol = 1e-9);

}  // namespace mcfar
