#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "../errors.hpp"
#include "../geometry/point.hpp"
#include "../geometry/point_cloud.hpp"
#include "../rng.hpp"
#include "part_solid.hpp"

namespace toolforge {

// Single-view constraint for sampling: points whose outward normal has a
// non-negative dot product with camera_direction face away from (or exactly
// side-on to) the camera and are excluded. camera_direction is the direction
// the camera looks along, e.g. {0,0,-1} for a straight-down view.
struct ViewSpec {
    Point3 camera_direction;
    bool cull_backfaces = true;
};

namespace sampling_detail {

constexpr double kPi = 3.14159265358979323846;

struct SamplePoint {
    Point3 position;
    Point3 normal;
};

// A face is one analytically samplable patch of a solid's boundary, in the
// part's local frame. Visibility under a view direction is computed exactly
// per face (no rejection loops), so the visible measure is known up front and
// NoVisibleSurface is decided analytically.
struct RectFace {
    Point3 center, u, v, normal;  // u, v unit; half extents hu, hv
    double hu, hv;

    double area() const { return 4.0 * hu * hv; }
    SamplePoint sample(Rng& rng) const {
        double a = rng.uniform(-hu, hu), b = rng.uniform(-hv, hv);
        return {center + a * u + b * v, normal};
    }
};

struct DiskFace {
    Point3 center, u, v, normal;
    double radius;

    double area() const { return kPi * radius * radius; }
    SamplePoint sample(Rng& rng) const {
        double r = radius * std::sqrt(rng.next_double());
        double t = rng.uniform(0.0, 2.0 * kPi);
        return {center + (r * std::cos(t)) * u + (r * std::sin(t)) * v, normal};
    }
};

// Planar annular sector (curved-plate end faces). Angle phi runs from u
// toward v around `center`; radius in [r0, r1], angle in [phi0, phi1].
struct AnnularSectorFace {
    Point3 center, u, v, normal;
    double r0, r1, phi0, phi1;

    double area() const { return 0.5 * (r1 * r1 - r0 * r0) * (phi1 - phi0); }
    SamplePoint sample(Rng& rng) const {
        double phi = rng.uniform(phi0, phi1);
        double r = std::sqrt(rng.uniform(r0 * r0, r1 * r1));
        Point3 radial = std::cos(phi) * u + std::sin(phi) * v;
        return {center + r * radial, normal};
    }
};

// Lateral cylindrical patch: axis through `origin` along unit `axis`; radial
// angle phi from u toward v; height h along the axis. normal_sign is +1 when
// the outward normal points away from the axis (outer surfaces) and -1 when
// it points toward it (the bowl side of a curved plate).
struct CylSectorFace {
    Point3 origin, axis, u, v;
    double radius, phi0, phi1, h0, h1;
    double normal_sign;

    double area() const { return radius * (phi1 - phi0) * (h1 - h0); }

    SamplePoint sample_in(Rng& rng, double a, double b) const {
        double phi = rng.uniform(a, b);
        double h = rng.uniform(h0, h1);
        Point3 radial = std::cos(phi) * u + std::sin(phi) * v;
        return {origin + h * axis + radius * radial, normal_sign * radial};
    }
    SamplePoint sample(Rng& rng) const { return sample_in(rng, phi0, phi1); }

    // Sub-intervals of [phi0, phi1] whose normal faces the camera, i.e.
    // normal_sign * cos(phi - psi) < 0 with psi the direction's radial phase.
    // The visible set is an open half-circle; against an interval of span
    // <= 2*pi it intersects in at most two pieces.
    struct ArcSpan {
        double a, b;
        double len() const { return b - a; }
    };
    std::vector<ArcSpan> visible_spans(Point3 dir) const {
        double du = u.dot(dir), dv = v.dot(dir);
        double amp = std::hypot(du, dv);
        std::vector<ArcSpan> spans;
        if (amp <= 0.0) return spans;  // side-on everywhere: dot == 0, culled
        double psi = std::atan2(dv, du);
        // visible iff normal_sign * cos(phi - psi) < 0
        double lo = normal_sign > 0 ? psi + 0.5 * kPi : psi - 0.5 * kPi;
        for (int k = -2; k <= 2; ++k) {
            double a = std::max(phi0, lo + 2.0 * kPi * k);
            double b = std::min(phi1, lo + kPi + 2.0 * kPi * k);
            if (b > a) spans.push_back({a, b});
        }
        return spans;
    }
};

struct SphereFace {
    Point3 center;
    double radius;

    double area() const { return 4.0 * kPi * radius * radius; }
    SamplePoint sample(Rng& rng) const {
        double z = rng.uniform(-1.0, 1.0);
        double t = rng.uniform(0.0, 2.0 * kPi);
        double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        Point3 n{s * std::cos(t), s * std::sin(t), z};
        return {center + radius * n, n};
    }
    // Uniform over the open hemisphere facing the camera (normal.dot(dir) < 0).
    SamplePoint sample_hemisphere(Rng& rng, Point3 e1, Point3 e2, Point3 e3) const {
        double z = 1.0 - rng.next_double();  // (0, 1]: excludes the side-on rim
        double t = rng.uniform(0.0, 2.0 * kPi);
        double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        Point3 n = (s * std::cos(t)) * e1 + (s * std::sin(t)) * e2 + z * e3;
        return {center + radius * n, n};
    }
};

struct Face {
    enum Kind { rect, disk, annular, cyl, sphere } kind;
    RectFace r;
    DiskFace d;
    AnnularSectorFace a;
    CylSectorFace c;
    SphereFace s;

    double area() const {
        switch (kind) {
            case rect: return r.area();
            case disk: return d.area();
            case annular: return a.area();
            case cyl: return c.area();
            default: return s.area();
        }
    }
};

inline Point3 any_perpendicular(Point3 w) {
    Point3 pick = std::fabs(w.x) < 0.9 ? Point3{1, 0, 0} : Point3{0, 1, 0};
    Point3 u = cross(w, pick);
    double n = u.norm();
    return (1.0 / n) * u;
}

inline void add_box_faces(std::vector<Face>& faces, const BoxShape& b) {
    double hw = 0.5 * b.width, hd = 0.5 * b.depth, hh = 0.5 * b.height;
    auto add = [&](Point3 center, Point3 u, double hu, Point3 v, double hv, Point3 n) {
        Face f;
        f.kind = Face::rect;
        f.r = {center, u, v, n, hu, hv};
        faces.push_back(f);
    };
    add({hw, 0, 0}, {0, 1, 0}, hd, {0, 0, 1}, hh, {1, 0, 0});
    add({-hw, 0, 0}, {0, 1, 0}, hd, {0, 0, 1}, hh, {-1, 0, 0});
    add({0, hd, 0}, {1, 0, 0}, hw, {0, 0, 1}, hh, {0, 1, 0});
    add({0, -hd, 0}, {1, 0, 0}, hw, {0, 0, 1}, hh, {0, -1, 0});
    add({0, 0, hh}, {1, 0, 0}, hw, {0, 1, 0}, hd, {0, 0, 1});
    add({0, 0, -hh}, {1, 0, 0}, hw, {0, 1, 0}, hd, {0, 0, -1});
}

inline void add_cylinder_faces(std::vector<Face>& faces, const CylinderShape& cy) {
    double hl = 0.5 * cy.length;
    Face lateral;
    lateral.kind = Face::cyl;
    lateral.c = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                 cy.radius, -kPi, kPi, -hl, hl, 1.0};
    faces.push_back(lateral);
    Face cap;
    cap.kind = Face::disk;
    cap.d = {{hl, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}, cy.radius};
    faces.push_back(cap);
    cap.d = {{-hl, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, cy.radius};
    faces.push_back(cap);
}

inline void add_plate_faces(std::vector<Face>& faces, const CurvedPlateShape& p) {
    double hl = 0.5 * p.length, ht = 0.5 * p.thickness;
    if (p.curvature_depth <= detail::kFlatCurvature) {
        add_box_faces(faces, BoxShape{p.length, p.width, p.thickness});
        return;
    }
    double arc_r = detail::plate_arc_radius(p.width, p.curvature_depth);
    double theta = detail::plate_arc_half_angle(p.width, p.curvature_depth);
    Point3 arc_center{0, 0, arc_r};
    Point3 axis{1, 0, 0};
    Point3 u{0, 0, -1};  // phi = 0 points at the trough bottom
    Point3 v{0, 1, 0};

    Face outer;
    outer.kind = Face::cyl;
    outer.c = {arc_center, axis, u, v, arc_r + ht, -theta, theta, -hl, hl, 1.0};
    faces.push_back(outer);
    Face inner;
    inner.kind = Face::cyl;
    inner.c = {arc_center, axis, u, v, arc_r - ht, -theta, theta, -hl, hl, -1.0};
    faces.push_back(inner);

    Face end;
    end.kind = Face::annular;
    end.a = {arc_center + hl * axis, u, v, {1, 0, 0}, arc_r - ht, arc_r + ht,
             -theta, theta};
    faces.push_back(end);
    end.a = {arc_center + (-hl) * axis, u, v, {-1, 0, 0}, arc_r - ht, arc_r + ht,
             -theta, theta};
    faces.push_back(end);

    // Straight edge bands where the arc stops, at y = +-width/2.
    double st = std::sin(theta), ct = std::cos(theta);
    auto edge_center = [&](double sign) {
        return arc_center + arc_r * (Point3{0, 0, -ct} + Point3{0, sign * st, 0});
    };
    Face band;
    band.kind = Face::rect;
    band.r = {edge_center(+1.0), {1, 0, 0}, {0, st, -ct}, {0, ct, st}, hl, ht};
    faces.push_back(band);
    band.r = {edge_center(-1.0), {1, 0, 0}, {0, -st, -ct}, {0, -ct, st}, hl, ht};
    faces.push_back(band);
}

inline std::vector<Face> enumerate_faces(const Shape& shape) {
    std::vector<Face> faces;
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
        add_box_faces(faces, *b);
    } else if (const auto* cy = std::get_if<CylinderShape>(&shape)) {
        add_cylinder_faces(faces, *cy);
    } else if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        add_plate_faces(faces, *p);
    } else {
        Face f;
        f.kind = Face::sphere;
        f.s = {{0, 0, 0}, std::get<SphereShape>(shape).radius};
        faces.push_back(f);
    }
    return faces;
}

}  // namespace sampling_detail

// Draws exactly n points, uniform by area over the solid's surface (or, with
// a culling view, over the subset whose outward normal faces the camera).
// The stream of draws is a pure function of `seed`, so equal seeds give
// bit-identical clouds on any thread count. Labels are set to the part name.
inline PointCloud sample_surface(const PartSolid& solid, std::size_t n,
                                 std::uint64_t seed,
                                 const std::optional<ViewSpec>& view = std::nullopt) {
    using namespace sampling_detail;
    validate_shape(solid.shape);

    const bool cull = view.has_value() && view->cull_backfaces;
    Point3 dir_local{};
    if (view.has_value()) {
        double nn = view->camera_direction.norm();
        if (!view->camera_direction.finite() || std::fabs(nn - 1.0) > 1e-9)
            throw ConfigError("view camera_direction must be a unit vector");
        Point3 d = (1.0 / nn) * view->camera_direction;
        // Faces live in the part frame; pull the view direction back through
        // the pose rotation (orthonormal, so transpose = inverse).
        const Mat3& rot = solid.pose.rotation;
        dir_local = {rot.c0.dot(d), rot.c1.dot(d), rot.c2.dot(d)};
    }

    std::vector<Face> faces = enumerate_faces(solid.shape);

    // Per-face sampleable measure, plus per-face visible arc spans for
    // cylindrical patches.
    struct Entry {
        const Face* face;
        double measure;
        std::vector<CylSectorFace::ArcSpan> spans;
    };
    std::vector<Entry> entries;
    double total = 0.0;
    for (const Face& f : faces) {
        Entry e{&f, 0.0, {}};
        if (!cull) {
            e.measure = f.area();
        } else {
            switch (f.kind) {
                case Face::rect:
                    e.measure = f.r.normal.dot(dir_local) < 0.0 ? f.r.area() : 0.0;
                    break;
                case Face::disk:
                    e.measure = f.d.normal.dot(dir_local) < 0.0 ? f.d.area() : 0.0;
                    break;
                case Face::annular:
                    e.measure = f.a.normal.dot(dir_local) < 0.0 ? f.a.area() : 0.0;
                    break;
                case Face::cyl: {
                    e.spans = f.c.visible_spans(dir_local);
                    double arc = 0.0;
                    for (const auto& s : e.spans) arc += s.len();
                    e.measure = f.c.radius * arc * (f.c.h1 - f.c.h0);
                    break;
                }
                case Face::sphere:
                    e.measure = 0.5 * f.s.area();
                    break;
            }
        }
        total += e.measure;
        entries.push_back(std::move(e));
    }

    if (!(surface_area(solid.shape) > 0.0)) throw EmptySurface();
    if (cull && !(total > 0.0)) throw NoVisibleSurface();

    // Hemisphere basis for culled spheres, fixed per call.
    Point3 e1{}, e2{}, e3{};
    if (cull) {
        e3 = -1.0 * dir_local;
        double n3 = e3.norm();
        if (n3 > 0.0) {
            e3 = (1.0 / n3) * e3;
            e1 = any_perpendicular(e3);
            e2 = cross(e3, e1);
        }
    }

    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.part_labels.assign(n, solid.name);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        // Area-weighted face pick.
        double pick = rng.next_double() * total;
        std::size_t fi = 0;
        for (; fi + 1 < entries.size(); ++fi) {
            if (pick < entries[fi].measure) break;
            pick -= entries[fi].measure;
        }
        while (entries[fi].measure <= 0.0) {
            // Guard against landing on a zero-measure face through rounding.
            fi = (fi + 1) % entries.size();
        }
        const Entry& e = entries[fi];
        const Face& f = *e.face;
        SamplePoint sp;
        switch (f.kind) {
            case Face::rect: sp = f.r.sample(rng); break;
            case Face::disk: sp = f.d.sample(rng); break;
            case Face::annular: sp = f.a.sample(rng); break;
            case Face::cyl: {
                if (!cull) {
                    sp = f.c.sample(rng);
                } else {
                    double t = rng.next_double() * e.measure /
                               (f.c.radius * (f.c.h1 - f.c.h0));
                    std::size_t si = 0;
                    for (; si + 1 < e.spans.size(); ++si) {
                        if (t < e.spans[si].len()) break;
                        t -= e.spans[si].len();
                    }
                    sp = f.c.sample_in(rng, e.spans[si].a, e.spans[si].b);
                }
                break;
            }
            case Face::sphere:
                sp = cull ? f.s.sample_hemisphere(rng, e1, e2, e3) : f.s.sample(rng);
                break;
        }
        cloud.points.push_back(solid.pose.apply(sp.position));
    }
    return cloud;
}

}  // namespace toolforge
