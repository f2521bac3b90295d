#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "../errors.hpp"
#include "../geometry/point.hpp"

namespace toolforge {

// Shape parameter structs live in the part's local frame, centered so that a
// part's pose translation places its centroid-ish reference point.
//
// box: extents along local x/y/z.
struct BoxShape {
    double width;
    double depth;
    double height;
    bool operator==(const BoxShape&) const = default;
};

// cylinder: axis along local x, centered; x in [-length/2, length/2].
struct CylinderShape {
    double radius;
    double length;
    bool operator==(const CylinderShape&) const = default;
};

// curved_plate: a plate of length (local x, centered) and chord width (local
// y, centered), bent across its width into a circular trough opening toward
// +z. curvature_depth is the sagitta of the mid-surface: 0 means flat, width/2
// means a half-pipe. thickness is measured along the surface normal.
struct CurvedPlateShape {
    double length;
    double width;
    double thickness;
    double curvature_depth;
    bool operator==(const CurvedPlateShape&) const = default;
};

// sphere: not used by any tool family; kept so generic geometry code and its
// documented behaviors can be exercised on a closed curved surface.
struct SphereShape {
    double radius;
    bool operator==(const SphereShape&) const = default;
};

using Shape = std::variant<BoxShape, CylinderShape, CurvedPlateShape, SphereShape>;

struct PartSolid {
    std::string name;
    Shape shape;
    Transform pose;

    friend bool operator==(const PartSolid& a, const PartSolid& b) {
        return a.name == b.name && a.shape == b.shape && a.pose == b.pose;
    }
};

namespace detail {
inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositiveDimension(what);
}

// Mid-surface arc radius for a curved plate: chord width w, sagitta c.
inline double plate_arc_radius(double w, double c) {
    return (c * c + 0.25 * w * w) / (2.0 * c);
}

// Half-angle of the arc.
inline double plate_arc_half_angle(double w, double c) {
    return std::asin(0.5 * w / plate_arc_radius(w, c));
}

constexpr double kFlatCurvature = 1e-12;
}  // namespace detail

inline void validate_shape(const Shape& shape) {
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
        detail::require_positive(b->width, "box width");
        detail::require_positive(b->depth, "box depth");
        detail::require_positive(b->height, "box height");
    } else if (const auto* c = std::get_if<CylinderShape>(&shape)) {
        detail::require_positive(c->radius, "cylinder radius");
        detail::require_positive(c->length, "cylinder length");
    } else if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        detail::require_positive(p->length, "curved_plate length");
        detail::require_positive(p->width, "curved_plate width");
        detail::require_positive(p->thickness, "curved_plate thickness");
        if (!(p->curvature_depth >= 0.0) || !std::isfinite(p->curvature_depth))
            throw NonPositiveDimension("curved_plate curvature_depth");
        if (p->curvature_depth > 0.5 * p->width)
            throw Error("curved_plate curvature_depth exceeds width/2");
    } else if (const auto* s = std::get_if<SphereShape>(&shape)) {
        detail::require_positive(s->radius, "sphere radius");
    }
}

struct Aabb {
    Point3 lo;
    Point3 hi;
    Point3 size() const { return hi - lo; }
};

// Axis-aligned bounds of the shape in its local frame. Keypoint local
// coordinates are normalized against this box.
inline Aabb local_bounds(const Shape& shape) {
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
        Point3 h{0.5 * b->width, 0.5 * b->depth, 0.5 * b->height};
        return {{-h.x, -h.y, -h.z}, h};
    }
    if (const auto* c = std::get_if<CylinderShape>(&shape)) {
        return {{-0.5 * c->length, -c->radius, -c->radius},
                {0.5 * c->length, c->radius, c->radius}};
    }
    if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        double zmax;
        if (p->curvature_depth <= detail::kFlatCurvature) {
            zmax = 0.5 * p->thickness;
        } else {
            double theta = detail::plate_arc_half_angle(p->width, p->curvature_depth);
            zmax = p->curvature_depth + 0.5 * p->thickness * std::cos(theta);
        }
        return {{-0.5 * p->length, -0.5 * p->width, -0.5 * p->thickness},
                {0.5 * p->length, 0.5 * p->width, zmax}};
    }
    const auto& s = std::get<SphereShape>(shape);
    return {{-s.radius, -s.radius, -s.radius}, {s.radius, s.radius, s.radius}};
}

inline double surface_area(const Shape& shape) {
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
        return 2.0 * (b->width * b->depth + b->width * b->height + b->depth * b->height);
    }
    if (const auto* c = std::get_if<CylinderShape>(&shape)) {
        const double pi = 3.14159265358979323846;
        return 2.0 * pi * c->radius * c->length + 2.0 * pi * c->radius * c->radius;
    }
    if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        if (p->curvature_depth <= detail::kFlatCurvature) {
            return 2.0 * (p->length * p->width + p->length * p->thickness +
                          p->width * p->thickness);
        }
        double r = detail::plate_arc_radius(p->width, p->curvature_depth);
        double theta = detail::plate_arc_half_angle(p->width, p->curvature_depth);
        double t = p->thickness;
        double inner = 2.0 * theta * (r - 0.5 * t) * p->length;
        double outer = 2.0 * theta * (r + 0.5 * t) * p->length;
        double ends = 2.0 * (2.0 * theta * r * t);  // two annular sectors
        double edges = 2.0 * (p->length * t);       // two straight bands
        return inner + outer + ends + edges;
    }
    const auto& s = std::get<SphereShape>(shape);
    const double pi = 3.14159265358979323846;
    return 4.0 * pi * s.radius * s.radius;
}

inline double volume(const Shape& shape) {
    if (const auto* b = std::get_if<BoxShape>(&shape))
        return b->width * b->depth * b->height;
    if (const auto* c = std::get_if<CylinderShape>(&shape)) {
        const double pi = 3.14159265358979323846;
        return pi * c->radius * c->radius * c->length;
    }
    if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        if (p->curvature_depth <= detail::kFlatCurvature)
            return p->length * p->width * p->thickness;
        double r = detail::plate_arc_radius(p->width, p->curvature_depth);
        double theta = detail::plate_arc_half_angle(p->width, p->curvature_depth);
        return 2.0 * theta * r * p->thickness * p->length;
    }
    const auto& s = std::get<SphereShape>(shape);
    const double pi = 3.14159265358979323846;
    return 4.0 / 3.0 * pi * s.radius * s.radius * s.radius;
}

// Local-frame centroid (solid, uniform density).
inline Point3 local_centroid(const Shape& shape) {
    if (const auto* p = std::get_if<CurvedPlateShape>(&shape)) {
        if (p->curvature_depth > detail::kFlatCurvature) {
            // Centroid of a thin circular-arc shell: z = R - R*sin(theta)/theta
            // below the arc center; exact enough for mass bookkeeping.
            double r = detail::plate_arc_radius(p->width, p->curvature_depth);
            double theta = detail::plate_arc_half_angle(p->width, p->curvature_depth);
            double z = r - r * std::sin(theta) / theta;
            return {0.0, 0.0, z};
        }
        return {0.0, 0.0, 0.0};
    }
    return {0.0, 0.0, 0.0};
}

}  // namespace toolforge
