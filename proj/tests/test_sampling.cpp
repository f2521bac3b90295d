#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "toolforge/shape/part_solid.hpp"
#include "toolforge/shape/surface_sampling.hpp"

using namespace toolforge;

namespace {

constexpr double kEps = 1e-9;

// True when p (part-local) lies on the boundary of the shape, within eps.
bool on_boundary(const Shape& shape, Point3 p, double eps = kEps) {
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
        double hx = 0.5 * b->width, hy = 0.5 * b->depth, hz = 0.5 * b->height;
        bool inside = std::fabs(p.x) <= hx + eps && std::fabs(p.y) <= hy + eps &&
                      std::fabs(p.z) <= hz + eps;
        bool on_face = std::fabs(std::fabs(p.x) - hx) <= eps ||
                       std::fabs(std::fabs(p.y) - hy) <= eps ||
                       std::fabs(std::fabs(p.z) - hz) <= eps;
        return inside && on_face;
    }
    if (const auto* c = std::get_if<CylinderShape>(&shape)) {
        double hl = 0.5 * c->length;
        double rho = std::hypot(p.y, p.z);
        bool lateral = std::fabs(rho - c->radius) <= eps && std::fabs(p.x) <= hl + eps;
        bool cap = std::fabs(std::fabs(p.x) - hl) <= eps && rho <= c->radius + eps;
        return lateral || cap;
    }
    if (const auto* s = std::get_if<SphereShape>(&shape))
        return std::fabs(p.norm() - s->radius) <= eps;

    const auto& pl = std::get<CurvedPlateShape>(shape);
    double hl = 0.5 * pl.length, ht = 0.5 * pl.thickness;
    if (pl.curvature_depth <= 1e-12)
        return on_boundary(BoxShape{pl.length, pl.width, pl.thickness}, p, eps);
    double R = detail::plate_arc_radius(pl.width, pl.curvature_depth);
    double theta = detail::plate_arc_half_angle(pl.width, pl.curvature_depth);
    double rho = std::hypot(p.y, R - p.z);
    double phi = std::atan2(p.y, R - p.z);
    if (std::fabs(p.x) > hl + eps) return false;
    bool in_arc = std::fabs(phi) <= theta + eps;
    bool outer = std::fabs(rho - (R + ht)) <= eps && in_arc;
    bool inner = std::fabs(rho - (R - ht)) <= eps && in_arc;
    bool end = std::fabs(std::fabs(p.x) - hl) <= eps && rho >= R - ht - eps &&
               rho <= R + ht + eps && in_arc;
    bool band = std::fabs(std::fabs(phi) - theta) * rho <= eps &&
                std::fabs(rho - R) <= ht + eps;
    return outer || inner || end || band;
}

}  // namespace

TEST_CASE("every sample of a unit sphere sits at radius one") {
    PartSolid ball{"ball", SphereShape{1.0}, {}};
    PointCloud cloud = sample_surface(ball, 1000, 99);
    REQUIRE(cloud.size() == 1000);
    for (const Point3& p : cloud.points)
        CHECK(std::fabs(p.norm() - 1.0) <= kEps);
}

TEST_CASE("cube faces collect equal point shares") {
    PartSolid cube{"cube", BoxShape{1.0, 1.0, 1.0}, {}};
    PointCloud cloud = sample_surface(cube, 6000, 7);
    REQUIRE(cloud.size() == 6000);

    std::map<int, int> face_counts;
    for (const Point3& p : cloud.points) {
        REQUIRE(on_boundary(cube.shape, p));
        int face = -1;
        if (std::fabs(p.x - 0.5) <= kEps) face = 0;
        else if (std::fabs(p.x + 0.5) <= kEps) face = 1;
        else if (std::fabs(p.y - 0.5) <= kEps) face = 2;
        else if (std::fabs(p.y + 0.5) <= kEps) face = 3;
        else if (std::fabs(p.z - 0.5) <= kEps) face = 4;
        else if (std::fabs(p.z + 0.5) <= kEps) face = 5;
        REQUIRE(face >= 0);
        ++face_counts[face];
    }
    // Binomial(6000, 1/6): mean 1000, sigma ~28.9; allow 5 sigma.
    for (int f = 0; f < 6; ++f) {
        CHECK(face_counts[f] > 1000 - 145);
        CHECK(face_counts[f] < 1000 + 145);
    }
}

TEST_CASE("a straight-down view of a cube samples only the top face") {
    PartSolid cube{"cube", BoxShape{1.0, 1.0, 1.0}, {}};
    ViewSpec view{{0.0, 0.0, -1.0}, true};
    PointCloud cloud = sample_surface(cube, 500, 21, view);
    REQUIRE(cloud.size() == 500);
    for (const Point3& p : cloud.points) CHECK(p.z >= 0.5 - kEps);
}

TEST_CASE("a diagonal view of a cube samples exactly the three facing sides") {
    PartSolid cube{"cube", BoxShape{2.0, 2.0, 2.0}, {}};
    double inv = -1.0 / std::sqrt(3.0);
    ViewSpec view{{inv, inv, inv}, true};
    PointCloud cloud = sample_surface(cube, 3000, 33, view);
    int hi_x = 0, hi_y = 0, hi_z = 0;
    for (const Point3& p : cloud.points) {
        bool fx = std::fabs(p.x - 1.0) <= kEps;
        bool fy = std::fabs(p.y - 1.0) <= kEps;
        bool fz = std::fabs(p.z - 1.0) <= kEps;
        REQUIRE((fx || fy || fz));  // never the -x/-y/-z faces
        hi_x += fx;
        hi_y += fy;
        hi_z += fz;
    }
    // Equal visible areas; binomial(3000, 1/3) sigma ~25.8, allow 5 sigma.
    for (int count : {hi_x, hi_y, hi_z}) {
        CHECK(count > 1000 - 130);
        CHECK(count < 1000 + 130);
    }
}

TEST_CASE("cylinder samples lie on the lateral wall or the caps") {
    PartSolid rod{"rod", CylinderShape{0.35, 2.0}, {}};
    PointCloud cloud = sample_surface(rod, 4000, 5);
    for (const Point3& p : cloud.points) REQUIRE(on_boundary(rod.shape, p));

    // Area split: lateral 2*pi*r*L vs caps 2*pi*r^2 -> ratio L : r.
    int lateral = 0;
    for (const Point3& p : cloud.points)
        lateral += std::fabs(std::hypot(p.y, p.z) - 0.35) <= kEps &&
                   std::fabs(p.x) < 1.0 - kEps;
    double expect = 2.0 / (2.0 + 0.35);
    double got = lateral / 4000.0;
    CHECK(std::fabs(got - expect) < 0.035);
}

TEST_CASE("curved plate samples lie on its six boundary patches") {
    PartSolid bowl{"bowl", CurvedPlateShape{0.10, 0.08, 0.004, 0.010}, {}};
    PointCloud cloud = sample_surface(bowl, 3000, 17);
    REQUIRE(cloud.size() == 3000);
    for (const Point3& p : cloud.points) REQUIRE(on_boundary(bowl.shape, p));
}

TEST_CASE("a flat plate degenerates to a box") {
    PartSolid flat{"flat", CurvedPlateShape{0.2, 0.1, 0.01, 0.0}, {}};
    PointCloud cloud = sample_surface(flat, 800, 3);
    for (const Point3& p : cloud.points)
        REQUIRE(on_boundary(BoxShape{0.2, 0.1, 0.01}, p));
}

TEST_CASE("a side view of a curved plate culls the hidden arc wall") {
    PartSolid bowl{"bowl", CurvedPlateShape{0.10, 0.08, 0.004, 0.010}, {}};
    // Looking straight down: the concave inner wall faces up and is fully
    // visible; the convex outer wall faces down and is fully hidden.
    ViewSpec view{{0.0, 0.0, -1.0}, true};
    PointCloud cloud = sample_surface(bowl, 2000, 9, view);
    double R = detail::plate_arc_radius(0.08, 0.010);
    double theta = detail::plate_arc_half_angle(0.08, 0.010);
    int inner_count = 0;
    for (const Point3& p : cloud.points) {
        double rho = std::hypot(p.y, R - p.z);
        double phi = std::atan2(p.y, R - p.z);
        // Only the concave wall and the two thin edge bands face the camera;
        // the convex wall and the end faces must never appear.
        bool inner = std::fabs(rho - (R - 0.002)) <= kEps;
        bool band = std::fabs(std::fabs(phi) - theta) * rho <= kEps;
        REQUIRE((inner || band));
        inner_count += inner;
    }
    CHECK(inner_count > 1500);  // the concave wall dominates the visible area
}

TEST_CASE("sampling respects the part pose") {
    Transform pose{Mat3::rot_z(1.0), {5.0, -2.0, 1.0}};
    PartSolid rod{"rod", CylinderShape{0.1, 1.0}, pose};
    PointCloud cloud = sample_surface(rod, 600, 13);
    // Undo the pose and check against the local shape.
    for (const Point3& p : cloud.points) {
        Point3 d = p - pose.translation;
        Point3 local{pose.rotation.c0.dot(d), pose.rotation.c1.dot(d),
                     pose.rotation.c2.dot(d)};
        REQUIRE(on_boundary(rod.shape, local));
    }
}

TEST_CASE("equal seeds give bit-identical clouds") {
    PartSolid bowl{"bowl", CurvedPlateShape{0.10, 0.08, 0.004, 0.010}, {}};
    PointCloud a = sample_surface(bowl, 1500, 12345);
    PointCloud b = sample_surface(bowl, 1500, 12345);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);

    ViewSpec view{{0.0, 0.0, -1.0}, true};
    PointCloud c = sample_surface(bowl, 700, 9, view);
    PointCloud d = sample_surface(bowl, 700, 9, view);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.points[i] == d.points[i]);
}

TEST_CASE("different seeds give different clouds") {
    PartSolid cube{"cube", BoxShape{1, 1, 1}, {}};
    PointCloud a = sample_surface(cube, 100, 1);
    PointCloud b = sample_surface(cube, 100, 2);
    bool all_equal = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a.points[i] == b.points[i])) all_equal = false;
    CHECK_FALSE(all_equal);
}

TEST_CASE("samples carry the part name as label") {
    PartSolid cube{"lid", BoxShape{1, 1, 1}, {}};
    PointCloud cloud = sample_surface(cube, 50, 2);
    REQUIRE(cloud.has_labels());
    REQUIRE(cloud.part_labels.size() == 50);
    CHECK(cloud.part_labels.front() == "lid");
    CHECK(cloud.part_labels.back() == "lid");
}

TEST_CASE("view directions must be unit vectors") {
    PartSolid cube{"cube", BoxShape{1, 1, 1}, {}};
    ViewSpec bad{{0.0, 0.0, -2.0}, true};
    CHECK_THROWS_AS(sample_surface(cube, 10, 1, bad), ConfigError);
}

TEST_CASE("degenerate shape parameters are rejected") {
    PartSolid zero{"zero", BoxShape{0.0, 1.0, 1.0}, {}};
    CHECK_THROWS_AS(sample_surface(zero, 10, 1), NonPositiveDimension);
    PartSolid deep{"deep", CurvedPlateShape{0.1, 0.08, 0.004, 0.05}, {}};
    CHECK_THROWS_AS(sample_surface(deep, 10, 1), Error);
}
