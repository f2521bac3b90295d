#pragma once

#include <cmath>

namespace toolforge {

// Cartesian point / vector, meters. Plain doubles throughout; every operation
// is an exact IEEE expression so equal inputs give bit-equal outputs.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Point3 operator*(double s, Point3 p) { return {s * p.x, s * p.y, s * p.z}; }
    friend Point3 operator*(Point3 p, double s) { return {s * p.x, s * p.y, s * p.z}; }
    Point3& operator+=(Point3 o) { x += o.x; y += o.y; z += o.z; return *this; }
    friend bool operator==(Point3 a, Point3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

    double dot(Point3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance2(Point3 a, Point3 b) { return (a - b).norm2(); }
inline double distance(Point3 a, Point3 b) { return (a - b).norm(); }

inline Point3 cross(Point3 a, Point3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Column-major 3x3 rotation. Only what the tool families need: principal-axis
// rotations and composition.
struct Mat3 {
    // m[c] is column c.
    Point3 c0{1, 0, 0}, c1{0, 1, 0}, c2{0, 0, 1};

    Point3 apply(Point3 v) const { return v.x * c0 + v.y * c1 + v.z * c2; }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        return {a.apply(b.c0), a.apply(b.c1), a.apply(b.c2)};
    }
    friend bool operator==(const Mat3& a, const Mat3& b) {
        return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2;
    }

    static Mat3 identity() { return {}; }
    static Mat3 rot_x(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{1, 0, 0}, {0, c, s}, {0, -s, c}};
    }
    static Mat3 rot_y(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{c, 0, -s}, {0, 1, 0}, {s, 0, c}};
    }
    static Mat3 rot_z(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{c, s, 0}, {-s, c, 0}, {0, 0, 1}};
    }
};

// Rigid placement of a part in the tool frame.
struct Transform {
    Mat3 rotation;
    Point3 translation;

    Point3 apply(Point3 p) const { return rotation.apply(p) + translation; }
    // Rotation only; for directions and normals.
    Point3 apply_dir(Point3 v) const { return rotation.apply(v); }

    friend bool operator==(const Transform& a, const Transform& b) {
        return a.rotation == b.rotation && a.translation == b.translation;
    }
};

}  // namespace toolforge
