#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "toolforge/geometry/chamfer.hpp"
#include "toolforge/geometry/kd_tree.hpp"
#include "toolforge/geometry/point_cloud.hpp"

using namespace toolforge;

TEST_CASE("chamfer of two singletons is the plain distance") {
    PointCloud a, b;
    a.points = {{0, 0, 0}};
    b.points = {{1, 0, 0}};
    CHECK(chamfer_distance(a, b) == 1.0);
}

TEST_CASE("chamfer is zero on an identical cloud") {
    Rng rng(7);
    for (int i = 0; i < 5; ++i) {
        PointCloud p = oracle::random_cloud(rng, 40 + 30 * i);
        CHECK(chamfer_distance(p, p) == 0.0);
    }
}

TEST_CASE("chamfer is exactly symmetric") {
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
        PointCloud a = oracle::random_cloud(rng, 17 + 41 * i);
        PointCloud b = oracle::random_cloud(rng, 211 - 13 * i);
        CHECK(chamfer_distance(a, b) == chamfer_distance(b, a));
    }
}

TEST_CASE("chamfer agrees with the O(nm) double loop") {
    Rng rng(13);
    for (int i = 0; i < 40; ++i) {
        std::size_t na = 1 + rng.uniform_index(120);
        std::size_t nb = 1 + rng.uniform_index(120);
        PointCloud a = oracle::random_cloud(rng, na);
        PointCloud b = oracle::random_cloud(rng, nb);
        double fast = chamfer_distance(a, b);
        double slow = oracle::chamfer_brute(a, b);
        CHECK(fast == Catch::Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("chamfer is unchanged under a common translation") {
    Rng rng(17);
    PointCloud a = oracle::random_cloud(rng, 150);
    PointCloud b = oracle::random_cloud(rng, 90);
    Point3 t{3.25, -1.5, 0.75};
    double base = chamfer_distance(a, b);
    double moved = chamfer_distance(a.translated(t), b.translated(t));
    CHECK(moved == Catch::Approx(base).epsilon(1e-9));
}

TEST_CASE("chamfer rejects empty clouds") {
    PointCloud a, b;
    a.points = {{0, 0, 0}};
    CHECK_THROWS_AS(chamfer_distance(a, b), EmptyCloud);
    CHECK_THROWS_AS(chamfer_distance(b, a), EmptyCloud);
}

TEST_CASE("prebuilt-index chamfer equals the two-argument form") {
    Rng rng(23);
    PointCloud target = oracle::random_cloud(rng, 300);
    KdTree tree(target);
    for (int i = 0; i < 8; ++i) {
        PointCloud probe = oracle::random_cloud(rng, 5 + 60 * i);
        CHECK(chamfer_distance(probe, target, tree) ==
              chamfer_distance(probe, target));
    }
}

TEST_CASE("nearest point on a two-point cloud") {
    PointCloud cloud;
    cloud.points = {{1, 0, 0}, {0, 2, 0}};
    NearestNeighbor nn = nearest_point({0, 0, 0}, cloud);
    CHECK(nn.point == Point3{1, 0, 0});
    CHECK(nn.index == 0);
    CHECK(nn.dist == 1.0);
}

TEST_CASE("nearest point on a member of the cloud is itself") {
    Rng rng(29);
    PointCloud cloud = oracle::random_cloud(rng, 64);
    cloud.points.push_back(cloud.points[10]);  // duplicate; first wins
    NearestNeighbor nn = nearest_point(cloud.points[10], cloud);
    CHECK(nn.dist == 0.0);
    CHECK(nn.index == 10);
}

TEST_CASE("nearest point rejects an empty cloud") {
    PointCloud empty;
    CHECK_THROWS_AS(nearest_point({0, 0, 0}, empty), EmptyCloud);
}

TEST_CASE("kd-tree equals the linear scan, ties included") {
    Rng rng(31);
    // Lattice coordinates force exact duplicates and equal-distance pairs;
    // the index must still return the lowest index, like the scan.
    for (std::size_t n : {5, 33, 64, 257, 700}) {
        PointCloud cloud = oracle::lattice_cloud(rng, n, 5);
        KdTree tree(cloud);
        for (int q = 0; q < 200; ++q) {
            Point3 query{0.5 * static_cast<double>(rng.uniform_index(7)),
                         0.5 * static_cast<double>(rng.uniform_index(7)),
                         0.5 * static_cast<double>(rng.uniform_index(7))};
            NearestNeighbor fast = tree.nearest(query);
            NearestNeighbor slow = nearest_point_linear(cloud, query);
            CHECK(fast.index == slow.index);
            CHECK(fast.dist == slow.dist);
        }
        for (int q = 0; q < 100; ++q) {
            Point3 query{rng.uniform(-2, 4), rng.uniform(-2, 4), rng.uniform(-2, 4)};
            NearestNeighbor fast = tree.nearest(query);
            NearestNeighbor slow = nearest_point_linear(cloud, query);
            CHECK(fast.index == slow.index);
            CHECK(fast.dist == slow.dist);
        }
    }
}

TEST_CASE("centroid alignment recovers a pure shift") {
    Rng rng(37);
    PointCloud target = oracle::random_cloud(rng, 80);
    PointCloud source = target.translated({-1.0, -2.0, -3.0});
    AlignResult r = centroid_align(source, target);
    CHECK(r.shift.x == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.shift.y == Catch::Approx(2.0).margin(1e-9));
    CHECK(r.shift.z == Catch::Approx(3.0).margin(1e-9));
    CHECK(chamfer_distance(r.aligned, target) < 1e-9);
}

TEST_CASE("centroid alignment of a cloud onto itself is the zero shift") {
    Rng rng(41);
    PointCloud p = oracle::random_cloud(rng, 50);
    AlignResult r = centroid_align(p, p);
    CHECK(r.shift == Point3{0, 0, 0});
}

TEST_CASE("aligned centroid lands on the target centroid") {
    Rng rng(43);
    for (int i = 0; i < 10; ++i) {
        PointCloud a = oracle::random_cloud(rng, 30 + 20 * i, -5, 2);
        PointCloud b = oracle::random_cloud(rng, 120 - 7 * i, 0, 9);
        AlignResult r = centroid_align(a, b);
        CHECK(distance(r.aligned.centroid(), b.centroid()) < 1e-9);
    }
}

TEST_CASE("cloud text round-trips coordinates and labels") {
    Rng rng(47);
    PointCloud cloud = oracle::random_cloud(rng, 200, -3, 3);
    cloud.part_labels.assign(200, "");
    for (std::size_t i = 0; i < cloud.size(); ++i)
        cloud.part_labels[i] = i % 2 ? "blade" : "shaft";

    std::stringstream ss;
    write_cloud(ss, cloud);
    PointCloud back = read_cloud(ss, "buffer");

    REQUIRE(back.size() == cloud.size());
    REQUIRE(back.has_labels());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(distance(back.points[i], cloud.points[i]) < 1e-9);
        CHECK(back.part_labels[i] == cloud.part_labels[i]);
    }
}

TEST_CASE("cloud reader skips comments and blank lines") {
    std::stringstream ss;
    ss << "# leading comment\n"
       << "\n"
       << "1.0 2.0 3.0\n"
       << "4.0 5.0 6.0 head  # trailing comment\n";
    PointCloud c = read_cloud(ss);
    REQUIRE(c.size() == 2);
    CHECK(c.points[1] == Point3{4.0, 5.0, 6.0});
    REQUIRE(c.has_labels());
    CHECK(c.part_labels[0] == "");
    CHECK(c.part_labels[1] == "head");
}

TEST_CASE("cloud reader reports the offending line") {
    std::stringstream ss;
    ss << "0 0 0\n"
       << "1.0 2.0\n";
    try {
        read_cloud(ss, "bad.xyz");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bad.xyz:2") != std::string::npos);
    }
}

TEST_CASE("cloud reader rejects non-finite coordinates") {
    std::stringstream ss;
    ss << "0 nan 0\n";
    CHECK_THROWS_AS(read_cloud(ss), Error);
}

TEST_CASE("cloud file round-trip") {
    Rng rng(53);
    PointCloud cloud = oracle::random_cloud(rng, 64);
    std::string path = "roundtrip_tmp.xyz";
    write_cloud_file(path, cloud);
    PointCloud back = read_cloud_file(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(distance(back.points[i], cloud.points[i]) < 1e-9);
    CHECK_FALSE(back.has_labels());
}
