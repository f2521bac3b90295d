#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "toolforge/shape/edits.hpp"
#include "toolforge/shape/families.hpp"
#include "toolforge/shape/tool_model.hpp"

using namespace toolforge;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

ToolModel default_stick() {
    return make_source_tool("stick", default_dimensions("stick"));
}
ToolModel default_scoop() {
    return make_source_tool("scoop", default_dimensions("scoop"));
}
ToolModel default_platform() {
    return make_source_tool("platform", default_dimensions("platform"));
}

Point3 world_keypoint(const ToolModel& tool, const std::string& name) {
    for (const auto& [n, p] : keypoint_positions(tool))
        if (n == name) return p;
    throw std::runtime_error("no keypoint " + name);
}

// Angle between the +x axis and a part's local x axis, in degrees.
double part_x_angle_deg(const ToolModel& tool, const std::string& part) {
    const PartSolid* p = tool.find_part(part);
    REQUIRE(p != nullptr);
    double c = p->pose.rotation.c0.x;
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c) / kDeg;
}

}  // namespace

TEST_CASE("family registry exposes three families with fixed feature sets") {
    REQUIRE(all_families().size() == 3);

    const FamilyDef& stick = find_family("stick");
    REQUIRE(stick.features.size() == 7);
    const FeatureSpec& angle = find_feature(stick, "blade_shaft_angle");
    CHECK_FALSE(angle.multiplicative);
    CHECK(angle.lo == 30.0);
    CHECK(angle.hi == 170.0);
    CHECK(angle.default_value == 120.0);
    const FeatureSpec& mass = find_feature(stick, "mass_kg");
    CHECK(mass.physical);
    CHECK(mass.multiplicative);
    CHECK(mass.lo == 0.25);
    CHECK(mass.hi == 8.0);
    const FeatureSpec& len = find_feature(stick, "shaft_length");
    CHECK(len.lo == 0.25);
    CHECK(len.hi == 2.35);
    CHECK(len.default_value == 1.0);
    CHECK_FALSE(len.physical);

    const FamilyDef& scoop = find_family("scoop");
    REQUIRE(scoop.features.size() == 7);
    CHECK(find_feature(scoop, "handle_to_head_angle").lo == 96.0);
    CHECK(find_feature(scoop, "handle_to_head_angle").hi == 180.0);
    CHECK(find_feature(scoop, "handle_to_head_angle").default_value == 162.0);
    CHECK(find_feature(scoop, "head_width").hi == 2.65);

    const FamilyDef& platform = find_family("platform");
    REQUIRE(platform.features.size() == 6);
    const FeatureSpec& comf = find_feature(platform, "com_height_fraction");
    CHECK(comf.physical);
    CHECK_FALSE(comf.multiplicative);
    CHECK(comf.lo == 0.2);
    CHECK(comf.hi == 0.8);

    CHECK_THROWS_AS(find_family("hammer"), ConfigError);
    CHECK_THROWS_AS(find_feature(stick, "girth"), UnknownFeature);
}

TEST_CASE("default stick geometry") {
    ToolModel t = default_stick();
    REQUIRE(t.parts.size() == 2);
    CHECK(t.parts[0].name == "shaft");
    CHECK(t.parts[1].name == "blade");
    CHECK(t.mass_kg == 0.45);

    const auto& shaft = std::get<CylinderShape>(t.parts[0].shape);
    CHECK(shaft.radius == Catch::Approx(0.0125));
    CHECK(shaft.length == Catch::Approx(0.60));
    CHECK(t.parts[0].pose.translation.x == Catch::Approx(0.30));

    Point3 handle = world_keypoint(t, "handle");
    CHECK(handle.x == Catch::Approx(0.60).margin(1e-12));
    CHECK(handle.y == Catch::Approx(0.0).margin(1e-12));
    CHECK(handle.z == Catch::Approx(0.0).margin(1e-12));

    // Tip sits one blade length from the joint along the blade axis, so the
    // handle-tip span obeys the law of cosines.
    Point3 tip = world_keypoint(t, "tip");
    double expect = std::sqrt(0.60 * 0.60 + 0.15 * 0.15 -
                              2.0 * 0.60 * 0.15 * std::cos(120.0 * kDeg));
    CHECK(distance(handle, tip) == Catch::Approx(expect).margin(1e-12));
    CHECK(part_x_angle_deg(t, "blade") == Catch::Approx(120.0).margin(1e-9));
}

TEST_CASE("default scoop geometry") {
    ToolModel t = default_scoop();
    REQUIRE(t.parts.size() == 2);
    CHECK(t.parts[0].name == "handle");
    CHECK(t.parts[1].name == "head");

    Point3 handle = world_keypoint(t, "handle");
    CHECK(handle.x == Catch::Approx(0.22).margin(1e-12));
    CHECK(handle.z == Catch::Approx(0.0).margin(1e-12));

    // The head axis leaves the junction at the bend angle to the handle axis.
    CHECK(part_x_angle_deg(t, "head") == Catch::Approx(162.0).margin(1e-9));

    // Bowl opens upward: the head's local +z maps to a direction with
    // positive world z.
    const PartSolid* head = t.find_part("head");
    CHECK(head->pose.rotation.c2.z > 0.9);

    // Tip dips below the handle axis.
    Point3 tip = world_keypoint(t, "tip");
    CHECK(tip.z < 0.0);
    CHECK(tip.x < 0.0);
}

TEST_CASE("default platform geometry") {
    ToolModel t = default_platform();
    REQUIRE(t.parts.size() == 1);
    CHECK(t.parts[0].name == "body");
    const auto& body = std::get<BoxShape>(t.parts[0].shape);
    CHECK(body.width == Catch::Approx(0.42));
    CHECK(body.depth == Catch::Approx(0.36));
    CHECK(body.height == Catch::Approx(0.30));
    CHECK(t.parts[0].pose.translation.z == Catch::Approx(0.15));
    CHECK(t.com.z == Catch::Approx(0.15));
    CHECK(t.keypoints.empty());
    CHECK(feature_value(t, "top_surface_area") == Catch::Approx(0.42 * 0.36));
}

TEST_CASE("source construction validates its dimension map") {
    auto dims = default_dimensions("stick");
    dims.erase("blade_width");
    CHECK_THROWS_AS(make_source_tool("stick", dims), MissingDimension);

    dims = default_dimensions("stick");
    dims["shaft_length"] = -0.1;
    CHECK_THROWS_AS(make_source_tool("stick", dims), NonPositiveDimension);

    dims = default_dimensions("stick");
    dims["girth"] = 0.1;
    CHECK_THROWS_AS(make_source_tool("stick", dims), ConfigError);

    // Absolute-valued dimensions must land inside their editable range.
    dims = default_dimensions("stick");
    dims["blade_shaft_angle"] = 20.0;
    CHECK_THROWS_AS(make_source_tool("stick", dims), ScaleOutOfRange);
}

TEST_CASE("a nonstandard source angle is its own default") {
    auto dims = default_dimensions("stick");
    dims["blade_shaft_angle"] = 95.0;
    ToolModel t = make_source_tool("stick", dims);
    CHECK(t.feature_assignment.at("blade_shaft_angle") == 95.0);
    CHECK(part_x_angle_deg(t, "blade") == Catch::Approx(95.0).margin(1e-9));
    CHECK(apply_edit(t, "blade_shaft_angle", 95.0) == t);
}

TEST_CASE("apply_edit rebuilds geometry") {
    ToolModel src = default_stick();

    SECTION("length scale doubles the shaft and moves the grip point") {
        ToolModel t = apply_edit(src, "shaft_length", 2.0);
        const auto& shaft = std::get<CylinderShape>(t.parts[0].shape);
        CHECK(shaft.length == Catch::Approx(1.20));
        CHECK(t.parts[0].pose.translation.x == Catch::Approx(0.60));
        CHECK(world_keypoint(t, "handle").x == Catch::Approx(1.20).margin(1e-12));
        // Blade untouched.
        CHECK(t.parts[1] == src.parts[1]);
        CHECK(t.mass_kg == src.mass_kg);
    }

    SECTION("editing a feature to its default value is a no-op") {
        CHECK(apply_edit(src, "blade_width", 1.0) == src);
        CHECK(apply_edit(src, "blade_shaft_angle", 120.0) == src);
        CHECK(apply_edit(src, "mass_kg", 1.0) == src);
    }

    SECTION("absolute angle edit is taken verbatim") {
        ToolModel t = apply_edit(src, "blade_shaft_angle", 90.0);
        CHECK(part_x_angle_deg(t, "blade") == Catch::Approx(90.0).margin(1e-9));
        double expect = std::sqrt(0.60 * 0.60 + 0.15 * 0.15);
        CHECK(distance(world_keypoint(t, "handle"), world_keypoint(t, "tip")) ==
              Catch::Approx(expect).margin(1e-12));
    }

    SECTION("mass edit leaves geometry and keypoints alone") {
        ToolModel t = apply_edit(src, "mass_kg", 4.0);
        CHECK(t.mass_kg == Catch::Approx(1.8));
        CHECK(t.parts == src.parts);
        CHECK(t.keypoints == src.keypoints);
        CHECK(t.com == src.com);
    }

    SECTION("out-of-range and unknown features are rejected") {
        CHECK_THROWS_AS(apply_edit(src, "shaft_length", 2.36), ScaleOutOfRange);
        CHECK_THROWS_AS(apply_edit(src, "shaft_length", 0.2499), ScaleOutOfRange);
        CHECK_THROWS_AS(apply_edit(src, "blade_shaft_angle", 171.0), ScaleOutOfRange);
        CHECK_THROWS_AS(apply_edit(src, "girth", 1.0), UnknownFeature);
    }
}

TEST_CASE("edits commute and fold") {
    ToolModel src = default_stick();
    std::vector<std::pair<std::string, double>> ab = {{"shaft_length", 1.5},
                                                      {"blade_length", 0.7}};
    std::vector<std::pair<std::string, double>> ba = {{"blade_length", 0.7},
                                                      {"shaft_length", 1.5}};
    CHECK(apply_edits(src, ab) == apply_edits(src, ba));
    CHECK(apply_edits(src, {}) == src);

    // Re-applying the full default assignment reproduces the source exactly.
    std::vector<std::pair<std::string, double>> defaults;
    for (const auto& kv : src.feature_assignment) defaults.emplace_back(kv.first, kv.second);
    CHECK(apply_edits(src, defaults) == src);

    // Later writes win.
    ToolModel t = apply_edits(src, {{"shaft_length", 0.5}, {"shaft_length", 2.0}});
    CHECK(t == apply_edit(src, "shaft_length", 2.0));
}

TEST_CASE("keypoints ride along with edits") {
    ToolModel src = default_scoop();
    ToolModel t = apply_edits(src, {{"handle_length", 1.8}, {"head_length", 1.4}});
    REQUIRE(t.keypoints.size() == src.keypoints.size());
    // Normalized anchor coordinates never change; world positions do.
    for (std::size_t i = 0; i < t.keypoints.size(); ++i) CHECK(t.keypoints[i] == src.keypoints[i]);
    CHECK(world_keypoint(t, "handle").x == Catch::Approx(0.22 * 1.8).margin(1e-12));
}

TEST_CASE("uniform grids hit both endpoints exactly") {
    std::vector<double> g = uniform_grid(0.25, 2.35, 9);
    REQUIRE(g.size() == 9);
    CHECK(g.front() == 0.25);
    CHECK(g.back() == 2.35);
    CHECK(g[4] == Catch::Approx(1.3).margin(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);

    CHECK(uniform_grid(1.0, 2.0, 1) == std::vector<double>{1.0});
}

TEST_CASE("intervention dataset is one-feature-at-a-time") {
    ToolModel src = default_stick();
    std::vector<std::string> features = {"shaft_length", "blade_width"};
    std::map<std::string, std::vector<double>> grid;
    for (const auto& f : features)
        grid[f] = feature_grid(find_feature(find_family("stick"), f), 9);

    auto records = intervention_dataset(src, features, grid);
    REQUIRE(records.size() == 18);
    CHECK(records[0].feature == "shaft_length");
    CHECK(records[0].scale == 0.25);
    CHECK(records[17].feature == "blade_width");
    CHECK(records[17].scale == 2.35);

    for (const auto& rec : records) {
        for (const auto& kv : rec.tool.feature_assignment) {
            double expect = kv.first == rec.feature ? rec.scale
                                                    : src.feature_assignment.at(kv.first);
            CHECK(kv.second == expect);
        }
    }

    grid.erase("blade_width");
    CHECK_THROWS_AS(intervention_dataset(src, features, grid), ConfigError);
}

TEST_CASE("combination grid enumerates the full product") {
    ToolModel src = default_stick();
    std::vector<std::string> features = {"shaft_length", "blade_length",
                                         "blade_shaft_angle"};
    std::map<std::string, std::vector<double>> grid = {
        {"shaft_length", {0.5, 1.0, 1.5, 2.0}},
        {"blade_length", {0.5, 1.0, 1.5, 2.0}},
        {"blade_shaft_angle", {60.0, 100.0, 140.0, 170.0}},
    };
    auto tools = combination_grid(src, features, grid, 100);
    REQUIRE(tools.size() == 64);

    // Every assignment combination appears exactly once.
    std::set<std::vector<double>> seen;
    for (const auto& t : tools)
        seen.insert({t.feature_assignment.at("shaft_length"),
                     t.feature_assignment.at("blade_length"),
                     t.feature_assignment.at("blade_shaft_angle")});
    CHECK(seen.size() == 64);

    // Feature list order is irrelevant.
    std::vector<std::string> reversed(features.rbegin(), features.rend());
    auto again = combination_grid(src, reversed, grid, 100);
    REQUIRE(again.size() == tools.size());
    for (std::size_t i = 0; i < tools.size(); ++i) CHECK(again[i] == tools[i]);
}

TEST_CASE("combination grid refuses oversized products up front") {
    ToolModel src = default_stick();
    std::vector<std::string> features = {"shaft_length", "shaft_diameter",
                                         "blade_length", "blade_shaft_angle",
                                         "mass_kg"};
    std::map<std::string, std::vector<double>> grid;
    for (const auto& f : features) {
        const FeatureSpec& spec = find_feature(find_family("stick"), f);
        grid[f] = feature_grid(spec, 9);
    }
    try {
        combination_grid(src, features, grid, 10000);
        FAIL("expected GridTooLarge");
    } catch (const GridTooLarge& e) {
        CHECK(e.actual == 59049);
        CHECK(e.max == 10000);
    }
}

TEST_CASE("whole-tool clouds sample parts by surface area") {
    ToolModel src = default_stick();
    const std::size_t n = 2000;
    PointCloud cloud = tool_to_cloud(src, n, 17);
    REQUIRE(cloud.size() == n);
    REQUIRE(cloud.has_labels());

    std::map<std::string, std::size_t> counts;
    for (const auto& label : cloud.part_labels) ++counts[label];
    REQUIRE(counts.size() == 2);

    double shaft_area = surface_area(src.parts[0].shape);
    double blade_area = surface_area(src.parts[1].shape);
    double total = shaft_area + blade_area;
    CHECK(std::fabs(static_cast<double>(counts["shaft"]) -
                    static_cast<double>(n) * shaft_area / total) < 1.0 + 1e-9);
    CHECK(std::fabs(static_cast<double>(counts["blade"]) -
                    static_cast<double>(n) * blade_area / total) < 1.0 + 1e-9);
}

TEST_CASE("clouds depend only on geometry and seed") {
    ToolModel src = default_stick();
    PointCloud a = tool_to_cloud(src, 500, 99);
    PointCloud b = tool_to_cloud(src, 500, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);

    PointCloud c = tool_to_cloud(src, 500, 100);
    bool all_equal = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a.points[i] == c.points[i])) all_equal = false;
    CHECK_FALSE(all_equal);

    // Mass is invisible to the sampler.
    PointCloud heavy = tool_to_cloud(apply_edit(src, "mass_kg", 3.0), 500, 99);
    REQUIRE(heavy.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(heavy.points[i] == a.points[i]);

    // So is the platform's center-of-mass anchor.
    ToolModel plat = default_platform();
    PointCloud p1 = tool_to_cloud(plat, 400, 7);
    PointCloud p2 = tool_to_cloud(apply_edit(plat, "com_height_fraction", 0.7), 400, 7);
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1.points[i] == p2.points[i]);
}

TEST_CASE("a top-down view keeps only the platform's top face") {
    ToolModel plat = default_platform();
    ViewSpec view;
    view.camera_direction = {0.0, 0.0, -1.0};
    PointCloud cloud = tool_to_cloud(plat, 400, 3, view);
    REQUIRE(cloud.size() == 400);
    for (const Point3& p : cloud.points) CHECK(p.z == Catch::Approx(0.30).margin(1e-9));
}

TEST_CASE("feature_value reads the task-facing scalar") {
    ToolModel stick = apply_edit(default_stick(), "blade_length", 0.8);
    CHECK(feature_value(stick, "blade_length") == Catch::Approx(0.12));
    CHECK(feature_value(stick, "blade_shaft_angle") == 120.0);
    CHECK(feature_value(stick, "mass_kg") == Catch::Approx(0.45));

    ToolModel plat = apply_edit(default_platform(), "top_surface_area", 1.5);
    CHECK(feature_value(plat, "top_surface_area") == Catch::Approx(0.1512 * 1.5));
    CHECK_THROWS_AS(feature_value(stick, "top_surface_area"), UnknownFeature);
}

TEST_CASE("reach grows monotonically with shaft length") {
    ToolModel src = default_stick();
    double prev = -1.0;
    for (double s : feature_grid(find_feature(find_family("stick"), "shaft_length"), 9)) {
        ToolModel t = apply_edit(src, "shaft_length", s);
        double d = distance(world_keypoint(t, "handle"), world_keypoint(t, "tip"));
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("height scale drives overall height linearly") {
    ToolModel plat = default_platform();
    ToolModel t = apply_edit(plat, "overall_height", 1.6);
    const auto& body = std::get<BoxShape>(t.parts[0].shape);
    CHECK(body.height == Catch::Approx(0.48));
    CHECK(feature_value(t, "overall_height") == Catch::Approx(0.48));
    // Footprint untouched.
    CHECK(body.width == Catch::Approx(0.42));
    CHECK(body.depth == Catch::Approx(0.36));
}

TEST_CASE("top surface area scales footprint isotropically") {
    ToolModel plat = default_platform();
    ToolModel t = apply_edit(plat, "top_surface_area", 2.0);
    const auto& body = std::get<BoxShape>(t.parts[0].shape);
    CHECK(body.width * body.depth == Catch::Approx(2.0 * 0.42 * 0.36));
    CHECK(body.width / body.depth == Catch::Approx(0.42 / 0.36));
    CHECK(body.height == Catch::Approx(0.30));
}
