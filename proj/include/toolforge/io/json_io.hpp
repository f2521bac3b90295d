#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../causal/discovery.hpp"
#include "../errors.hpp"
#include "../match/classify.hpp"
#include "../match/morph.hpp"
#include "../suggest/suggest.hpp"

// JSON bindings for every artifact the pipeline writes or reads back. Object
// keys come out sorted (nlohmann's default map) and doubles are printed in
// shortest round-trip form, so re-serializing a parsed file reproduces it
// byte for byte.

namespace toolforge {

inline void to_json(nlohmann::json& j, const Point3& p) {
    j = nlohmann::json::array({p.x, p.y, p.z});
}

inline void from_json(const nlohmann::json& j, Point3& p) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("a point must be [x, y, z]");
    j.at(0).get_to(p.x);
    j.at(1).get_to(p.y);
    j.at(2).get_to(p.z);
}

inline void to_json(nlohmann::json& j, const Mat3& m) {
    j = nlohmann::json::array({m.c0, m.c1, m.c2});
}

inline void from_json(const nlohmann::json& j, Mat3& m) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("a rotation must list 3 columns");
    j.at(0).get_to(m.c0);
    j.at(1).get_to(m.c1);
    j.at(2).get_to(m.c2);
}

inline void to_json(nlohmann::json& j, const Transform& t) {
    j = {{"rotation", t.rotation}, {"translation", t.translation}};
}

inline void from_json(const nlohmann::json& j, Transform& t) {
    j.at("rotation").get_to(t.rotation);
    j.at("translation").get_to(t.translation);
}

inline void to_json(nlohmann::json& j, const Shape& s) {
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, BoxShape>) {
                j = {{"kind", "box"},
                     {"width", shape.width},
                     {"depth", shape.depth},
                     {"height", shape.height}};
            } else if constexpr (std::is_same_v<T, CylinderShape>) {
                j = {{"kind", "cylinder"}, {"radius", shape.radius}, {"length", shape.length}};
            } else if constexpr (std::is_same_v<T, CurvedPlateShape>) {
                j = {{"kind", "curved_plate"},
                     {"length", shape.length},
                     {"width", shape.width},
                     {"thickness", shape.thickness},
                     {"curvature_depth", shape.curvature_depth}};
            } else {
                j = {{"kind", "sphere"}, {"radius", shape.radius}};
            }
        },
        s);
}

inline void from_json(const nlohmann::json& j, Shape& s) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "box") {
        BoxShape b;
        j.at("width").get_to(b.width);
        j.at("depth").get_to(b.depth);
        j.at("height").get_to(b.height);
        s = b;
    } else if (kind == "cylinder") {
        CylinderShape c;
        j.at("radius").get_to(c.radius);
        j.at("length").get_to(c.length);
        s = c;
    } else if (kind == "curved_plate") {
        CurvedPlateShape p;
        j.at("length").get_to(p.length);
        j.at("width").get_to(p.width);
        j.at("thickness").get_to(p.thickness);
        j.at("curvature_depth").get_to(p.curvature_depth);
        s = p;
    } else if (kind == "sphere") {
        SphereShape sp;
        j.at("radius").get_to(sp.radius);
        s = sp;
    } else {
        throw ConfigError("unknown shape kind: " + kind);
    }
}

inline void to_json(nlohmann::json& j, const PartSolid& p) {
    j = {{"name", p.name}, {"shape", p.shape}, {"pose", p.pose}};
}

inline void from_json(const nlohmann::json& j, PartSolid& p) {
    j.at("name").get_to(p.name);
    j.at("shape").get_to(p.shape);
    j.at("pose").get_to(p.pose);
}

inline void to_json(nlohmann::json& j, const Keypoint& k) {
    j = {{"name", k.name}, {"part", k.part}, {"local_coords", k.local_coords}};
}

inline void from_json(const nlohmann::json& j, Keypoint& k) {
    j.at("name").get_to(k.name);
    j.at("part").get_to(k.part);
    j.at("local_coords").get_to(k.local_coords);
}

inline void to_json(nlohmann::json& j, const ToolModel& t) {
    j = {{"family", t.family},
         {"nominal_dimensions", t.nominal_dimensions},
         {"feature_assignment", t.feature_assignment},
         {"parts", t.parts},
         {"mass_kg", t.mass_kg},
         {"com", t.com},
         {"keypoints", t.keypoints}};
}

inline void from_json(const nlohmann::json& j, ToolModel& t) {
    j.at("family").get_to(t.family);
    j.at("nominal_dimensions").get_to(t.nominal_dimensions);
    j.at("feature_assignment").get_to(t.feature_assignment);
    j.at("parts").get_to(t.parts);
    j.at("mass_kg").get_to(t.mass_kg);
    j.at("com").get_to(t.com);
    j.at("keypoints").get_to(t.keypoints);
}

inline void to_json(nlohmann::json& j, const ScaleRange& r) {
    j = {{"lo", r.lo}, {"hi", r.hi}};
}

inline void from_json(const nlohmann::json& j, ScaleRange& r) {
    j.at("lo").get_to(r.lo);
    j.at("hi").get_to(r.hi);
}

inline void to_json(nlohmann::json& j, const CurvePoint& p) {
    j = {{"scale", p.scale}, {"rate", p.rate}, {"outcomes", p.outcomes}};
}

inline void from_json(const nlohmann::json& j, CurvePoint& p) {
    j.at("scale").get_to(p.scale);
    j.at("rate").get_to(p.rate);
    j.at("outcomes").get_to(p.outcomes);
}

inline void to_json(nlohmann::json& j, const ResponseCurve& c) {
    j = {{"feature", c.feature}, {"default_scale", c.default_scale}, {"points", c.points}};
}

inline void from_json(const nlohmann::json& j, ResponseCurve& c) {
    j.at("feature").get_to(c.feature);
    j.at("default_scale").get_to(c.default_scale);
    j.at("points").get_to(c.points);
}

inline void to_json(nlohmann::json& j, const CausalReport& r) {
    j = {{"curves", r.curves},
         {"noise_floor", r.noise_floor},
         {"causal_flags", r.causal_flags},
         {"effect_sizes", r.effect_sizes},
         {"working_ranges", r.working_ranges},
         {"combination_verified", r.combination_verified},
         {"boundary_scales", r.boundary_scales}};
}

inline void from_json(const nlohmann::json& j, CausalReport& r) {
    j.at("curves").get_to(r.curves);
    j.at("noise_floor").get_to(r.noise_floor);
    j.at("causal_flags").get_to(r.causal_flags);
    j.at("effect_sizes").get_to(r.effect_sizes);
    j.at("working_ranges").get_to(r.working_ranges);
    j.at("combination_verified").get_to(r.combination_verified);
    j.at("boundary_scales").get_to(r.boundary_scales);
}

inline void to_json(nlohmann::json& j, const LineSearch& s) {
    j = {{"pass", s.pass},
         {"feature", s.feature},
         {"scales", s.scales},
         {"chamfer", s.chamfer},
         {"chosen_scale", s.chosen_scale},
         {"chosen_chamfer", s.chosen_chamfer}};
}

inline void from_json(const nlohmann::json& j, LineSearch& s) {
    j.at("pass").get_to(s.pass);
    j.at("feature").get_to(s.feature);
    j.at("scales").get_to(s.scales);
    j.at("chamfer").get_to(s.chamfer);
    j.at("chosen_scale").get_to(s.chosen_scale);
    j.at("chosen_chamfer").get_to(s.chosen_chamfer);
}

inline void to_json(nlohmann::json& j, const MatchResult& m) {
    j = {{"assignment", m.assignment},
         {"residual", m.residual},
         {"trace", m.trace},
         {"matched_tool", m.matched_tool}};
}

inline void from_json(const nlohmann::json& j, MatchResult& m) {
    j.at("assignment").get_to(m.assignment);
    j.at("residual").get_to(m.residual);
    j.at("trace").get_to(m.trace);
    j.at("matched_tool").get_to(m.matched_tool);
}

inline void to_json(nlohmann::json& j, const FeatureCheck& c) {
    j = {{"value", c.value},
         {"range", c.range},
         {"in_range", c.in_range},
         {"reason", c.reason}};
}

inline void from_json(const nlohmann::json& j, FeatureCheck& c) {
    j.at("value").get_to(c.value);
    j.at("range").get_to(c.range);
    j.at("in_range").get_to(c.in_range);
    j.at("reason").get_to(c.reason);
}

inline void to_json(nlohmann::json& j, const Verdict& v) {
    j = {{"suitable", v.suitable},
         {"per_feature", v.per_feature},
         {"explanation", v.explanation}};
}

inline void from_json(const nlohmann::json& j, Verdict& v) {
    j.at("suitable").get_to(v.suitable);
    j.at("per_feature").get_to(v.per_feature);
    j.at("explanation").get_to(v.explanation);
}

inline void to_json(nlohmann::json& j, const KeypointTransfer& k) {
    j = {{"name", k.name}, {"point", k.point}, {"nn_distance", k.nn_distance}};
}

inline void from_json(const nlohmann::json& j, KeypointTransfer& k) {
    j.at("name").get_to(k.name);
    j.at("point").get_to(k.point);
    j.at("nn_distance").get_to(k.nn_distance);
}

inline void to_json(nlohmann::json& j, const FeatureProposal& p) {
    j = {{"name", p.name}, {"kind", p.kind}, {"rationale", p.rationale}};
}

inline void from_json(const nlohmann::json& j, FeatureProposal& p) {
    j.at("name").get_to(p.name);
    j.at("kind").get_to(p.kind);
    p.rationale = j.value("rationale", std::string());
}

inline void to_json(nlohmann::json& j, const VoteTally& t) {
    j = {{"runs", t.runs}, {"counts", t.counts}};
}

inline void from_json(const nlohmann::json& j, VoteTally& t) {
    j.at("runs").get_to(t.runs);
    j.at("counts").get_to(t.counts);
}

inline void to_json(nlohmann::json& j, const ProposeResult& r) {
    j = {{"features", r.features}, {"tally", r.tally}, {"uneditable", r.uneditable}};
}

inline void from_json(const nlohmann::json& j, ProposeResult& r) {
    j.at("features").get_to(r.features);
    j.at("tally").get_to(r.tally);
    j.at("uneditable").get_to(r.uneditable);
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + path);
    return j;
}

// dump(2) with a trailing newline; two serializations of equal values are
// byte-identical because object keys are always emitted sorted.
inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("cannot write " + path);
}

}  // namespace toolforge
