#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"
#include "../rng.hpp"
#include "../shape/families.hpp"

namespace toolforge {

struct FeatureProposal {
    std::string name;
    std::string kind;  // "geometric" or "physical"
    std::string rationale;
};

inline bool resolvable(const FeatureProposal& proposal, const std::string& family) {
    for (const FeatureSpec& spec : find_family(family).features)
        if (spec.name == proposal.name) return true;
    return false;
}

struct VoteTally {
    std::vector<std::vector<FeatureProposal>> runs;
    std::map<std::string, std::size_t> counts;
};

// One proposal round plus the expansion pool. Rounds are independent given
// their seed, so callers may issue them concurrently.
class SuggestBackend {
public:
    virtual ~SuggestBackend() = default;
    virtual std::vector<FeatureProposal> propose_run(const std::string& task_text,
                                                     const std::string& family,
                                                     std::size_t n_candidates,
                                                     std::uint64_t seed) const = 0;
    // Every candidate the backend knows for the family, best first. Used when
    // a failed run asks for more features than the voted set.
    virtual std::vector<FeatureProposal> ranked_candidates(
        const std::string& family) const = 0;
};

// Deterministic stand-in for the language-model suggester. Each family keeps
// a weighted candidate list covering all of its features plus plausible but
// unusable distractor properties; a round draws without replacement with
// probability proportional to weight, which reproduces proposal noise from a
// seed alone.
class CatalogBackend : public SuggestBackend {
public:
    struct Entry {
        std::string name;
        std::string kind;
        double weight;
        std::string rationale;
    };

    CatalogBackend() {
        catalog_["stick"] = {
            {"shaft_length", "geometric", 90.0, "sets how far the tool can reach"},
            {"blade_length", "geometric", 80.0, "sets the size of the hooking end"},
            {"blade_shaft_angle", "geometric", 70.0, "sets whether the end can hold on"},
            {"shaft_diameter", "geometric", 60.0, "must fit inside the gripper"},
            {"blade_width", "geometric", 50.0, "wider end covers more of the object"},
            {"blade_thickness", "geometric", 40.0, "stiffness of the hooking end"},
            {"mass_kg", "physical", 0.5, "heavier tools are harder to lift"},
        };
        catalog_["scoop"] = {
            {"head_width", "geometric", 90.0, "head must pass the opening"},
            {"head_length", "geometric", 80.0, "longer head carries more"},
            {"head_bowl_curvature", "geometric", 70.0, "deeper bowl retains material"},
            {"handle_length", "geometric", 60.0, "handle must clear the rim"},
            {"handle_to_head_angle", "geometric", 50.0, "tilts the bowl while carrying"},
            {"handle_cross_section_thickness", "geometric", 40.0,
             "must fit inside the gripper"},
            {"mass_kg", "physical", 0.5, "heavier tools are harder to lift"},
        };
        catalog_["platform"] = {
            {"footprint_width", "geometric", 90.0, "must fit the floor gap"},
            {"overall_height", "geometric", 80.0, "sets the step height"},
            {"footprint_depth", "geometric", 70.0, "deeper base tips less easily"},
            {"top_surface_area", "geometric", 60.0, "standing room for the feet"},
            {"com_height_fraction", "physical", 1.0, "low balance point resists tipping"},
            {"mass_kg", "physical", 0.5, "a step must hold without sliding"},
        };
        for (auto& [family, entries] : catalog_) {
            (void)family;
            for (const char* name :
                 {"surface_color", "material_stiffness", "surface_texture",
                  "paint_finish", "brand_marking", "grip_rubber", "wood_grain",
                  "varnish_sheen"})
                entries.push_back({name, "geometric", 1.0, "visual property"});
        }
    }

    std::vector<FeatureProposal> propose_run(const std::string& task_text,
                                             const std::string& family,
                                             std::size_t n_candidates,
                                             std::uint64_t seed) const override {
        (void)task_text;
        const std::vector<Entry>& pool = entries_for(family);
        // Weighted draws without replacement: rank every entry by u^(1/w)
        // for one uniform u each, then keep the largest keys.
        Rng rng(seed);
        std::vector<std::pair<double, std::size_t>> keyed;
        keyed.reserve(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            double u = rng.next_double();
            keyed.emplace_back(std::pow(u, 1.0 / pool[i].weight), i);
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });

        std::vector<FeatureProposal> out;
        for (std::size_t i = 0; i < keyed.size() && out.size() < n_candidates; ++i) {
            const Entry& e = pool[keyed[i].second];
            out.push_back({e.name, e.kind, e.rationale});
        }
        return out;
    }

    std::vector<FeatureProposal> ranked_candidates(
        const std::string& family) const override {
        std::vector<Entry> pool = entries_for(family);
        std::stable_sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.name < b.name;
        });
        std::vector<FeatureProposal> out;
        out.reserve(pool.size());
        for (const Entry& e : pool) out.push_back({e.name, e.kind, e.rationale});
        return out;
    }

private:
    const std::vector<Entry>& entries_for(const std::string& family) const {
        auto it = catalog_.find(family);
        if (it == catalog_.end())
            throw ConfigError("no suggestion catalog for family " + family);
        return it->second;
    }

    std::map<std::string, std::vector<Entry>> catalog_;
};

struct ProposeResult {
    std::vector<std::string> features;
    VoteTally tally;
    std::vector<std::string> uneditable;
};

// Multi-round proposal with voting. Each round's duplicates collapse before
// tallying. Ranking compares (votes, earliest within-round position, name)
// lexicographically, so it is total and independent of round order, and a
// single round keeps its own proposal order. Names that resolve to no family
// feature are reported on the side and never ranked.
inline ProposeResult propose(const std::string& task_text, const std::string& family,
                             const SuggestBackend& backend, std::size_t n_runs = 10,
                             std::size_t n_candidates = 12, std::size_t top_k = 6,
                             std::uint64_t seed = 0) {
    if (n_runs < 1) throw ConfigError("propose needs at least one run");
    if (n_candidates < 1) throw ConfigError("propose needs at least one candidate");
    if (top_k < 1 || top_k > n_candidates)
        throw ConfigError("top_k must be in [1, n_candidates]");

    ProposeResult result;
    std::set<std::string> uneditable_seen;
    std::map<std::string, std::size_t> earliest;
    for (std::size_t run = 0; run < n_runs; ++run) {
        std::vector<FeatureProposal> proposals = backend.propose_run(
            task_text, family, n_candidates, derive_seed(seed, "suggest_run", run));
        std::set<std::string> seen;
        std::vector<FeatureProposal> unique;
        for (FeatureProposal& p : proposals) {
            if (!seen.insert(p.name).second) continue;
            result.tally.counts[p.name] += 1;
            std::size_t pos = unique.size();
            auto it = earliest.find(p.name);
            if (it == earliest.end())
                earliest[p.name] = pos;
            else
                it->second = std::min(it->second, pos);
            if (!resolvable(p, family)) uneditable_seen.insert(p.name);
            unique.push_back(std::move(p));
        }
        result.tally.runs.push_back(std::move(unique));
    }

    struct Ranked {
        std::string name;
        std::size_t votes;
        std::size_t earliest;
    };
    std::vector<Ranked> ranked;
    for (const auto& [name, votes] : result.tally.counts)
        if (uneditable_seen.count(name) == 0)
            ranked.push_back({name, votes, earliest.at(name)});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        if (a.earliest != b.earliest) return a.earliest < b.earliest;
        return a.name < b.name;
    });
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i)
        result.features.push_back(ranked[i].name);
    result.uneditable.assign(uneditable_seen.begin(), uneditable_seen.end());

    if (result.features.empty()) throw EmptyProposal();
    return result;
}

// Next resolvable candidates the voted set does not already contain, best
// first by the backend's own ranking.
inline std::vector<std::string> expand(const std::vector<std::string>& previous,
                                       const std::string& family,
                                       const SuggestBackend& backend,
                                       std::size_t k_more = 1, std::uint64_t seed = 0) {
    (void)seed;
    if (k_more < 1) throw ConfigError("expand needs k_more >= 1");
    std::set<std::string> have(previous.begin(), previous.end());
    std::vector<std::string> out;
    for (const FeatureProposal& p : backend.ranked_candidates(family)) {
        if (out.size() == k_more) break;
        if (have.count(p.name) != 0) continue;
        if (!resolvable(p, family)) continue;
        out.push_back(p.name);
    }
    if (out.empty()) throw Exhausted();
    return out;
}

}  // namespace toolforge
