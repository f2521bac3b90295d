#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "../errors.hpp"
#include "../geometry/point_cloud.hpp"
#include "../shape/families.hpp"
#include "suggest.hpp"

namespace toolforge {

namespace remote_detail {

inline std::vector<FeatureProposal> parse_proposals(const std::string& body,
                                                    const std::string& family) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("proposals") ||
        !doc["proposals"].is_array())
        throw BackendUnavailable("malformed proposal response: " + body);

    std::vector<FeatureProposal> out;
    for (const nlohmann::json& item : doc["proposals"]) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
            !item.contains("kind") || !item["kind"].is_string())
            throw BackendUnavailable("malformed proposal entry: " + body);
        FeatureProposal p;
        p.name = item["name"].get<std::string>();
        p.kind = item["kind"].get<std::string>();
        if (p.kind != "geometric" && p.kind != "physical")
            throw BackendUnavailable("unknown proposal kind: " + body);
        if (item.contains("rationale") && item["rationale"].is_string())
            p.rationale = item["rationale"].get<std::string>();
        // The family schema is authoritative for the kind of any name it
        // defines; the remote may not relabel mass as geometry.
        for (const FeatureSpec& spec : find_family(family).features)
            if (spec.name == p.name) p.kind = spec.physical ? "physical" : "geometric";
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace remote_detail

// Suggestion backend speaking JSON over HTTP, the integration point for a
// real language-model service. Requests carry the family's feature schema so
// the service knows the editable vocabulary; responses are schema-checked and
// anything else is surfaced as BackendUnavailable with the raw body.
class RemoteBackend : public SuggestBackend {
public:
    RemoteBackend(std::string host, int port, double timeout_s = 5.0,
                  std::size_t retries = 1)
        : host_(std::move(host)), port_(port), timeout_s_(timeout_s),
          retries_(retries) {}

    std::vector<FeatureProposal> propose_run(const std::string& task_text,
                                             const std::string& family,
                                             std::size_t n_candidates,
                                             std::uint64_t seed) const override {
        (void)seed;  // remote proposal noise is the service's own
        nlohmann::json schema = nlohmann::json::array();
        for (const FeatureSpec& spec : find_family(family).features)
            schema.push_back({{"name", spec.name},
                              {"kind", spec.physical ? "physical" : "geometric"}});
        nlohmann::json request = {{"task_text", task_text},
                                  {"family", family},
                                  {"candidate_schema", schema},
                                  {"n_candidates", n_candidates}};
        std::string body = post("/propose", request.dump());
        return remote_detail::parse_proposals(body, family);
    }

    std::vector<FeatureProposal> ranked_candidates(
        const std::string& family) const override {
        return propose_run("", family, 64, 0);
    }

private:
    std::string post(const std::string& path, const std::string& payload) const {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        for (std::size_t attempt = 0; attempt <= retries_; ++attempt) {
            httplib::Result res = client.Post(path, payload, "application/json");
            if (!res) continue;
            if (res->status != 200)
                throw BackendUnavailable("HTTP " + std::to_string(res->status) +
                                         " from " + path + ": " + res->body);
            return res->body;
        }
        throw BackendUnavailable("no response from " + host_ + ":" +
                                 std::to_string(port_) + path);
    }

    std::string host_;
    int port_;
    double timeout_s_;
    std::size_t retries_;
};

// Client for an external range judge: given the target cloud and the two
// boundary clouds for one feature, the service answers whether the target
// lies inside the working range. Pairs with the boundary-comparison records
// the matcher exports.
class RemoteJudge {
public:
    RemoteJudge(std::string host, int port, double timeout_s = 5.0,
                std::size_t retries = 1)
        : host_(std::move(host)), port_(port), timeout_s_(timeout_s),
          retries_(retries) {}

    bool in_range(const std::string& feature, const PointCloud& target,
                  const PointCloud& lo, const PointCloud& hi) const {
        nlohmann::json request = {{"feature", feature},
                                  {"clouds",
                                   {{"target", cloud_text(target)},
                                    {"lo", cloud_text(lo)},
                                    {"hi", cloud_text(hi)}}}};

        httplib::Client client(host_, port_);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        for (std::size_t attempt = 0; attempt <= retries_; ++attempt) {
            httplib::Result res = client.Post("/judge", request.dump(),
                                              "application/json");
            if (!res) continue;
            if (res->status != 200)
                throw BackendUnavailable("HTTP " + std::to_string(res->status) +
                                         " from /judge: " + res->body);
            nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
            if (doc.is_discarded() || !doc.is_object() || !doc.contains("in_range") ||
                !doc["in_range"].is_boolean())
                throw BackendUnavailable("malformed judge response: " + res->body);
            return doc["in_range"].get<bool>();
        }
        throw BackendUnavailable("no response from " + host_ + ":" +
                                 std::to_string(port_) + "/judge");
    }

private:
    static std::string cloud_text(const PointCloud& cloud) {
        std::ostringstream os;
        write_cloud(os, cloud);
        return os.str();
    }

    std::string host_;
    int port_;
    double timeout_s_;
    std::size_t retries_;
};

}  // namespace toolforge
