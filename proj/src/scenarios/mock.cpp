#include "socsim/scenarios/mock.hpp"

#include <algorithm>
#include <cmath>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::scenarios {

using core::Errc;
using core::Json;
using core::OpinionState;
using core::raise;

int mock_class_bonus(const std::string& social_class) {
    if (social_class == "Upper") return 3;
    if (social_class == "Upper-middle") return 2;
    if (social_class == "Lower-middle") return 1;
    if (social_class == "Working") return 0;
    if (social_class == "Lower") return -1;
    return 0;
}

int mock_trustor_base(const Json& attrs) {
    int amount = 4;
    amount += mock_class_bonus(attrs.value("social_class", ""));
    if (attrs.value("education", 0) >= 7) amount += 1;
    if (attrs.value("age", 0) <= 34) amount += 1;
    return amount;
}

int mock_trust_noise(const std::string& profile_text, std::uint64_t master_seed) {
    core::RngStream stream(master_seed, "trust_noise", core::fnv1a64(profile_text));
    return int(stream.at(0) % 3) - 1;
}

int mock_trustor_amount(const Json& attrs, const std::string& profile_text,
                        std::uint64_t master_seed) {
    const int raw = mock_trustor_base(attrs) + mock_trust_noise(profile_text, master_seed);
    return std::clamp(raw, 0, 10);
}

int mock_trustee_amount(const Json& attrs, int received) {
    const int raw =
        int(std::lround(0.45 * double(received))) + mock_class_bonus(attrs.value("social_class", ""));
    return std::clamp(raw, 0, received);
}

OpinionState mock_opinion_update(int influencer_education, int influencee_education,
                                 OpinionState influencer_opinion,
                                 OpinionState influencee_opinion) {
    return influencer_education >= influencee_education ? influencer_opinion : influencee_opinion;
}

namespace {

const std::string& require_var(const inference::InferenceRequest& req, const char* name) {
    auto it = req.variables.find(name);
    if (it == req.variables.end()) {
        raise(Errc::BackendFailure, std::string("mock responder missing variable '") + name + "'");
    }
    return it->second;
}

Json attrs_from_trust_vars(const inference::InferenceRequest& req) {
    Json attrs = Json::object();
    if (auto it = req.variables.find("social_class"); it != req.variables.end()) {
        attrs["social_class"] = it->second;
    }
    if (auto it = req.variables.find("education"); it != req.variables.end()) {
        attrs["education"] = std::stoi(it->second);
    }
    if (auto it = req.variables.find("age"); it != req.variables.end()) {
        attrs["age"] = std::stoi(it->second);
    }
    return attrs;
}

Json trustor_responder(const inference::InferenceRequest& req, const std::string&,
                       std::uint64_t seed) {
    const Json attrs = attrs_from_trust_vars(req);
    const int n = mock_trustor_amount(attrs, require_var(req, "profile_text"), seed);
    return Json{{"thinking_process",
                 "Considering my background and the anonymous setting, I send an amount that "
                 "matches my means and my hopes for a fair return."},
                {"amount", n}};
}

Json trustee_responder(const inference::InferenceRequest& req, const std::string&,
                       std::uint64_t) {
    const Json attrs = attrs_from_trust_vars(req);
    const int received = std::stoi(require_var(req, "amount_received"));
    const int r = mock_trustee_amount(attrs, received);
    return Json{{"thinking_process",
                 "They trusted me with a tripled transfer, so I return a share that feels fair "
                 "given my circumstances."},
                {"amount", r}};
}

Json opinion_responder(const inference::InferenceRequest& req, const std::string&,
                       std::uint64_t) {
    const int edu_r = std::stoi(require_var(req, "influencer_education"));
    const int edu_e = std::stoi(require_var(req, "influencee_education"));
    const OpinionState op_r = core::opinion_from_string(require_var(req, "influencer_opinion"));
    const OpinionState op_e = core::opinion_from_string(require_var(req, "influencee_opinion"));
    const OpinionState updated = mock_opinion_update(edu_r, edu_e, op_r, op_e);
    const bool adopted = updated != op_e;
    return Json{{"thinking_process",
                 adopted ? std::string("Their background carries weight with me, so I adopt "
                                       "their position on the statement.")
                         : std::string("Their arguments do not outweigh my own experience, so I "
                                       "keep my position on the statement.")},
                {"opinion", core::opinion_name(updated)}};
}

} // namespace

std::unique_ptr<inference::MockBackend> make_mock_backend(std::string id,
                                                          std::uint64_t master_seed) {
    auto backend = std::make_unique<inference::MockBackend>(std::move(id), master_seed);
    backend->set_responder("trustor_decision", trustor_responder);
    backend->set_responder("trustee_decision", trustee_responder);
    backend->set_responder("opinion_update", opinion_responder);
    return backend;
}

} // namespace socsim::scenarios
