#pragma once

#include <cstdint>
#include <memory>

#include "socsim/core/agent.hpp"
#include "socsim/inference/backend.hpp"

namespace socsim::scenarios {

// Deterministic decision rules standing in for an LLM so runs are offline
// and exactly reproducible.
//
// Trustor:  clamp(4 + class_bonus + education_bonus + age_bonus + noise, 0, 10)
//           class_bonus: Upper +3, Upper-middle +2, Lower-middle +1,
//           Working 0, Lower -1; education_bonus: ordinal >= 7 -> +1;
//           age_bonus: age <= 34 -> +1; noise in {-1,0,+1} from a stream
//           keyed by the profile content.
// Trustee:  clamp(round(0.45 * received) + class_bonus, 0, received)
// Opinion:  the influencee adopts the influencer's opinion when the
//           influencer's education ordinal is >= its own, else keeps its own.

int mock_class_bonus(const std::string& social_class);
int mock_trustor_base(const core::Json& attrs);
int mock_trust_noise(const std::string& profile_text, std::uint64_t master_seed);
int mock_trustor_amount(const core::Json& attrs, const std::string& profile_text,
                        std::uint64_t master_seed);
int mock_trustee_amount(const core::Json& attrs, int received);
core::OpinionState mock_opinion_update(int influencer_education, int influencee_education,
                                       core::OpinionState influencer_opinion,
                                       core::OpinionState influencee_opinion);

// Mock backend with responders for trustor_decision, trustee_decision and
// opinion_update wired to the rules above.
std::unique_ptr<inference::MockBackend> make_mock_backend(std::string id,
                                                          std::uint64_t master_seed);

} // namespace socsim::scenarios
