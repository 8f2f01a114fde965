#pragma once

#include <array>
#include <map>
#include <string>

#include "socsim/core/agent.hpp"

namespace socsim::surrogate {

// Fixed 38-entry feature layout for influencer/influencee interactions:
//   [0..2]   influencer opinion one-hot (agree, disagree, neutral)
//   [3..5]   influencee opinion one-hot
//   [6]      influencer education ordinal / 8
//   [7]      influencee education ordinal / 8
//   [8]      influencer income decile / 10
//   [9]      influencee income decile / 10
//   [10]     influencer age / 100 (capped)
//   [11]     influencee age / 100 (capped)
//   [12..16] influencer social class one-hot (Upper, Upper-middle,
//            Lower-middle, Working, Lower)
//   [17..21] influencee social class one-hot
//   [22]     influencer urban flag
//   [23]     influencee urban flag
//   [24..25] influencer gender flags (male, female)
//   [26..27] influencee gender flags (male, female)
//   [28..36] opinion one-hot products, influencer-major
//   [37]     same-opinion flag
// Unknown or missing categorical values encode as an all-zero group.
inline constexpr std::size_t kFeatureDim = 38;

using FeatureVector = std::array<double, kFeatureDim>;

struct InteractionSide {
    core::OpinionState opinion = core::OpinionState::Neutral;
    const core::Json* attrs = nullptr; // profile attribute map
};

FeatureVector encode_features(const InteractionSide& influencer, const InteractionSide& influencee);

// Builds the vector from request variables (the opinion_update contract).
// Throws FeatureDecodeError on missing variables.
FeatureVector features_from_variables(const std::map<std::string, std::string>& vars);

// Throws InvalidFeature if any entry leaves [0,1].
void validate_features(const FeatureVector& fv);

// Variable names every opinion_update request carries.
std::map<std::string, std::string> opinion_request_variables(
    const core::Profile& influencer, core::OpinionState influencer_opinion,
    const core::Profile& influencee, core::OpinionState influencee_opinion,
    const std::string& statement);

int social_class_index(const std::string& label); // -1 when unknown

} // namespace socsim::surrogate
