#include "socsim/surrogate/features.hpp"

#include <algorithm>

#include "socsim/core/error.hpp"

namespace socsim::surrogate {

using core::Errc;
using core::Json;
using core::OpinionState;
using core::raise;

int social_class_index(const std::string& label) {
    static const char* kClasses[5] = {"Upper", "Upper-middle", "Lower-middle", "Working", "Lower"};
    for (int i = 0; i < 5; ++i) {
        if (label == kClasses[i]) return i;
    }
    return -1;
}

namespace {

struct SideValues {
    OpinionState opinion = OpinionState::Neutral;
    double education = 0.0;    // already scaled
    double income = 0.0;
    double age = 0.0;
    int class_idx = -1;
    bool urban = false;
    int gender = -1; // 0 male, 1 female, -1 unknown
};

void write_side(FeatureVector& fv, const SideValues& s, std::size_t opinion_base,
                std::size_t scalar_base, std::size_t class_base, std::size_t urban_idx,
                std::size_t gender_base) {
    fv[opinion_base + std::size_t(s.opinion)] = 1.0;
    fv[scalar_base] = s.education;
    fv[scalar_base + 2] = s.income;
    fv[scalar_base + 4] = s.age;
    if (s.class_idx >= 0) fv[class_base + std::size_t(s.class_idx)] = 1.0;
    fv[urban_idx] = s.urban ? 1.0 : 0.0;
    if (s.gender == 0) fv[gender_base] = 1.0;
    if (s.gender == 1) fv[gender_base + 1] = 1.0;
}

FeatureVector assemble(const SideValues& r, const SideValues& e) {
    FeatureVector fv{};
    // Scalar slots interleave influencer/influencee: 6,8,10 vs 7,9,11.
    write_side(fv, r, 0, 6, 12, 22, 24);
    write_side(fv, e, 3, 7, 17, 23, 26);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            fv[28 + std::size_t(a * 3 + b)] = fv[std::size_t(a)] * fv[3 + std::size_t(b)];
        }
    }
    fv[37] = r.opinion == e.opinion ? 1.0 : 0.0;
    return fv;
}

SideValues side_from_attrs(OpinionState opinion, const Json& attrs) {
    SideValues s;
    s.opinion = opinion;
    if (attrs.contains("education")) {
        s.education = std::clamp(attrs["education"].get<double>(), 0.0, 8.0) / 8.0;
    }
    if (attrs.contains("income_decile")) {
        s.income = std::clamp(attrs["income_decile"].get<double>(), 0.0, 10.0) / 10.0;
    }
    if (attrs.contains("age")) {
        s.age = std::clamp(attrs["age"].get<double>(), 0.0, 100.0) / 100.0;
    }
    if (attrs.contains("social_class")) {
        s.class_idx = social_class_index(attrs["social_class"].get<std::string>());
    }
    if (attrs.contains("urban_rural")) {
        s.urban = attrs["urban_rural"].get<std::string>() == "Urban";
    }
    if (attrs.contains("gender")) {
        const std::string g = attrs["gender"].get<std::string>();
        s.gender = g == "Male" ? 0 : (g == "Female" ? 1 : -1);
    }
    return s;
}

const std::string& require_var(const std::map<std::string, std::string>& vars,
                               const std::string& name) {
    auto it = vars.find(name);
    if (it == vars.end()) {
        raise(Errc::FeatureDecodeError, "missing variable '" + name + "'");
    }
    return it->second;
}

SideValues side_from_vars(const std::map<std::string, std::string>& vars,
                          const std::string& prefix) {
    SideValues s;
    s.opinion = core::opinion_from_string(require_var(vars, prefix + "_opinion"));
    s.education = std::clamp(std::stod(require_var(vars, prefix + "_education")), 0.0, 8.0) / 8.0;
    s.income =
        std::clamp(std::stod(require_var(vars, prefix + "_income_decile")), 0.0, 10.0) / 10.0;
    s.age = std::clamp(std::stod(require_var(vars, prefix + "_age")), 0.0, 100.0) / 100.0;
    s.class_idx = social_class_index(require_var(vars, prefix + "_social_class"));
    s.urban = require_var(vars, prefix + "_urban_rural") == "Urban";
    const std::string g = require_var(vars, prefix + "_gender");
    s.gender = g == "Male" ? 0 : (g == "Female" ? 1 : -1);
    return s;
}

} // namespace

FeatureVector encode_features(const InteractionSide& influencer,
                              const InteractionSide& influencee) {
    static const Json kEmpty = Json::object();
    return assemble(side_from_attrs(influencer.opinion, influencer.attrs ? *influencer.attrs : kEmpty),
                    side_from_attrs(influencee.opinion, influencee.attrs ? *influencee.attrs : kEmpty));
}

FeatureVector features_from_variables(const std::map<std::string, std::string>& vars) {
    try {
        return assemble(side_from_vars(vars, "influencer"), side_from_vars(vars, "influencee"));
    } catch (const std::invalid_argument&) {
        raise(Errc::FeatureDecodeError, "non-numeric feature variable");
    } catch (const std::out_of_range&) {
        raise(Errc::FeatureDecodeError, "feature variable out of numeric range");
    }
}

void validate_features(const FeatureVector& fv) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        if (!(fv[i] >= 0.0) || fv[i] > 1.0) {
            raise(Errc::InvalidFeature,
                  "feature " + std::to_string(i) + " = " + std::to_string(fv[i]) +
                      " outside [0,1]");
        }
    }
}

std::map<std::string, std::string> opinion_request_variables(
    const core::Profile& influencer, core::OpinionState influencer_opinion,
    const core::Profile& influencee, core::OpinionState influencee_opinion,
    const std::string& statement) {
    auto attr_str = [](const Json& attrs, const char* key) -> std::string {
        if (!attrs.contains(key)) return "";
        const Json& v = attrs[key];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
        return v.dump();
    };
    std::map<std::string, std::string> vars;
    vars["statement"] = statement;
    const struct {
        const char* prefix;
        const core::Profile* profile;
        core::OpinionState opinion;
    } sides[2] = {{"influencer", &influencer, influencer_opinion},
                  {"influencee", &influencee, influencee_opinion}};
    for (const auto& side : sides) {
        const std::string p = side.prefix;
        const Json& attrs = side.profile->attrs;
        vars[p + "_profile"] = side.profile->text;
        vars[p + "_opinion"] = core::opinion_name(side.opinion);
        vars[p + "_education"] = attr_str(attrs, "education");
        vars[p + "_income_decile"] = attr_str(attrs, "income_decile");
        vars[p + "_age"] = attr_str(attrs, "age");
        vars[p + "_social_class"] = attr_str(attrs, "social_class");
        vars[p + "_urban_rural"] = attr_str(attrs, "urban_rural");
        vars[p + "_gender"] = attr_str(attrs, "gender");
    }
    return vars;
}

} // namespace socsim::surrogate
