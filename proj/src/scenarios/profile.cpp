#include "socsim/scenarios/profile.hpp"

#include <fstream>
#include <sstream>

#include "socsim/core/error.hpp"
#include "socsim/core/rng.hpp"
#include "socsim/surrogate/features.hpp"

namespace socsim::scenarios {

using core::Errc;
using core::Json;
using core::raise;

const char* education_label(int ordinal) {
    static const char* kLabels[9] = {
        "No formal education",
        "Primary education (ISCED 1)",
        "Lower secondary education (ISCED 2)",
        "Upper secondary education (ISCED 3)",
        "Post-secondary non-tertiary education (ISCED 4)",
        "Short-cycle tertiary education (ISCED 5)",
        "Bachelor or equivalent (ISCED 6)",
        "Master or equivalent (ISCED 7)",
        "Doctoral or equivalent (ISCED 8)",
    };
    if (ordinal < 0 || ordinal > 8) return "Unknown";
    return kLabels[ordinal];
}

std::string ProfileRecord::render_persona() const {
    std::ostringstream out;
    out << "You are a " << gender << ", " << age << " years old person.";
    if (!country.empty()) {
        out << " You live in " << country << ".";
    }
    if (!town_size.empty() || !urban_rural.empty()) {
        out << " Your town";
        if (!town_size.empty()) out << " has a population of " << town_size << ",";
        out << " is considered " << (urban_rural.empty() ? "Urban" : urban_rural) << ".";
    }
    if (immigrant) {
        out << " You are an immigrant to this country (born outside this country).";
    } else {
        out << " You are not an immigrant to this country.";
    }
    if (!language.empty()) {
        out << " Your native language is " << language << ".";
    }
    if (!ethnicity.empty()) {
        out << " Your ethnicity/race is " << ethnicity << ".";
    }
    if (religion.empty() || religion == "None") {
        out << " You don't have any religious beliefs.";
    } else {
        out << " Your religion is " << religion << ".";
    }
    if (!marital.empty()) {
        out << " You are " << marital << " and have " << children
            << (children == 1 ? " child." : " children.");
    }
    out << " Your highest education level is " << education_label(education) << ".";
    if (!employment.empty()) {
        out << " You are " << employment;
        if (!occupation.empty()) out << " working as " << occupation;
        if (!sector.empty()) out << " in the " << sector << " sector";
        out << ".";
    }
    if (!financial_situation.empty()) {
        out << " Your financial situation: " << financial_situation << ".";
    }
    if (!social_class.empty()) {
        std::string label = social_class;
        for (char& c : label) {
            if (c == '-') c = ' ';
        }
        out << " You consider yourself to be " << label << " class.";
    }
    out << " On a scale of 1-10, You place your household income at level " << income_decile
        << ".";
    return out.str();
}

Json ProfileRecord::to_attrs() const {
    return Json{{"country", country},
                {"town_size", town_size},
                {"urban_rural", urban_rural},
                {"gender", gender},
                {"age", age},
                {"marital", marital},
                {"children", children},
                {"education", education},
                {"employment", employment},
                {"sector", sector},
                {"occupation", occupation},
                {"religion", religion},
                {"ethnicity", ethnicity},
                {"language", language},
                {"immigrant", immigrant},
                {"social_class", social_class},
                {"income_decile", income_decile},
                {"financial_situation", financial_situation}};
}

core::ProfilePtr ProfileRecord::to_profile() const {
    auto p = std::make_shared<core::Profile>();
    p->attrs = to_attrs();
    p->text = render_persona();
    return p;
}

ProfileRecord ProfileRecord::parse(const Json& j) {
    if (!j.is_object()) {
        raise(Errc::InvalidSeedData, "profile record is not an object");
    }
    if (!j.contains("gender") || !j["gender"].is_string() || j["gender"].get<std::string>().empty()) {
        raise(Errc::InvalidSeedData, "missing core field 'gender'");
    }
    if (!j.contains("age") || !j["age"].is_number_integer()) {
        raise(Errc::InvalidSeedData, "missing core field 'age'");
    }
    ProfileRecord r;
    r.gender = j["gender"].get<std::string>();
    r.age = j["age"].get<int>();
    if (r.age < 16) {
        raise(Errc::InvalidSeedData, "age " + std::to_string(r.age) + " below 16");
    }
    r.country = j.value("country", "");
    r.town_size = j.value("town_size", "");
    r.urban_rural = j.value("urban_rural", "");
    r.marital = j.value("marital", "");
    r.children = j.value("children", 0);
    r.education = j.value("education", 0);
    if (r.education < 0 || r.education > 8) {
        raise(Errc::InvalidSeedData, "education ordinal out of range");
    }
    r.employment = j.value("employment", "");
    r.sector = j.value("sector", "");
    r.occupation = j.value("occupation", "");
    r.religion = j.value("religion", "");
    r.ethnicity = j.value("ethnicity", "");
    r.language = j.value("language", "");
    r.immigrant = j.value("immigrant", false);
    r.social_class = j.value("social_class", "");
    if (!r.social_class.empty() && surrogate::social_class_index(r.social_class) < 0) {
        raise(Errc::InvalidSeedData, "unknown social_class '" + r.social_class + "'");
    }
    r.income_decile = j.value("income_decile", 1);
    if (r.income_decile < 1 || r.income_decile > 10) {
        raise(Errc::InvalidSeedData, "income_decile out of range");
    }
    r.financial_situation = j.value("financial_situation", "");
    return r;
}

IngestResult ingest_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    IngestResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            result.rejected.emplace_back(line_no, "malformed JSON");
            continue;
        }
        try {
            result.accepted.push_back(ProfileRecord::parse(j));
        } catch (const core::SimError& e) {
            result.rejected.emplace_back(line_no, e.what());
        }
    }
    if (line_no == 0) {
        result.warnings.push_back("profile file is empty: " + path.string());
    }
    return result;
}

void write_profiles(const std::filesystem::path& path, const std::vector<ProfileRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(Errc::Io, "cannot write " + path.string());
    }
    for (const auto& r : records) {
        out << r.to_attrs().dump() << '\n';
    }
}

const Marginals::Attribute& Marginals::attribute(const std::string& name) const {
    for (const auto& a : attributes) {
        if (a.name == name) return a;
    }
    raise(Errc::InvalidConfig, "no marginal for attribute '" + name + "'");
}

Marginals Marginals::defaults() {
    Marginals m;
    auto add = [&](std::string name, std::vector<std::string> values, std::vector<double> weights) {
        m.attributes.push_back({std::move(name), std::move(values), std::move(weights)});
    };
    add("country",
        {"Indonesia", "Mexico", "Germany", "Brazil", "Nigeria", "India", "United States", "China",
         "Egypt", "Pakistan", "Other"},
        {8, 7, 6, 6, 5, 9, 7, 8, 5, 5, 34});
    add("town_size", {"under 5,000", "5,000-20,000", "20,000-50,000", "50,000-100,000",
                      "100,000-500,000", "500,000 and more"},
        {18, 17, 15, 13, 19, 18});
    add("urban_rural", {"Urban", "Rural"}, {62, 38});
    add("gender", {"Male", "Female"}, {48, 52});
    add("age_bucket", {"16-24", "25-34", "35-44", "45-54", "55-64", "65-90"},
        {16, 20, 19, 17, 15, 13});
    add("marital", {"Single", "Married", "Divorced", "Widowed"}, {30, 52, 10, 8});
    add("children", {"0", "1", "2", "3", "4", "5"}, {30, 20, 26, 14, 6, 4});
    add("education", {"0", "1", "2", "3", "4", "5", "6", "7", "8"},
        {4, 10, 16, 30, 12, 8, 13, 6, 1});
    add("employment",
        {"Full time (30 hours a week or more)", "Part time (less than 30 hours a week)",
         "Self employed", "Retired/pensioned", "Housewife not otherwise employed", "Student",
         "Unemployed"},
        {38, 9, 12, 15, 10, 7, 9});
    add("sector", {"Government or public institution", "Private business or industry",
                   "Private non-profit organization"},
        {22, 70, 8});
    add("occupation",
        {"Professional and technical", "Higher administrative", "Clerical", "Sales", "Service",
         "Skilled worker", "Semi-skilled worker", "Unskilled worker", "Farm worker",
         "Farm owner/manager"},
        {14, 6, 10, 12, 14, 14, 11, 9, 6, 4});
    add("religion", {"None", "Roman Catholic", "Protestant", "Orthodox", "Muslim", "Hindu",
                     "Buddhist", "Other"},
        {24, 18, 12, 6, 22, 8, 5, 5});
    add("ethnicity", {"Caucasian white", "Black", "South Asian", "East Asian", "Arabic",
                      "Indigenous", "Mixed", "Other"},
        {32, 12, 18, 16, 9, 4, 6, 3});
    add("language", {"English", "Spanish; Castilian", "Mandarin", "Hindi", "Arabic", "Portuguese",
                     "Bahasa Indonesia", "German", "Other"},
        {14, 12, 16, 12, 9, 7, 8, 5, 17});
    add("immigrant", {"No", "Yes"}, {90, 10});
    add("social_class", {"Upper", "Upper-middle", "Lower-middle", "Working", "Lower"},
        {3, 18, 33, 33, 13});
    add("income_decile", {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"},
        {6, 8, 11, 13, 10, 10, 10, 9, 12, 11});
    add("financial_situation",
        {"Saved money", "Just got by", "Spent some savings", "Spent some savings and borrowed money",
         "Spent savings and borrowed money"},
        {26, 42, 16, 10, 6});
    return m;
}

Marginals Marginals::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("attributes")) {
        raise(Errc::InvalidConfig, "malformed marginals file " + path.string());
    }
    Marginals m;
    for (const auto& a : j["attributes"]) {
        Marginals::Attribute attr;
        attr.name = a.at("name").get<std::string>();
        for (const auto& v : a.at("values")) attr.values.push_back(v.get<std::string>());
        for (const auto& w : a.at("weights")) attr.weights.push_back(w.get<double>());
        if (attr.values.size() != attr.weights.size() || attr.values.empty()) {
            raise(Errc::InvalidConfig, "bad marginal for '" + attr.name + "'");
        }
        m.attributes.push_back(std::move(attr));
    }
    return m;
}

Json Marginals::to_json() const {
    Json arr = Json::array();
    for (const auto& a : attributes) {
        arr.push_back(Json{{"name", a.name}, {"values", a.values}, {"weights", a.weights}});
    }
    return Json{{"attributes", arr}};
}

namespace {

std::size_t pick_weighted(const Marginals::Attribute& attr, double u) {
    double total = 0.0;
    for (double w : attr.weights) total += w;
    double x = u * total;
    for (std::size_t i = 0; i < attr.weights.size(); ++i) {
        x -= attr.weights[i];
        if (x < 0.0) return i;
    }
    return attr.weights.size() - 1;
}

std::string draw(const Marginals& m, const std::string& attr_name, std::uint64_t seed,
                 std::uint64_t record) {
    const auto& attr = m.attribute(attr_name);
    core::RngStream stream(seed, "synth:" + attr_name);
    const double u = double(stream.at(record) >> 11) * 0x1.0p-53;
    return attr.values[pick_weighted(attr, u)];
}

} // namespace

std::vector<ProfileRecord> synthesize_profiles(std::uint64_t n, std::uint64_t seed,
                                               const Marginals& marginals) {
    std::vector<ProfileRecord> out;
    out.reserve(std::size_t(n));
    core::RngStream age_jitter(seed, "synth:age_within");
    for (std::uint64_t i = 0; i < n; ++i) {
        ProfileRecord r;
        r.country = draw(marginals, "country", seed, i);
        r.town_size = draw(marginals, "town_size", seed, i);
        r.urban_rural = draw(marginals, "urban_rural", seed, i);
        r.gender = draw(marginals, "gender", seed, i);
        const std::string bucket = draw(marginals, "age_bucket", seed, i);
        const std::size_t dash = bucket.find('-');
        const int lo = std::stoi(bucket.substr(0, dash));
        const int hi = std::stoi(bucket.substr(dash + 1));
        r.age = lo + int(age_jitter.at(i) % std::uint64_t(hi - lo + 1));
        r.marital = draw(marginals, "marital", seed, i);
        r.children = std::stoi(draw(marginals, "children", seed, i));
        r.education = std::stoi(draw(marginals, "education", seed, i));
        r.employment = draw(marginals, "employment", seed, i);
        r.sector = draw(marginals, "sector", seed, i);
        r.occupation = draw(marginals, "occupation", seed, i);
        r.religion = draw(marginals, "religion", seed, i);
        r.ethnicity = draw(marginals, "ethnicity", seed, i);
        r.language = draw(marginals, "language", seed, i);
        r.immigrant = draw(marginals, "immigrant", seed, i) == "Yes";
        r.social_class = draw(marginals, "social_class", seed, i);
        r.income_decile = std::stoi(draw(marginals, "income_decile", seed, i));
        r.financial_situation = draw(marginals, "financial_situation", seed, i);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<core::ProfilePtr> to_profile_pool(const std::vector<ProfileRecord>& records) {
    std::vector<core::ProfilePtr> pool;
    pool.reserve(records.size());
    for (const auto& r : records) pool.push_back(r.to_profile());
    return pool;
}

} // namespace socsim::scenarios
