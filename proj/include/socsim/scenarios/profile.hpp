#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "socsim/core/agent.hpp"

namespace socsim::scenarios {

// Socio-demographic survey record. education is a 9-level ISCED-style
// ordinal (0 = no formal education .. 8 = doctoral); social_class uses the
// canonical labels Upper, Upper-middle, Lower-middle, Working, Lower.
struct ProfileRecord {
    std::string country;
    std::string town_size;
    std::string urban_rural; // Urban | Rural
    std::string gender;      // Male | Female
    int age = 0;             // >= 16
    std::string marital;
    int children = 0;
    int education = 0; // 0..8
    std::string employment;
    std::string sector;
    std::string occupation;
    std::string religion;
    std::string ethnicity;
    std::string language;
    bool immigrant = false;
    std::string social_class;
    int income_decile = 1; // 1..10
    std::string financial_situation;

    // Second-person persona text ("You are a Female, 60 years old person. ...").
    std::string render_persona() const;

    core::Json to_attrs() const;
    core::ProfilePtr to_profile() const;

    // Strict parse: mandatory core fields (gender, age) must be present and
    // valid; range checks on age, education, income_decile, social_class.
    static ProfileRecord parse(const core::Json& j);
};

const char* education_label(int ordinal);

struct IngestResult {
    std::vector<ProfileRecord> accepted;
    std::vector<std::pair<std::size_t, std::string>> rejected; // line index, reason
    std::vector<std::string> warnings;
};

// One JSON record per line; invalid records are rejected and counted.
IngestResult ingest_profiles(const std::filesystem::path& path);

void write_profiles(const std::filesystem::path& path, const std::vector<ProfileRecord>& records);

// Categorical marginals for the synthetic generator.
struct Marginals {
    struct Attribute {
        std::string name;
        std::vector<std::string> values;
        std::vector<double> weights;
    };
    std::vector<Attribute> attributes;

    const Attribute& attribute(const std::string& name) const;
    static Marginals defaults();
    static Marginals from_json_file(const std::filesystem::path& path);
    core::Json to_json() const;
};

// n records sampled attribute-wise from the marginals; deterministic in the
// seed. Ages are drawn as a bucket plus a uniform offset within it.
std::vector<ProfileRecord> synthesize_profiles(std::uint64_t n, std::uint64_t seed,
                                               const Marginals& marginals = Marginals::defaults());

std::vector<core::ProfilePtr> to_profile_pool(const std::vector<ProfileRecord>& records);

} // namespace socsim::scenarios
