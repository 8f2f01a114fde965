#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "socsim/core/event.hpp"
#include "socsim/inference/backend.hpp"
#include "socsim/inference/cache.hpp"
#include "socsim/inference/router.hpp"

namespace socsim::engine {

// Minimal sectioned key=value config text. Full-line comments start with
// '#' or ';'. Duplicate keys within a section are errors.
class IniFile {
public:
    static IniFile parse_file(const std::filesystem::path& path);
    static IniFile parse_string(const std::string& text);

    // "section.key=value" override syntax.
    void apply_override(const std::string& dotted);

    const std::string* find(const std::string& section, const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& section(const std::string& name) const;
    bool has_section(const std::string& name) const;
    std::vector<std::string> section_names() const;

    std::string canonical_text() const; // sorted rendering, digest input
    std::string digest_hex() const;

private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

struct SimConfig {
    core::Tick t_max = 0;
    std::uint64_t master_seed = 0;
    core::Tick snapshot_every = 1'000'000'000ull;
    core::Tick agent_evolve_every = 1;
    core::Tick env_evolve_every = 1;
    int workers = 1;
    bool retain_events = true;
    std::string run_root = "runs";
    std::string run_id;
};

struct ScenarioConfig {
    std::string name;
    std::map<std::string, std::string> params;
};

struct RunConfig {
    SimConfig sim;
    ScenarioConfig scenario;
    inference::CacheConfig cache;
    inference::RouterConfig router;
    std::vector<inference::BackendConfig> backends;
    std::string digest_hex;

    // Validates sections and key names; unknown keys raise InvalidConfig
    // naming the key.
    static RunConfig from_ini(const IniFile& ini);
};

} // namespace socsim::engine
