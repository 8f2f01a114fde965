#include "socsim/engine/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"

namespace socsim::engine {

using core::Errc;
using core::raise;

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    raise(Errc::InvalidConfig, "key '" + key + "': expected boolean, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        raise(Errc::InvalidConfig, "key '" + key + "': expected integer, got '" + v + "'");
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        raise(Errc::InvalidConfig, "key '" + key + "': expected number, got '" + v + "'");
    }
}

} // namespace

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                raise(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": bad section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            ini.sections_[section]; // create even if empty
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            raise(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            raise(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": key outside a section");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        auto& entries = ini.sections_[section];
        for (const auto& [k, _] : entries) {
            if (k == key) {
                raise(Errc::InvalidConfig, "duplicate key '" + section + "." + key + "'");
            }
        }
        entries.emplace_back(key, value);
    }
    return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::Io, "cannot read config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void IniFile::apply_override(const std::string& dotted) {
    const std::size_t eq = dotted.find('=');
    if (eq == std::string::npos) {
        raise(Errc::InvalidConfig, "override must be section.key=value: '" + dotted + "'");
    }
    const std::string path = trim(dotted.substr(0, eq));
    const std::string value = trim(dotted.substr(eq + 1));
    const std::size_t dot = path.find('.');
    if (dot == std::string::npos) {
        raise(Errc::InvalidConfig, "override must be section.key=value: '" + dotted + "'");
    }
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    auto& entries = sections_[section];
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

const std::string* IniFile::find(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    for (const auto& [k, v] : it->second) {
        if (k == key) return &v;
    }
    return nullptr;
}

const std::vector<std::pair<std::string, std::string>>& IniFile::section(
    const std::string& name) const {
    static const std::vector<std::pair<std::string, std::string>> kEmpty;
    auto it = sections_.find(name);
    return it == sections_.end() ? kEmpty : it->second;
}

bool IniFile::has_section(const std::string& name) const {
    return sections_.count(name) != 0;
}

std::vector<std::string> IniFile::section_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : sections_) names.push_back(name);
    return names;
}

std::string IniFile::canonical_text() const {
    std::ostringstream out;
    for (const auto& [name, entries] : sections_) {
        out << '[' << name << "]\n";
        auto sorted = entries;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [k, v] : sorted) {
            out << k << " = " << v << '\n';
        }
    }
    return out.str();
}

std::string IniFile::digest_hex() const {
    return core::sha256_hex(canonical_text());
}

RunConfig RunConfig::from_ini(const IniFile& ini) {
    RunConfig cfg;
    cfg.digest_hex = ini.digest_hex();

    static const std::set<std::string> kSections = {"sim", "scenario", "backends", "cache"};
    static const std::set<std::string> kSimKeys = {
        "t_max",   "master_seed", "snapshot_every", "agent_evolve_every",
        "env_evolve_every", "workers", "retain_events", "run_root", "run_id"};
    static const std::set<std::string> kBackendTopKeys = {"policy", "queue_wait",
                                                          "surrogate_fraction", "surrogate",
                                                          "primary"};
    static const std::set<std::string> kBackendFields = {
        "kind",     "fidelity_rank", "capacity",   "weight", "base_url",
        "auth_env", "api_shape",     "model_name", "model_path", "tasks"};
    static const std::set<std::string> kCacheKeys = {"enabled", "tau",  "dim",
                                                     "capacity", "bucketed_cutoff", "persist"};

    for (const auto& name : ini.section_names()) {
        if (!kSections.count(name)) {
            raise(Errc::InvalidConfig, "unknown section '[" + name + "]'");
        }
    }
    for (const auto& [k, v] : ini.section("sim")) {
        if (!kSimKeys.count(k)) {
            raise(Errc::InvalidConfig, "unknown key 'sim." + k + "'");
        }
        if (k == "t_max") cfg.sim.t_max = parse_u64(v, k);
        else if (k == "master_seed") cfg.sim.master_seed = parse_u64(v, k);
        else if (k == "snapshot_every") cfg.sim.snapshot_every = parse_u64(v, k);
        else if (k == "agent_evolve_every") cfg.sim.agent_evolve_every = parse_u64(v, k);
        else if (k == "env_evolve_every") cfg.sim.env_evolve_every = parse_u64(v, k);
        else if (k == "workers") cfg.sim.workers = int(parse_u64(v, k));
        else if (k == "retain_events") cfg.sim.retain_events = parse_bool(v, k);
        else if (k == "run_root") cfg.sim.run_root = v;
        else if (k == "run_id") cfg.sim.run_id = v;
    }
    if (cfg.sim.agent_evolve_every < 1 || cfg.sim.env_evolve_every < 1 ||
        cfg.sim.snapshot_every < 1) {
        raise(Errc::InvalidConfig, "intervals must be >= 1");
    }
    if (cfg.sim.workers < 1) {
        raise(Errc::InvalidConfig, "workers must be >= 1");
    }

    for (const auto& [k, v] : ini.section("scenario")) {
        if (k == "name") {
            cfg.scenario.name = v;
        } else {
            cfg.scenario.params[k] = v; // validated by the scenario factory
        }
    }

    std::map<std::string, inference::BackendConfig> backends;
    std::vector<std::string> backend_order;
    for (const auto& [k, v] : ini.section("backends")) {
        if (kBackendTopKeys.count(k)) {
            if (k == "policy") cfg.router.policy = v;
            else if (k == "queue_wait") cfg.router.queue_wait = parse_bool(v, k);
            else if (k == "surrogate_fraction") cfg.router.surrogate_fraction = parse_double(v, k);
            else if (k == "surrogate") cfg.router.surrogate_backend = v;
            else if (k == "primary") cfg.router.primary_backend = v;
            continue;
        }
        const std::size_t dot = k.find('.');
        if (dot == std::string::npos) {
            raise(Errc::InvalidConfig, "unknown key 'backends." + k + "'");
        }
        const std::string id = k.substr(0, dot);
        const std::string field = k.substr(dot + 1);
        if (!kBackendFields.count(field)) {
            raise(Errc::InvalidConfig, "unknown key 'backends." + k + "'");
        }
        if (!backends.count(id)) {
            backends[id].id = id;
            backend_order.push_back(id);
        }
        auto& b = backends[id];
        if (field == "kind") b.kind = v;
        else if (field == "fidelity_rank") b.fidelity_rank = int(parse_u64(v, k));
        else if (field == "capacity") b.capacity = parse_u64(v, k);
        else if (field == "weight") b.weight = parse_double(v, k);
        else if (field == "base_url") b.base_url = v;
        else if (field == "auth_env") b.auth_env = v;
        else if (field == "api_shape") b.api_shape = v;
        else if (field == "model_name") b.model_name = v;
        else if (field == "model_path") b.model_path = v;
        else if (field == "tasks") b.tasks = v;
    }
    for (const auto& id : backend_order) {
        cfg.backends.push_back(backends[id]);
    }

    for (const auto& [k, v] : ini.section("cache")) {
        if (!kCacheKeys.count(k)) {
            raise(Errc::InvalidConfig, "unknown key 'cache." + k + "'");
        }
        if (k == "enabled") cfg.cache.enabled = parse_bool(v, k);
        else if (k == "tau") cfg.cache.tau = parse_double(v, k);
        else if (k == "dim") cfg.cache.dim = std::size_t(parse_u64(v, k));
        else if (k == "capacity") cfg.cache.capacity = std::size_t(parse_u64(v, k));
        else if (k == "bucketed_cutoff") cfg.cache.bucketed_cutoff = std::size_t(parse_u64(v, k));
        else if (k == "persist") cfg.cache.persist_path = v;
    }
    return cfg;
}

} // namespace socsim::engine
