#include "socsim/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "socsim/core/error.hpp"
#include "socsim/engine/engine.hpp"
#include "socsim/graph/csr.hpp"
#include "socsim/inference/remote.hpp"
#include "socsim/scenarios/mock.hpp"
#include "socsim/scenarios/opinion.hpp"
#include "socsim/scenarios/templates.hpp"
#include "socsim/scenarios/trust.hpp"
#include "socsim/surrogate/backend.hpp"
#include "socsim/surrogate/distill.hpp"

namespace socsim::cli {

namespace fs = std::filesystem;
using core::Errc;
using core::Json;
using core::raise;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            if (start < s.size()) out.push_back(s.substr(start));
            break;
        }
        if (comma > start) out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

core::Table summary_table(const Json& summary) {
    core::Table t("summary", {"metric", "value"});
    for (auto it = summary.begin(); it != summary.end(); ++it) {
        t.add_row({it.key(), it.value().is_string() ? it.value().get<std::string>()
                                                    : it.value().dump()});
    }
    return t;
}

// ---- shared run machinery ----

struct PreparedRun {
    engine::RunConfig config;
    std::shared_ptr<inference::InferenceLayer> layer;
    std::shared_ptr<engine::OperationSet> ops;
    engine::SeedDataset data;
    std::string run_id;
    std::vector<std::string> task_classes;
};

const std::string& require_param(const engine::ScenarioConfig& sc, const std::string& key) {
    auto it = sc.params.find(key);
    if (it == sc.params.end()) {
        raise(Errc::InvalidConfig, "scenario '" + sc.name + "' requires key 'scenario." + key + "'");
    }
    return it->second;
}

std::string param_or(const engine::ScenarioConfig& sc, const std::string& key,
                     const std::string& fallback) {
    auto it = sc.params.find(key);
    return it == sc.params.end() ? fallback : it->second;
}

void reject_unknown_params(const engine::ScenarioConfig& sc,
                           const std::set<std::string>& allowed) {
    for (const auto& [k, v] : sc.params) {
        (void)v;
        if (!allowed.count(k)) {
            raise(Errc::InvalidConfig, "unknown key 'scenario." + k + "'");
        }
    }
}

// profiles = synth:<n> or a JSONL path.
std::vector<core::ProfilePtr> load_profile_pool(const std::string& spec, std::uint64_t seed,
                                                std::vector<std::string>* notes) {
    if (spec.rfind("synth:", 0) == 0) {
        const std::uint64_t n = std::stoull(spec.substr(6));
        if (n == 0) {
            raise(Errc::InvalidConfig, "profile pool 'synth:0' is empty");
        }
        return scenarios::to_profile_pool(scenarios::synthesize_profiles(n, seed));
    }
    auto result = scenarios::ingest_profiles(spec);
    if (notes) {
        for (const auto& [line, reason] : result.rejected) {
            notes->push_back("rejected profile line " + std::to_string(line) + ": " + reason);
        }
        for (const auto& w : result.warnings) notes->push_back(w);
    }
    std::vector<core::ProfilePtr> pool;
    pool.reserve(result.accepted.size());
    for (const auto& r : result.accepted) pool.push_back(r.to_profile());
    return pool;
}

std::shared_ptr<inference::InferenceLayer> build_layer(const engine::RunConfig& cfg,
                                                       const std::vector<std::string>& tasks) {
    inference::LayerConfig lc;
    lc.cache = cfg.cache;
    lc.router = cfg.router;
    lc.master_seed = cfg.sim.master_seed;
    lc.default_workers = cfg.sim.workers;
    auto layer = std::make_shared<inference::InferenceLayer>(lc);
    scenarios::install_scenario_assets(*layer);
    if (cfg.backends.empty()) {
        raise(Errc::InvalidConfig, "no backends configured");
    }
    for (const auto& b : cfg.backends) {
        const auto kind = inference::backend_kind_from_string(b.kind);
        std::unique_ptr<inference::Backend> backend;
        if (kind == inference::BackendKind::Mock) {
            backend = scenarios::make_mock_backend(b.id, cfg.sim.master_seed);
        } else if (kind == inference::BackendKind::Surrogate) {
            if (b.model_path.empty()) {
                raise(Errc::InvalidConfig, "backend '" + b.id + "' needs model_path");
            }
            backend = std::make_unique<surrogate::SurrogateBackend>(
                b.id, surrogate::SurrogateModel::load(b.model_path));
        } else {
            backend = std::make_unique<inference::RemoteHttpBackend>(b);
        }
        layer->register_backend(std::move(backend), b);
        const std::vector<std::string> bound =
            b.tasks.empty() ? tasks : split_csv(b.tasks);
        for (const auto& task : bound) {
            layer->bind_task(task, b.id);
        }
    }
    return layer;
}

PreparedRun prepare_run(engine::RunConfig cfg, std::vector<std::string>* notes) {
    PreparedRun run;
    const auto& sc = cfg.scenario;
    if (sc.name == "trust_game") {
        reject_unknown_params(sc, {"profiles", "roles", "templates"});
        run.task_classes = {"trustor_decision", "trustee_decision"};
        scenarios::TrustGameConfig tc;
        const std::string roles = param_or(sc, "roles", "both");
        tc.trustor_role = roles == "both" || roles == "trustor";
        tc.trustee_role = roles == "both" || roles == "trustee";
        if (!tc.trustor_role && !tc.trustee_role) {
            raise(Errc::InvalidConfig, "scenario.roles must be both|trustor|trustee");
        }
        tc.workers = cfg.sim.workers;
        run.data.profiles =
            load_profile_pool(require_param(sc, "profiles"), cfg.sim.master_seed, notes);
        run.ops = std::make_shared<scenarios::TrustOps>(tc);
        if (cfg.sim.t_max == 0) cfg.sim.t_max = 1;
    } else if (sc.name == "opinion") {
        reject_unknown_params(sc, {"graph", "profiles", "statement", "seeding", "rounds",
                                   "influencer_frac", "sample_frac_per_round", "cacheable",
                                   "templates"});
        run.task_classes = {"opinion_update"};
        scenarios::OpinionConfig oc;
        oc.statement = param_or(sc, "statement", oc.statement);
        oc.seeding = scenarios::seeding_from_string(param_or(sc, "seeding", "random"));
        oc.rounds = std::stoull(param_or(sc, "rounds", "20"));
        oc.influencer_frac = std::stod(param_or(sc, "influencer_frac", "0.20"));
        oc.sample_frac_per_round = std::stod(param_or(sc, "sample_frac_per_round", "0.01"));
        oc.cacheable = param_or(sc, "cacheable", "false") == "true";
        auto g = std::make_shared<graph::CsrGraph>(
            graph::CsrGraph::load(require_param(sc, "graph")));
        run.data.topology = g;
        run.data.profiles = load_profile_pool(param_or(sc, "profiles", "synth:10000"),
                                              cfg.sim.master_seed, notes);
        run.ops = std::make_shared<scenarios::OpinionOps>(oc);
        if (cfg.sim.t_max == 0) cfg.sim.t_max = oc.rounds + 1;
    } else {
        raise(Errc::InvalidConfig, "unknown scenario '" + sc.name + "'");
    }
    run.layer = build_layer(cfg, run.task_classes);
    if (auto it = sc.params.find("templates"); it != sc.params.end()) {
        scenarios::load_template_dir(run.layer->templates(), it->second);
    }
    run.run_id = !cfg.sim.run_id.empty()
                     ? cfg.sim.run_id
                     : sc.name + "-" + cfg.digest_hex.substr(0, 12) + "-s" +
                           std::to_string(cfg.sim.master_seed);
    run.config = std::move(cfg);
    return run;
}

fs::path pick_run_dir(const std::string& run_root, const std::string& run_id,
                      const std::string& explicit_out) {
    if (!explicit_out.empty()) return explicit_out;
    fs::path dir = fs::path(run_root) / run_id;
    int suffix = 2;
    while (fs::exists(dir)) {
        dir = fs::path(run_root) / (run_id + "-" + std::to_string(suffix++));
    }
    return dir;
}

void write_manifest(const fs::path& run_dir, const std::string& run_id,
                    const engine::RunConfig& cfg, const std::string& status,
                    const std::string& started_at, const Json& summary) {
    Json artifacts = Json::object();
    if (fs::exists(run_dir)) {
        for (const auto& entry : fs::directory_iterator(run_dir)) {
            if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
            artifacts[entry.path().filename().string()] =
                Json{{"path", entry.path().filename().string()},
                     {"sha256", core::sha256_file_hex(entry.path())}};
        }
    }
    Json manifest{{"run_id", run_id},
                  {"status", status},
                  {"config_digest", cfg.digest_hex},
                  {"master_seed", cfg.sim.master_seed},
                  {"scenario", cfg.scenario.name},
                  {"started_at", started_at},
                  {"finished_at", iso_utc_now()},
                  {"artifacts", artifacts},
                  {"summary", summary},
                  {"versions", Json{{"artifact", kVersion},
                                    {"graph_format", 1},
                                    {"model_format", 1},
                                    {"cache_format", 1}}}};
    std::ofstream out(run_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

void print_summary(const Json& summary) {
    for (auto it = summary.begin(); it != summary.end(); ++it) {
        std::cout << "  " << it.key() << " = "
                  << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
                  << '\n';
    }
}

// ---- subcommands ----

int cmd_gen_network(std::uint64_t n, std::uint64_t m, std::uint64_t seed,
                    const std::string& out, bool wide_ids) {
    graph::BaParams p;
    p.n = n;
    p.m_attach = m;
    p.seed = seed;
    p.narrow_ids = !wide_ids;
    const graph::CsrGraph g = graph::generate_ba(p);
    g.save(out);

    std::uint64_t dmin = ~0ull, dmax = 0;
    for (std::uint64_t v = 0; v < g.num_nodes(); ++v) {
        const std::uint64_t d = g.degree(v);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    const double dmean = g.num_nodes() ? 2.0 * double(g.num_edges()) / double(g.num_nodes()) : 0.0;

    core::Table summary("network_summary", {"metric", "value"});
    summary.add_row({"nodes", core::Table::fmt(g.num_nodes())});
    summary.add_row({"edges", core::Table::fmt(g.num_edges())});
    summary.add_row({"degree_min", core::Table::fmt(dmin)});
    summary.add_row({"degree_mean", core::Table::fmt(dmean)});
    summary.add_row({"degree_max", core::Table::fmt(dmax)});
    summary.add_row({"digest", g.content_digest_hex()});

    // Complementary CDF sampled at power-of-two degrees.
    std::vector<std::uint64_t> hist(std::size_t(dmax) + 1, 0);
    for (std::uint64_t v = 0; v < g.num_nodes(); ++v) ++hist[std::size_t(g.degree(v))];
    core::Table ccdf("degree_ccdf", {"degree", "ccdf"});
    std::uint64_t tail = g.num_nodes();
    std::uint64_t next_probe = 1;
    for (std::uint64_t d = 0; d <= dmax; ++d) {
        if (d == next_probe) {
            ccdf.add_row({core::Table::fmt(d),
                          core::Table::fmt(double(tail) / double(g.num_nodes()))});
            next_probe *= 2;
        }
        tail -= hist[std::size_t(d)];
    }
    summary.write_tsv(out + ".summary.tsv");
    ccdf.write_tsv(out + ".ccdf.tsv");
    std::cout << "wrote " << out << " (" << g.num_nodes() << " nodes, " << g.num_edges()
              << " edges, mean degree " << dmean << ", max degree " << dmax << ")\n";
    return 0;
}

int cmd_synth_profiles(std::uint64_t n, std::uint64_t seed, const std::string& out,
                       const std::string& marginals_path) {
    const scenarios::Marginals marginals = marginals_path.empty()
                                               ? scenarios::Marginals::defaults()
                                               : scenarios::Marginals::from_json_file(marginals_path);
    const auto records = scenarios::synthesize_profiles(n, seed, marginals);
    scenarios::write_profiles(out, records);
    std::cout << "wrote " << records.size() << " profiles to " << out << '\n';
    return 0;
}

int cmd_train_surrogate(const std::string& teacher, std::uint64_t n_samples,
                        std::uint64_t pool_size, std::uint64_t seed, int epochs, int batch,
                        double lr, const std::string& out, std::string report_prefix,
                        int workers) {
    if (teacher != "mock") {
        raise(Errc::InvalidConfig, "only the mock teacher is supported offline");
    }
    if (n_samples == 0) {
        raise(Errc::InvalidParams, "--n-samples 0 yields an empty dataset");
    }
    if (report_prefix.empty()) {
        report_prefix = fs::path(out).replace_extension("").string();
    }
    const fs::path model_path = out;
    const fs::path report_path = report_prefix + ".report.tsv";
    const fs::path summary_path = report_prefix + ".train_summary.tsv";
    try {
        inference::LayerConfig lc;
        lc.cache.enabled = false;
        lc.master_seed = seed;
        lc.default_workers = workers;
        inference::InferenceLayer layer(lc);
        scenarios::install_scenario_assets(layer);
        inference::BackendConfig meta;
        meta.id = "teacher";
        meta.kind = "mock";
        layer.register_backend(scenarios::make_mock_backend("teacher", seed), meta);
        layer.bind_task("opinion_update", "teacher");

        const auto pool =
            scenarios::to_profile_pool(scenarios::synthesize_profiles(pool_size, seed));
        surrogate::DistillConfig dc;
        dc.n = n_samples;
        dc.seed = seed;
        dc.workers = workers;
        const auto data = surrogate::generate_distill_data(layer, pool, dc);

        surrogate::TrainParams hp;
        hp.epochs = epochs;
        hp.batch = batch;
        hp.lr = lr;
        hp.seed = seed;
        surrogate::TrainReport report;
        const auto model = surrogate::train(data, hp, &report);
        model.save(model_path);

        core::Table curve("train_report", {"epoch", "train_loss"});
        for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
            curve.add_row({core::Table::fmt(std::uint64_t(e + 1)),
                           core::Table::fmt(report.epoch_loss[e])});
        }
        curve.write_tsv(report_path);
        core::Table summary("train_summary", {"metric", "value"});
        summary.add_row({"samples", core::Table::fmt(std::uint64_t(data.rows.size()))});
        summary.add_row({"train_rows", core::Table::fmt(std::uint64_t(data.train_idx.size()))});
        summary.add_row({"val_rows", core::Table::fmt(std::uint64_t(data.val_idx.size()))});
        summary.add_row({"test_rows", core::Table::fmt(std::uint64_t(data.test_idx.size()))});
        summary.add_row({"initial_loss", core::Table::fmt(report.initial_loss)});
        summary.add_row({"train_accuracy", core::Table::fmt(report.train_accuracy)});
        summary.add_row({"val_accuracy", core::Table::fmt(report.val_accuracy)});
        summary.add_row({"test_accuracy", core::Table::fmt(report.test_accuracy)});
        summary.add_row(
            {"confusion_diagonal_mass", core::Table::fmt(report.confusion_diagonal_mass)});
        summary.add_row({"model_digest", model.digest_hex()});
        summary.write_tsv(summary_path);
        std::cout << "model " << model_path.string() << " val_accuracy=" << report.val_accuracy
                  << " test_accuracy=" << report.test_accuracy << '\n';
        return 0;
    } catch (...) {
        // Partial outputs are removed on failure.
        std::error_code ec;
        fs::remove(model_path, ec);
        fs::remove(report_path, ec);
        fs::remove(summary_path, ec);
        throw;
    }
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir) {
    engine::IniFile ini = engine::IniFile::parse_file(config_path);
    for (const auto& o : overrides) {
        ini.apply_override(o);
    }
    const engine::RunConfig cfg = engine::RunConfig::from_ini(ini);
    const std::string started_at = iso_utc_now();

    if (cfg.scenario.name == "trust_scaling") {
        reject_unknown_params(cfg.scenario, {"sizes", "trials"});
        std::vector<std::uint64_t> sizes;
        for (const auto& s : split_csv(param_or(cfg.scenario, "sizes", "100,1000,10000"))) {
            sizes.push_back(std::stoull(s));
        }
        const int trials = std::stoi(param_or(cfg.scenario, "trials", "8"));
        engine::RunConfig lc = cfg;
        auto layer = build_layer(lc, {"trustor_decision", "trustee_decision"});
        const std::string run_id = !cfg.sim.run_id.empty()
                                       ? cfg.sim.run_id
                                       : "trust_scaling-" + cfg.digest_hex.substr(0, 12) + "-s" +
                                             std::to_string(cfg.sim.master_seed);
        const fs::path run_dir = pick_run_dir(cfg.sim.run_root, run_id, out_dir);
        fs::create_directories(run_dir);
        const auto result =
            scenarios::trust_scaling_experiment(sizes, trials, *layer, cfg.sim.master_seed);
        result.trials.write_tsv(run_dir / "trust_scaling_trials.tsv");
        result.summary.write_tsv(run_dir / "trust_scaling_summary.tsv");
        Json summary{{"sizes", sizes},
                     {"trials", trials},
                     {"llm_tokens", layer->total_llm_tokens()},
                     {"requests", layer->requests_seen()}};
        summary_table(summary).write_tsv(run_dir / "summary.tsv");
        write_manifest(run_dir, run_id, cfg, "ok", started_at, summary);
        std::cout << "run dir: " << run_dir.string() << '\n';
        print_summary(summary);
        return 0;
    }

    std::vector<std::string> notes;
    PreparedRun run = prepare_run(cfg, &notes);
    for (const auto& n : notes) {
        std::cerr << "note: " << n << '\n';
    }
    const fs::path run_dir = pick_run_dir(run.config.sim.run_root, run.run_id, out_dir);
    engine::Engine eng(run.config, run.ops, run.layer);
    try {
        const auto bundle = eng.run(run.data, run_dir);
        summary_table(bundle.summary).write_tsv(run_dir / "summary.tsv");
        write_manifest(run_dir, run.run_id, run.config, "ok", started_at, bundle.summary);
        std::cout << "run dir: " << run_dir.string() << '\n';
        print_summary(bundle.summary);
        return 0;
    } catch (const std::exception& e) {
        if (fs::exists(run_dir)) {
            write_manifest(run_dir, run.run_id, run.config, std::string("failed: ") + e.what(),
                           started_at, Json::object());
        }
        throw;
    }
}

double trajectory_divergence(const core::Table& a, const core::Table& b) {
    if (a.rows.size() != b.rows.size()) {
        raise(Errc::InvalidParams, "opinion_counts tables have different round counts");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        double ta = 0, tb = 0;
        double ca[3], cb[3];
        static const char* cols[3] = {"agree", "disagree", "neutral"};
        for (int i = 0; i < 3; ++i) {
            ca[i] = a.num(r, cols[i]);
            cb[i] = b.num(r, cols[i]);
            ta += ca[i];
            tb += cb[i];
        }
        double l1 = 0.0;
        for (int i = 0; i < 3; ++i) {
            l1 += std::fabs(ca[i] / ta - cb[i] / tb);
        }
        worst = std::max(worst, l1 / 2.0); // normalized to [0,1]
    }
    return worst;
}

int cmd_analyze(const std::vector<std::string>& runs, const std::string& out_dir) {
    std::vector<std::pair<std::string, core::Table>> counts;
    core::Table tokens("analyze_tokens", {"run", "llm_tokens", "total_tokens", "llm_ratio_vs_first"});
    double first_llm = -1.0;
    int missing = 0;
    for (const auto& r : runs) {
        const fs::path dir(r);
        if (!fs::exists(dir / "manifest.json")) {
            std::cerr << "missing manifest in " << r << '\n';
            ++missing;
            continue;
        }
        if (fs::exists(dir / "opinion_counts.tsv")) {
            counts.emplace_back(r, core::Table::read_tsv(dir / "opinion_counts.tsv"));
        }
        if (fs::exists(dir / "summary.tsv")) {
            const core::Table s = core::Table::read_tsv(dir / "summary.tsv");
            double llm = 0, total = 0;
            for (std::size_t i = 0; i < s.rows.size(); ++i) {
                if (s.cell(i, "metric") == "llm_tokens") llm = s.num(i, "value");
                if (s.cell(i, "metric") == "total_tokens") total = s.num(i, "value");
            }
            if (first_llm < 0) first_llm = llm;
            tokens.add_row({r, core::Table::fmt(llm), core::Table::fmt(total),
                            core::Table::fmt(first_llm > 0 ? llm / first_llm : 0.0)});
        }
    }
    core::Table divergence("analyze_divergence", {"run_a", "run_b", "divergence"});
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = i; j < counts.size(); ++j) {
            divergence.add_row(
                {counts[i].first, counts[j].first,
                 core::Table::fmt(trajectory_divergence(counts[i].second, counts[j].second))});
        }
    }
    std::cout << divergence.to_tsv() << '\n' << tokens.to_tsv();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        divergence.write_tsv(fs::path(out_dir) / "analyze_divergence.tsv");
        tokens.write_tsv(fs::path(out_dir) / "analyze_tokens.tsv");
    }
    return missing ? 1 : 0;
}

int cmd_cache_stats(const std::string& path) {
    // Peek the header for the dimension, then load.
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot read " + path);
    char magic[4];
    std::uint16_t version = 0;
    std::uint32_t dim = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || std::string(magic, 4) != "LSPC") {
        raise(Errc::BadMagic, "not a cache file: " + path);
    }
    in.close();
    inference::CacheConfig cc;
    cc.dim = dim;
    inference::PromptCache cache(cc);
    cache.load(path);
    core::Table t("cache_stats", {"metric", "value"});
    t.add_row({"entries", core::Table::fmt(std::uint64_t(cache.size()))});
    t.add_row({"dim", core::Table::fmt(std::uint64_t(dim))});
    t.add_row({"file_bytes", core::Table::fmt(std::uint64_t(fs::file_size(path)))});
    std::cout << t.to_tsv();
    t.write_tsv(path + ".stats.tsv");
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"agent-based social simulation engine"};
    app.require_subcommand(1);

    // gen-network
    auto* gen = app.add_subcommand("gen-network", "generate a scale-free social network");
    std::uint64_t gen_n = 0, gen_m = 3, gen_seed = 0;
    std::string gen_out;
    bool gen_wide = false;
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--m", gen_m, "edges per new node");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--out", gen_out, "output graph file")->required();
    gen->add_flag("--wide-ids", gen_wide, "force 64-bit neighbor storage");

    // synth-profiles
    auto* synth = app.add_subcommand("synth-profiles", "synthesize demographic profiles");
    std::uint64_t sp_n = 0, sp_seed = 0;
    std::string sp_out, sp_marginals;
    synth->add_option("--n", sp_n, "record count")->required();
    synth->add_option("--seed", sp_seed, "seed");
    synth->add_option("--out", sp_out, "output JSONL file")->required();
    synth->add_option("--marginals", sp_marginals, "marginals JSON file");

    // train-surrogate
    auto* train = app.add_subcommand("train-surrogate", "distill the teacher into a classifier");
    std::string tr_teacher = "mock", tr_out, tr_report;
    std::uint64_t tr_samples = 100000, tr_pool = 10000, tr_seed = 0;
    int tr_epochs = 30, tr_batch = 256, tr_workers = 1;
    double tr_lr = 0.05;
    train->add_option("--teacher", tr_teacher, "teacher backend (mock)");
    train->add_option("--n-samples", tr_samples, "interaction sample count");
    train->add_option("--pool", tr_pool, "profile pool size");
    train->add_option("--seed", tr_seed, "seed");
    train->add_option("--epochs", tr_epochs, "training epochs");
    train->add_option("--batch", tr_batch, "mini-batch size");
    train->add_option("--lr", tr_lr, "learning rate");
    train->add_option("--workers", tr_workers, "teacher dispatch workers");
    train->add_option("--out", tr_out, "output model file")->required();
    train->add_option("--report", tr_report, "report file prefix");

    // run
    auto* runc = app.add_subcommand("run", "execute a configured simulation");
    std::string run_config, run_out;
    std::vector<std::string> run_sets;
    runc->add_option("--config", run_config, "config file")->required();
    runc->add_option("--set", run_sets, "override section.key=value");
    runc->add_option("--out", run_out, "run directory (default runs/<run_id>)");

    // analyze
    auto* an = app.add_subcommand("analyze", "cross-run comparisons");
    std::vector<std::string> an_runs;
    std::string an_out;
    an->add_option("--runs", an_runs, "run directories")->required()->expected(-1);
    an->add_option("--out", an_out, "directory for analysis tables");

    // cache-stats
    auto* cs = app.add_subcommand("cache-stats", "inspect a persisted prompt cache");
    std::string cs_path;
    cs->add_option("--cache", cs_path, "cache file")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) return cmd_gen_network(gen_n, gen_m, gen_seed, gen_out, gen_wide);
        if (*synth) return cmd_synth_profiles(sp_n, sp_seed, sp_out, sp_marginals);
        if (*train) {
            return cmd_train_surrogate(tr_teacher, tr_samples, tr_pool, tr_seed, tr_epochs,
                                       tr_batch, tr_lr, tr_out, tr_report, tr_workers);
        }
        if (*runc) return cmd_run(run_config, run_sets, run_out);
        if (*an) return cmd_analyze(an_runs, an_out);
        if (*cs) return cmd_cache_stats(cs_path);
    } catch (const core::SimError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == Errc::InvalidConfig ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace socsim::cli
