#include "socsim/surrogate/distill.hpp"

#include "socsim/core/error.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::surrogate {

using core::Errc;
using core::OpinionState;
using core::raise;

DistillDataset generate_distill_data(inference::InferenceLayer& teacher,
                                     std::span<const core::ProfilePtr> pool,
                                     const DistillConfig& cfg) {
    if (pool.empty() && cfg.n > 0) {
        raise(Errc::InvalidParams, "empty profile pool");
    }
    DistillDataset data;
    data.rows.reserve(std::size_t(cfg.n));
    const std::uint64_t malformed_cap =
        std::uint64_t(std::max(1.0, cfg.malformed_cap * double(cfg.n)));
    std::uint64_t malformed = 0;

    core::RngStream draws(cfg.seed, "distill_draws");
    std::uint64_t draw_i = 0;
    auto next_sample = [&](const core::Profile*& influencer, const core::Profile*& influencee,
                           OpinionState& op_r, OpinionState& op_e, FeatureVector& fv,
                           inference::InferenceRequest& req) {
        influencer = pool[std::size_t(draws.at(draw_i * 4) % pool.size())].get();
        influencee = pool[std::size_t(draws.at(draw_i * 4 + 1) % pool.size())].get();
        op_r = OpinionState(draws.at(draw_i * 4 + 2) % 3);
        op_e = OpinionState(draws.at(draw_i * 4 + 3) % 3);
        ++draw_i;
        fv = encode_features({op_r, &influencer->attrs}, {op_e, &influencee->attrs});
        req.task_class = cfg.task_class;
        req.template_id = cfg.template_id;
        req.variables = opinion_request_variables(*influencer, op_r, *influencee, op_e,
                                                  cfg.statement);
        req.decode.json_schema_id = "opinion_decision";
        req.cacheable = false;
    };

    std::vector<inference::InferenceRequest> reqs;
    std::vector<FeatureVector> feats;
    std::vector<std::string> teacher_ids;
    while (data.rows.size() < cfg.n) {
        const std::size_t want =
            std::min<std::size_t>(cfg.request_batch, std::size_t(cfg.n) - data.rows.size());
        reqs.assign(want, {});
        feats.assign(want, {});
        for (std::size_t i = 0; i < want; ++i) {
            const core::Profile* r = nullptr;
            const core::Profile* e = nullptr;
            OpinionState op_r, op_e;
            next_sample(r, e, op_r, op_e, feats[i], reqs[i]);
        }
        const auto responses = teacher.execute(reqs, cfg.workers);
        for (std::size_t i = 0; i < want; ++i) {
            const auto& resp = responses[i];
            bool ok = !resp.failed && resp.fields.contains("opinion") &&
                      resp.fields["opinion"].is_string();
            OpinionState label = OpinionState::Neutral;
            if (ok) {
                try {
                    label = core::opinion_from_string(resp.fields["opinion"].get<std::string>());
                } catch (const core::SimError&) {
                    ok = false;
                }
            }
            if (!ok) {
                if (++malformed > malformed_cap) {
                    raise(Errc::TeacherFailure,
                          "malformed teacher outputs exceeded " + std::to_string(malformed_cap));
                }
                continue; // resampled on the next loop iteration
            }
            DistillRow row;
            row.x = feats[i];
            row.label = label;
            row.teacher_backend_id = resp.backend_id;
            data.rows.push_back(std::move(row));
        }
    }
    data.make_splits(cfg.seed);
    return data;
}

} // namespace socsim::surrogate
