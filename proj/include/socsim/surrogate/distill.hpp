#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "socsim/inference/layer.hpp"
#include "socsim/surrogate/train.hpp"

namespace socsim::surrogate {

struct DistillConfig {
    std::uint64_t n = 100000;
    std::uint64_t seed = 0;
    std::string statement = "AI automation will lead to mass unemployment";
    std::string task_class = "opinion_update";
    std::string template_id = "opinion_update";
    double malformed_cap = 0.01; // fraction of n; beyond it -> TeacherFailure
    std::size_t request_batch = 4096;
    int workers = 1;
};

// Samples profile pairs and opinion states from the seeded stream, asks the
// teacher for the updated opinion, and collects labelled feature vectors.
// Malformed teacher outputs are resampled and counted; exceeding the cap
// raises TeacherFailure. The layer must have the teacher bound for the
// task class; caching should be disabled so every sample is a fresh call.
DistillDataset generate_distill_data(inference::InferenceLayer& teacher,
                                     std::span<const core::ProfilePtr> pool,
                                     const DistillConfig& cfg);

} // namespace socsim::surrogate
