#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socsim/surrogate/model.hpp"

namespace socsim::surrogate {

struct DistillRow {
    FeatureVector x{};
    core::OpinionState label = core::OpinionState::Neutral;
    std::string teacher_backend_id;
};

// Teacher-labelled interaction samples with a seeded 80/10/10 split.
struct DistillDataset {
    std::vector<DistillRow> rows;
    std::vector<std::uint32_t> train_idx, val_idx, test_idx;

    void make_splits(std::uint64_t seed);
    std::string digest_hex() const;
};

struct TrainParams {
    int epochs = 30;
    int batch = 256;
    double lr = 0.05;
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean train loss per epoch
    double initial_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    // confusion[teacher][model] over the test split
    std::array<std::array<std::uint64_t, 3>, 3> confusion{};
    double confusion_diagonal_mass = 0.0;
};

// Mini-batch gradient descent with momentum on the softmax cross-entropy.
// All accumulation in 64-bit; deterministic in (data, params). Throws
// DegenerateData if any opinion class is absent from the train split.
SurrogateModel train(const DistillDataset& data, const TrainParams& hp,
                     TrainReport* report = nullptr);

// Mean cross-entropy loss of the model over the given rows.
double dataset_loss(const SurrogateModel& m, std::span<const DistillRow> rows,
                    std::span<const std::uint32_t> idx);

// Mean loss and its gradient w.r.t. every parameter for one batch
// (analytic backprop; the finite-difference oracle checks this).
double batch_loss_and_grad(const SurrogateModel& m, std::span<const DistillRow> rows,
                           std::span<const std::uint32_t> idx, std::vector<double>& grad);

double accuracy(const SurrogateModel& m, std::span<const DistillRow> rows,
                std::span<const std::uint32_t> idx);

} // namespace socsim::surrogate
