#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "socsim/core/agent.hpp"
#include "socsim/surrogate/features.hpp"

namespace socsim::surrogate {

// Feed-forward classifier over opinion states: 38 -> 64 -> 32 -> 3 with
// rectified hidden layers. Parameters live in one flat double buffer
// (row-major weights, then biases, per layer) so training, the gradient
// check and digests all see the same layout. Prediction is argmax of the
// softmax with ties broken in canonical opinion order.
class SurrogateModel {
public:
    static constexpr std::array<std::size_t, 4> kDims = {kFeatureDim, 64, 32, 3};

    SurrogateModel(); // zero-initialized
    static SurrogateModel xavier_init(std::uint64_t seed);

    std::pair<core::OpinionState, std::array<double, 3>> predict(const FeatureVector& fv) const;

    // Forward pass without feature validation (training path).
    std::array<double, 3> logits(const FeatureVector& fv) const;
    static std::array<double, 3> softmax(const std::array<double, 3>& logits);

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    struct LayerView {
        std::size_t w_off, w_rows, w_cols, b_off;
    };
    static std::array<LayerView, 3> layout();
    static std::size_t param_count();

    std::uint32_t version = 1;
    std::uint64_t train_seed = 0;

    std::string digest_hex() const; // over the float32 serialized parameters

    void save(const std::filesystem::path& path) const;
    static SurrogateModel load(const std::filesystem::path& path);

private:
    std::vector<double> params_;
};

} // namespace socsim::surrogate
