#include "socsim/surrogate/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::surrogate {

using core::Errc;
using core::raise;

void DistillDataset::make_splits(std::uint64_t seed) {
    const std::size_t n = rows.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    core::RngStream rng(seed, "distill_split");
    rng.shuffle(order);
    const std::size_t n_train = n * 8 / 10;
    const std::size_t n_val = n / 10;
    train_idx.assign(order.begin(), order.begin() + std::ptrdiff_t(n_train));
    val_idx.assign(order.begin() + std::ptrdiff_t(n_train),
                   order.begin() + std::ptrdiff_t(n_train + n_val));
    test_idx.assign(order.begin() + std::ptrdiff_t(n_train + n_val), order.end());
}

std::string DistillDataset::digest_hex() const {
    core::Sha256 h;
    for (const DistillRow& r : rows) {
        for (double v : r.x) {
            const float f = float(v);
            h.update(&f, sizeof(f));
        }
        const std::uint8_t label = std::uint8_t(r.label);
        h.update(&label, 1);
    }
    return h.hex_digest();
}

namespace {

struct Activations {
    std::array<double, 64> h1;
    std::array<double, 32> h2;
    std::array<double, 3> probs;
};

double forward(const SurrogateModel& m, const FeatureVector& x, int label, Activations& act) {
    const auto views = SurrogateModel::layout();
    const auto params = m.params();
    {
        const auto& v = views[0];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params[v.b_off + r];
            const double* w = &params[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * x[c];
            act.h1[r] = acc > 0.0 ? acc : 0.0;
        }
    }
    {
        const auto& v = views[1];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params[v.b_off + r];
            const double* w = &params[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * act.h1[c];
            act.h2[r] = acc > 0.0 ? acc : 0.0;
        }
    }
    std::array<double, 3> logits{};
    {
        const auto& v = views[2];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params[v.b_off + r];
            const double* w = &params[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * act.h2[c];
            logits[r] = acc;
        }
    }
    act.probs = SurrogateModel::softmax(logits);
    return -std::log(std::max(act.probs[std::size_t(label)], 1e-300));
}

} // namespace

double batch_loss_and_grad(const SurrogateModel& m, std::span<const DistillRow> rows,
                           std::span<const std::uint32_t> idx, std::vector<double>& grad) {
    const auto views = SurrogateModel::layout();
    const auto params = m.params();
    grad.assign(params.size(), 0.0);
    double loss_sum = 0.0;
    Activations act;
    std::array<double, 3> d3;
    std::array<double, 32> d2;
    std::array<double, 64> d1;
    for (std::uint32_t i : idx) {
        const DistillRow& row = rows[i];
        loss_sum += forward(m, row.x, int(row.label), act);
        // dL/dlogit = softmax - onehot
        for (int k = 0; k < 3; ++k) {
            d3[std::size_t(k)] = act.probs[std::size_t(k)] - (k == int(row.label) ? 1.0 : 0.0);
        }
        {
            const auto& v = views[2];
            for (std::size_t r = 0; r < v.w_rows; ++r) {
                grad[v.b_off + r] += d3[r];
                double* gw = &grad[v.w_off + r * v.w_cols];
                for (std::size_t c = 0; c < v.w_cols; ++c) gw[c] += d3[r] * act.h2[c];
            }
            for (std::size_t c = 0; c < v.w_cols; ++c) {
                double acc = 0.0;
                for (std::size_t r = 0; r < v.w_rows; ++r) {
                    acc += params[v.w_off + r * v.w_cols + c] * d3[r];
                }
                d2[c] = act.h2[c] > 0.0 ? acc : 0.0;
            }
        }
        {
            const auto& v = views[1];
            for (std::size_t r = 0; r < v.w_rows; ++r) {
                grad[v.b_off + r] += d2[r];
                double* gw = &grad[v.w_off + r * v.w_cols];
                for (std::size_t c = 0; c < v.w_cols; ++c) gw[c] += d2[r] * act.h1[c];
            }
            for (std::size_t c = 0; c < v.w_cols; ++c) {
                double acc = 0.0;
                for (std::size_t r = 0; r < v.w_rows; ++r) {
                    acc += params[v.w_off + r * v.w_cols + c] * d2[r];
                }
                d1[c] = act.h1[c] > 0.0 ? acc : 0.0;
            }
        }
        {
            const auto& v = views[0];
            for (std::size_t r = 0; r < v.w_rows; ++r) {
                grad[v.b_off + r] += d1[r];
                double* gw = &grad[v.w_off + r * v.w_cols];
                for (std::size_t c = 0; c < v.w_cols; ++c) gw[c] += d1[r] * row.x[c];
            }
        }
    }
    const double inv = idx.empty() ? 0.0 : 1.0 / double(idx.size());
    for (double& g : grad) g *= inv;
    return loss_sum * inv;
}

double dataset_loss(const SurrogateModel& m, std::span<const DistillRow> rows,
                    std::span<const std::uint32_t> idx) {
    double sum = 0.0;
    Activations act;
    for (std::uint32_t i : idx) {
        sum += forward(m, rows[i].x, int(rows[i].label), act);
    }
    return idx.empty() ? 0.0 : sum / double(idx.size());
}

double accuracy(const SurrogateModel& m, std::span<const DistillRow> rows,
                std::span<const std::uint32_t> idx) {
    if (idx.empty()) return 0.0;
    std::uint64_t correct = 0;
    for (std::uint32_t i : idx) {
        const auto p = SurrogateModel::softmax(m.logits(rows[i].x));
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            if (p[std::size_t(k)] > p[std::size_t(best)]) best = k;
        }
        if (best == int(rows[i].label)) ++correct;
    }
    return double(correct) / double(idx.size());
}

SurrogateModel train(const DistillDataset& data, const TrainParams& hp, TrainReport* report) {
    if (data.train_idx.empty()) {
        raise(Errc::InvalidParams, "empty train split");
    }
    bool present[3] = {false, false, false};
    for (std::uint32_t i : data.train_idx) {
        present[std::size_t(data.rows[i].label)] = true;
    }
    if (!(present[0] && present[1] && present[2])) {
        raise(Errc::DegenerateData, "an opinion class is absent from the train split");
    }

    SurrogateModel m = SurrogateModel::xavier_init(hp.seed);
    std::vector<double> velocity(m.params().size(), 0.0);
    std::vector<double> grad;
    std::vector<std::uint32_t> order(data.train_idx);

    TrainReport local;
    TrainReport& rep = report ? *report : local;
    rep.initial_loss = dataset_loss(m, data.rows, data.train_idx);
    rep.epoch_loss.clear();

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        core::RngStream rng(hp.seed, "epoch_shuffle", std::uint64_t(epoch));
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += std::size_t(hp.batch)) {
            const std::size_t end = std::min(order.size(), start + std::size_t(hp.batch));
            std::span<const std::uint32_t> batch(order.data() + start, end - start);
            epoch_loss += batch_loss_and_grad(m, data.rows, batch, grad);
            ++batches;
            auto params = m.params();
            for (std::size_t k = 0; k < params.size(); ++k) {
                velocity[k] = hp.momentum * velocity[k] + grad[k];
                params[k] -= hp.lr * velocity[k];
            }
        }
        rep.epoch_loss.push_back(batches ? epoch_loss / double(batches) : 0.0);
    }

    rep.train_accuracy = accuracy(m, data.rows, data.train_idx);
    rep.val_accuracy = accuracy(m, data.rows, data.val_idx);
    rep.test_accuracy = accuracy(m, data.rows, data.test_idx);
    rep.confusion = {};
    std::uint64_t diag = 0, total = 0;
    for (std::uint32_t i : data.test_idx) {
        const auto p = SurrogateModel::softmax(m.logits(data.rows[i].x));
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            if (p[std::size_t(k)] > p[std::size_t(best)]) best = k;
        }
        ++rep.confusion[std::size_t(data.rows[i].label)][std::size_t(best)];
        ++total;
        if (best == int(data.rows[i].label)) ++diag;
    }
    rep.confusion_diagonal_mass = total ? double(diag) / double(total) : 0.0;
    return m;
}

} // namespace socsim::surrogate
