#include "socsim/surrogate/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::surrogate {

using core::Errc;
using core::raise;

std::array<SurrogateModel::LayerView, 3> SurrogateModel::layout() {
    std::array<LayerView, 3> views{};
    std::size_t off = 0;
    for (std::size_t l = 0; l < 3; ++l) {
        const std::size_t rows = kDims[l + 1];
        const std::size_t cols = kDims[l];
        views[l].w_off = off;
        views[l].w_rows = rows;
        views[l].w_cols = cols;
        off += rows * cols;
        views[l].b_off = off;
        off += rows;
    }
    return views;
}

std::size_t SurrogateModel::param_count() {
    const auto views = layout();
    return views[2].b_off + views[2].w_rows;
}

SurrogateModel::SurrogateModel() : params_(param_count(), 0.0) {}

SurrogateModel SurrogateModel::xavier_init(std::uint64_t seed) {
    SurrogateModel m;
    m.train_seed = seed;
    const auto views = layout();
    for (std::size_t l = 0; l < 3; ++l) {
        const double limit = std::sqrt(6.0 / double(views[l].w_cols + views[l].w_rows));
        core::RngStream rng(seed, "xavier_init", l);
        for (std::size_t i = 0; i < views[l].w_rows * views[l].w_cols; ++i) {
            m.params_[views[l].w_off + i] = (rng.next_double() * 2.0 - 1.0) * limit;
        }
        // Biases start at zero.
    }
    return m;
}

std::array<double, 3> SurrogateModel::logits(const FeatureVector& fv) const {
    const auto views = layout();
    std::array<double, 64> h1{};
    std::array<double, 32> h2{};
    std::array<double, 3> out{};
    {
        const auto& v = views[0];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params_[v.b_off + r];
            const double* w = &params_[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * fv[c];
            h1[r] = acc > 0.0 ? acc : 0.0;
        }
    }
    {
        const auto& v = views[1];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params_[v.b_off + r];
            const double* w = &params_[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * h1[c];
            h2[r] = acc > 0.0 ? acc : 0.0;
        }
    }
    {
        const auto& v = views[2];
        for (std::size_t r = 0; r < v.w_rows; ++r) {
            double acc = params_[v.b_off + r];
            const double* w = &params_[v.w_off + r * v.w_cols];
            for (std::size_t c = 0; c < v.w_cols; ++c) acc += w[c] * h2[c];
            out[r] = acc;
        }
    }
    return out;
}

std::array<double, 3> SurrogateModel::softmax(const std::array<double, 3>& logits) {
    const double mx = std::max({logits[0], logits[1], logits[2]});
    std::array<double, 3> p{};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (int i = 0; i < 3; ++i) p[i] /= sum;
    return p;
}

std::pair<core::OpinionState, std::array<double, 3>> SurrogateModel::predict(
    const FeatureVector& fv) const {
    validate_features(fv);
    const auto p = softmax(logits(fv));
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (p[i] > p[best]) best = i; // ties keep the canonical-order winner
    }
    return {core::OpinionState(best), p};
}

namespace {
constexpr char kModelMagic[4] = {'L', 'S', 'M', 'M'};
constexpr std::uint16_t kModelVersion = 1;
} // namespace

std::string SurrogateModel::digest_hex() const {
    core::Sha256 h;
    for (double d : params_) {
        const float f = float(d);
        h.update(&f, sizeof(f));
    }
    return h.hex_digest();
}

void SurrogateModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::Io, "cannot write " + path.string());
    core::Sha256 h;
    auto put = [&](const void* p, std::size_t len) {
        out.write(static_cast<const char*>(p), std::streamsize(len));
        h.update(p, len);
    };
    put(kModelMagic, 4);
    std::uint16_t fmt = kModelVersion;
    put(&fmt, sizeof(fmt));
    std::uint16_t n_layers = 3;
    put(&n_layers, sizeof(n_layers));
    for (std::size_t d : kDims) {
        std::uint32_t v = std::uint32_t(d);
        put(&v, sizeof(v));
    }
    put(&version, sizeof(version));
    put(&train_seed, sizeof(train_seed));
    for (double d : params_) {
        const float f = float(d);
        put(&f, sizeof(f));
    }
    auto digest = h.digest();
    out.write(reinterpret_cast<const char*>(digest.data()), std::streamsize(digest.size()));
    if (!out) raise(Errc::Io, "write failed for " + path.string());
}

SurrogateModel SurrogateModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot read " + path.string());
    core::Sha256 h;
    auto get = [&](void* p, std::size_t len) {
        in.read(static_cast<char*>(p), std::streamsize(len));
        if (std::size_t(in.gcount()) != len) {
            raise(Errc::TruncatedFile, "unexpected end of model file");
        }
        h.update(p, len);
    };
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kModelMagic, 4) != 0) {
        raise(Errc::BadMagic, "not a model file: " + path.string());
    }
    h.update(magic, 4);
    std::uint16_t fmt = 0, n_layers = 0;
    get(&fmt, sizeof(fmt));
    if (fmt != kModelVersion) {
        raise(Errc::VersionMismatch, "model file version " + std::to_string(fmt));
    }
    get(&n_layers, sizeof(n_layers));
    if (n_layers != 3) {
        raise(Errc::VersionMismatch, "unexpected layer count " + std::to_string(n_layers));
    }
    for (std::size_t d : kDims) {
        std::uint32_t v = 0;
        get(&v, sizeof(v));
        if (v != d) {
            raise(Errc::VersionMismatch, "model dims do not match this build");
        }
    }
    SurrogateModel m;
    get(&m.version, sizeof(m.version));
    get(&m.train_seed, sizeof(m.train_seed));
    for (double& d : m.params_) {
        float f = 0;
        get(&f, sizeof(f));
        d = double(f);
    }
    std::array<std::uint8_t, 32> stored{};
    in.read(reinterpret_cast<char*>(stored.data()), std::streamsize(stored.size()));
    if (std::size_t(in.gcount()) != stored.size()) {
        raise(Errc::TruncatedFile, "model file missing content hash");
    }
    if (stored != h.digest()) {
        raise(Errc::HashMismatch, "model file content hash mismatch");
    }
    return m;
}

} // namespace socsim::surrogate
