#include "socsim/graph/csr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::graph {

using core::Errc;
using core::raise;

static_assert(std::endian::native == std::endian::little,
              "graph file I/O assumes a little-endian host");

CsrGraph CsrGraph::from_parts(std::uint64_t n, std::uint64_t m_edges,
                              std::vector<std::uint64_t> offsets,
                              std::vector<std::uint32_t> neighbors32,
                              std::vector<std::uint64_t> neighbors64) {
    CsrGraph g;
    g.n_ = n;
    g.m_edges_ = m_edges;
    g.offsets_ = std::move(offsets);
    g.neighbors32_ = std::move(neighbors32);
    g.neighbors64_ = std::move(neighbors64);
    if (g.offsets_.size() != n + 1 || g.offsets_.front() != 0 || g.offsets_.back() != 2 * m_edges) {
        raise(Errc::InvalidParams, "inconsistent CSR offsets");
    }
    return g;
}

void CsrGraph::check_node(NodeId v) const {
    if (v >= n_) {
        raise(Errc::OutOfRange,
              "node " + std::to_string(v) + " >= n=" + std::to_string(n_));
    }
}

std::uint64_t CsrGraph::degree(NodeId v) const {
    check_node(v);
    return offsets_[v + 1] - offsets_[v];
}

NeighborView CsrGraph::neighbors_of(NodeId v) const {
    check_node(v);
    const std::uint64_t begin = offsets_[v];
    const std::size_t len = std::size_t(offsets_[v + 1] - begin);
    if (!neighbors32_.empty()) {
        return NeighborView(neighbors32_.data() + begin, nullptr, len);
    }
    return NeighborView(nullptr, neighbors64_.data() + begin, len);
}

std::vector<NodeId> CsrGraph::top_degree_fraction(double frac) const {
    if (!(frac > 0.0) || frac > 1.0) {
        raise(Errc::InvalidFraction, "frac must be in (0,1], got " + std::to_string(frac));
    }
    const std::uint64_t k = std::uint64_t(std::ceil(frac * double(n_)));
    std::vector<NodeId> ids(n_);
    std::iota(ids.begin(), ids.end(), NodeId(0));
    auto higher = [this](NodeId a, NodeId b) {
        const std::uint64_t da = offsets_[a + 1] - offsets_[a];
        const std::uint64_t db = offsets_[b + 1] - offsets_[b];
        if (da != db) return da > db;
        return a < b;
    };
    if (k < n_) {
        std::nth_element(ids.begin(), ids.begin() + std::ptrdiff_t(k), ids.end(), higher);
        ids.resize(k);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::size_t CsrGraph::storage_bytes() const {
    return offsets_.capacity() * sizeof(std::uint64_t) +
           neighbors32_.capacity() * sizeof(std::uint32_t) +
           neighbors64_.capacity() * sizeof(std::uint64_t);
}

namespace {

constexpr char kMagic[4] = {'L', 'S', 'C', 'G'};
constexpr std::uint16_t kVersion = 1;

void write_raw(std::ofstream& out, core::Sha256& h, const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), std::streamsize(len));
    h.update(p, len);
}

void read_raw(std::ifstream& in, void* p, std::size_t len) {
    in.read(static_cast<char*>(p), std::streamsize(len));
    if (std::size_t(in.gcount()) != len) {
        raise(Errc::TruncatedFile, "unexpected end of graph file");
    }
}

} // namespace

std::string CsrGraph::content_digest_hex() const {
    core::Sha256 h;
    h.update(&n_, sizeof(n_));
    h.update(&m_edges_, sizeof(m_edges_));
    h.update(offsets_.data(), offsets_.size() * sizeof(std::uint64_t));
    // Digest the 64-bit representation regardless of storage width.
    if (!neighbors32_.empty()) {
        for (std::uint32_t v : neighbors32_) {
            std::uint64_t w = v;
            h.update(&w, sizeof(w));
        }
    } else {
        h.update(neighbors64_.data(), neighbors64_.size() * sizeof(std::uint64_t));
    }
    return h.hex_digest();
}

void CsrGraph::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(Errc::Io, "cannot write " + path.string());
    }
    core::Sha256 h;
    write_raw(out, h, kMagic, 4);
    std::uint16_t version = kVersion;
    std::uint16_t flags = 0;
    write_raw(out, h, &version, sizeof(version));
    write_raw(out, h, &flags, sizeof(flags));
    write_raw(out, h, &n_, sizeof(n_));
    write_raw(out, h, &m_edges_, sizeof(m_edges_));
    write_raw(out, h, offsets_.data(), offsets_.size() * sizeof(std::uint64_t));
    if (!neighbors32_.empty()) {
        // File format is fixed 64-bit; widen in chunks.
        std::vector<std::uint64_t> chunk;
        constexpr std::size_t kChunk = 1 << 16;
        for (std::size_t i = 0; i < neighbors32_.size(); i += kChunk) {
            const std::size_t end = std::min(neighbors32_.size(), i + kChunk);
            chunk.assign(neighbors32_.begin() + std::ptrdiff_t(i),
                         neighbors32_.begin() + std::ptrdiff_t(end));
            write_raw(out, h, chunk.data(), chunk.size() * sizeof(std::uint64_t));
        }
    } else {
        write_raw(out, h, neighbors64_.data(), neighbors64_.size() * sizeof(std::uint64_t));
    }
    auto digest = h.digest();
    out.write(reinterpret_cast<const char*>(digest.data()), std::streamsize(digest.size()));
    if (!out) {
        raise(Errc::Io, "write failed for " + path.string());
    }
}

CsrGraph CsrGraph::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    core::Sha256 h;
    char magic[4];
    read_raw(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        raise(Errc::BadMagic, "not a graph file: " + path.string());
    }
    h.update(magic, 4);
    std::uint16_t version = 0, flags = 0;
    read_raw(in, &version, sizeof(version));
    read_raw(in, &flags, sizeof(flags));
    if (version != kVersion) {
        raise(Errc::VersionMismatch,
              "graph file version " + std::to_string(version) + ", expected " +
                  std::to_string(kVersion));
    }
    h.update(&version, sizeof(version));
    h.update(&flags, sizeof(flags));
    std::uint64_t n = 0, m = 0;
    read_raw(in, &n, sizeof(n));
    read_raw(in, &m, sizeof(m));
    h.update(&n, sizeof(n));
    h.update(&m, sizeof(m));

    std::vector<std::uint64_t> offsets(std::size_t(n) + 1);
    read_raw(in, offsets.data(), offsets.size() * sizeof(std::uint64_t));
    h.update(offsets.data(), offsets.size() * sizeof(std::uint64_t));

    const std::uint64_t slots = 2 * m;
    const bool narrow = n <= std::uint64_t(std::uint32_t(-1));
    std::vector<std::uint32_t> n32;
    std::vector<std::uint64_t> n64;
    if (narrow) {
        n32.resize(std::size_t(slots));
    } else {
        n64.resize(std::size_t(slots));
    }
    std::vector<std::uint64_t> chunk;
    constexpr std::size_t kChunk = 1 << 16;
    for (std::uint64_t i = 0; i < slots; i += kChunk) {
        const std::size_t len = std::size_t(std::min<std::uint64_t>(kChunk, slots - i));
        chunk.resize(len);
        read_raw(in, chunk.data(), len * sizeof(std::uint64_t));
        h.update(chunk.data(), len * sizeof(std::uint64_t));
        for (std::size_t k = 0; k < len; ++k) {
            if (narrow) {
                n32[std::size_t(i) + k] = std::uint32_t(chunk[k]);
            } else {
                n64[std::size_t(i) + k] = chunk[k];
            }
        }
    }
    std::array<std::uint8_t, 32> stored{};
    read_raw(in, stored.data(), stored.size());
    if (stored != h.digest()) {
        raise(Errc::HashMismatch, "graph file content hash mismatch: " + path.string());
    }
    return from_parts(n, m, std::move(offsets), std::move(n32), std::move(n64));
}

CsrGraph generate_ba(const BaParams& p) {
    if (p.m_attach < 1 || p.n < p.m_attach) {
        raise(Errc::InvalidParams, "require n >= m_attach >= 1");
    }
    const std::uint64_t n = p.n;
    const std::uint64_t m = p.m_attach;
    const std::uint64_t total_edges = m * (m - 1) / 2 + (n - m) * m;

    // Flat endpoint list: each edge contributes both endpoints, so a uniform
    // draw lands on a node with probability proportional to its degree.
    std::vector<std::uint64_t> endpoints;
    endpoints.reserve(std::size_t(2 * total_edges));
    for (std::uint64_t u = 0; u < m; ++u) {
        for (std::uint64_t v = u + 1; v < m; ++v) {
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }

    core::RngStream rng(p.seed, "ba_gen");
    std::vector<std::uint64_t> picked(static_cast<std::size_t>(m));
    for (std::uint64_t v = m; v < n; ++v) {
        std::size_t found = 0;
        while (found < m) {
            const std::uint64_t cand = endpoints[std::size_t(rng.next_below(endpoints.size()))];
            bool dup = false;
            for (std::size_t i = 0; i < found; ++i) {
                if (picked[i] == cand) {
                    dup = true;
                    break;
                }
            }
            if (!dup) {
                picked[found++] = cand;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            endpoints.push_back(v);
            endpoints.push_back(picked[i]);
        }
    }

    // Assemble CSR from the endpoint pairs.
    std::vector<std::uint64_t> offsets(std::size_t(n) + 1, 0);
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        ++offsets[std::size_t(endpoints[i]) + 1];
    }
    for (std::size_t i = 1; i <= std::size_t(n); ++i) {
        offsets[i] += offsets[i - 1];
    }

    const bool narrow = p.narrow_ids && n <= std::uint64_t(std::uint32_t(-1));
    std::vector<std::uint32_t> n32;
    std::vector<std::uint64_t> n64;
    std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
    if (narrow) {
        n32.resize(endpoints.size());
        for (std::size_t i = 0; i < endpoints.size(); i += 2) {
            const std::uint64_t a = endpoints[i], b = endpoints[i + 1];
            n32[std::size_t(cursor[std::size_t(a)]++)] = std::uint32_t(b);
            n32[std::size_t(cursor[std::size_t(b)]++)] = std::uint32_t(a);
        }
        for (std::uint64_t v = 0; v < n; ++v) {
            std::sort(n32.begin() + std::ptrdiff_t(offsets[std::size_t(v)]),
                      n32.begin() + std::ptrdiff_t(offsets[std::size_t(v) + 1]));
        }
    } else {
        n64.resize(endpoints.size());
        for (std::size_t i = 0; i < endpoints.size(); i += 2) {
            const std::uint64_t a = endpoints[i], b = endpoints[i + 1];
            n64[std::size_t(cursor[std::size_t(a)]++)] = b;
            n64[std::size_t(cursor[std::size_t(b)]++)] = a;
        }
        for (std::uint64_t v = 0; v < n; ++v) {
            std::sort(n64.begin() + std::ptrdiff_t(offsets[std::size_t(v)]),
                      n64.begin() + std::ptrdiff_t(offsets[std::size_t(v) + 1]));
        }
    }
    return CsrGraph::from_parts(n, total_edges, std::move(offsets), std::move(n32), std::move(n64));
}

} // namespace socsim::graph
