#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socsim::graph {

using NodeId = std::uint64_t;

// Read-only view over one node's sorted neighbor list. Backing storage may
// be 32- or 64-bit; the view always yields 64-bit ids.
class NeighborView {
public:
    NeighborView() = default;
    NeighborView(const std::uint32_t* p32, const std::uint64_t* p64, std::size_t n)
        : p32_(p32), p64_(p64), size_(n) {}

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    NodeId operator[](std::size_t i) const { return p32_ ? NodeId(p32_[i]) : p64_[i]; }

    class iterator {
    public:
        iterator(const NeighborView* v, std::size_t i) : v_(v), i_(i) {}
        NodeId operator*() const { return (*v_)[i_]; }
        iterator& operator++() { ++i_; return *this; }
        bool operator!=(const iterator& o) const { return i_ != o.i_; }
    private:
        const NeighborView* v_;
        std::size_t i_;
    };
    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, size_}; }

private:
    const std::uint32_t* p32_ = nullptr;
    const std::uint64_t* p64_ = nullptr;
    std::size_t size_ = 0;
};

// Compressed sparse row adjacency for an undirected simple graph. Each edge
// is stored twice; per-node neighbor lists are sorted ascending, with no
// self-loops or duplicates. Immutable after construction and freely
// shareable across workers. Neighbor ids are held in 32-bit storage when
// node count permits, halving memory; the file format is always 64-bit.
class CsrGraph {
public:
    CsrGraph() = default;

    // Takes ownership of a prepared structure. offsets.size() == n+1.
    static CsrGraph from_parts(std::uint64_t n, std::uint64_t m_edges,
                               std::vector<std::uint64_t> offsets,
                               std::vector<std::uint32_t> neighbors32,
                               std::vector<std::uint64_t> neighbors64);

    std::uint64_t num_nodes() const { return n_; }
    std::uint64_t num_edges() const { return m_edges_; }
    bool narrow_ids() const { return !neighbors32_.empty() || n_ == 0; }

    std::uint64_t degree(NodeId v) const;
    NeighborView neighbors_of(NodeId v) const; // throws OutOfRange

    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    NodeId neighbor_at(std::uint64_t slot) const {
        return neighbors32_.empty() ? neighbors64_[slot] : NodeId(neighbors32_[slot]);
    }

    // Exactly ceil(frac * n) node ids with the highest degree; ties favor
    // smaller ids. Result sorted ascending by id. frac must be in (0, 1].
    std::vector<NodeId> top_degree_fraction(double frac) const;

    // Bytes held by the offsets and neighbor arrays (capacity accounting).
    std::size_t storage_bytes() const;

    std::string content_digest_hex() const;

    void save(const std::filesystem::path& path) const;
    static CsrGraph load(const std::filesystem::path& path);

private:
    void check_node(NodeId v) const;

    std::uint64_t n_ = 0;
    std::uint64_t m_edges_ = 0;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> neighbors32_;
    std::vector<std::uint64_t> neighbors64_;
};

struct BaParams {
    std::uint64_t n = 0;        // target node count
    std::uint64_t m_attach = 3; // edges per new node
    std::uint64_t seed = 0;
    bool narrow_ids = true;     // allow 32-bit neighbor storage when n fits
};

// Barabasi-Albert preferential attachment. The seed subgraph is the
// complete graph on m_attach nodes; every later node attaches to m_attach
// distinct existing nodes with probability proportional to degree
// (uniform draws from the repeated-endpoint list, duplicates redrawn).
// Total edges: C(m_attach, 2) + (n - m_attach) * m_attach. Deterministic
// in the seed.
CsrGraph generate_ba(const BaParams& p);

} // namespace socsim::graph
