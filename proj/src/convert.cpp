#include "hyperdet/convert.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace hyperdet::convert {

sparse::Csr HyperHomoGraph::binarized() const {
    sparse::Csr b = adj;
    for (double& v : b.values()) v = v != 0.0 ? 1.0 : 0.0;
    return b;
}

void HyperHomoGraph::check_invariants(const Hypergraph* source) const {
    auto t = adj.transposed();
    if (!(t == adj)) throw std::logic_error("HyperHomoGraph: adjacency not symmetric");
    for (uint32_t i = 0; i < n; ++i)
        if (adj.at(i, i) != 0.0) throw std::logic_error("HyperHomoGraph: nonzero diagonal");
    if (source) {
        for (const auto& trip : adj.to_triplets()) {
            double cap = std::min(source->node_edges[trip.row].size(), source->node_edges[trip.col].size());
            if (trip.value > cap) throw std::logic_error("HyperHomoGraph: weight exceeds hyperdegree bound");
        }
    }
}

HyperHomoGraph hyper_to_homo(const Hypergraph& hg) {
    std::unordered_map<uint64_t, double> counts;
    for (const auto& nodes : hg.edge_nodes) {
        for (size_t a = 0; a < nodes.size(); ++a)
            for (size_t b = a + 1; b < nodes.size(); ++b) {
                uint64_t key = (static_cast<uint64_t>(nodes[a]) << 32) | nodes[b];
                counts[key] += 1.0;
            }
    }
    std::vector<sparse::Triplet> trips;
    trips.reserve(counts.size() * 2);
    for (const auto& [key, c] : counts) {
        auto i = static_cast<uint32_t>(key >> 32);
        auto j = static_cast<uint32_t>(key & 0xffffffffu);
        trips.push_back({i, j, c});
        trips.push_back({j, i, c});
    }
    HyperHomoGraph out;
    out.n = hg.n;
    out.adj = sparse::Csr::from_triplets(hg.n, hg.n, std::move(trips));
    return out;
}

sparse::Csr normalize_adjacency(const sparse::Csr& a, NormMode mode) {
    if (a.rows() != a.cols()) throw std::invalid_argument("normalize_adjacency: matrix must be square");
    const size_t n = a.rows();
    std::vector<sparse::Triplet> trips;
    trips.reserve(a.nnz() + n);
    for (const auto& t : a.to_triplets()) {
        if (t.value < 0) throw std::invalid_argument("normalize_adjacency: negative entry");
        if (t.row == t.col) throw std::invalid_argument("normalize_adjacency: nonzero diagonal in input");
        double w = mode == NormMode::BinarySym ? (t.value != 0.0 ? 1.0 : 0.0) : t.value;
        if (w != 0.0) trips.push_back({t.row, t.col, w});
    }
    for (uint32_t i = 0; i < n; ++i) trips.push_back({i, i, 1.0});  // self loops
    auto withloops = sparse::Csr::from_triplets(n, n, std::move(trips));
    auto deg = withloops.row_sums();
    std::vector<double> dinv(n);
    for (size_t i = 0; i < n; ++i) dinv[i] = deg[i] > 0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    auto trips2 = withloops.to_triplets();
    for (auto& t : trips2) t.value *= dinv[t.row] * dinv[t.col];
    return sparse::Csr::from_triplets(n, n, std::move(trips2));
}

sparse::Csr adjacency_csr(const HomogeneousGraph& g, bool weighted_by_count) {
    std::vector<sparse::Triplet> trips;
    trips.reserve(g.edges.size() * 2);
    for (const auto& e : g.edges) {
        double w = weighted_by_count ? static_cast<double>(e.tx_count) : 1.0;
        trips.push_back({e.u, e.v, w});
        trips.push_back({e.v, e.u, w});
    }
    return sparse::Csr::from_triplets(g.n, g.n, std::move(trips));
}

HypergraphOperators hypergraph_operators(const Hypergraph& hg) {
    HypergraphOperators ops;
    ops.n = hg.n;
    ops.m = hg.m;
    ops.node_hyperdegree.resize(hg.n);
    ops.edge_size.resize(hg.m);
    for (uint32_t v = 0; v < hg.n; ++v) ops.node_hyperdegree[v] = static_cast<double>(hg.node_edges[v].size());
    for (uint32_t e = 0; e < hg.m; ++e) {
        ops.edge_size[e] = static_cast<double>(hg.edge_nodes[e].size());
        if (ops.edge_size[e] == 0) throw std::logic_error("hypergraph_operators: empty hyperedge");
    }
    std::vector<double> dvinv(hg.n);
    for (uint32_t v = 0; v < hg.n; ++v) {
        if (ops.node_hyperdegree[v] > 0)
            dvinv[v] = 1.0 / std::sqrt(ops.node_hyperdegree[v]);
        else
            ops.isolated.push_back(v);
    }

    std::vector<sparse::Triplet> n2e, e2n;
    for (uint32_t e = 0; e < hg.m; ++e) {
        double inv_size = 1.0 / ops.edge_size[e];
        for (uint32_t v : hg.edge_nodes[e]) {
            n2e.push_back({e, v, inv_size});
            e2n.push_back({v, e, dvinv[v]});
        }
    }
    ops.node_to_edge = sparse::Csr::from_triplets(hg.m, hg.n, std::move(n2e));
    ops.edge_to_node = sparse::Csr::from_triplets(hg.n, hg.m, std::move(e2n));

    // composed operator accumulated per hyperedge: entry (i, j) gains
    // dvinv[i] * dvinv[j] / |e| for every hyperedge containing both
    std::unordered_map<uint64_t, double> acc;
    for (uint32_t e = 0; e < hg.m; ++e) {
        double inv_size = 1.0 / ops.edge_size[e];
        const auto& nodes = hg.edge_nodes[e];
        for (uint32_t i : nodes)
            for (uint32_t j : nodes) {
                uint64_t key = (static_cast<uint64_t>(i) << 32) | j;
                acc[key] += dvinv[i] * dvinv[j] * inv_size;
            }
    }
    std::vector<sparse::Triplet> comp;
    comp.reserve(acc.size());
    for (const auto& [key, w] : acc)
        comp.push_back({static_cast<uint32_t>(key >> 32), static_cast<uint32_t>(key & 0xffffffffu), w});
    ops.composed = sparse::Csr::from_triplets(hg.n, hg.n, std::move(comp));
    return ops;
}

sparse::Csr HypergraphOperators::layer_operator() const {
    if (isolated.empty()) return composed;
    auto trips = composed.to_triplets();
    for (uint32_t v : isolated) trips.push_back({v, v, 1.0});
    return sparse::Csr::from_triplets(n, n, std::move(trips));
}

}  // namespace hyperdet::convert
