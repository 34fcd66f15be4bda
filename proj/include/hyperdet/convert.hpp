#pragma once

#include <vector>

#include "hyperdet/core.hpp"
#include "hyperdet/sparse.hpp"

namespace hyperdet::convert {

// Clique expansion: A_H[i][j] = number of hyperedges containing both i and
// j (i != j), zero diagonal, symmetric integer weights.
struct HyperHomoGraph {
    size_t n = 0;
    sparse::Csr adj;            // weighted co-membership counts
    size_t undirected_edges() const { return adj.nnz() / 2; }

    sparse::Csr binarized() const;
    void check_invariants(const Hypergraph* source = nullptr) const;
};

// Computed per hyperedge by pair accumulation; never materializes dense n^2.
HyperHomoGraph hyper_to_homo(const Hypergraph& hg);

enum class NormMode { Sym, BinarySym };

// D~^{-1/2} (A + I) D~^{-1/2} with D~ = rowsum(A + I); BinarySym binarizes
// A first. Rows with no off-diagonal mass come out as identity rows.
sparse::Csr normalize_adjacency(const sparse::Csr& a, NormMode mode);

sparse::Csr adjacency_csr(const HomogeneousGraph& g, bool weighted_by_count = false);

// Two-stage hypergraph propagation pieces and their composition:
//   node -> hyperedge mean aggregator  De^{-1} H^T        (m x n)
//   hyperedge -> node aggregator       Dv^{-1/2} H        (n x m)
//   composed = Dv^{-1/2} H De^{-1} H^T Dv^{-1/2}          (n x n, symmetric)
// Isolated nodes have all-zero rows in `composed`; propagation adds an
// identity residual for them via layer_operator().
struct HypergraphOperators {
    size_t n = 0, m = 0;
    std::vector<double> node_hyperdegree;  // Dv
    std::vector<double> edge_size;         // De
    sparse::Csr node_to_edge;
    sparse::Csr edge_to_node;
    sparse::Csr composed;
    std::vector<uint32_t> isolated;

    sparse::Csr layer_operator() const;  // composed + identity rows on isolated nodes
};

HypergraphOperators hypergraph_operators(const Hypergraph& hg);

}  // namespace hyperdet::convert
