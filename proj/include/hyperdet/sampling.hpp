#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "hyperdet/core.hpp"

namespace hyperdet::sampling {

struct SamplerConfig {
    size_t alpha = 100;  // max hyperedges retained per target
    size_t beta = 5;     // max nodes per sampled hyperedge
    size_t k1 = 70;      // first-order neighbor cap (homogeneous sampler)
    size_t k2 = 70;      // second-order neighbor cap
    uint64_t seed = 0;

    void validate() const;  // alpha >= 1, beta >= 2
};

// Aligned with the targets vector: retained[i] holds the hyperedge ids kept
// for targets[i], sorted ascending.
struct FilterResult {
    std::vector<uint32_t> targets;
    std::vector<std::vector<uint32_t>> retained;
};

// Step 1, hyperedge filtering: each target keeps min(|incident|, alpha)
// hyperedges, a uniform subset when over the threshold. Per-target RNG
// streams keyed by (seed, target id), so results are independent of thread
// count and target order.
FilterResult filter_hyperedges(const Hypergraph& hg, const std::vector<uint32_t>& targets,
                               const SamplerConfig& cfg, int n_threads = 0);

// Step 2 output before reindexing: surviving hyperedges with their sampled
// node sets (global ids), sorted by hyperedge id.
struct SampledHypergraph {
    std::vector<uint32_t> edge_ids;                 // global hyperedge ids, ascending
    std::vector<std::vector<uint32_t>> edge_nodes;  // sorted global node ids per hyperedge
};

// Step 2, node refinement: each (target, hyperedge) pair keeps the target
// plus a uniform (beta-1)-subset of the rest when over the threshold;
// retention by several targets is merged by union.
SampledHypergraph refine_nodes(const Hypergraph& hg, const FilterResult& filtered,
                               const SamplerConfig& cfg, int n_threads = 0);

struct InducedHypergraph {
    Hypergraph hg;                          // locally reindexed
    std::vector<uint32_t> local_to_global;  // node mapping
    std::unordered_map<uint32_t, uint32_t> global_to_local;
    std::vector<uint32_t> edge_ids;         // local hyperedge -> global hyperedge id
    size_t dropped_small = 0;               // hyperedges below 2 nodes after refinement
};

InducedHypergraph induce(const Hypergraph& hg, const SampledHypergraph& sampled);

struct InducedGraph {
    HomogeneousGraph g;
    std::vector<uint32_t> local_to_global;
    std::unordered_map<uint32_t, uint32_t> global_to_local;
};

// Homogeneous k-per-hop sampler: per target keep <= k1 uniform first-order
// neighbors, then <= k2 uniform second-order neighbors reached through the
// kept ones; returns the induced subgraph over targets plus sampled nodes.
InducedGraph sample_khop(const HomogeneousGraph& g, const std::vector<uint32_t>& targets,
                         const SamplerConfig& cfg, int n_threads = 0);

// JSON serialization of an induced hypergraph (header n, m, seed, alpha,
// beta + global node ids + per-hyperedge local node lists).
void write_sampled_json(std::ostream& os, const InducedHypergraph& ih, const SamplerConfig& cfg);
InducedHypergraph read_sampled_json(std::istream& is, SamplerConfig* cfg_out = nullptr);

int default_thread_count();  // HYPERDET_THREADS, else hardware_concurrency

// run fn(i) for i in [0, n) across threads; outputs must not depend on
// scheduling order
void parallel_for(size_t n, int n_threads, const std::function<void(size_t)>& fn);

}  // namespace hyperdet::sampling
