#include "hyperdet/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hyperdet/rng.hpp"

namespace hyperdet::sampling {

namespace {
constexpr uint64_t kTagFilter = 0x66696c74;  // stream tags
constexpr uint64_t kTagRefine = 0x7265666e;
constexpr uint64_t kTagHop1 = 0x686f7031;
constexpr uint64_t kTagHop2 = 0x686f7032;
}  // namespace

void SamplerConfig::validate() const {
    if (alpha < 1) throw std::invalid_argument("SamplerConfig: alpha must be >= 1");
    if (beta < 2) throw std::invalid_argument("SamplerConfig: beta must be >= 2");
}

int default_thread_count() {
    if (const char* env = std::getenv("HYPERDET_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(size_t n, int n_threads, const std::function<void(size_t)>& fn) {
    if (n_threads <= 0) n_threads = default_thread_count();
    if (n_threads == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    size_t count = std::min<size_t>(static_cast<size_t>(n_threads), n);
    pool.reserve(count);
    for (size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

FilterResult filter_hyperedges(const Hypergraph& hg, const std::vector<uint32_t>& targets,
                               const SamplerConfig& cfg, int n_threads) {
    cfg.validate();
    for (uint32_t t : targets)
        if (t >= hg.n) throw std::out_of_range("filter_hyperedges: target " + std::to_string(t) + " not in hypergraph");
    FilterResult out;
    out.targets = targets;
    out.retained.resize(targets.size());
    parallel_for(targets.size(), n_threads, [&](size_t i) {
        uint32_t v = targets[i];
        const auto& incident = hg.node_edges[v];
        if (incident.size() <= cfg.alpha) {
            out.retained[i] = incident;
        } else {
            auto rng = rng::Stream::derive(cfg.seed, kTagFilter, v);
            auto subset = rng::sample_without_replacement(incident, cfg.alpha, rng);
            std::sort(subset.begin(), subset.end());
            out.retained[i] = std::move(subset);
        }
    });
    return out;
}

SampledHypergraph refine_nodes(const Hypergraph& hg, const FilterResult& filtered,
                               const SamplerConfig& cfg, int n_threads) {
    cfg.validate();
    // per (target, hyperedge) refinement, then a deterministic union merge
    std::vector<std::vector<std::vector<uint32_t>>> refined(filtered.targets.size());
    parallel_for(filtered.targets.size(), n_threads, [&](size_t i) {
        uint32_t v = filtered.targets[i];
        refined[i].resize(filtered.retained[i].size());
        for (size_t k = 0; k < filtered.retained[i].size(); ++k) {
            uint32_t e = filtered.retained[i][k];
            if (e >= hg.m) throw std::out_of_range("refine_nodes: invalid hyperedge id");
            const auto& nodes = hg.edge_nodes[e];
            if (nodes.size() <= cfg.beta) {
                refined[i][k] = nodes;
                continue;
            }
            std::vector<uint32_t> others;
            others.reserve(nodes.size() - 1);
            for (uint32_t u : nodes)
                if (u != v) others.push_back(u);
            auto rng = rng::Stream::derive(cfg.seed, kTagRefine, v, e);
            auto subset = rng::sample_without_replacement(std::move(others), cfg.beta - 1, rng);
            subset.push_back(v);
            std::sort(subset.begin(), subset.end());
            refined[i][k] = std::move(subset);
        }
    });
    // sequential merge in target order; output independent of thread count
    std::map<uint32_t, std::vector<uint32_t>> merged;
    for (size_t i = 0; i < filtered.targets.size(); ++i) {
        for (size_t k = 0; k < filtered.retained[i].size(); ++k) {
            uint32_t e = filtered.retained[i][k];
            auto& dst = merged[e];
            std::vector<uint32_t> u;
            std::set_union(dst.begin(), dst.end(), refined[i][k].begin(), refined[i][k].end(),
                           std::back_inserter(u));
            dst = std::move(u);
        }
    }
    SampledHypergraph out;
    out.edge_ids.reserve(merged.size());
    out.edge_nodes.reserve(merged.size());
    for (auto& [e, nodes] : merged) {
        out.edge_ids.push_back(e);
        out.edge_nodes.push_back(std::move(nodes));
    }
    return out;
}

InducedHypergraph induce(const Hypergraph& hg, const SampledHypergraph& sampled) {
    InducedHypergraph out;
    // node order: ascending global id; nodes appearing only in hyperedges
    // that shrank below 2 members are not carried over
    std::vector<uint32_t> nodes;
    for (const auto& en : sampled.edge_nodes)
        if (en.size() >= 2) nodes.insert(nodes.end(), en.begin(), en.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    out.local_to_global = nodes;
    out.global_to_local.reserve(nodes.size() * 2);
    for (uint32_t i = 0; i < nodes.size(); ++i) out.global_to_local.emplace(nodes[i], i);
    out.hg.n = nodes.size();
    for (size_t k = 0; k < sampled.edge_nodes.size(); ++k) {
        if (sampled.edge_nodes[k].size() < 2) {
            out.dropped_small += 1;
            continue;
        }
        std::vector<uint32_t> local;
        local.reserve(sampled.edge_nodes[k].size());
        for (uint32_t g : sampled.edge_nodes[k]) local.push_back(out.global_to_local.at(g));
        std::sort(local.begin(), local.end());
        out.hg.edge_nodes.push_back(std::move(local));
        out.edge_ids.push_back(sampled.edge_ids[k]);
        uint32_t e = sampled.edge_ids[k];
        out.hg.edge_hash.push_back(e < hg.edge_hash.size() ? hg.edge_hash[e] : std::string());
    }
    out.hg.m = out.hg.edge_nodes.size();
    out.hg.rebuild_node_index();
    return out;
}

InducedGraph sample_khop(const HomogeneousGraph& g, const std::vector<uint32_t>& targets,
                         const SamplerConfig& cfg, int n_threads) {
    for (uint32_t t : targets)
        if (t >= g.n) throw std::out_of_range("sample_khop: target not in graph");
    std::vector<std::vector<uint32_t>> kept(targets.size());
    parallel_for(targets.size(), n_threads, [&](size_t i) {
        uint32_t v = targets[i];
        const auto& nbrs = g.adj[v];
        std::vector<uint32_t> hop1;
        if (nbrs.size() <= cfg.k1) {
            hop1 = nbrs;
        } else {
            auto rng = rng::Stream::derive(cfg.seed, kTagHop1, v);
            hop1 = rng::sample_without_replacement(nbrs, cfg.k1, rng);
            std::sort(hop1.begin(), hop1.end());
        }
        // second-order candidates reachable through kept first-order nodes
        std::vector<uint32_t> cand;
        for (uint32_t u : hop1) cand.insert(cand.end(), g.adj[u].begin(), g.adj[u].end());
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        std::vector<uint32_t> exclude = hop1;
        exclude.push_back(v);
        std::sort(exclude.begin(), exclude.end());
        std::vector<uint32_t> hop2_cand;
        std::set_difference(cand.begin(), cand.end(), exclude.begin(), exclude.end(),
                            std::back_inserter(hop2_cand));
        std::vector<uint32_t> hop2;
        if (hop2_cand.size() <= cfg.k2) {
            hop2 = std::move(hop2_cand);
        } else {
            auto rng = rng::Stream::derive(cfg.seed, kTagHop2, v);
            hop2 = rng::sample_without_replacement(std::move(hop2_cand), cfg.k2, rng);
            std::sort(hop2.begin(), hop2.end());
        }
        kept[i] = std::move(hop1);
        kept[i].insert(kept[i].end(), hop2.begin(), hop2.end());
    });
    std::vector<uint32_t> nodes(targets.begin(), targets.end());
    for (const auto& k : kept) nodes.insert(nodes.end(), k.begin(), k.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    InducedGraph out;
    out.local_to_global = nodes;
    for (uint32_t i = 0; i < nodes.size(); ++i) out.global_to_local.emplace(nodes[i], i);
    out.g.n = nodes.size();
    out.g.adj.assign(out.g.n, {});
    for (const auto& e : g.edges) {
        auto iu = out.global_to_local.find(e.u);
        auto iv = out.global_to_local.find(e.v);
        if (iu == out.global_to_local.end() || iv == out.global_to_local.end()) continue;
        EdgeAgg local = e;
        local.u = std::min(iu->second, iv->second);
        local.v = std::max(iu->second, iv->second);
        out.g.edges.push_back(local);
        out.g.adj[local.u].push_back(local.v);
        out.g.adj[local.v].push_back(local.u);
    }
    std::sort(out.g.edges.begin(), out.g.edges.end(),
              [](const EdgeAgg& a, const EdgeAgg& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (auto& nb : out.g.adj) std::sort(nb.begin(), nb.end());
    return out;
}

void write_sampled_json(std::ostream& os, const InducedHypergraph& ih, const SamplerConfig& cfg) {
    nlohmann::json j;
    j["n"] = ih.hg.n;
    j["m"] = ih.hg.m;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["dropped_small"] = ih.dropped_small;
    j["node_ids"] = ih.local_to_global;
    j["edge_ids"] = ih.edge_ids;
    j["hyperedges"] = ih.hg.edge_nodes;
    os << j.dump() << '\n';
}

InducedHypergraph read_sampled_json(std::istream& is, SamplerConfig* cfg_out) {
    nlohmann::json j;
    is >> j;
    InducedHypergraph ih;
    ih.hg.n = j.at("n").get<size_t>();
    ih.hg.m = j.at("m").get<size_t>();
    ih.local_to_global = j.at("node_ids").get<std::vector<uint32_t>>();
    ih.edge_ids = j.at("edge_ids").get<std::vector<uint32_t>>();
    ih.hg.edge_nodes = j.at("hyperedges").get<std::vector<std::vector<uint32_t>>>();
    ih.dropped_small = j.value("dropped_small", size_t{0});
    ih.hg.edge_hash.assign(ih.hg.m, std::string());
    ih.hg.rebuild_node_index();
    for (uint32_t i = 0; i < ih.local_to_global.size(); ++i)
        ih.global_to_local.emplace(ih.local_to_global[i], i);
    if (cfg_out) {
        cfg_out->seed = j.value("seed", uint64_t{0});
        cfg_out->alpha = j.value("alpha", size_t{100});
        cfg_out->beta = j.value("beta", size_t{5});
    }
    return ih;
}

}  // namespace hyperdet::sampling
