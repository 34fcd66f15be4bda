#include "hyperdet/core.hpp"

#include <algorithm>
#include <cctype>

namespace hyperdet {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

static bool is_lower_hex(std::string_view s) {
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

bool is_hex_address(std::string_view s) {
    return s.size() == 42 && s.substr(0, 2) == "0x" && is_lower_hex(s.substr(2));
}

bool is_tx_hash(std::string_view s) {
    return s.size() == 66 && s.substr(0, 2) == "0x" && is_lower_hex(s.substr(2));
}

std::optional<u128> parse_wei(std::string_view s) {
    if (s.empty() || s.size() > 39) return std::nullopt;
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        u128 next = v * 10 + static_cast<unsigned>(c - '0');
        if (next < v) return std::nullopt;  // overflow
        v = next;
    }
    return v;
}

std::string wei_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

uint32_t AccountTable::intern(const std::string& address) {
    auto it = index_.find(address);
    if (it != index_.end()) return it->second;
    auto idx = static_cast<uint32_t>(addresses_.size());
    addresses_.push_back(address);
    index_.emplace(address, idx);
    return idx;
}

std::optional<uint32_t> AccountTable::find(const std::string& address) const {
    auto it = index_.find(address);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

AccountTable intern_accounts(const std::vector<TransactionRecord>& records) {
    if (records.empty()) throw std::invalid_argument("intern_accounts: empty record list");
    AccountTable table;
    for (const auto& r : records) {
        table.intern(r.from);
        table.intern(r.to);
    }
    return table;
}

void HomogeneousGraph::check_invariants() const {
    for (const auto& e : edges) {
        if (e.u >= e.v) throw std::logic_error("HomogeneousGraph: edge not canonical (u < v)");
        if (e.v >= n) throw std::logic_error("HomogeneousGraph: endpoint out of range");
    }
    if (adj.size() != n) throw std::logic_error("HomogeneousGraph: adjacency size mismatch");
}

void Hypergraph::rebuild_node_index() {
    node_edges.assign(n, {});
    for (size_t j = 0; j < edge_nodes.size(); ++j)
        for (uint32_t v : edge_nodes[j]) node_edges[v].push_back(static_cast<uint32_t>(j));
    // edge ids pushed in ascending j, so lists are already sorted
}

void Hypergraph::check_invariants() const {
    if (edge_nodes.size() != m) throw std::logic_error("Hypergraph: m mismatch");
    if (node_edges.size() != n) throw std::logic_error("Hypergraph: n mismatch");
    size_t incidences = 0;
    for (const auto& nodes : edge_nodes) {
        if (nodes.size() < 2) throw std::logic_error("Hypergraph: hyperedge with < 2 nodes");
        if (!std::is_sorted(nodes.begin(), nodes.end())) throw std::logic_error("Hypergraph: unsorted hyperedge");
        if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
            throw std::logic_error("Hypergraph: duplicate node in hyperedge");
        if (nodes.back() >= n) throw std::logic_error("Hypergraph: node id out of range");
        incidences += nodes.size();
    }
    size_t back_incidences = 0;
    for (uint32_t v = 0; v < n; ++v) {
        for (uint32_t e : node_edges[v]) {
            const auto& nodes = edge_nodes.at(e);
            if (!std::binary_search(nodes.begin(), nodes.end(), v))
                throw std::logic_error("Hypergraph: incidence lists not transposes");
        }
        back_incidences += node_edges[v].size();
    }
    if (incidences != back_incidences) throw std::logic_error("Hypergraph: incidence count mismatch");
}

}  // namespace hyperdet
