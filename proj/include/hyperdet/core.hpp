#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyperdet {

using u128 = unsigned __int128;

constexpr double kWeiPerEther = 1e18;

std::string to_lower_ascii(std::string_view s);

// "0x" + 40 lowercase hex chars. Callers lowercase first.
bool is_hex_address(std::string_view s);
// "0x" + 64 lowercase hex chars.
bool is_tx_hash(std::string_view s);

// Decimal wei string -> u128. Returns nullopt on sign, non-digit, or overflow.
std::optional<u128> parse_wei(std::string_view s);
std::string wei_to_string(u128 v);
inline double wei_to_ether(u128 v) { return static_cast<double>(v) / kWeiPerEther; }

struct TransactionRecord {
    std::string tx_hash;   // normalized lowercase "0x" + 64 hex
    std::string from;      // normalized lowercase "0x" + 40 hex
    std::string to;
    u128 value = 0;        // wei
    int64_t timestamp = 0; // unix seconds, > 0
    bool is_trace = false;
};

// Dense interning of addresses in first-appearance order (from before to,
// record by record).
class AccountTable {
public:
    uint32_t intern(const std::string& address);
    std::optional<uint32_t> find(const std::string& address) const;
    const std::string& address(uint32_t index) const { return addresses_.at(index); }
    size_t size() const { return addresses_.size(); }

private:
    std::vector<std::string> addresses_;
    std::unordered_map<std::string, uint32_t> index_;
};

AccountTable intern_accounts(const std::vector<TransactionRecord>& records);

struct EdgeAgg {
    uint32_t u = 0, v = 0;  // u < v
    uint64_t tx_count = 0;
    u128 total_value = 0;
};

struct HomogeneousGraph {
    size_t n = 0;
    std::vector<EdgeAgg> edges;              // sorted by (u, v)
    std::vector<std::vector<uint32_t>> adj;  // per node, sorted neighbor ids

    void check_invariants() const;  // throws on violation
};

struct Hypergraph {
    size_t n = 0;
    size_t m = 0;
    std::vector<std::vector<uint32_t>> edge_nodes;  // per hyperedge, sorted distinct node ids, size >= 2
    std::vector<std::vector<uint32_t>> node_edges;  // per node, sorted hyperedge ids
    std::vector<std::string> edge_hash;             // hyperedge id -> tx hash (may be empty for derived graphs)

    // rebuild node_edges from edge_nodes
    void rebuild_node_index();
    void check_invariants() const;
};

struct LabelSet {
    std::unordered_map<uint32_t, int> labels;  // account index -> {0 normal, 1 ponzi}
    std::vector<uint32_t> train_mask, val_mask, test_mask;  // disjoint account indices
};

}  // namespace hyperdet
