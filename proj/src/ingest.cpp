#include "hyperdet/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace hyperdet::ingest {

using nlohmann::json;

std::string IngestReport::to_json() const {
    json j{{"records_read", records_read},
           {"records_accepted", records_accepted},
           {"records_rejected", records_rejected},
           {"duplicates_removed", duplicates_removed},
           {"n_accounts", n_accounts},
           {"n_edges", n_edges},
           {"n_hyperedges", n_hyperedges},
           {"hyperedges_dropped_singleton", hyperedges_dropped_singleton}};
    json rej = json::array();
    for (const auto& r : rejects) rej.push_back({{"line", r.line}, {"reason", r.reason}});
    j["rejects"] = rej;
    return j.dump(2);
}

static void add_reject(IngestReport& report, size_t line, std::string reason) {
    report.records_rejected += 1;
    if (report.rejects.size() < IngestReport::kMaxLoggedRejects)
        report.rejects.push_back({line, std::move(reason)});
}

static bool parse_line(const std::string& line, TransactionRecord& rec, std::string& err) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        err = "not a JSON object";
        return false;
    }
    for (const char* field : {"hash", "from", "to", "value", "timestamp", "is_trace"}) {
        if (!j.contains(field)) {
            err = std::string("missing field: ") + field;
            return false;
        }
    }
    if (!j["hash"].is_string() || !j["from"].is_string() || !j["to"].is_string()) {
        err = "hash/from/to must be strings";
        return false;
    }
    rec.tx_hash = to_lower_ascii(j["hash"].get_ref<const std::string&>());
    rec.from = to_lower_ascii(j["from"].get_ref<const std::string&>());
    rec.to = to_lower_ascii(j["to"].get_ref<const std::string&>());
    if (!is_tx_hash(rec.tx_hash)) {
        err = "malformed tx hash";
        return false;
    }
    if (!is_hex_address(rec.from)) {
        err = "malformed from address";
        return false;
    }
    if (!is_hex_address(rec.to)) {
        err = "malformed to address";
        return false;
    }
    const auto& v = j["value"];
    std::optional<u128> wei;
    if (v.is_string()) {
        wei = parse_wei(v.get_ref<const std::string&>());
    } else if (v.is_number_unsigned()) {
        wei = static_cast<u128>(v.get<uint64_t>());
    }
    if (!wei) {
        err = "value must be a non-negative decimal wei string";
        return false;
    }
    rec.value = *wei;
    if (!j["timestamp"].is_number_integer()) {
        err = "timestamp must be an integer";
        return false;
    }
    rec.timestamp = j["timestamp"].get<int64_t>();
    if (rec.timestamp <= 0) {
        err = "timestamp must be > 0";
        return false;
    }
    if (!j["is_trace"].is_boolean()) {
        err = "is_trace must be a boolean";
        return false;
    }
    rec.is_trace = j["is_trace"].get<bool>();
    return true;
}

std::vector<TransactionRecord> parse_transactions(std::istream& in, IngestReport& report) {
    std::vector<TransactionRecord> records;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        report.records_read += 1;
        TransactionRecord rec;
        std::string err;
        if (parse_line(line, rec, err)) {
            report.records_accepted += 1;
            records.push_back(std::move(rec));
        } else {
            add_reject(report, lineno, err);
        }
    }
    return records;
}

std::vector<TransactionRecord> parse_transactions_file(const std::string& path, IngestReport& report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transaction file: " + path);
    return parse_transactions(in, report);
}

static std::string dedup_key(const TransactionRecord& r) {
    std::string key;
    key.reserve(r.tx_hash.size() + r.from.size() + r.to.size() + 44);
    key += r.tx_hash;
    key += '|';
    key += r.from;
    key += '|';
    key += r.to;
    key += '|';
    key += wei_to_string(r.value);
    key += '|';
    key += r.is_trace ? '1' : '0';
    return key;
}

std::vector<TransactionRecord> deduplicate(std::vector<TransactionRecord> records, IngestReport* report) {
    std::unordered_set<std::string> seen;
    seen.reserve(records.size() * 2);
    std::vector<TransactionRecord> out;
    out.reserve(records.size());
    size_t removed = 0;
    for (auto& r : records) {
        if (seen.insert(dedup_key(r)).second)
            out.push_back(std::move(r));
        else
            ++removed;
    }
    if (report) report->duplicates_removed += removed;
    return out;
}

HomogeneousGraph build_homogeneous(const std::vector<TransactionRecord>& records, const AccountTable& accounts) {
    HomogeneousGraph g;
    g.n = accounts.size();
    std::unordered_map<uint64_t, EdgeAgg> agg;
    agg.reserve(records.size());
    for (const auto& r : records) {
        uint32_t a = *accounts.find(r.from);
        uint32_t b = *accounts.find(r.to);
        if (a == b) continue;  // self-transfers carry no edge
        uint32_t u = std::min(a, b), v = std::max(a, b);
        uint64_t key = (static_cast<uint64_t>(u) << 32) | v;
        auto& e = agg[key];
        e.u = u;
        e.v = v;
        e.tx_count += 1;
        e.total_value += r.value;
    }
    g.edges.reserve(agg.size());
    for (auto& [key, e] : agg) g.edges.push_back(e);
    std::sort(g.edges.begin(), g.edges.end(),
              [](const EdgeAgg& a, const EdgeAgg& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    g.adj.assign(g.n, {});
    for (const auto& e : g.edges) {
        g.adj[e.u].push_back(e.v);
        g.adj[e.v].push_back(e.u);
    }
    for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

Hypergraph build_hypergraph(const std::vector<TransactionRecord>& records, const AccountTable& accounts,
                            IngestReport* report) {
    // group by tx hash in first-appearance order
    std::unordered_map<std::string, uint32_t> hash_index;
    hash_index.reserve(records.size());
    std::vector<std::string> hashes;
    std::vector<std::vector<uint32_t>> members;
    for (const auto& r : records) {
        auto [it, inserted] = hash_index.emplace(r.tx_hash, static_cast<uint32_t>(hashes.size()));
        if (inserted) {
            hashes.push_back(r.tx_hash);
            members.emplace_back();
        }
        auto& set = members[it->second];
        set.push_back(*accounts.find(r.from));
        set.push_back(*accounts.find(r.to));
    }
    Hypergraph hg;
    hg.n = accounts.size();
    size_t dropped = 0;
    for (size_t j = 0; j < members.size(); ++j) {
        auto& nodes = members[j];
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        if (nodes.size() < 2) {
            ++dropped;
            continue;
        }
        hg.edge_nodes.push_back(std::move(nodes));
        hg.edge_hash.push_back(hashes[j]);
    }
    hg.m = hg.edge_nodes.size();
    hg.rebuild_node_index();
    if (report) {
        report->n_hyperedges = hg.m;
        report->hyperedges_dropped_singleton += dropped;
    }
    return hg;
}

LabelSet load_labels_stream(std::istream& in, const AccountTable& accounts,
                            std::vector<RejectDiagnostic>* rejects) {
    LabelSet labels;
    std::string line;
    size_t lineno = 0;
    bool header_seen = false;
    auto reject = [&](size_t ln, const std::string& why) {
        if (rejects) rejects->push_back({ln, why});
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            header_seen = true;
            if (line == "address,label") continue;  // header optional but recommended
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            reject(lineno, "missing comma");
            continue;
        }
        std::string addr = to_lower_ascii(line.substr(0, comma));
        std::string lab = line.substr(comma + 1);
        if (!is_hex_address(addr)) {
            reject(lineno, "malformed address");
            continue;
        }
        if (lab != "0" && lab != "1") {
            reject(lineno, "label must be 0 or 1");
            continue;
        }
        auto idx = accounts.find(addr);
        if (!idx) {
            reject(lineno, "label for unknown address: " + addr);
            continue;
        }
        int value = lab == "1" ? 1 : 0;
        auto it = labels.labels.find(*idx);
        if (it != labels.labels.end()) {
            if (it->second != value)
                throw std::runtime_error("conflicting labels for address " + addr);
            continue;
        }
        labels.labels.emplace(*idx, value);
    }
    return labels;
}

LabelSet load_labels(const std::string& path, const AccountTable& accounts,
                     std::vector<RejectDiagnostic>* rejects) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file: " + path);
    return load_labels_stream(in, accounts, rejects);
}

}  // namespace hyperdet::ingest
