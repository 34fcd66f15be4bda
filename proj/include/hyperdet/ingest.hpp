#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdet/core.hpp"

namespace hyperdet::ingest {

struct RejectDiagnostic {
    size_t line = 0;  // 1-based
    std::string reason;
};

struct IngestReport {
    size_t records_read = 0;      // accepted + rejected
    size_t records_accepted = 0;
    size_t records_rejected = 0;
    size_t duplicates_removed = 0;
    size_t n_accounts = 0;
    size_t n_edges = 0;
    size_t n_hyperedges = 0;
    size_t hyperedges_dropped_singleton = 0;
    std::vector<RejectDiagnostic> rejects;  // first kMaxLoggedRejects only
    static constexpr size_t kMaxLoggedRejects = 100;

    std::string to_json() const;
};

// Line-delimited JSON: {hash, from, to, value, timestamp, is_trace}.
// Malformed lines are rejected and logged, never abort the stream.
std::vector<TransactionRecord> parse_transactions(std::istream& in, IngestReport& report);
std::vector<TransactionRecord> parse_transactions_file(const std::string& path, IngestReport& report);

// Keep the first occurrence of each (tx_hash, from, to, value, is_trace);
// order otherwise preserved. Timestamp deliberately excluded from the key.
std::vector<TransactionRecord> deduplicate(std::vector<TransactionRecord> records, IngestReport* report = nullptr);

HomogeneousGraph build_homogeneous(const std::vector<TransactionRecord>& records, const AccountTable& accounts);

Hypergraph build_hypergraph(const std::vector<TransactionRecord>& records, const AccountTable& accounts,
                            IngestReport* report = nullptr);

// CSV "address,label" with label in {0,1}. Unknown addresses are rejected
// with a diagnostic; conflicting duplicate labels are fatal.
LabelSet load_labels(const std::string& path, const AccountTable& accounts,
                     std::vector<RejectDiagnostic>* rejects = nullptr);
LabelSet load_labels_stream(std::istream& in, const AccountTable& accounts,
                            std::vector<RejectDiagnostic>* rejects = nullptr);

}  // namespace hyperdet::ingest
