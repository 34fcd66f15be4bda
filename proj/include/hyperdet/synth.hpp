#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperdet/core.hpp"

namespace hyperdet::synth {

struct SynthConfig {
    size_t n_normal = 1406;
    size_t n_ponzi = 197;
    size_t n_unlabeled = 3000;        // investor/background pool, never labeled
    size_t investors_per_scheme = 12;
    double deposits_per_investor = 2.0;   // mean, each investor makes >= 1
    double normal_tx_rate = 8.0;          // mean background transfers per account, >= 1
    double payout_decay = 0.9;            // scheme outflows shrink by this per deposit
    size_t fanout_min = 2, fanout_max = 6;  // participants per scheme transaction hash
    int64_t t0 = 1600000000;
    int64_t horizon = 180LL * 86400;
    uint64_t seed = 0;
    size_t target_records = 0;  // pad background until exactly this many records (0 = off)

    void validate() const;
    std::string to_json() const;
    static SynthConfig from_json(const std::string& text);
};

struct GeneratedCorpus {
    std::vector<TransactionRecord> records;        // sorted by (timestamp, hash)
    std::vector<std::string> addresses;            // account index -> address
    std::vector<int> labels;                       // -1 unlabeled, else {0,1}
    std::string manifest_json;
};

// Ponzi accounts receive many small deposits from distinct investors and
// pay earlier investors through multi-party hashes with decaying value;
// normal accounts make memoryless pairwise transfers.
GeneratedCorpus generate(const SynthConfig& cfg);

// Write transactions JSONL + labels CSV + manifest JSON.
void write_corpus(const GeneratedCorpus& corpus, const std::string& tx_path,
                  const std::string& labels_path, const std::string& manifest_path);

}  // namespace hyperdet::synth
