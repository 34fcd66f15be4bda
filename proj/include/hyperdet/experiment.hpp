#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdet/core.hpp"
#include "hyperdet/sampling.hpp"
#include "hyperdet/train.hpp"

namespace hyperdet::experiment {

// Fully ingested dataset in global indexing, before per-channel sampling.
struct Corpus {
    std::vector<TransactionRecord> records;  // deduplicated
    AccountTable accounts;
    LabelSet labels;  // masks assigned
    Hypergraph hypergraph;
    HomogeneousGraph graph;
};

Corpus load_corpus(const std::string& tx_path, const std::string& labels_path,
                   double r_train, double r_val, double r_test, uint64_t split_seed);

// Sample the channel's graph around the labeled targets, extract and
// normalize features, and map masks into local indices.
train::DataBundle build_bundle(const Corpus& corpus, model::Channel channel,
                               const sampling::SamplerConfig& sampler, int n_threads = 0);

struct GridEntry {
    model::ModelConfig config;
    double mean_val_macro_f1 = 0;
    double mean_val_auc = 0;
    bool diverged = false;
    std::string error;
};

// hidden {16,32,64} x bn {off,on} x lr {0.1,0.05,0.01,0.005,0.001}
std::vector<model::ModelConfig> default_grid(model::Channel channel, const model::ModelConfig& base);

// Train every config for every seed; leaderboard sorted by mean validation
// macro-F1 desc, ties by validation AUC then config order. Diverged configs
// are recorded, not fatal.
std::vector<GridEntry> grid_search(const train::DataBundle& data,
                                   const std::vector<model::ModelConfig>& space,
                                   const std::vector<uint64_t>& seeds, int n_threads = 0);

struct MetricSummary {
    double mean = 0, stddev = 0;  // population std
    std::string formatted() const;  // "mm.mm ± ss.ss" as percentages
};

struct RepeatResult {
    model::ModelConfig config;
    MetricSummary precision, recall, binary_f1, macro_f1, auc;
    std::vector<metrics::MetricsReport> runs;
};

// n_runs independent trainings seeded base_seed + i, reported on test mask.
RepeatResult repeat_evaluate(const train::DataBundle& data, model::ModelConfig config,
                             int n_runs, uint64_t base_seed, int n_threads = 0);

// One row per channel, Precision/Recall/Binary F1/Macro F1/AUC columns with
// "mean ± std" cells.
void write_comparison_csv(std::ostream& os, const std::vector<std::pair<std::string, RepeatResult>>& rows);

std::string grid_json(const std::vector<GridEntry>& leaderboard);
std::string repeat_json(const RepeatResult& r);

}  // namespace hyperdet::experiment
