#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperdet/metrics.hpp"
#include "hyperdet/model.hpp"
#include "hyperdet/nn.hpp"

namespace hyperdet::train {

// Everything one training run consumes, in local (subgraph) indexing.
struct DataBundle {
    nn::SparseOp op;
    nn::Mat x;                       // normalized features
    std::vector<int> labels;         // per node, -1 = unlabeled
    std::vector<uint32_t> train_mask, val_mask, test_mask;  // local node ids
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0;
    double val_macro_f1 = 0;
    double val_auc = 0;
};

struct TrainRun {
    model::ModelConfig config;
    model::ModelParams best_params;  // snapshot at best validation macro-F1
    int best_epoch = -1;
    std::vector<EpochRecord> history;
    metrics::MetricsReport val_metrics;   // at best epoch
    metrics::MetricsReport test_metrics;  // best snapshot evaluated on test mask
};

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

// Full-batch training with Adam; deterministic under a fixed seed.
TrainRun fit(const DataBundle& data, const model::ModelConfig& cfg);

// Evaluation pass with a given parameter snapshot (no dropout, BN in
// inference mode). Returns class-1 probabilities per node.
std::vector<double> predict_scores(const DataBundle& data, model::ModelParams& params,
                                   const model::ModelConfig& cfg);

metrics::MetricsReport evaluate_mask(const DataBundle& data, const std::vector<double>& scores,
                                     const std::vector<uint32_t>& mask);

std::string history_json(const TrainRun& run);

// versioned parameter checkpoint (shapes + row-major f64)
void write_checkpoint(std::ostream& os, const model::ModelParams& params);
model::ModelParams read_checkpoint(std::istream& is);

}  // namespace hyperdet::train
