#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperdet/core.hpp"

namespace hyperdet::metrics {

struct Confusion {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct MetricsReport {
    double precision = 0, recall = 0, binary_f1 = 0, macro_f1 = 0, auc = 0;
    Confusion cm;
};

// Positive class = 1 (Ponzi). Undefined precision/recall -> 0; macro F1 is
// the unweighted mean of the per-class F1 scores.
MetricsReport confusion_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);

// Mann-Whitney AUC via sort + rank sum; ties counted half. The numerator
// (2 * wins + ties) is integral, so results match pair enumeration exactly.
double auc(const std::vector<double>& scores, const std::vector<int>& truth);

// Stratified split with largest-remainder rounding per class; mutates the
// masks of `labels`. ratios = (train, val, test), summing to 1.
void split_labels(LabelSet& labels, double r_train, double r_val, double r_test, uint64_t seed);

std::string metrics_json(const MetricsReport& m);

}  // namespace hyperdet::metrics
