#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdet/core.hpp"

namespace hyperdet::features {

constexpr size_t kFeatureDim = 17;

const std::array<std::string, kFeatureDim>& feature_names();

struct FeatureMatrix {
    size_t n = 0;
    std::vector<double> values;  // n x 17, row-major
    bool fitted = false;
    std::array<double, kFeatureDim> train_mean{};
    std::array<double, kFeatureDim> train_std{};  // 0 marks pass-through (centered only)

    double at(size_t row, size_t col) const { return values[row * kFeatureDim + col]; }
    double& at(size_t row, size_t col) { return values[row * kFeatureDim + col]; }
};

// Column layout:
//   0-4   received value total / mean / max / min / std (population), ether
//   5-9   sent, same statistics
//   10,11 mean |dv| between consecutive received / sent transactions
//   12,13 mean dt between consecutive received / sent transactions
//   14    lifecycle (last - first timestamp over all the account's txs)
//   15,16 sent count / received count
// Empty-set statistics are 0. Order-invariant: per-direction lists are
// sorted by the full record tuple before accumulation.
std::array<double, kFeatureDim> extract_account_features(uint32_t account,
                                                         const std::vector<TransactionRecord>& records,
                                                         const AccountTable& accounts);

FeatureMatrix build_feature_matrix(const AccountTable& accounts, const std::vector<TransactionRecord>& records);

// As build_feature_matrix but rows follow `node_accounts` (e.g. a sampled
// subgraph's local ordering of global account ids).
FeatureMatrix build_feature_matrix_for(const std::vector<uint32_t>& node_accounts,
                                       const std::vector<TransactionRecord>& records,
                                       const AccountTable& accounts);

// Z-score every row using statistics fitted on train rows only. Columns
// with zero train variance are centered, not scaled.
void fit_and_normalize(FeatureMatrix& m, const std::vector<uint32_t>& train_rows);

void write_csv(std::ostream& os, const FeatureMatrix& m, const std::vector<std::string>& row_addresses);

// versioned binary cache
void write_cache(std::ostream& os, const FeatureMatrix& m);
FeatureMatrix read_cache(std::istream& is);

}  // namespace hyperdet::features
