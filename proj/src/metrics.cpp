#include "hyperdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hyperdet/rng.hpp"

namespace hyperdet::metrics {

static void check_classes(const std::vector<int>& ys) {
    for (int y : ys)
        if (y != 0 && y != 1) throw std::invalid_argument("metrics: class outside {0,1}");
}

static double f1_from(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

MetricsReport confusion_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("confusion_metrics: size mismatch or empty");
    check_classes(predicted);
    check_classes(truth);
    MetricsReport m;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1)
            predicted[i] == 1 ? ++m.cm.tp : ++m.cm.fn;
        else
            predicted[i] == 1 ? ++m.cm.fp : ++m.cm.tn;
    }
    auto ratio = [](int64_t num, int64_t den) { return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0; };
    m.precision = ratio(m.cm.tp, m.cm.tp + m.cm.fp);
    m.recall = ratio(m.cm.tp, m.cm.tp + m.cm.fn);
    m.binary_f1 = f1_from(m.precision, m.recall);
    // class-0 F1 with roles flipped
    double p0 = ratio(m.cm.tn, m.cm.tn + m.cm.fn);
    double r0 = ratio(m.cm.tn, m.cm.tn + m.cm.fp);
    m.macro_f1 = 0.5 * (m.binary_f1 + f1_from(p0, r0));
    return m;
}

double auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    if (scores.size() != truth.size() || scores.empty())
        throw std::invalid_argument("auc: size mismatch or empty");
    check_classes(truth);
    int64_t n_pos = 0;
    for (int y : truth) n_pos += y;
    int64_t n_neg = static_cast<int64_t>(truth.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: needs both classes");
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    // twice the positive rank sum, exact in integers (average ranks are half-integers)
    int64_t rank2_pos = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        int64_t first = static_cast<int64_t>(i) + 1, last = static_cast<int64_t>(j);
        int64_t pos_in_group = 0;
        for (size_t k = i; k < j; ++k) pos_in_group += truth[order[k]];
        rank2_pos += pos_in_group * (first + last);  // = pos * 2 * avg rank
        i = j;
    }
    int64_t numerator2 = rank2_pos - n_pos * (n_pos + 1);  // = 2*wins + ties
    return static_cast<double>(numerator2) / static_cast<double>(2 * n_pos * n_neg);
}

void split_labels(LabelSet& labels, double r_train, double r_val, double r_test, uint64_t seed) {
    double sum = r_train + r_val + r_test;
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("split_labels: ratios must sum to 1");
    const double ratios[3] = {r_train, r_val, r_test};
    int active = 0;
    for (double r : ratios) active += r > 0 ? 1 : 0;

    std::vector<uint32_t> by_class[2];
    for (const auto& [acct, y] : labels.labels) by_class[y].push_back(acct);
    labels.train_mask.clear();
    labels.val_mask.clear();
    labels.test_mask.clear();
    for (int cls = 0; cls < 2; ++cls) {
        auto& members = by_class[cls];
        if (members.empty()) continue;
        if (static_cast<int>(members.size()) < active)
            throw std::invalid_argument("split_labels: class " + std::to_string(cls) +
                                        " too small to stratify");
        std::sort(members.begin(), members.end());
        auto rng = rng::Stream::derive(seed, 0x73706c74, static_cast<uint64_t>(cls));
        for (size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[rng.bounded(i)]);
        // largest-remainder rounding of the per-mask share
        size_t n = members.size();
        size_t counts[3];
        double rema[3];
        size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            // force a rounded store of the share so the remainder below is not
            // fused into an fma on some iterations and not others; equal ratios
            // must yield bit-equal remainders or the tie-break order would
            // depend on the instruction set
            volatile double share_v = ratios[k] * static_cast<double>(n);
            double share = share_v;
            counts[k] = static_cast<size_t>(std::floor(share));
            rema[k] = share - std::floor(share);
            assigned += counts[k];
        }
        while (assigned < n) {
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (rema[k] > rema[best]) best = k;
            counts[best] += 1;
            rema[best] = -1;
            ++assigned;
        }
        size_t at = 0;
        std::vector<uint32_t>* masks[3] = {&labels.train_mask, &labels.val_mask, &labels.test_mask};
        for (int k = 0; k < 3; ++k)
            for (size_t c = 0; c < counts[k]; ++c) masks[k]->push_back(members[at++]);
    }
    std::sort(labels.train_mask.begin(), labels.train_mask.end());
    std::sort(labels.val_mask.begin(), labels.val_mask.end());
    std::sort(labels.test_mask.begin(), labels.test_mask.end());
}

std::string metrics_json(const MetricsReport& m) {
    nlohmann::json j{{"precision", m.precision}, {"recall", m.recall},     {"binary_f1", m.binary_f1},
                     {"macro_f1", m.macro_f1},   {"auc", m.auc},           {"tp", m.cm.tp},
                     {"fp", m.cm.fp},            {"tn", m.cm.tn},          {"fn", m.cm.fn}};
    return j.dump();
}

}  // namespace hyperdet::metrics
