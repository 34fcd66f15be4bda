#include "hyperdet/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hyperdet::features {

const std::array<std::string, kFeatureDim>& feature_names() {
    static const std::array<std::string, kFeatureDim> names = {
        "recv_total", "recv_mean",  "recv_max",     "recv_min",     "recv_std",
        "sent_total", "sent_mean",  "sent_max",     "sent_min",     "sent_std",
        "recv_value_gap_mean", "sent_value_gap_mean",
        "recv_time_gap_mean",  "sent_time_gap_mean",
        "lifecycle",  "sent_count", "recv_count"};
    return names;
}

static bool record_less(const TransactionRecord& a, const TransactionRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.tx_hash != b.tx_hash) return a.tx_hash < b.tx_hash;
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    if (a.value != b.value) return a.value < b.value;
    return a.is_trace < b.is_trace;
}

namespace {
struct DirStats {
    double total = 0, mean = 0, max = 0, min = 0, stddev = 0;
    double value_gap = 0, time_gap = 0;
    size_t count = 0;
};
}  // namespace

// idx: record indices for one direction; sorted canonically inside.
static DirStats direction_stats(std::vector<uint32_t> idx, const std::vector<TransactionRecord>& records) {
    std::sort(idx.begin(), idx.end(),
              [&](uint32_t a, uint32_t b) { return record_less(records[a], records[b]); });
    DirStats s;
    s.count = idx.size();
    if (idx.empty()) return s;
    std::vector<double> vals(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) vals[i] = wei_to_ether(records[idx[i]].value);
    s.min = vals[0];
    for (double v : vals) {
        s.total += v;
        s.max = std::max(s.max, v);
        s.min = std::min(s.min, v);
    }
    s.mean = s.total / static_cast<double>(vals.size());
    double var = 0;
    for (double v : vals) var += (v - s.mean) * (v - s.mean);
    var /= static_cast<double>(vals.size());  // population
    s.stddev = std::sqrt(var);
    if (idx.size() >= 2) {
        double vg = 0, tg = 0;
        for (size_t i = 1; i < idx.size(); ++i) {
            vg += std::fabs(vals[i] - vals[i - 1]);
            tg += static_cast<double>(records[idx[i]].timestamp - records[idx[i - 1]].timestamp);
        }
        s.value_gap = vg / static_cast<double>(idx.size() - 1);
        s.time_gap = tg / static_cast<double>(idx.size() - 1);
    }
    return s;
}

static std::array<double, kFeatureDim> compute_features(std::vector<uint32_t> recv_idx,
                                                        std::vector<uint32_t> sent_idx,
                                                        const std::vector<TransactionRecord>& records) {
    std::array<double, kFeatureDim> f{};
    DirStats recv = direction_stats(std::move(recv_idx), records);
    DirStats sent = direction_stats(std::move(sent_idx), records);
    f[0] = recv.total;
    f[1] = recv.mean;
    f[2] = recv.max;
    f[3] = recv.min;
    f[4] = recv.stddev;
    f[5] = sent.total;
    f[6] = sent.mean;
    f[7] = sent.max;
    f[8] = sent.min;
    f[9] = sent.stddev;
    f[10] = recv.value_gap;
    f[11] = sent.value_gap;
    f[12] = recv.time_gap;
    f[13] = sent.time_gap;
    f[15] = static_cast<double>(sent.count);
    f[16] = static_cast<double>(recv.count);
    return f;
}

static void add_lifecycle(std::array<double, kFeatureDim>& f, int64_t first_ts, int64_t last_ts, bool any) {
    f[14] = any ? static_cast<double>(last_ts - first_ts) : 0.0;
}

std::array<double, kFeatureDim> extract_account_features(uint32_t account,
                                                         const std::vector<TransactionRecord>& records,
                                                         const AccountTable& accounts) {
    const std::string& addr = accounts.address(account);
    std::vector<uint32_t> recv_idx, sent_idx;
    int64_t first_ts = 0, last_ts = 0;
    bool any = false;
    for (uint32_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        bool touches = false;
        if (r.to == addr) {
            recv_idx.push_back(i);
            touches = true;
        }
        if (r.from == addr) {
            sent_idx.push_back(i);
            touches = true;
        }
        if (touches) {
            if (!any) {
                first_ts = last_ts = r.timestamp;
                any = true;
            } else {
                first_ts = std::min(first_ts, r.timestamp);
                last_ts = std::max(last_ts, r.timestamp);
            }
        }
    }
    auto f = compute_features(std::move(recv_idx), std::move(sent_idx), records);
    add_lifecycle(f, first_ts, last_ts, any);
    return f;
}

FeatureMatrix build_feature_matrix_for(const std::vector<uint32_t>& node_accounts,
                                       const std::vector<TransactionRecord>& records,
                                       const AccountTable& accounts) {
    // bucket record indices once instead of scanning per account
    const size_t n_total = accounts.size();
    std::vector<std::vector<uint32_t>> recv(n_total), sent(n_total);
    std::vector<int64_t> first_ts(n_total, 0), last_ts(n_total, 0);
    std::vector<uint8_t> any(n_total, 0);
    for (uint32_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        uint32_t a = *accounts.find(r.from);
        uint32_t b = *accounts.find(r.to);
        sent[a].push_back(i);
        recv[b].push_back(i);
        for (uint32_t v : {a, b}) {
            if (!any[v]) {
                first_ts[v] = last_ts[v] = r.timestamp;
                any[v] = 1;
            } else {
                first_ts[v] = std::min(first_ts[v], r.timestamp);
                last_ts[v] = std::max(last_ts[v], r.timestamp);
            }
        }
    }
    FeatureMatrix m;
    m.n = node_accounts.size();
    m.values.resize(m.n * kFeatureDim);
    for (size_t row = 0; row < node_accounts.size(); ++row) {
        uint32_t acct = node_accounts[row];
        auto f = compute_features(recv[acct], sent[acct], records);
        add_lifecycle(f, first_ts[acct], last_ts[acct], any[acct] != 0);
        std::copy(f.begin(), f.end(), m.values.begin() + static_cast<ptrdiff_t>(row * kFeatureDim));
    }
    return m;
}

FeatureMatrix build_feature_matrix(const AccountTable& accounts, const std::vector<TransactionRecord>& records) {
    std::vector<uint32_t> all(accounts.size());
    for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    return build_feature_matrix_for(all, records, accounts);
}

void fit_and_normalize(FeatureMatrix& m, const std::vector<uint32_t>& train_rows) {
    if (train_rows.empty()) throw std::invalid_argument("fit_and_normalize: empty train mask");
    const double nt = static_cast<double>(train_rows.size());
    for (size_t c = 0; c < kFeatureDim; ++c) {
        double mean = 0;
        for (uint32_t r : train_rows) mean += m.at(r, c);
        mean /= nt;
        double var = 0;
        for (uint32_t r : train_rows) {
            double d = m.at(r, c) - mean;
            var += d * d;
        }
        var /= nt;
        double sd = std::sqrt(var);
        if (sd < 1e-12 * std::max(1.0, std::fabs(mean))) sd = 0.0;  // constant column
        m.train_mean[c] = mean;
        m.train_std[c] = sd;
        for (size_t r = 0; r < m.n; ++r) {
            double v = m.at(r, c) - mean;
            m.at(r, c) = sd > 0 ? v / sd : v;
        }
    }
    m.fitted = true;
}

void write_csv(std::ostream& os, const FeatureMatrix& m, const std::vector<std::string>& row_addresses) {
    os << "address";
    for (const auto& name : feature_names()) os << ',' << name;
    os << '\n';
    os.precision(17);
    for (size_t r = 0; r < m.n; ++r) {
        os << row_addresses[r];
        for (size_t c = 0; c < kFeatureDim; ++c) os << ',' << m.at(r, c);
        os << '\n';
    }
}

static constexpr char kCacheMagic[8] = {'H', 'D', 'F', 'M', '0', '0', '0', '1'};

void write_cache(std::ostream& os, const FeatureMatrix& m) {
    os.write(kCacheMagic, sizeof(kCacheMagic));
    uint64_t n = m.n, d = kFeatureDim, fitted = m.fitted ? 1 : 0;
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&d), 8);
    os.write(reinterpret_cast<const char*>(&fitted), 8);
    os.write(reinterpret_cast<const char*>(m.values.data()), static_cast<std::streamsize>(m.values.size() * 8));
    os.write(reinterpret_cast<const char*>(m.train_mean.data()), kFeatureDim * 8);
    os.write(reinterpret_cast<const char*>(m.train_std.data()), kFeatureDim * 8);
}

FeatureMatrix read_cache(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCacheMagic, 8) != 0)
        throw std::runtime_error("feature cache: bad magic");
    uint64_t n = 0, d = 0, fitted = 0;
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&d), 8);
    is.read(reinterpret_cast<char*>(&fitted), 8);
    if (d != kFeatureDim) throw std::runtime_error("feature cache: dimension mismatch");
    FeatureMatrix m;
    m.n = n;
    m.fitted = fitted != 0;
    m.values.resize(n * kFeatureDim);
    is.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(m.values.size() * 8));
    is.read(reinterpret_cast<char*>(m.train_mean.data()), kFeatureDim * 8);
    is.read(reinterpret_cast<char*>(m.train_std.data()), kFeatureDim * 8);
    if (!is) throw std::runtime_error("feature cache: truncated");
    return m;
}

}  // namespace hyperdet::features
