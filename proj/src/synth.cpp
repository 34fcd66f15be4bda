#include "hyperdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "hyperdet/rng.hpp"

namespace hyperdet::synth {

using nlohmann::json;

void SynthConfig::validate() const {
    if (fanout_min < 2 || fanout_max > 64 || fanout_min > fanout_max)
        throw std::invalid_argument("SynthConfig: fanout support must lie in [2, 64]");
    if (horizon <= 1 || t0 <= 0) throw std::invalid_argument("SynthConfig: bad time horizon");
    if (payout_decay <= 0 || payout_decay > 1) throw std::invalid_argument("SynthConfig: payout_decay in (0,1]");
}

std::string SynthConfig::to_json() const {
    json j{{"n_normal", n_normal},
           {"n_ponzi", n_ponzi},
           {"n_unlabeled", n_unlabeled},
           {"investors_per_scheme", investors_per_scheme},
           {"deposits_per_investor", deposits_per_investor},
           {"normal_tx_rate", normal_tx_rate},
           {"payout_decay", payout_decay},
           {"fanout_min", fanout_min},
           {"fanout_max", fanout_max},
           {"t0", t0},
           {"horizon", horizon},
           {"seed", seed},
           {"target_records", target_records}};
    return j.dump(2);
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    SynthConfig c;
    static const std::unordered_set<std::string> known = {
        "n_normal", "n_ponzi", "n_unlabeled", "investors_per_scheme", "deposits_per_investor",
        "normal_tx_rate", "payout_decay", "fanout_min", "fanout_max", "t0", "horizon",
        "seed", "target_records"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw std::invalid_argument("SynthConfig: unknown key " + it.key());
    c.n_normal = j.value("n_normal", c.n_normal);
    c.n_ponzi = j.value("n_ponzi", c.n_ponzi);
    c.n_unlabeled = j.value("n_unlabeled", c.n_unlabeled);
    c.investors_per_scheme = j.value("investors_per_scheme", c.investors_per_scheme);
    c.deposits_per_investor = j.value("deposits_per_investor", c.deposits_per_investor);
    c.normal_tx_rate = j.value("normal_tx_rate", c.normal_tx_rate);
    c.payout_decay = j.value("payout_decay", c.payout_decay);
    c.fanout_min = j.value("fanout_min", c.fanout_min);
    c.fanout_max = j.value("fanout_max", c.fanout_max);
    c.t0 = j.value("t0", c.t0);
    c.horizon = j.value("horizon", c.horizon);
    c.seed = j.value("seed", c.seed);
    c.target_records = j.value("target_records", c.target_records);
    c.validate();
    return c;
}

static const char* kHexDigits = "0123456789abcdef";

static std::string hex_of(uint64_t v, size_t digits) {
    std::string out(digits, '0');
    for (size_t i = 0; i < digits; ++i) out[digits - 1 - i] = kHexDigits[(v >> (4 * i)) & 0xf];
    return out;
}

static std::string make_address(uint64_t seed, size_t index) {
    auto rng = rng::Stream::derive(seed, 0x61646472, index);
    // index embedded in the prefix keeps addresses collision-free
    return "0x" + hex_of(index, 8) + hex_of(rng.next_u64(), 16) + hex_of(rng.next_u64(), 16);
}

static std::string make_hash(uint64_t seed, uint64_t counter) {
    auto rng = rng::Stream::derive(seed, 0x68617368, counter);
    return "0x" + hex_of(counter, 16) + hex_of(rng.next_u64(), 16) + hex_of(rng.next_u64(), 16) +
           hex_of(rng.next_u64(), 16);
}

static u128 ether_to_wei(double eth) {
    if (eth < 1e-9) eth = 1e-9;
    if (eth > 1e6) eth = 1e6;
    return static_cast<u128>(eth * kWeiPerEther);
}

GeneratedCorpus generate(const SynthConfig& cfg) {
    cfg.validate();
    GeneratedCorpus out;
    const size_t n_total = cfg.n_ponzi + cfg.n_normal + cfg.n_unlabeled;
    out.addresses.reserve(n_total);
    out.labels.assign(n_total, -1);
    for (size_t i = 0; i < n_total; ++i) out.addresses.push_back(make_address(cfg.seed, i));
    for (size_t i = 0; i < cfg.n_ponzi; ++i) out.labels[i] = 1;
    for (size_t i = cfg.n_ponzi; i < cfg.n_ponzi + cfg.n_normal; ++i) out.labels[i] = 0;

    uint64_t hash_counter = 0;
    auto emit = [&](size_t from, size_t to, u128 value, int64_t ts, bool trace, const std::string& hash) {
        TransactionRecord r;
        r.tx_hash = hash;
        r.from = out.addresses[from];
        r.to = out.addresses[to];
        r.value = value;
        r.timestamp = ts;
        r.is_trace = trace;
        out.records.push_back(std::move(r));
    };

    // pool of possible investors: everything that is not a scheme account
    const size_t pool_begin = cfg.n_ponzi;

    for (size_t s = 0; s < cfg.n_ponzi; ++s) {
        auto rng = rng::Stream::derive(cfg.seed, 0x7363686d, s);
        std::vector<size_t> pool_sample;
        {
            std::vector<size_t> idx(n_total - pool_begin);
            for (size_t i = 0; i < idx.size(); ++i) idx[i] = pool_begin + i;
            pool_sample = rng::sample_without_replacement(std::move(idx),
                                                          cfg.investors_per_scheme, rng);
        }
        if (pool_sample.empty()) continue;
        int64_t start = cfg.t0 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(cfg.horizon / 2)));
        struct Deposit {
            int64_t ts;
            size_t investor;
            double eth;
        };
        std::vector<Deposit> deposits;
        for (size_t inv : pool_sample) {
            uint64_t k = 1 + rng.poisson(std::max(0.0, cfg.deposits_per_investor - 1.0));
            for (uint64_t d = 0; d < k; ++d) {
                int64_t ts = start + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(cfg.horizon / 2)));
                double eth = std::exp(rng.normal() * 0.5 + std::log(0.3));
                deposits.push_back({ts, inv, eth});
            }
        }
        std::sort(deposits.begin(), deposits.end(), [](const Deposit& a, const Deposit& b) {
            return a.ts != b.ts ? a.ts < b.ts : a.investor < b.investor;
        });
        std::vector<size_t> prior_investors;  // earliest first, distinct
        double decay = 1.0;
        for (size_t d = 0; d < deposits.size(); ++d) {
            const auto& dep = deposits[d];
            std::string hash = make_hash(cfg.seed, hash_counter++);
            emit(dep.investor, s, ether_to_wei(dep.eth), dep.ts, false, hash);
            size_t fanout = cfg.fanout_min + rng.bounded(cfg.fanout_max - cfg.fanout_min + 1);
            size_t n_payouts = std::min(fanout >= 2 ? fanout - 2 : 0, prior_investors.size());
            if (n_payouts > 0) {
                // early investors first; the payout pot shrinks with each deposit
                double pot = dep.eth * 0.8 * decay;
                for (size_t k = 0; k < n_payouts; ++k) {
                    size_t recipient = prior_investors[k];
                    emit(s, recipient, ether_to_wei(pot / static_cast<double>(n_payouts)),
                         dep.ts, true, hash);
                }
            }
            decay *= cfg.payout_decay;
            if (std::find(prior_investors.begin(), prior_investors.end(), dep.investor) ==
                prior_investors.end())
                prior_investors.push_back(dep.investor);
        }
    }

    // memoryless pairwise background for every non-scheme account
    for (size_t a = pool_begin; a < n_total; ++a) {
        auto rng = rng::Stream::derive(cfg.seed, 0x62616b67, a);
        uint64_t k = 1 + rng.poisson(std::max(0.0, cfg.normal_tx_rate - 1.0));
        for (uint64_t i = 0; i < k; ++i) {
            size_t partner = rng.bounded(n_total);
            if (partner == a) partner = (partner + 1) % n_total;
            int64_t ts = cfg.t0 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(cfg.horizon)));
            double eth = std::exp(rng.normal() * 1.0 + std::log(1.0));
            emit(a, partner, ether_to_wei(eth), ts, false, make_hash(cfg.seed, hash_counter++));
        }
    }

    if (cfg.target_records > 0) {
        if (out.records.size() > cfg.target_records)
            throw std::invalid_argument("SynthConfig: target_records below organic record count (" +
                                        std::to_string(out.records.size()) + ")");
        auto rng = rng::Stream::derive(cfg.seed, 0x70616464);
        while (out.records.size() < cfg.target_records) {
            size_t a = pool_begin + rng.bounded(n_total - pool_begin);
            size_t b = rng.bounded(n_total);
            if (b == a) b = (b + 1) % n_total;
            int64_t ts = cfg.t0 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(cfg.horizon)));
            double eth = std::exp(rng.normal() * 1.0);
            emit(a, b, ether_to_wei(eth), ts, false, make_hash(cfg.seed, hash_counter++));
        }
    }

    std::sort(out.records.begin(), out.records.end(),
              [](const TransactionRecord& a, const TransactionRecord& b) {
                  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                  return a.tx_hash < b.tx_hash;
              });

    // manifest with per-labeled-account ground truth
    std::vector<std::unordered_set<size_t>> in_peers(n_total);
    std::vector<size_t> in_count(n_total, 0), out_count(n_total, 0);
    std::unordered_set<std::string> appearing;
    {
        std::unordered_map<std::string, size_t> addr_to_idx;
        for (size_t i = 0; i < n_total; ++i) addr_to_idx.emplace(out.addresses[i], i);
        for (const auto& r : out.records) {
            size_t f = addr_to_idx.at(r.from), t = addr_to_idx.at(r.to);
            in_peers[t].insert(f);
            in_count[t] += 1;
            out_count[f] += 1;
            appearing.insert(r.from);
            appearing.insert(r.to);
        }
    }
    json accounts = json::array();
    for (size_t i = 0; i < n_total; ++i) {
        if (out.labels[i] < 0) continue;
        accounts.push_back({{"address", out.addresses[i]},
                            {"label", out.labels[i]},
                            {"distinct_in_counterparties", in_peers[i].size()},
                            {"in_count", in_count[i]},
                            {"out_count", out_count[i]}});
    }
    json manifest{{"seed", cfg.seed},
                  {"n_records", out.records.size()},
                  {"n_hashes", hash_counter},
                  {"n_accounts_distinct", appearing.size()},
                  {"n_ponzi", cfg.n_ponzi},
                  {"n_normal", cfg.n_normal},
                  {"config", json::parse(cfg.to_json())},
                  {"accounts", accounts}};
    out.manifest_json = manifest.dump(2);
    return out;
}

void write_corpus(const GeneratedCorpus& corpus, const std::string& tx_path,
                  const std::string& labels_path, const std::string& manifest_path) {
    std::ofstream tx(tx_path);
    if (!tx) throw std::runtime_error("cannot write " + tx_path);
    std::string line;
    for (const auto& r : corpus.records) {
        line.clear();
        line += "{\"hash\":\"";
        line += r.tx_hash;
        line += "\",\"from\":\"";
        line += r.from;
        line += "\",\"to\":\"";
        line += r.to;
        line += "\",\"value\":\"";
        line += wei_to_string(r.value);
        line += "\",\"timestamp\":";
        line += std::to_string(r.timestamp);
        line += ",\"is_trace\":";
        line += r.is_trace ? "true" : "false";
        line += "}\n";
        tx << line;
    }
    std::ofstream lab(labels_path);
    if (!lab) throw std::runtime_error("cannot write " + labels_path);
    lab << "address,label\n";
    for (size_t i = 0; i < corpus.addresses.size(); ++i)
        if (corpus.labels[i] >= 0) lab << corpus.addresses[i] << ',' << corpus.labels[i] << '\n';
    std::ofstream man(manifest_path);
    if (!man) throw std::runtime_error("cannot write " + manifest_path);
    man << corpus.manifest_json << '\n';
}

}  // namespace hyperdet::synth
