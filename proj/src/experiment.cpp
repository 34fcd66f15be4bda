#include "hyperdet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "hyperdet/convert.hpp"
#include "hyperdet/features.hpp"
#include "hyperdet/ingest.hpp"

namespace hyperdet::experiment {

using nlohmann::json;

Corpus load_corpus(const std::string& tx_path, const std::string& labels_path,
                   double r_train, double r_val, double r_test, uint64_t split_seed) {
    Corpus c;
    ingest::IngestReport report;
    c.records = ingest::deduplicate(ingest::parse_transactions_file(tx_path, report), &report);
    c.accounts = intern_accounts(c.records);
    c.graph = ingest::build_homogeneous(c.records, c.accounts);
    c.hypergraph = ingest::build_hypergraph(c.records, c.accounts, &report);
    c.labels = ingest::load_labels(labels_path, c.accounts);
    metrics::split_labels(c.labels, r_train, r_val, r_test, split_seed);
    return c;
}

static std::vector<uint32_t> labeled_targets(const LabelSet& labels) {
    std::vector<uint32_t> targets;
    targets.reserve(labels.labels.size());
    for (const auto& [acct, y] : labels.labels) targets.push_back(acct);
    std::sort(targets.begin(), targets.end());
    return targets;
}

train::DataBundle build_bundle(const Corpus& corpus, model::Channel channel,
                               const sampling::SamplerConfig& sampler, int n_threads) {
    std::vector<uint32_t> targets = labeled_targets(corpus.labels);
    std::vector<uint32_t> local_to_global;
    std::unordered_map<uint32_t, uint32_t> global_to_local;
    train::DataBundle bundle;

    if (channel == model::Channel::Homogeneous) {
        auto ind = sampling::sample_khop(corpus.graph, targets, sampler, n_threads);
        local_to_global = std::move(ind.local_to_global);
        global_to_local = std::move(ind.global_to_local);
        bundle.op = nn::SparseOp(
            convert::normalize_adjacency(convert::adjacency_csr(ind.g), convert::NormMode::BinarySym));
    } else {
        auto filtered = sampling::filter_hyperedges(corpus.hypergraph, targets, sampler, n_threads);
        auto sampled = sampling::refine_nodes(corpus.hypergraph, filtered, sampler, n_threads);
        auto ind = sampling::induce(corpus.hypergraph, sampled);
        local_to_global = std::move(ind.local_to_global);
        global_to_local = std::move(ind.global_to_local);
        if (channel == model::Channel::Hyper) {
            auto ops = convert::hypergraph_operators(ind.hg);
            bundle.op = nn::SparseOp(ops.layer_operator());
        } else {
            auto hh = convert::hyper_to_homo(ind.hg);
            bundle.op = nn::SparseOp(convert::normalize_adjacency(hh.adj, convert::NormMode::BinarySym));
        }
    }

    auto fm = features::build_feature_matrix_for(local_to_global, corpus.records, corpus.accounts);
    auto to_local = [&](const std::vector<uint32_t>& mask) {
        std::vector<uint32_t> out;
        out.reserve(mask.size());
        for (uint32_t acct : mask) {
            auto it = global_to_local.find(acct);
            if (it != global_to_local.end()) out.push_back(it->second);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    bundle.train_mask = to_local(corpus.labels.train_mask);
    bundle.val_mask = to_local(corpus.labels.val_mask);
    bundle.test_mask = to_local(corpus.labels.test_mask);
    features::fit_and_normalize(fm, bundle.train_mask);
    bundle.x = nn::Mat(fm.n, features::kFeatureDim);
    bundle.x.a = std::move(fm.values);
    bundle.labels.assign(local_to_global.size(), -1);
    for (const auto& [acct, y] : corpus.labels.labels) {
        auto it = global_to_local.find(acct);
        if (it != global_to_local.end()) bundle.labels[it->second] = y;
    }
    return bundle;
}

std::vector<model::ModelConfig> default_grid(model::Channel channel, const model::ModelConfig& base) {
    std::vector<model::ModelConfig> space;
    for (bool bn : {false, true})
        for (int hidden : {16, 32, 64})
            for (double lr : {0.1, 0.05, 0.01, 0.005, 0.001}) {
                model::ModelConfig c = base;
                c.channel = channel;
                c.batch_norm = bn;
                c.hidden = hidden;
                c.lr = lr;
                space.push_back(c);
            }
    return space;
}

std::vector<GridEntry> grid_search(const train::DataBundle& data,
                                   const std::vector<model::ModelConfig>& space,
                                   const std::vector<uint64_t>& seeds, int n_threads) {
    if (space.empty() || seeds.empty()) throw std::invalid_argument("grid_search: empty space or seeds");
    std::vector<GridEntry> entries(space.size());
    sampling::parallel_for(space.size(), n_threads, [&](size_t i) {
        GridEntry e;
        e.config = space[i];
        double sum_f1 = 0, sum_auc = 0;
        size_t ok = 0;
        for (uint64_t seed : seeds) {
            model::ModelConfig cfg = space[i];
            cfg.seed = seed;
            try {
                auto run = train::fit(data, cfg);
                sum_f1 += run.val_metrics.macro_f1;
                sum_auc += run.val_metrics.auc;
                ++ok;
            } catch (const train::TrainingDiverged& ex) {
                e.diverged = true;
                e.error = ex.what();
            }
        }
        if (ok > 0) {
            e.mean_val_macro_f1 = sum_f1 / static_cast<double>(ok);
            e.mean_val_auc = sum_auc / static_cast<double>(ok);
        } else {
            e.mean_val_macro_f1 = -1;  // fully diverged configs sink to the bottom
            e.mean_val_auc = -1;
        }
        entries[i] = std::move(e);
    });
    std::stable_sort(entries.begin(), entries.end(), [](const GridEntry& a, const GridEntry& b) {
        if (a.mean_val_macro_f1 != b.mean_val_macro_f1) return a.mean_val_macro_f1 > b.mean_val_macro_f1;
        return a.mean_val_auc > b.mean_val_auc;
    });
    return entries;
}

std::string MetricSummary::formatted() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean * 100.0, stddev * 100.0);
    return buf;
}

static MetricSummary summarize(const std::vector<double>& xs) {
    MetricSummary s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(xs.size()));  // population
    return s;
}

RepeatResult repeat_evaluate(const train::DataBundle& data, model::ModelConfig config,
                             int n_runs, uint64_t base_seed, int n_threads) {
    if (n_runs < 1) throw std::invalid_argument("repeat_evaluate: n_runs must be >= 1");
    RepeatResult out;
    out.config = config;
    out.runs.resize(static_cast<size_t>(n_runs));
    sampling::parallel_for(static_cast<size_t>(n_runs), n_threads, [&](size_t i) {
        model::ModelConfig cfg = config;
        cfg.seed = base_seed + i;
        out.runs[i] = train::fit(data, cfg).test_metrics;
    });
    std::vector<double> p, r, f1, mf1, auc;
    for (const auto& m : out.runs) {
        p.push_back(m.precision);
        r.push_back(m.recall);
        f1.push_back(m.binary_f1);
        mf1.push_back(m.macro_f1);
        auc.push_back(m.auc);
    }
    out.precision = summarize(p);
    out.recall = summarize(r);
    out.binary_f1 = summarize(f1);
    out.macro_f1 = summarize(mf1);
    out.auc = summarize(auc);
    return out;
}

void write_comparison_csv(std::ostream& os,
                          const std::vector<std::pair<std::string, RepeatResult>>& rows) {
    os << "Graph,Precision,Recall,Binary F1,Macro F1,AUC\n";
    for (const auto& [name, r] : rows)
        os << name << ',' << r.precision.formatted() << ',' << r.recall.formatted() << ','
           << r.binary_f1.formatted() << ',' << r.macro_f1.formatted() << ',' << r.auc.formatted()
           << '\n';
}

static json config_json(const model::ModelConfig& c) {
    return json{{"channel", model::channel_name(c.channel)},
                {"layers", c.layers},
                {"hidden", c.hidden},
                {"dropout", c.dropout},
                {"batch_norm", c.batch_norm},
                {"lr", c.lr},
                {"weight_decay", c.weight_decay},
                {"epochs", c.epochs},
                {"seed", c.seed}};
}

std::string grid_json(const std::vector<GridEntry>& leaderboard) {
    json arr = json::array();
    for (const auto& e : leaderboard)
        arr.push_back({{"config", config_json(e.config)},
                       {"mean_val_macro_f1", e.mean_val_macro_f1},
                       {"mean_val_auc", e.mean_val_auc},
                       {"diverged", e.diverged},
                       {"error", e.error}});
    return arr.dump(2);
}

std::string repeat_json(const RepeatResult& r) {
    json runs = json::array();
    for (const auto& m : r.runs) runs.push_back(json::parse(metrics::metrics_json(m)));
    json j{{"config", config_json(r.config)},
           {"precision", r.precision.formatted()},
           {"recall", r.recall.formatted()},
           {"binary_f1", r.binary_f1.formatted()},
           {"macro_f1", r.macro_f1.formatted()},
           {"auc", r.auc.formatted()},
           {"runs", runs}};
    return j.dump(2);
}

}  // namespace hyperdet::experiment
