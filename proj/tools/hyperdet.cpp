// Pipeline front end: generate -> ingest -> sample -> featurize -> convert
// -> train -> evaluate -> report. Every artifact is paired with the config
// and seed that produced it.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperdet/convert.hpp"
#include "hyperdet/experiment.hpp"
#include "hyperdet/features.hpp"
#include "hyperdet/ingest.hpp"
#include "hyperdet/sampling.hpp"
#include "hyperdet/synth.hpp"
#include "hyperdet/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyperdet;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitBadInput = 4;
constexpr int kExitStageFailure = 5;

struct CliError : std::runtime_error {
    int code;
    CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
};

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw CliError(kExitMissingInput, "missing input file: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw CliError(kExitStageFailure, "cannot write " + path.string());
    os << text;
    if (!text.empty() && text.back() != '\n') os << '\n';
}

std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CliError(kExitMissingInput, "missing input file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct CommonOpts {
    std::string tx_path, labels_path, out_dir = "out";
    uint64_t seed = 0;
    size_t alpha = 100, beta = 5, k1 = 70, k2 = 70;
    std::string channel = "hyper-homo";
    int hidden = 32;
    double lr = 0.01;
    double dropout = 0.5;
    bool batch_norm = false;
    int epochs = 300;
    bool grid = false;
    int repeats = 5;
    int threads = 0;
};

sampling::SamplerConfig sampler_of(const CommonOpts& o) {
    sampling::SamplerConfig s;
    s.alpha = o.alpha;
    s.beta = o.beta;
    s.k1 = o.k1;
    s.k2 = o.k2;
    s.seed = o.seed;
    return s;
}

model::ModelConfig model_of(const CommonOpts& o) {
    model::ModelConfig m;
    m.channel = model::channel_from_name(o.channel);
    m.hidden = o.hidden;
    m.lr = o.lr;
    m.dropout = o.dropout;
    m.batch_norm = o.batch_norm;
    m.epochs = o.epochs;
    m.seed = o.seed;
    return m;
}

json echo_of(const CommonOpts& o) {
    return json{{"seed", o.seed},       {"alpha", o.alpha},     {"beta", o.beta},
                {"k1", o.k1},           {"k2", o.k2},           {"channel", o.channel},
                {"hidden", o.hidden},   {"lr", o.lr},           {"dropout", o.dropout},
                {"batch_norm", o.batch_norm}, {"epochs", o.epochs}, {"repeats", o.repeats},
                {"tx", o.tx_path},      {"labels", o.labels_path}};
}

void cmd_synth(const CommonOpts& o, const std::string& config_path) {
    synth::SynthConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = synth::SynthConfig::from_json(read_text(config_path));
        } catch (const CliError&) {
            throw;
        } catch (const std::exception& ex) {
            throw CliError(kExitBadInput, std::string("malformed synth config: ") + ex.what());
        }
    }
    cfg.seed = o.seed;
    fs::create_directories(o.out_dir);
    auto corpus = synth::generate(cfg);
    fs::path out(o.out_dir);
    synth::write_corpus(corpus, (out / "transactions.jsonl").string(),
                        (out / "labels.csv").string(), (out / "manifest.json").string());
    write_text(out / "synth_config.json", cfg.to_json());
}

experiment::Corpus load_corpus_checked(const CommonOpts& o) {
    require_file(o.tx_path);
    require_file(o.labels_path);
    try {
        return experiment::load_corpus(o.tx_path, o.labels_path, 0.6, 0.2, 0.2, o.seed);
    } catch (const std::exception& ex) {
        throw CliError(kExitBadInput, ex.what());
    }
}

void cmd_ingest(const CommonOpts& o) {
    require_file(o.tx_path);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    ingest::IngestReport report;
    auto records = ingest::deduplicate(ingest::parse_transactions_file(o.tx_path, report), &report);
    auto accounts = intern_accounts(records);
    auto graph = ingest::build_homogeneous(records, accounts);
    auto hg = ingest::build_hypergraph(records, accounts, &report);
    report.n_accounts = accounts.size();
    report.n_edges = graph.edges.size();

    std::ofstream acc(out / "accounts.tsv");
    for (uint32_t i = 0; i < accounts.size(); ++i) acc << i << '\t' << accounts.address(i) << '\n';
    {
        std::ofstream og(out / "homograph.tsv");
        sparse::write_triplets(og, convert::adjacency_csr(graph, true));
    }
    {
        json j{{"n", hg.n}, {"m", hg.m}, {"hyperedges", hg.edge_nodes}, {"hashes", hg.edge_hash}};
        std::ofstream oh(out / "hypergraph.json");
        oh << j.dump() << '\n';
    }
    write_text(out / "ingest_report.json", report.to_json());
    std::cout << report.to_json() << '\n';
    if (!o.labels_path.empty()) {
        require_file(o.labels_path);
        std::vector<ingest::RejectDiagnostic> rejects;
        auto labels = ingest::load_labels(o.labels_path, accounts, &rejects);
        json lj{{"n_labeled", labels.labels.size()}, {"rejects", rejects.size()}};
        write_text(out / "labels_report.json", lj.dump(2));
    }
}

void cmd_sample(const CommonOpts& o) {
    auto corpus = load_corpus_checked(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    std::vector<uint32_t> targets;
    for (const auto& [acct, y] : corpus.labels.labels) targets.push_back(acct);
    std::sort(targets.begin(), targets.end());
    auto cfg = sampler_of(o);
    auto filtered = sampling::filter_hyperedges(corpus.hypergraph, targets, cfg, o.threads);
    auto sampled = sampling::refine_nodes(corpus.hypergraph, filtered, cfg, o.threads);
    auto induced = sampling::induce(corpus.hypergraph, sampled);
    {
        std::ofstream os(out / "sampled_hypergraph.json");
        sampling::write_sampled_json(os, induced, cfg);
    }
    size_t step1_edges = 0;
    {
        std::vector<uint32_t> all;
        for (const auto& r : filtered.retained) all.insert(all.end(), r.begin(), r.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        step1_edges = all.size();
    }
    json stats{{"original_nodes", corpus.hypergraph.n},
               {"original_hyperedges", corpus.hypergraph.m},
               {"step1_hyperedges", step1_edges},
               {"sampled_nodes", induced.hg.n},
               {"sampled_hyperedges", induced.hg.m},
               {"dropped_small", induced.dropped_small},
               {"seed", cfg.seed},
               {"alpha", cfg.alpha},
               {"beta", cfg.beta}};
    write_text(out / "sample_stats.json", stats.dump(2));
    std::cout << stats.dump(2) << '\n';
}

void cmd_featurize(const CommonOpts& o) {
    auto corpus = load_corpus_checked(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    auto fm = features::build_feature_matrix(corpus.accounts, corpus.records);
    features::fit_and_normalize(fm, corpus.labels.train_mask);
    std::vector<std::string> addrs;
    for (uint32_t i = 0; i < corpus.accounts.size(); ++i) addrs.push_back(corpus.accounts.address(i));
    {
        std::ofstream os(out / "features.csv");
        features::write_csv(os, fm, addrs);
    }
    {
        std::ofstream os(out / "features.bin", std::ios::binary);
        features::write_cache(os, fm);
    }
    write_text(out / "featurize_config.json", echo_of(o).dump(2));
}

void cmd_convert(const CommonOpts& o, const std::string& hypergraph_path) {
    require_file(hypergraph_path);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    Hypergraph hg;
    try {
        json j = json::parse(read_text(hypergraph_path));
        hg.n = j.at("n").get<size_t>();
        hg.edge_nodes = j.at("hyperedges").get<std::vector<std::vector<uint32_t>>>();
        hg.m = hg.edge_nodes.size();
        hg.edge_hash.assign(hg.m, std::string());
        hg.rebuild_node_index();
        hg.check_invariants();
    } catch (const std::exception& ex) {
        throw CliError(kExitBadInput, std::string("malformed hypergraph: ") + ex.what());
    }
    auto hh = convert::hyper_to_homo(hg);
    {
        std::ofstream os(out / "hyperhomo.tsv");
        sparse::write_triplets(os, hh.adj);
    }
    size_t directed = hh.adj.nnz();
    json stats{{"n", hh.n},
               {"undirected_edges", directed / 2},
               {"directed_pairs", directed}};
    write_text(out / "conversion_stats.json", stats.dump(2));
    std::cout << stats.dump(2) << '\n';
}

void cmd_train(const CommonOpts& o) {
    auto corpus = load_corpus_checked(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    auto cfg = model_of(o);
    auto bundle = experiment::build_bundle(corpus, cfg.channel, sampler_of(o), o.threads);
    auto run = train::fit(bundle, cfg);
    {
        std::ofstream os(out / "checkpoint.bin", std::ios::binary);
        train::write_checkpoint(os, run.best_params);
    }
    write_text(out / "history.json", train::history_json(run));
    run.test_metrics.auc = run.test_metrics.auc;  // already filled
    write_text(out / "metrics.json", metrics::metrics_json(run.test_metrics));
    write_text(out / "train_config.json", echo_of(o).dump(2));
    std::cout << "best_epoch=" << run.best_epoch << " test " << metrics::metrics_json(run.test_metrics)
              << '\n';
}

void cmd_evaluate(const CommonOpts& o) {
    auto corpus = load_corpus_checked(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    auto cfg = model_of(o);
    auto bundle = experiment::build_bundle(corpus, cfg.channel, sampler_of(o), o.threads);
    model::ModelConfig best = cfg;
    if (o.grid) {
        auto space = experiment::default_grid(cfg.channel, cfg);
        std::vector<uint64_t> seeds;
        for (int i = 0; i < o.repeats; ++i) seeds.push_back(o.seed + static_cast<uint64_t>(i));
        auto leaderboard = experiment::grid_search(bundle, space, seeds, o.threads);
        write_text(out / "leaderboard.json", experiment::grid_json(leaderboard));
        best = leaderboard.front().config;
    }
    auto rep = experiment::repeat_evaluate(bundle, best, o.repeats, o.seed, o.threads);
    fs::create_directories(out / "results");
    for (size_t i = 0; i < rep.runs.size(); ++i)
        write_text(out / "results" / ("run_" + std::to_string(i) + ".json"),
                   metrics::metrics_json(rep.runs[i]));
    write_text(out / "summary.json", experiment::repeat_json(rep));
    std::cout << experiment::repeat_json(rep) << '\n';
}

void cmd_report(const CommonOpts& o) {
    auto corpus = load_corpus_checked(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    std::vector<std::pair<std::string, experiment::RepeatResult>> rows;
    for (auto channel :
         {model::Channel::Homogeneous, model::Channel::Hyper, model::Channel::HyperHomo}) {
        auto cfg = model_of(o);
        cfg.channel = channel;
        auto bundle = experiment::build_bundle(corpus, channel, sampler_of(o), o.threads);
        rows.emplace_back(model::channel_name(channel),
                          experiment::repeat_evaluate(bundle, cfg, o.repeats, o.seed, o.threads));
    }
    {
        std::ofstream os(out / "comparison.csv");
        experiment::write_comparison_csv(os, rows);
    }
    std::ostringstream ss;
    experiment::write_comparison_csv(ss, rows);
    std::cout << ss.str();
    write_text(out / "report_config.json", echo_of(o).dump(2));
}

void cmd_pipeline(CommonOpts o, const std::string& synth_config) {
    fs::path out(o.out_dir);
    fs::create_directories(out);
    CommonOpts synth_opts = o;
    synth_opts.out_dir = (out / "corpus").string();
    cmd_synth(synth_opts, synth_config);
    o.tx_path = (out / "corpus" / "transactions.jsonl").string();
    o.labels_path = (out / "corpus" / "labels.csv").string();
    CommonOpts stage = o;
    stage.out_dir = (out / "ingest").string();
    cmd_ingest(stage);
    stage.out_dir = (out / "sample").string();
    cmd_sample(stage);
    stage.out_dir = (out / "features").string();
    cmd_featurize(stage);
    CommonOpts conv = o;
    conv.out_dir = (out / "convert").string();
    cmd_convert(conv, (out / "ingest" / "hypergraph.json").string());
    stage.out_dir = (out / "train").string();
    cmd_train(stage);
    stage.out_dir = (out / "report").string();
    cmd_report(stage);
    fs::copy_file(out / "report" / "comparison.csv", out / "metrics.csv",
                  fs::copy_options::overwrite_existing);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transaction-hash hypergraph Ponzi detection pipeline"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string synth_config, hypergraph_path;
    if (const char* env = std::getenv("HYPERDET_THREADS")) o.threads = std::atoi(env);

    auto add_common = [&](CLI::App* cmd, bool needs_inputs) {
        if (needs_inputs) {
            cmd->add_option("--tx", o.tx_path, "transactions JSONL")->required();
            cmd->add_option("--labels", o.labels_path, "labels CSV")->required();
        }
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_option("--seed", o.seed, "RNG seed");
        cmd->add_option("--alpha", o.alpha, "max hyperedges per target");
        cmd->add_option("--beta", o.beta, "max nodes per hyperedge");
        cmd->add_option("--k1", o.k1, "first-order neighbor cap");
        cmd->add_option("--k2", o.k2, "second-order neighbor cap");
        cmd->add_option("--channel", o.channel, "hyper|hyper-homo|homogeneous");
        cmd->add_option("--hidden", o.hidden, "hidden dimension");
        cmd->add_option("--lr", o.lr, "learning rate");
        cmd->add_option("--dropout", o.dropout, "dropout rate");
        cmd->add_flag("--bn", o.batch_norm, "enable batch normalization");
        cmd->add_option("--epochs", o.epochs, "training epochs");
        cmd->add_flag("--grid", o.grid, "run the hyperparameter grid first");
        cmd->add_option("--repeats", o.repeats, "independent runs to average");
        cmd->add_option("--threads", o.threads, "worker cap (HYPERDET_THREADS)");
    };

    auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    add_common(synth_cmd, false);
    synth_cmd->add_option("--config", synth_config, "synth config JSON");

    auto* ingest_cmd = app.add_subcommand("ingest", "parse and build both graphs");
    ingest_cmd->add_option("--tx", o.tx_path, "transactions JSONL")->required();
    ingest_cmd->add_option("--labels", o.labels_path, "labels CSV");
    ingest_cmd->add_option("--out", o.out_dir, "output directory");

    auto* sample_cmd = app.add_subcommand("sample", "two-step hypergraph sampling");
    add_common(sample_cmd, true);
    auto* feat_cmd = app.add_subcommand("featurize", "account feature matrix");
    add_common(feat_cmd, true);
    auto* conv_cmd = app.add_subcommand("convert", "hypergraph to hyper-homo adjacency");
    conv_cmd->add_option("--hypergraph", hypergraph_path, "hypergraph JSON")->required();
    conv_cmd->add_option("--out", o.out_dir, "output directory");
    auto* train_cmd = app.add_subcommand("train", "train one channel");
    add_common(train_cmd, true);
    auto* eval_cmd = app.add_subcommand("evaluate", "grid search / repeated evaluation");
    add_common(eval_cmd, true);
    auto* report_cmd = app.add_subcommand("report", "channel comparison table");
    add_common(report_cmd, true);
    auto* pipe_cmd = app.add_subcommand("pipeline", "synth through report");
    add_common(pipe_cmd, false);
    pipe_cmd->add_option("--config", synth_config, "synth config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) cmd_synth(o, synth_config);
        else if (ingest_cmd->parsed()) cmd_ingest(o);
        else if (sample_cmd->parsed()) cmd_sample(o);
        else if (feat_cmd->parsed()) cmd_featurize(o);
        else if (conv_cmd->parsed()) cmd_convert(o, hypergraph_path);
        else if (train_cmd->parsed()) cmd_train(o);
        else if (eval_cmd->parsed()) cmd_evaluate(o);
        else if (report_cmd->parsed()) cmd_report(o);
        else if (pipe_cmd->parsed()) cmd_pipeline(o, synth_config);
    } catch (const CliError& e) {
        std::cerr << json{{"error", e.what()}, {"code", e.code}}.dump() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitStageFailure}}.dump() << '\n';
        return kExitStageFailure;
    }
    return 0;
}
