#include <doctest.h>

#include <json.hpp>

#include "hyperdet/experiment.hpp"
#include "hyperdet/ingest.hpp"
#include "hyperdet/rng.hpp"
#include "hyperdet/synth.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hyperdet;
using nlohmann::json;

namespace {

synth::SynthConfig small_cfg() {
    synth::SynthConfig cfg;
    cfg.n_normal = 80;
    cfg.n_ponzi = 15;
    cfg.n_unlabeled = 200;
    cfg.investors_per_scheme = 6;
    cfg.seed = 21;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fixed seed regenerates a byte-identical corpus") {
    auto cfg = small_cfg();
    auto a = synth::generate(cfg);
    auto b = synth::generate(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].tx_hash == b.records[i].tx_hash);
        CHECK(a.records[i].from == b.records[i].from);
        CHECK(a.records[i].to == b.records[i].to);
        CHECK(a.records[i].value == b.records[i].value);
        CHECK(a.records[i].timestamp == b.records[i].timestamp);
        CHECK(a.records[i].is_trace == b.records[i].is_trace);
    }
    CHECK(a.manifest_json == b.manifest_json);

    auto dir = std::filesystem::temp_directory_path() / "hd_synth_rt";
    std::filesystem::create_directories(dir);
    synth::write_corpus(a, (dir / "a.jsonl").string(), (dir / "a.csv").string(),
                        (dir / "a.json").string());
    synth::write_corpus(b, (dir / "b.jsonl").string(), (dir / "b.csv").string(),
                        (dir / "b.json").string());
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    auto other = cfg;
    other.seed = 22;
    auto c = synth::generate(other);
    CHECK(a.manifest_json != c.manifest_json);
    std::filesystem::remove_all(dir);
}

TEST_CASE("n_ponzi 0 produces only normal labels") {
    auto cfg = small_cfg();
    cfg.n_ponzi = 0;
    auto corpus = synth::generate(cfg);
    for (int y : corpus.labels) CHECK(y <= 0);  // -1 unlabeled or 0 normal
    size_t labeled = 0;
    for (int y : corpus.labels) labeled += y == 0;
    CHECK(labeled == cfg.n_normal);
}

TEST_CASE("every generated record passes ingestion; counts match the manifest") {
    auto cfg = small_cfg();
    auto corpus = synth::generate(cfg);
    std::ostringstream tx;
    for (const auto& r : corpus.records) {
        tx << R"({"hash":")" << r.tx_hash << R"(","from":")" << r.from << R"(","to":")" << r.to
           << R"(","value":")" << wei_to_string(r.value) << R"(","timestamp":)" << r.timestamp
           << R"(,"is_trace":)" << (r.is_trace ? "true" : "false") << "}\n";
    }
    std::istringstream in(tx.str());
    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    CHECK(rep.records_rejected == 0);
    CHECK(rep.records_accepted == corpus.records.size());

    auto manifest = json::parse(corpus.manifest_json);
    CHECK(manifest.at("n_records").get<size_t>() == corpus.records.size());
    auto accounts = intern_accounts(recs);
    CHECK(manifest.at("n_accounts_distinct").get<size_t>() == accounts.size());

    // manifest per-account ground truth agrees with a recount from records
    for (const auto& acc : manifest.at("accounts")) {
        auto idx = accounts.find(acc.at("address").get<std::string>());
        if (!idx) {
            // labeled account that never transacted; counts must be zero
            CHECK(acc.at("in_count").get<size_t>() == 0);
            continue;
        }
        size_t in_count = 0, out_count = 0;
        for (const auto& r : recs) {
            in_count += accounts.find(r.to) == idx;
            out_count += accounts.find(r.from) == idx;
        }
        CHECK(acc.at("in_count").get<size_t>() == in_count);
        CHECK(acc.at("out_count").get<size_t>() == out_count);
    }
}

TEST_CASE("ponzi accounts attract more distinct senders (permutation test, p < 0.01)") {
    auto cfg = small_cfg();
    cfg.n_ponzi = 25;
    cfg.n_normal = 120;
    auto corpus = synth::generate(cfg);
    auto manifest = json::parse(corpus.manifest_json);
    std::vector<double> ponzi, normal;
    for (const auto& acc : manifest.at("accounts")) {
        double v = acc.at("distinct_in_counterparties").get<double>();
        (acc.at("label").get<int>() == 1 ? ponzi : normal).push_back(v);
    }
    REQUIRE(ponzi.size() == 25);
    REQUIRE(normal.size() == 120);
    auto mean = [](const std::vector<double>& xs) {
        double s = 0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    };
    double observed = mean(ponzi) - mean(normal);
    CHECK(observed > 0);

    std::vector<double> pool = ponzi;
    pool.insert(pool.end(), normal.begin(), normal.end());
    auto rng = rng::Stream(404);
    int as_extreme = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        for (size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.bounded(i)]);
        double mp = 0, mn = 0;
        for (size_t i = 0; i < ponzi.size(); ++i) mp += pool[i];
        for (size_t i = ponzi.size(); i < pool.size(); ++i) mn += pool[i];
        mp /= static_cast<double>(ponzi.size());
        mn /= static_cast<double>(normal.size());
        if (mp - mn >= observed) ++as_extreme;
    }
    double p = static_cast<double>(as_extreme + 1) / static_cast<double>(trials + 1);
    CHECK(p < 0.01);
}

TEST_CASE("target_records pads background to an exact count") {
    auto cfg = small_cfg();
    cfg.target_records = 9000;
    auto corpus = synth::generate(cfg);
    CHECK(corpus.records.size() == 9000);

    auto impossible = small_cfg();
    impossible.target_records = 10;  // organic volume already exceeds this
    CHECK_THROWS(synth::generate(impossible));
}

TEST_CASE("config JSON rejects unknown keys and validates ranges") {
    CHECK_THROWS(synth::SynthConfig::from_json(R"({"n_normal": 5, "bogus_knob": 1})"));
    auto cfg = synth::SynthConfig::from_json(R"({"n_normal": 5, "n_ponzi": 2})");
    CHECK(cfg.n_normal == 5);
    CHECK(cfg.n_ponzi == 2);
    auto bad = small_cfg();
    bad.fanout_max = 100;  // support must stay within [2, 64]
    CHECK_THROWS(bad.validate());
    bad = small_cfg();
    bad.fanout_min = 1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("generated corpus trains end to end through build_bundle") {
    auto cfg = small_cfg();
    auto dir = std::filesystem::temp_directory_path() / "hd_synth_e2e";
    std::filesystem::create_directories(dir);
    auto corpus = synth::generate(cfg);
    synth::write_corpus(corpus, (dir / "tx.jsonl").string(), (dir / "labels.csv").string(),
                        (dir / "manifest.json").string());
    auto loaded = experiment::load_corpus((dir / "tx.jsonl").string(),
                                          (dir / "labels.csv").string(), 0.6, 0.2, 0.2, 1);
    CHECK(loaded.labels.labels.size() == cfg.n_normal + cfg.n_ponzi);
    sampling::SamplerConfig sampler;
    sampler.alpha = 20;
    auto bundle = experiment::build_bundle(loaded, model::Channel::Hyper, sampler, 2);
    CHECK(bundle.x.rows == bundle.labels.size());
    CHECK(!bundle.train_mask.empty());
    model::ModelConfig mc;
    mc.epochs = 40;
    auto run = train::fit(bundle, mc);
    CHECK(std::isfinite(run.history.back().loss));
    std::filesystem::remove_all(dir);
}
