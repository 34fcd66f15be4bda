#include <doctest.h>

#include "hyperdet/ingest.hpp"

#include <sstream>

using namespace hyperdet;

namespace {

std::string A(int i) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "0x%040x", i);
    return buf;
}

std::string H(int i) {
    char buf[72];
    std::snprintf(buf, sizeof(buf), "0x%064x", i);
    return buf;
}

std::string line(int h, int f, int t, const std::string& value, int64_t ts, bool trace) {
    std::ostringstream ss;
    ss << R"({"hash":")" << H(h) << R"(","from":")" << A(f) << R"(","to":")" << A(t)
       << R"(","value":")" << value << R"(","timestamp":)" << ts << R"(,"is_trace":)"
       << (trace ? "true" : "false") << "}";
    return ss.str();
}

}  // namespace

TEST_CASE("well-formed JSONL parses; malformed lines are rejected not fatal") {
    std::stringstream in;
    in << line(1, 1, 2, "1000", 100, false) << "\n";
    in << "this is not json\n";
    in << R"({"hash":"0xzz","from":")" << A(1) << R"(","to":")" << A(2)
       << R"(","value":"1","timestamp":5,"is_trace":false})" << "\n";  // bad hash
    in << line(2, 3, 4, "-7", 100, false) << "\n";                     // negative value
    in << line(3, 5, 6, "2000", 200, true) << "\n";

    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    CHECK(recs.size() == 2);
    CHECK(rep.records_read == 5);
    CHECK(rep.records_accepted == 2);
    CHECK(rep.records_rejected == 3);
    REQUIRE(rep.rejects.size() == 3);
    CHECK(rep.rejects[0].line == 2);
    CHECK(rep.rejects[1].line == 3);
    CHECK(rep.rejects[2].line == 4);
    CHECK(recs[1].is_trace);
    CHECK(recs[1].value == 2000);
}

TEST_CASE("addresses and hashes are normalized to lowercase") {
    std::stringstream in;
    std::string up = line(1, 0xab, 0xcd, "5", 10, false);
    for (auto& c : up)
        if (c >= 'a' && c <= 'f') c = static_cast<char>(c - 32);  // uppercase the hex
    // field names got uppercased too; rebuild properly
    std::string from = A(0xab), to = A(0xcd), hash = H(1);
    for (auto* s : {&from, &to, &hash})
        for (auto& c : *s)
            if (c >= 'a' && c <= 'f') c = static_cast<char>(c - 32);
    in << R"({"hash":")" << hash << R"(","from":")" << from << R"(","to":")" << to
       << R"(","value":"5","timestamp":10,"is_trace":false})" << "\n";
    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].from == A(0xab));
    CHECK(recs[0].tx_hash == H(1));
}

TEST_CASE("deduplication keys on (hash, from, to, value, is_trace), not timestamp") {
    std::stringstream in;
    in << line(1, 1, 2, "100", 10, false) << "\n";
    in << line(1, 1, 2, "100", 99, false) << "\n";  // same key, different ts -> dup
    in << line(1, 1, 2, "100", 10, true) << "\n";   // trace flag differs -> kept
    in << line(1, 1, 2, "101", 10, false) << "\n";  // value differs -> kept
    ingest::IngestReport rep;
    auto recs = ingest::deduplicate(ingest::parse_transactions(in, rep), &rep);
    CHECK(recs.size() == 3);
    CHECK(rep.duplicates_removed == 1);
    CHECK(recs[0].timestamp == 10);  // first occurrence wins
}

TEST_CASE("homogeneous graph aggregates pairs; self-transfers add no edge") {
    std::stringstream in;
    in << line(1, 1, 2, "100", 10, false) << "\n";
    in << line(2, 2, 1, "50", 20, false) << "\n";  // same unordered pair
    in << line(3, 3, 3, "7", 30, false) << "\n";   // self-transfer
    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    auto accounts = intern_accounts(recs);
    auto g = ingest::build_homogeneous(recs, accounts);
    CHECK(g.n == 3);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].tx_count == 2);
    CHECK(g.edges[0].total_value == 150);
    CHECK_NOTHROW(g.check_invariants());
}

TEST_CASE("hypergraph groups by hash and drops sub-2-node hyperedges") {
    std::stringstream in;
    // hash 1: {a1, a2, a3} via top-level + trace sharing the hash
    in << line(1, 1, 2, "100", 10, false) << "\n";
    in << line(1, 1, 3, "40", 10, true) << "\n";
    // hash 2: self-transfer only -> 1 distinct node -> dropped
    in << line(2, 4, 4, "5", 20, false) << "\n";
    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    auto accounts = intern_accounts(recs);
    auto hg = ingest::build_hypergraph(recs, accounts, &rep);
    CHECK(hg.m == 1);
    CHECK(hg.edge_nodes[0].size() == 3);
    CHECK(hg.edge_hash[0] == H(1));
    CHECK(rep.hyperedges_dropped_singleton == 1);
    CHECK_NOTHROW(hg.check_invariants());
}

TEST_CASE("label loading: unknown addresses rejected, conflicts fatal") {
    std::stringstream in;
    in << line(1, 1, 2, "100", 10, false) << "\n";
    ingest::IngestReport rep;
    auto recs = ingest::parse_transactions(in, rep);
    auto accounts = intern_accounts(recs);

    {
        std::stringstream labels;
        labels << "address,label\n" << A(1) << ",1\n" << A(99) << ",0\n" << A(2) << ",0\n";
        std::vector<ingest::RejectDiagnostic> rejects;
        auto ls = ingest::load_labels_stream(labels, accounts, &rejects);
        CHECK(ls.labels.size() == 2);
        CHECK(ls.labels.at(0) == 1);
        CHECK(rejects.size() == 1);
    }
    {
        std::stringstream labels;
        labels << A(1) << ",1\n" << A(1) << ",0\n";  // conflicting duplicate
        CHECK_THROWS(ingest::load_labels_stream(labels, accounts));
    }
    {
        std::stringstream labels;
        labels << A(1) << ",2\n";  // label outside {0,1}
        std::vector<ingest::RejectDiagnostic> rejects;
        auto ls = ingest::load_labels_stream(labels, accounts, &rejects);
        CHECK(ls.labels.empty());
        CHECK(rejects.size() == 1);
    }
}
