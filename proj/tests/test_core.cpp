#include <doctest.h>

#include "hyperdet/core.hpp"
#include "hyperdet/sparse.hpp"

#include <sstream>

using namespace hyperdet;

static std::string addr(int i) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "0x%040x", i);
    return buf;
}

TEST_CASE("address and hash validation") {
    CHECK(is_hex_address(addr(1)));
    CHECK(!is_hex_address("0x123"));                         // too short
    CHECK(!is_hex_address(addr(1) + "0"));                   // too long
    CHECK(!is_hex_address("0X" + addr(1).substr(2)));        // uppercase prefix
    CHECK(!is_hex_address("0x" + std::string(40, 'G')));     // non-hex
    CHECK(is_tx_hash("0x" + std::string(64, 'a')));
    CHECK(!is_tx_hash("0x" + std::string(63, 'a')));
    CHECK(to_lower_ascii("0xAbC") == "0xabc");
}

TEST_CASE("wei parsing round-trips and rejects garbage") {
    CHECK(*parse_wei("0") == 0);
    CHECK(*parse_wei("1000000000000000000") == static_cast<u128>(1000000000000000000ULL));
    CHECK(!parse_wei("-5").has_value());
    CHECK(!parse_wei("12x").has_value());
    CHECK(!parse_wei("").has_value());
    // 2^128 - 1 fits; 2^128 overflows
    CHECK(parse_wei("340282366920938463463374607431768211455").has_value());
    CHECK(!parse_wei("340282366920938463463374607431768211456").has_value());

    u128 big = *parse_wei("340282366920938463463374607431768211455");
    CHECK(wei_to_string(big) == "340282366920938463463374607431768211455");
    CHECK(wei_to_string(0) == "0");
    CHECK(wei_to_ether(*parse_wei("1500000000000000000")) == doctest::Approx(1.5));
}

TEST_CASE("account interning is first-appearance order, from before to") {
    std::vector<TransactionRecord> recs(2);
    recs[0].from = addr(5);
    recs[0].to = addr(3);
    recs[1].from = addr(3);
    recs[1].to = addr(9);
    auto t = intern_accounts(recs);
    CHECK(t.size() == 3);
    CHECK(t.address(0) == addr(5));
    CHECK(t.address(1) == addr(3));
    CHECK(t.address(2) == addr(9));
    CHECK(*t.find(addr(9)) == 2);
    CHECK(!t.find(addr(7)).has_value());
}

TEST_CASE("hypergraph node index rebuild and invariants") {
    Hypergraph hg;
    hg.n = 4;
    hg.edge_nodes = {{0, 1, 2}, {1, 3}};
    hg.m = 2;
    hg.edge_hash = {"", ""};
    hg.rebuild_node_index();
    CHECK(hg.node_edges[1] == std::vector<uint32_t>{0, 1});
    CHECK(hg.node_edges[2] == std::vector<uint32_t>{0});
    CHECK_NOTHROW(hg.check_invariants());

    Hypergraph bad = hg;
    bad.edge_nodes[0] = {2, 1, 0};  // unsorted
    CHECK_THROWS(bad.check_invariants());
    bad = hg;
    bad.edge_nodes[1] = {3};  // singleton
    CHECK_THROWS(bad.check_invariants());
}

TEST_CASE("csr from_triplets sums duplicates and round-trips text format") {
    std::vector<sparse::Triplet> t{{0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5}};
    auto m = sparse::Csr::from_triplets(2, 2, t);
    CHECK(m.nnz() == 2);
    CHECK(m.at(0, 1) == doctest::Approx(2.5));
    CHECK(m.at(1, 0) == doctest::Approx(3.0));
    CHECK(m.at(0, 0) == 0.0);

    std::stringstream ss;
    sparse::write_triplets(ss, m);
    auto back = sparse::read_triplets(ss);
    CHECK(back == m);
}

TEST_CASE("csr transpose and dense multiply") {
    auto m = sparse::Csr::from_triplets(2, 3, {{0, 0, 1.0}, {0, 2, 2.0}, {1, 1, 4.0}});
    auto mt = m.transposed();
    CHECK(mt.rows() == 3);
    CHECK(mt.at(2, 0) == doctest::Approx(2.0));
    // x = [[1],[2],[3]]
    double x[3] = {1, 2, 3};
    double y[2] = {0, 0};
    m.multiply_dense(x, 1, y);
    CHECK(y[0] == doctest::Approx(7.0));
    CHECK(y[1] == doctest::Approx(8.0));
    auto rs = m.row_sums();
    CHECK(rs[0] == doctest::Approx(3.0));
    CHECK(rs[1] == doctest::Approx(4.0));
}
