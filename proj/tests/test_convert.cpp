#include <doctest.h>

#include "hyperdet/convert.hpp"
#include "hyperdet/rng.hpp"

#include <set>
#include <vector>

using namespace hyperdet;

namespace {

Hypergraph make_hg(size_t n, std::vector<std::vector<uint32_t>> edges) {
    Hypergraph hg;
    hg.n = n;
    hg.edge_nodes = std::move(edges);
    hg.m = hg.edge_nodes.size();
    hg.edge_hash.assign(hg.m, std::string());
    hg.rebuild_node_index();
    return hg;
}

Hypergraph random_hg(size_t n, size_t m, size_t max_sz, rng::Stream& rng) {
    std::vector<std::vector<uint32_t>> edges;
    for (size_t e = 0; e < m; ++e) {
        size_t sz = std::min(n, 2 + rng.bounded(max_sz - 1));
        std::set<uint32_t> nodes;
        while (nodes.size() < sz) nodes.insert(static_cast<uint32_t>(rng.bounded(n)));
        edges.emplace_back(nodes.begin(), nodes.end());
    }
    return make_hg(n, std::move(edges));
}

// O(n^2 * m) reference: count hyperedges containing both i and j
std::vector<std::vector<int>> brute_co_membership(const Hypergraph& hg) {
    std::vector<std::vector<int>> a(hg.n, std::vector<int>(hg.n, 0));
    for (uint32_t i = 0; i < hg.n; ++i)
        for (uint32_t j = 0; j < hg.n; ++j) {
            if (i == j) continue;
            for (const auto& e : hg.edge_nodes) {
                bool has_i = std::binary_search(e.begin(), e.end(), i);
                bool has_j = std::binary_search(e.begin(), e.end(), j);
                if (has_i && has_j) a[i][j] += 1;
            }
        }
    return a;
}

}  // namespace

TEST_CASE("incidence fixture: 3 nodes, 2 hyperedges") {
    auto hg = make_hg(3, {{0, 1}, {0, 2}});
    auto hh = convert::hyper_to_homo(hg);
    CHECK(hh.adj.at(0, 1) == 1.0);
    CHECK(hh.adj.at(0, 2) == 1.0);
    CHECK(hh.adj.at(1, 0) == 1.0);
    CHECK(hh.adj.at(2, 0) == 1.0);
    CHECK(hh.adj.at(1, 2) == 0.0);
    CHECK(hh.adj.at(0, 0) == 0.0);
    CHECK(hh.undirected_edges() == 2);
    CHECK_NOTHROW(hh.check_invariants(&hg));
}

TEST_CASE("single hyperedge expands to a unit-weight clique") {
    auto hg = make_hg(3, {{0, 1, 2}});
    auto hh = convert::hyper_to_homo(hg);
    for (uint32_t i = 0; i < 3; ++i)
        for (uint32_t j = 0; j < 3; ++j) CHECK(hh.adj.at(i, j) == (i == j ? 0.0 : 1.0));
}

TEST_CASE("disjoint hyperedges produce zero cross-block entries") {
    auto hg = make_hg(5, {{0, 1}, {2, 3, 4}});
    auto hh = convert::hyper_to_homo(hg);
    for (uint32_t i = 0; i < 2; ++i)
        for (uint32_t j = 2; j < 5; ++j) {
            CHECK(hh.adj.at(i, j) == 0.0);
            CHECK(hh.adj.at(j, i) == 0.0);
        }
}

TEST_CASE("hyper_to_homo matches brute-force co-membership on random instances") {
    auto rng = rng::Stream(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto hg = random_hg(5 + rng.bounded(45), 1 + rng.bounded(30), 6, rng);
        auto hh = convert::hyper_to_homo(hg);
        auto ref = brute_co_membership(hg);
        size_t pair_bound = 0;
        for (const auto& e : hg.edge_nodes) pair_bound += e.size() * (e.size() - 1);
        CHECK(hh.adj.nnz() <= pair_bound);
        for (uint32_t i = 0; i < hg.n; ++i)
            for (uint32_t j = 0; j < hg.n; ++j)
                CHECK(hh.adj.at(i, j) == static_cast<double>(ref[i][j]));
        CHECK_NOTHROW(hh.check_invariants(&hg));
    }
}

TEST_CASE("normalize_adjacency fixtures") {
    // no edges -> identity
    auto z = sparse::Csr(3, 3);
    auto nz = convert::normalize_adjacency(z, convert::NormMode::Sym);
    CHECK(nz == sparse::Csr::identity(3));

    // one unit edge: degrees 2,2 -> all entries 1/2
    auto a = sparse::Csr::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    auto na = convert::normalize_adjacency(a, convert::NormMode::Sym);
    for (uint32_t i = 0; i < 2; ++i)
        for (uint32_t j = 0; j < 2; ++j) CHECK(na.at(i, j) == doctest::Approx(0.5));

    // binarization first: weight 9 behaves like weight 1
    auto w = sparse::Csr::from_triplets(2, 2, {{0, 1, 9.0}, {1, 0, 9.0}});
    auto nw = convert::normalize_adjacency(w, convert::NormMode::BinarySym);
    CHECK(nw.at(0, 1) == doctest::Approx(0.5));

    // operator applied to ones gives ones on a k-regular ring (binary mode)
    const size_t n = 8;
    std::vector<sparse::Triplet> ring;
    for (uint32_t i = 0; i < n; ++i) {
        uint32_t j = (i + 1) % n;
        ring.push_back({i, j, 1.0});
        ring.push_back({j, i, 1.0});
    }
    auto nr = convert::normalize_adjacency(sparse::Csr::from_triplets(n, n, ring),
                                           convert::NormMode::BinarySym);
    std::vector<double> ones(n, 1.0), out(n, 0.0);
    nr.multiply_dense(ones.data(), 1, out.data());
    for (double v : out) CHECK(v == doctest::Approx(1.0));

    // negative entries and nonzero input diagonal are contract violations
    CHECK_THROWS(convert::normalize_adjacency(
        sparse::Csr::from_triplets(2, 2, {{0, 1, -1.0}, {1, 0, -1.0}}), convert::NormMode::Sym));
    CHECK_THROWS(convert::normalize_adjacency(
        sparse::Csr::from_triplets(2, 2, {{0, 0, 1.0}}), convert::NormMode::Sym));
}

TEST_CASE("hypergraph operators: pair hyperedge gives the averaging operator") {
    auto hg = make_hg(2, {{0, 1}});
    auto ops = convert::hypergraph_operators(hg);
    for (uint32_t i = 0; i < 2; ++i)
        for (uint32_t j = 0; j < 2; ++j) CHECK(ops.composed.at(i, j) == doctest::Approx(0.5));
    CHECK(ops.node_hyperdegree == std::vector<double>{1.0, 1.0});
    CHECK(ops.edge_size == std::vector<double>{2.0});
    CHECK(ops.isolated.empty());
}

TEST_CASE("isolated node: zero composed row, identity row in the layer operator") {
    auto hg = make_hg(3, {{0, 1}});
    auto ops = convert::hypergraph_operators(hg);
    REQUIRE(ops.isolated == std::vector<uint32_t>{2});
    for (uint32_t j = 0; j < 3; ++j) CHECK(ops.composed.at(2, j) == 0.0);
    auto lop = ops.layer_operator();
    CHECK(lop.at(2, 2) == 1.0);
    CHECK(lop.at(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("composed operator matches the dense product formula on random instances") {
    auto rng = rng::Stream(57);
    for (int trial = 0; trial < 30; ++trial) {
        auto hg = random_hg(4 + rng.bounded(16), 1 + rng.bounded(10), 5, rng);
        auto ops = convert::hypergraph_operators(hg);
        const size_t n = hg.n, m = hg.m;
        // dense Dv^{-1/2} H De^{-1} H^T Dv^{-1/2}
        std::vector<double> h(n * m, 0.0), dv(n, 0.0), de(m, 0.0);
        for (size_t e = 0; e < m; ++e)
            for (uint32_t v : hg.edge_nodes[e]) {
                h[v * m + e] = 1.0;
                dv[v] += 1.0;
                de[e] += 1.0;
            }
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j) {
                double want = 0;
                for (size_t e = 0; e < m; ++e)
                    want += h[i * m + e] * h[j * m + e] / de[e];
                if (dv[i] > 0 && dv[j] > 0) want /= std::sqrt(dv[i]) * std::sqrt(dv[j]);
                CHECK(std::abs(ops.composed.at(i, j) - want) < 1e-12);
            }
        // symmetry + spectral radius <= 1 by power iteration
        auto rng2 = rng::Stream(trial);
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = rng2.uniform() - 0.5;
        double lambda = 0;
        for (int it = 0; it < 200; ++it) {
            ops.composed.multiply_dense(x.data(), 1, y.data());
            double norm = 0;
            for (double v : y) norm += v * v;
            norm = std::sqrt(norm);
            if (norm < 1e-300) break;
            lambda = norm;
            double xnorm = 0;
            for (double v : x) xnorm += v * v;
            lambda = norm / std::sqrt(xnorm);
            for (size_t i2 = 0; i2 < n; ++i2) x[i2] = y[i2] / norm;
        }
        CHECK(lambda <= 1.0 + 1e-6);
    }
}
