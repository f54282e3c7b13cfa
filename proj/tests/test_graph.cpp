// Graph construction, invariant validation, dataset round-trips and the SBM
// generator. The SBM edge-count check is a moment oracle: compare the sampled
// edge total against its Binomial mean within four standard deviations.

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "n2n/dataset.hpp"
#include "n2n/graph.hpp"
#include "n2n/sbm.hpp"
#include "support/fixtures.hpp"

using namespace n2n;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("n2n_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

/// Minimal valid 3-node dataset on disk; individual tests then corrupt one file.
fs::path write_tiny_dataset(const std::string& name) {
    const fs::path dir = fresh_dir(name);
    write_file(dir / "edges.tsv", "0\t1\n1\t2\n");
    write_file(dir / "features.csv", "1.0,0.0\n0.0,1.0\n0.5,0.5\n");
    write_file(dir / "labels.txt", "0\n1\n1\n");
    write_file(dir / "splits.json", R"({"train":[0],"val":[1],"test":[2]})");
    return dir;
}

}  // namespace

TEST_CASE("from_edges normalizes arbitrary edge lists") {
    Graph::EdgeListStats stats;
    // Duplicates in both orders, one self-loop.
    const Graph g = Graph::from_edges(4, {{1, 0}, {0, 1}, {2, 2}, {3, 1}, {1, 3}, {1, 3}}, &stats);

    CHECK(g.num_nodes() == 4);
    CHECK(g.num_undirected_edges() == 2);
    CHECK(stats.self_loops_dropped == 1);
    CHECK(stats.duplicates_merged == 3);

    const auto n1 = g.neighbours(1);
    REQUIRE(n1.size() == 2);
    CHECK(n1[0] == 0);
    CHECK(n1[1] == 3);
    CHECK(g.degree(2) == 0);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(1, 0));
    CHECK_FALSE(g.adjacent(0, 3));
    CHECK_FALSE(g.adjacent(2, 2));

    CHECK(validate_graph(g));
}

TEST_CASE("from_edges rejects out-of-range endpoints") {
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), std::out_of_range);
}

TEST_CASE("validate_graph names the first broken invariant") {
    SUBCASE("duplicate neighbour entries") {
        // node 0 lists 1 twice; strict ascent is violated
        const Graph g(2, {0, 2, 4}, {1, 1, 0, 0}, 1);
        const auto r = validate_graph(g);
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.violation.empty());
    }
    SUBCASE("asymmetric adjacency") {
        const Graph g(3, {0, 1, 1, 1}, {1}, 1);  // 0->1 present, 1->0 missing
        CHECK_FALSE(validate_graph(g).ok);
    }
    SUBCASE("self-loop") {
        const Graph g(2, {0, 1, 1}, {0}, 1);
        CHECK_FALSE(validate_graph(g).ok);
    }
    SUBCASE("edge count mismatch") {
        const Graph g(2, {0, 1, 2}, {1, 0}, 7);
        CHECK_FALSE(validate_graph(g).ok);
    }
    SUBCASE("valid graph passes") {
        const auto r = validate_graph(n2n::testing::er_graph(30, 0.2, 5));
        CHECK(r.ok);
        CHECK(r.violation.empty());
    }
}

TEST_CASE("closed neighbourhood inserts the node itself") {
    const Graph g = n2n::testing::path_graph(4);
    const auto n1 = closed_neighbourhood(g, 1);
    REQUIRE(n1.size() == 3);
    CHECK(n1[0] == 0);
    CHECK(n1[1] == 1);
    CHECK(n1[2] == 2);

    const auto n0 = closed_neighbourhood(g, 0);
    REQUIRE(n0.size() == 2);
    CHECK(n0[0] == 0);
    CHECK(n0[1] == 1);

    CHECK_THROWS_AS(closed_neighbourhood(g, 4), std::out_of_range);
}

TEST_CASE("mean degree counts each undirected edge twice") {
    const Graph g = n2n::testing::path_graph(4);  // 3 edges, 4 nodes
    CHECK(g.mean_degree() == doctest::Approx(1.5));
}

TEST_CASE("dataset round-trip preserves graph, features and splits exactly") {
    SbmConfig cfg;
    cfg.n_nodes = 60;
    cfg.n_blocks = 3;
    cfg.p_in = 0.3;
    cfg.p_out = 0.05;
    cfg.feature_dim = 5;
    const Dataset d = generate_sbm(cfg);

    const fs::path dir = fresh_dir("roundtrip");
    save_dataset(d, dir);
    const Dataset back = load_dataset(dir);

    CHECK(back.graph.num_nodes() == d.graph.num_nodes());
    CHECK(back.graph.offsets() == d.graph.offsets());
    CHECK(back.graph.adjacency() == d.graph.adjacency());
    CHECK(back.labels == d.labels);
    CHECK(back.num_classes == d.num_classes);
    CHECK(back.train == d.train);
    CHECK(back.val == d.val);
    CHECK(back.test == d.test);

    REQUIRE(back.features.rows == d.features.rows);
    REQUIRE(back.features.cols == d.features.cols);
    // %.17g printing must round-trip doubles bit for bit.
    for (std::size_t i = 0; i < d.features.data.size(); ++i) {
        CHECK(back.features.data[i] == d.features.data[i]);
    }
    fs::remove_all(dir);
}

TEST_CASE("load_dataset validates the directory contents") {
    SUBCASE("missing file") {
        const fs::path dir = write_tiny_dataset("missing");
        fs::remove(dir / "labels.txt");
        CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("missing file"),
                             std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("ragged feature rows") {
        const fs::path dir = write_tiny_dataset("ragged");
        write_file(dir / "features.csv", "1.0,0.0\n0.0\n0.5,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("length mismatch"),
                             std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("label count mismatch") {
        const fs::path dir = write_tiny_dataset("labelcount");
        write_file(dir / "labels.txt", "0\n1\n");
        CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("label outside declared class range") {
        const fs::path dir = write_tiny_dataset("labelrange");
        write_file(dir / "splits.json", R"({"train":[0],"val":[1],"test":[2],"num_classes":1})");
        CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("out of range"),
                             std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("edge endpoint beyond feature rows") {
        const fs::path dir = write_tiny_dataset("edgerange");
        write_file(dir / "edges.tsv", "0\t9\n");
        CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("node in two splits") {
        const fs::path dir = write_tiny_dataset("overlap");
        write_file(dir / "splits.json", R"({"train":[0,1],"val":[1],"test":[2]})");
        CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("more than one split"),
                             std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("split id out of range") {
        const fs::path dir = write_tiny_dataset("splitrange");
        write_file(dir / "splits.json", R"({"train":[0],"val":[1],"test":[5]})");
        CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("bad float in features") {
        const fs::path dir = write_tiny_dataset("badfloat");
        write_file(dir / "features.csv", "1.0,x\n0.0,1.0\n0.5,0.5\n");
        CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("bad float"),
                             std::runtime_error);
        fs::remove_all(dir);
    }
    SUBCASE("comments and blank lines in edges.tsv are fine") {
        const fs::path dir = write_tiny_dataset("comments");
        write_file(dir / "edges.tsv", "# header\n\n0\t1\n1\t2\n");
        const Dataset d = load_dataset(dir);
        CHECK(d.graph.num_undirected_edges() == 2);
        fs::remove_all(dir);
    }
}

TEST_CASE("l1 normalization rescales rows and keeps zero rows") {
    Matrix m(3, 2);
    m(0, 0) = 2.0;
    m(0, 1) = -2.0;
    m(1, 0) = 0.0;
    m(1, 1) = 5.0;
    const Matrix out = normalize_rows_l1(m);
    CHECK(out(0, 0) == doctest::Approx(0.5));
    CHECK(out(0, 1) == doctest::Approx(-0.5));
    CHECK(out(1, 1) == doctest::Approx(1.0));
    CHECK(out(2, 0) == 0.0);  // all-zero row untouched
    CHECK(out(2, 1) == 0.0);
    CHECK(m(0, 0) == 2.0);  // input not mutated
}

TEST_CASE("sbm edge count matches the binomial mean within four sigmas") {
    SbmConfig cfg;  // defaults: n=1000, 5 blocks, p_in=0.05, p_out=0.002
    const Dataset d = generate_sbm(cfg);

    // 5 blocks of 200: intra pairs 5*C(200,2)=99500, inter pairs C(1000,2)-99500=400000.
    const double mean = 99500 * cfg.p_in + 400000 * cfg.p_out;
    const double var = 99500 * cfg.p_in * (1 - cfg.p_in) + 400000 * cfg.p_out * (1 - cfg.p_out);
    const double sigma = std::sqrt(var);
    const double observed = static_cast<double>(d.graph.num_undirected_edges());
    CHECK(std::abs(observed - mean) < 4.0 * sigma);
    CHECK(validate_graph(d.graph));
}

TEST_CASE("sbm with p_out zero has no cross-block edges") {
    SbmConfig cfg;
    cfg.n_nodes = 200;
    cfg.n_blocks = 4;
    cfg.p_in = 0.3;
    cfg.p_out = 0.0;
    const Dataset d = generate_sbm(cfg);
    REQUIRE(d.graph.num_undirected_edges() > 0);
    for (NodeId i = 0; i < d.graph.num_nodes(); ++i) {
        for (const NodeId j : d.graph.neighbours(i)) {
            CHECK(d.labels[i] == d.labels[j]);
        }
    }
}

TEST_CASE("sbm splits are stratified, disjoint and sized 10/10/80") {
    SbmConfig cfg;
    cfg.n_nodes = 500;
    const Dataset d = generate_sbm(cfg);

    CHECK(d.train.size() + d.val.size() + d.test.size() == cfg.n_nodes);
    std::set<NodeId> seen;
    for (const auto* split : {&d.train, &d.val, &d.test}) {
        for (const NodeId id : *split) CHECK(seen.insert(id).second);
    }
    // 100 per block: exactly 10 train and 10 val from each class.
    for (std::size_t c = 0; c < cfg.n_blocks; ++c) {
        const auto count = [&](const std::vector<NodeId>& split) {
            std::size_t k = 0;
            for (const NodeId id : split) k += d.labels[id] == static_cast<int>(c);
            return k;
        };
        CHECK(count(d.train) == 10);
        CHECK(count(d.val) == 10);
        CHECK(count(d.test) == 80);
    }
}

TEST_CASE("sbm generation is reproducible and seed-sensitive") {
    SbmConfig cfg;
    cfg.n_nodes = 300;
    const Dataset a = generate_sbm(cfg);
    const Dataset b = generate_sbm(cfg);
    CHECK(a.graph.adjacency() == b.graph.adjacency());
    CHECK(a.features.data == b.features.data);
    CHECK(a.train == b.train);

    cfg.seed = 8;
    const Dataset c = generate_sbm(cfg);
    CHECK(a.graph.adjacency() != c.graph.adjacency());
}

TEST_CASE("sbm block means are mean_separation apart") {
    SbmConfig cfg;
    cfg.n_nodes = 4000;  // large n so empirical means are tight
    cfg.n_blocks = 3;
    cfg.feature_dim = 8;
    cfg.mean_separation = 2.5;
    cfg.noise_sigma = 0.5;
    const Dataset d = generate_sbm(cfg);

    std::vector<std::vector<double>> mean(cfg.n_blocks, std::vector<double>(cfg.feature_dim, 0.0));
    std::vector<std::size_t> count(cfg.n_blocks, 0);
    for (NodeId i = 0; i < d.graph.num_nodes(); ++i) {
        const auto row = d.features.row(i);
        auto& m = mean[static_cast<std::size_t>(d.labels[i])];
        for (std::size_t k = 0; k < row.size(); ++k) m[k] += row[k];
        ++count[static_cast<std::size_t>(d.labels[i])];
    }
    for (std::size_t c = 0; c < cfg.n_blocks; ++c) {
        for (auto& v : mean[c]) v /= static_cast<double>(count[c]);
    }
    // Empirical mean error is about noise_sigma/sqrt(1333) ~ 0.014 per axis.
    for (std::size_t a = 0; a < cfg.n_blocks; ++a) {
        for (std::size_t b = a + 1; b < cfg.n_blocks; ++b) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < cfg.feature_dim; ++k) {
                const double diff = mean[a][k] - mean[b][k];
                d2 += diff * diff;
            }
            CHECK(std::sqrt(d2) == doctest::Approx(cfg.mean_separation).epsilon(0.05));
        }
    }
}
