#include "n2n/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace n2n {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::ifstream open_or_fail(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) fail("missing file: " + p.string());
    return in;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

NodeId parse_node_id(std::string_view tok, const std::string& context) {
    NodeId value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        fail(context + ": non-integer node id '" + std::string(tok) + "'");
    }
    return value;
}

std::vector<std::pair<NodeId, NodeId>> read_edges(const std::filesystem::path& p) {
    auto in = open_or_fail(p);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || is_blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            fail("edges.tsv line " + std::to_string(lineno) + ": expected two tab-separated ids");
        }
        const std::string_view a(line.data(), tab);
        std::string_view b(line.data() + tab + 1, line.size() - tab - 1);
        while (!b.empty() && (b.back() == '\r' || b.back() == ' ')) b.remove_suffix(1);
        const std::string ctx = "edges.tsv line " + std::to_string(lineno);
        edges.emplace_back(parse_node_id(a, ctx), parse_node_id(b, ctx));
    }
    return edges;
}

Matrix read_features(const std::filesystem::path& p) {
    auto in = open_or_fail(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                fail("features.csv line " + std::to_string(lineno) + ": bad float '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail("features.csv line " + std::to_string(lineno) + ": feature row length mismatch (" +
                 std::to_string(row.size()) + " vs " + std::to_string(rows.front().size()) + ")");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail("features.csv: no rows");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

std::vector<int> read_labels(const std::filesystem::path& p) {
    auto in = open_or_fail(p);
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            fail("labels.txt line " + std::to_string(lineno) + ": bad label '" + line + "'");
        }
        labels.push_back(v);
    }
    return labels;
}

std::vector<NodeId> read_split(const json& j, const char* key, std::size_t n_nodes) {
    if (!j.contains(key)) fail(std::string("splits.json: missing key '") + key + "'");
    std::vector<NodeId> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_unsigned() && !v.is_number_integer()) {
            fail(std::string("splits.json: non-integer node id in '") + key + "'");
        }
        const std::int64_t id = v.get<std::int64_t>();
        if (id < 0 || static_cast<std::size_t>(id) >= n_nodes) {
            fail(std::string("splits.json: node id ") + std::to_string(id) + " in '" + key +
                 "' >= n_nodes " + std::to_string(n_nodes));
        }
        out.push_back(static_cast<NodeId>(id));
    }
    return out;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset d;
    d.features = read_features(dir / "features.csv");
    const std::size_t n = d.features.rows;

    auto edges = read_edges(dir / "edges.tsv");
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            fail("edges.tsv: node id " + std::to_string(std::max(a, b)) + " >= n_nodes " +
                 std::to_string(n));
        }
    }
    d.graph = Graph::from_edges(n, std::move(edges), &d.load_stats);

    d.labels = read_labels(dir / "labels.txt");
    if (d.labels.size() != n) {
        fail("labels.txt: " + std::to_string(d.labels.size()) + " labels for " + std::to_string(n) +
             " nodes");
    }

    json splits;
    {
        auto in = open_or_fail(dir / "splits.json");
        try {
            in >> splits;
        } catch (const json::exception& e) {
            fail(std::string("splits.json: ") + e.what());
        }
    }
    d.train = read_split(splits, "train", n);
    d.val = read_split(splits, "val", n);
    d.test = read_split(splits, "test", n);

    std::set<NodeId> seen;
    for (const auto* split : {&d.train, &d.val, &d.test}) {
        for (const NodeId id : *split) {
            if (!seen.insert(id).second) {
                fail("splits.json: node " + std::to_string(id) + " appears in more than one split");
            }
        }
    }

    // Class count comes from splits.json when declared, otherwise from the labels.
    const int max_label = d.labels.empty() ? -1 : *std::max_element(d.labels.begin(), d.labels.end());
    if (splits.contains("num_classes")) {
        d.num_classes = splits.at("num_classes").get<std::size_t>();
    } else {
        d.num_classes = static_cast<std::size_t>(max_label + 1);
    }
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] < 0 || static_cast<std::size_t>(d.labels[i]) >= d.num_classes) {
            fail("labels.txt line " + std::to_string(i + 1) + ": label out of range (" +
                 std::to_string(d.labels[i]) + " with " + std::to_string(d.num_classes) +
                 " classes)");
        }
    }
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "edges.tsv");
        const std::size_t n = d.graph.num_nodes();
        for (NodeId i = 0; i < n; ++i) {
            for (const NodeId j : d.graph.neighbours(i)) {
                if (j > i) out << i << '\t' << j << '\n';
            }
        }
    }
    {
        std::ofstream out(dir / "features.csv");
        char buf[64];
        for (std::size_t r = 0; r < d.features.rows; ++r) {
            const auto row = d.features.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", row[c]);
                if (c) out << ',';
                out << buf;
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "labels.txt");
        for (const int l : d.labels) out << l << '\n';
    }
    {
        nlohmann::json j;
        j["train"] = d.train;
        j["val"] = d.val;
        j["test"] = d.test;
        j["num_classes"] = d.num_classes;
        std::ofstream out(dir / "splits.json");
        out << j.dump(2) << '\n';
    }
}

Matrix normalize_rows_l1(const Matrix& m) {
    Matrix out = m;
    for (std::size_t r = 0; r < out.rows; ++r) {
        auto row = out.row(r);
        double s = 0.0;
        for (const double v : row) s += std::abs(v);
        if (s > 0.0) {
            for (double& v : row) v /= s;
        }
    }
    return out;
}

}  // namespace n2n
