#include "n2n/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace n2n {

double micro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                std::span<const NodeId> mask) {
    if (mask.empty()) throw std::invalid_argument("micro_f1: empty mask");
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("micro_f1: prediction/label count mismatch");
    }
    // Global counts over all classes. For single-label data every wrong
    // prediction is one FP and one FN, so precision = recall = accuracy.
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const NodeId i : mask) {
        if (i >= predictions.size()) {
            throw std::invalid_argument("micro_f1: mask id " + std::to_string(i) + " out of range");
        }
        if (predictions[i] == labels[i]) {
            ++tp;
        } else {
            ++fp;
            ++fn;
        }
    }
    const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(tp) / denom;
}

double feature_smoothness(const Graph& g, const Matrix& h) {
    if (h.rows != g.num_nodes()) {
        throw std::invalid_argument("feature_smoothness: representation row count mismatch");
    }
    if (g.num_undirected_edges() == 0) throw std::invalid_argument("feature_smoothness: graph has no edges");

    double total = 0.0;
    std::vector<double> acc(h.cols);
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const auto hi = h.row(i);
        for (const NodeId j : g.neighbours(i)) {
            const auto hj = h.row(j);
            for (std::size_t c = 0; c < h.cols; ++c) acc[c] += hi[c] - hj[c];
        }
        for (const double v : acc) total += v * v;
    }
    return total / (static_cast<double>(g.num_undirected_edges()) * static_cast<double>(h.cols));
}

double label_smoothness(const Graph& g, const std::vector<int>& labels) {
    if (labels.size() != g.num_nodes()) {
        throw std::invalid_argument("label_smoothness: label count mismatch");
    }
    if (g.num_undirected_edges() == 0) throw std::invalid_argument("label_smoothness: graph has no edges");
    std::size_t cross = 0;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        for (const NodeId j : g.neighbours(i)) {
            if (j <= i) continue;  // count each undirected edge once
            if (labels[i] != labels[j]) ++cross;
        }
    }
    return static_cast<double>(cross) / static_cast<double>(g.num_undirected_edges());
}

double label_smoothness(const std::vector<int>& labels, const PositiveAssignment& assignment) {
    std::size_t cross = 0, total = 0;
    for (std::size_t i = 0; i < assignment.positives.size(); ++i) {
        for (const NodeId j : assignment.positives[i]) {
            if (i >= labels.size() || j >= labels.size()) {
                throw std::invalid_argument("label_smoothness: selection id out of range");
            }
            ++total;
            if (labels[i] != labels[j]) ++cross;
        }
    }
    if (total == 0) throw std::invalid_argument("label_smoothness: assignment selects no edges");
    return static_cast<double>(cross) / static_cast<double>(total);
}

namespace {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("MetricsLog: non-finite ") + field);
    }
}

// Shortest representation that parses back to the same double, so the CSV
// carries full precision without a fixed digit count.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void MetricsLog::append(const EpochRecord& r) {
    if (!records_.empty() && r.epoch <= records_.back().epoch) {
        throw std::invalid_argument("MetricsLog: epochs must be strictly increasing");
    }
    require_finite(r.ce, "ce");
    require_finite(r.infonce, "infonce");
    require_finite(r.loss, "loss");
    require_finite(r.train_f1, "train_f1");
    require_finite(r.val_f1, "val_f1");
    require_finite(r.test_f1, "test_f1");
    require_finite(r.delta_f, "delta_f");
    require_finite(r.ms, "ms");
    records_.push_back(r);
}

void MetricsLog::save_json(const std::filesystem::path& path) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records_) {
        arr.push_back({{"epoch", r.epoch},
                       {"ce", r.ce},
                       {"infonce", r.infonce},
                       {"loss", r.loss},
                       {"train_f1", r.train_f1},
                       {"val_f1", r.val_f1},
                       {"test_f1", r.test_f1},
                       {"delta_f", r.delta_f},
                       {"ms", r.ms}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << arr.dump(2) << '\n';
}

void MetricsLog::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "epoch,ce,infonce,loss,train_f1,val_f1,test_f1,delta_f,ms\n";
    for (const auto& r : records_) {
        out << r.epoch << ',' << fmt(r.ce) << ',' << fmt(r.infonce) << ',' << fmt(r.loss) << ','
            << fmt(r.train_f1) << ',' << fmt(r.val_f1) << ',' << fmt(r.test_f1) << ','
            << fmt(r.delta_f) << ',' << fmt(r.ms) << '\n';
    }
}

MetricsLog MetricsLog::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    nlohmann::json arr = nlohmann::json::parse(in);
    MetricsLog log;
    for (const auto& o : arr) {
        EpochRecord r;
        r.epoch = o.at("epoch").get<std::size_t>();
        r.ce = o.at("ce").get<double>();
        r.infonce = o.at("infonce").get<double>();
        r.loss = o.at("loss").get<double>();
        r.train_f1 = o.at("train_f1").get<double>();
        r.val_f1 = o.at("val_f1").get<double>();
        r.test_f1 = o.at("test_f1").get<double>();
        r.delta_f = o.at("delta_f").get<double>();
        r.ms = o.at("ms").get<double>();
        log.append(r);
    }
    return log;
}

}  // namespace n2n
