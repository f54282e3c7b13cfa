#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "n2n/graph.hpp"
#include "n2n/matrix.hpp"
#include "n2n/taps.hpp"

namespace n2n {

/// Micro-averaged F1 over the masked nodes, computed from global TP/FP/FN
/// counts. For single-label multi-class data this equals plain accuracy.
/// Throws std::invalid_argument on an empty mask or out-of-range ids.
double micro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                std::span<const NodeId> mask);

/// Feature smoothness of the representations H over the graph:
///
///   delta_f = || sum_i ( sum_{j in N_i} (h_i - h_j) )^2 ||_1 / (|E| * D)
///
/// with the inner square elementwise, N_i the open neighbourhood, |E| the
/// undirected edge count and D the representation width. Lower is smoother.
/// Throws std::invalid_argument when the graph has no edges.
double feature_smoothness(const Graph& g, const Matrix& h);

/// Label smoothness over the full undirected edge set: the fraction of edges
/// whose endpoints carry different labels. Throws on an empty edge set.
double label_smoothness(const Graph& g, const std::vector<int>& labels);

/// Label smoothness over the positive-selection edges {(i, j) : j in
/// positives(i)}. Each directed selection is counted once; mutual picks are
/// deliberately not deduplicated, since each node's list is what training
/// consumes. Throws when the assignment selects no edges.
double label_smoothness(const std::vector<int>& labels, const PositiveAssignment& assignment);

/// One logged training epoch.
struct EpochRecord {
    std::size_t epoch = 0;
    double ce = 0.0;
    double infonce = 0.0;
    double loss = 0.0;
    double train_f1 = 0.0;
    double val_f1 = 0.0;
    double test_f1 = 0.0;
    double delta_f = 0.0;
    double ms = 0.0;
};

/// Per-epoch record collection with JSON and CSV serialization.
class MetricsLog {
public:
    /// Appends a record. Epochs must arrive strictly increasing and all
    /// values must be finite; violations throw std::invalid_argument.
    void append(const EpochRecord& r);

    const std::vector<EpochRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }

    /// Writes a JSON array of record objects.
    void save_json(const std::filesystem::path& path) const;

    /// Writes CSV with the fixed header
    /// epoch,ce,infonce,loss,train_f1,val_f1,test_f1,delta_f,ms.
    void save_csv(const std::filesystem::path& path) const;

    static MetricsLog load_json(const std::filesystem::path& path);

private:
    std::vector<EpochRecord> records_;
};

}  // namespace n2n
