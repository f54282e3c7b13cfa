#pragma once

#include "n2n/graph.hpp"
#include "n2n/matrix.hpp"

#include <filesystem>
#include <vector>

namespace n2n {

/// Attributed graph with labels and fixed train/val/test splits. Immutable
/// after load; features are kept exactly as read (preprocessing such as row
/// normalization happens on working copies in the training pipeline).
struct Dataset {
    Graph graph;
    Matrix features;              // n_nodes x D
    std::vector<int> labels;      // values in [0, num_classes)
    std::size_t num_classes = 0;
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;
    Graph::EdgeListStats load_stats;
};

/// Reads edges.tsv, features.csv, labels.txt and splits.json from `dir`.
/// Throws std::runtime_error with a descriptive message on any format or
/// validation problem.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the dataset back in the same directory format. Floats are printed
/// with enough digits to round-trip exactly.
void save_dataset(const Dataset& d, const std::filesystem::path& dir);

/// Row-wise L1 normalization: each row is divided by the sum of absolute
/// values of its entries (all-zero rows are left untouched).
Matrix normalize_rows_l1(const Matrix& m);

}  // namespace n2n
