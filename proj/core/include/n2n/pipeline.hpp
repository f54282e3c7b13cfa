#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "n2n/checkpoint.hpp"
#include "n2n/config.hpp"
#include "n2n/dataset.hpp"
#include "n2n/metrics.hpp"
#include "n2n/mlp.hpp"
#include "n2n/sbm.hpp"
#include "n2n/taps.hpp"

namespace n2n {

/// JL trains encoder and head jointly on the combined loss; URL pretrains the
/// encoder on InfoNCE alone (head frozen) and evaluates with a linear probe.
enum class PipelineMode { Jl, Url };

PipelineMode pipeline_mode_from_string(const std::string& s);
std::string to_string(PipelineMode m);

/// Outcome of one seeded run. test_f1 is the score at the epoch with the best
/// validation micro-F1 (early selection, never early stopping); the
/// final-epoch score is kept alongside so either convention can be reported.
struct SeedOutcome {
    std::uint64_t seed = 0;
    MetricsLog log;        // JL epochs, or URL pretraining epochs
    MetricsLog probe_log;  // URL only, empty otherwise
    MlpParams params;      // final parameters (URL: pretrained encoder)
    std::size_t best_epoch = 0;
    double best_val_f1 = 0.0;
    double test_f1 = 0.0;
    double final_test_f1 = 0.0;
    double delta_f_init = 0.0;
    double delta_f_final = 0.0;
};

struct RunResult {
    PipelineMode mode = PipelineMode::Jl;
    std::vector<SeedOutcome> seeds;
    double mean_test_f1 = 0.0;
    double std_test_f1 = 0.0;  // population standard deviation over seeds
    std::string summary;       // percent, two decimals, e.g. "87.52±0.20"
};

/// One JL training run: per epoch, train-mode forward, combined loss over the
/// train split (CE) and the configured positives (InfoNCE), backward, Adam,
/// then eval-mode logging of micro-F1 on all splits and delta_f. Epoch 0 in
/// the log is the untouched initialization, evaluated in eval mode.
SeedOutcome run_jl_seed(const Dataset& d, const TrainConfig& cfg, std::uint64_t seed,
                        const DependencyTable* table = nullptr);

/// URL pretraining followed by a linear probe on the frozen encoder. The
/// pretraining log keeps ce and the F1 columns at zero; classification
/// numbers come from the probe.
SeedOutcome run_url_seed(const Dataset& d, const TrainConfig& cfg, std::uint64_t seed,
                         const DependencyTable* table = nullptr);

/// Trains a fresh linear head on the frozen eval-mode representations of
/// `encoder`. Dropout does not apply; lr, l2, epochs and the splits follow
/// cfg. The encoder itself is never modified.
SeedOutcome probe_seed(const Dataset& d, const MlpParams& encoder, const TrainConfig& cfg,
                       std::uint64_t seed);

/// Runs the chosen pipeline once per configured seed and aggregates
/// mean +/- population std of the per-seed test micro-F1.
RunResult multi_seed_run(const Dataset& d, const TrainConfig& cfg, PipelineMode mode,
                         const DependencyTable* table = nullptr);

RunResult probe_multi_seed(const Dataset& d, const MlpParams& encoder, const TrainConfig& cfg);

/// Positive selection for a training run: TAPS top-x from the dependency
/// table, uniform random neighbours, or every neighbour when the config says
/// "all". Random draws are seeded from `seed`.
PositiveAssignment positives_for(const Dataset& d, const TrainConfig& cfg,
                                 const DependencyTable* table, std::uint64_t seed);

struct BenchmarkRow {
    std::string name;
    double train_epoch_ms = 0.0;  // median over the timed epochs
    double inference_ms = 0.0;    // median eval-mode forward pass
};

/// Times each config on the dataset: `warmup` untimed epochs, then `timed`
/// timed ones, reporting medians. Positive selection and dependency-table
/// construction happen before the clock starts; inference is the eval-mode
/// forward pass alone.
std::vector<BenchmarkRow> benchmark_epoch(const Dataset& d,
                                          const std::vector<std::pair<std::string, TrainConfig>>& cfgs,
                                          const DependencyTable* table = nullptr,
                                          std::size_t warmup = 5, std::size_t timed = 20);

// CLI entry points. Artifact-producing commands return 0 on success; errors
// surface as exceptions for main() to report.

/// Builds the dependency table and writes taps.bin plus taps_report.json
/// (score summary, build time) into the dataset directory.
int cmd_prepare(const std::filesystem::path& dataset_dir, const std::string& convention);

/// Runs the JL or URL pipeline over all configured seeds. Writes per-seed
/// seed_<s>/metrics.{json,csv} and seed_<s>/checkpoint.json (URL adds
/// probe_metrics.{json,csv}) plus a top-level result.json under `out`.
int cmd_train(const std::string& mode, const std::filesystem::path& dataset_dir,
              const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

/// Probes a saved encoder checkpoint; writes result.json under `out`.
int cmd_probe(const std::filesystem::path& checkpoint_path,
              const std::filesystem::path& dataset_dir, const std::filesystem::path& config_path,
              const std::filesystem::path& out_dir);

/// Writes partition.csv, stats.json and subgraphs.dot (top-1 dependency
/// forest, nodes coloured by label) into the dataset directory. Loads
/// taps.bin when present, otherwise builds the table on demand.
int cmd_partition(const std::filesystem::path& dataset_dir);

/// Benchmarks every config in the list file and writes timings.csv.
int cmd_bench(const std::filesystem::path& dataset_dir, const std::filesystem::path& configs_path,
              const std::filesystem::path& out_csv);

/// Generates an SBM dataset directory.
int cmd_gen_sbm(const SbmConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace n2n
