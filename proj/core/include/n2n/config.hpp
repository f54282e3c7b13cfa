#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2n/mlp.hpp"
#include "n2n/objectives.hpp"

namespace n2n {

enum class SamplingStrategy { Taps, Random };

SamplingStrategy sampling_from_string(const std::string& s);
std::string to_string(SamplingStrategy s);

/// All training hyperparameters. Defaults follow the common setup: hidden
/// width 512, 1000 epochs, Adam at 1e-3, dropout 0.6, L2 1e-2, alpha 0.9,
/// tau 5, five seeds.
struct TrainConfig {
    double alpha = 0.9;
    double tau = 5.0;
    std::size_t positives_x = 1;       // ignored when positives_all is set
    bool positives_all = false;        // JSON value "all"
    SamplingStrategy sampling = SamplingStrategy::Taps;
    double lr = 0.001;
    double dropout = 0.6;
    double l2 = 0.01;
    std::size_t epochs = 1000;
    std::size_t hidden = 512;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    DenominatorMode denominator = DenominatorMode::Literal;
    Arch arch = Arch::TwoHiddenPlusHead;
    bool normalize_features = true;
    std::size_t batch_size = 0;        // ignored when batch_full is set
    bool batch_full = true;            // JSON value "full"
    bool resample_per_epoch = false;   // random sampling only: redraw positives each epoch

    /// Range-checks every field; throws std::invalid_argument on violation.
    void validate() const;
};

/// Parses a flat JSON object holding TrainConfig fields. Missing keys keep
/// their defaults; unknown keys are errors. positives_x and batch_size accept
/// either a positive integer or the string "all" / "full".
TrainConfig load_train_config(const std::filesystem::path& path);
TrainConfig train_config_from_json_text(const std::string& text);

std::string to_json_text(const TrainConfig& cfg);

}  // namespace n2n
