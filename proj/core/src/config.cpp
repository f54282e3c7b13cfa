#include "n2n/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace n2n {

SamplingStrategy sampling_from_string(const std::string& s) {
    if (s == "taps") return SamplingStrategy::Taps;
    if (s == "random") return SamplingStrategy::Random;
    throw std::invalid_argument("unknown sampling strategy '" + s + "'");
}

std::string to_string(SamplingStrategy s) {
    return s == SamplingStrategy::Taps ? "taps" : "random";
}

void TrainConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("config: alpha must be in [0, 1]");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be > 0");
    if (!positives_all && positives_x == 0) {
        throw std::invalid_argument("config: positives_x must be >= 1 or \"all\"");
    }
    if (!std::isfinite(lr) || lr < 0.0) throw std::invalid_argument("config: lr must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw std::invalid_argument("config: dropout must be in [0, 1)");
    }
    if (!std::isfinite(l2) || l2 < 0.0) throw std::invalid_argument("config: l2 must be >= 0");
    if (epochs == 0) throw std::invalid_argument("config: epochs must be >= 1");
    if (hidden == 0) throw std::invalid_argument("config: hidden must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    if (!batch_full && batch_size == 0) {
        throw std::invalid_argument("config: batch_size must be >= 1 or \"full\"");
    }
}

namespace {

const std::set<std::string> kKnownKeys = {
    "alpha",  "tau",    "positives_x", "sampling",           "lr",
    "dropout", "l2",    "epochs",      "hidden",             "seeds",
    "denominator", "arch", "normalize_features", "batch_size", "resample_per_epoch"};

/// Reads a field that is either a positive integer or a sentinel string.
void read_count_or_sentinel(const nlohmann::json& v, const char* key, const char* sentinel,
                            std::size_t& count, bool& is_sentinel) {
    if (v.is_string()) {
        if (v.get<std::string>() != sentinel) {
            throw std::invalid_argument(std::string("config: ") + key + " must be an integer or \"" +
                                        sentinel + "\"");
        }
        is_sentinel = true;
        return;
    }
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
        throw std::invalid_argument(std::string("config: ") + key + " must be a positive integer or \"" +
                                    sentinel + "\"");
    }
    is_sentinel = false;
    count = v.get<std::size_t>();
}

}  // namespace

TrainConfig train_config_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!kKnownKeys.contains(key)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }

    TrainConfig cfg;
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
    if (j.contains("positives_x")) {
        read_count_or_sentinel(j["positives_x"], "positives_x", "all", cfg.positives_x,
                               cfg.positives_all);
    }
    if (j.contains("sampling")) cfg.sampling = sampling_from_string(j["sampling"].get<std::string>());
    if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
    if (j.contains("dropout")) cfg.dropout = j["dropout"].get<double>();
    if (j.contains("l2")) cfg.l2 = j["l2"].get<double>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::size_t>();
    if (j.contains("seeds")) {
        if (!j["seeds"].is_array()) throw std::invalid_argument("config: seeds must be an array");
        cfg.seeds.clear();
        for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("denominator")) {
        cfg.denominator = denominator_from_string(j["denominator"].get<std::string>());
    }
    if (j.contains("arch")) cfg.arch = arch_from_string(j["arch"].get<std::string>());
    if (j.contains("normalize_features")) {
        cfg.normalize_features = j["normalize_features"].get<bool>();
    }
    if (j.contains("batch_size")) {
        read_count_or_sentinel(j["batch_size"], "batch_size", "full", cfg.batch_size,
                               cfg.batch_full);
    }
    if (j.contains("resample_per_epoch")) {
        cfg.resample_per_epoch = j["resample_per_epoch"].get<bool>();
    }

    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return train_config_from_json_text(text);
}

std::string to_json_text(const TrainConfig& cfg) {
    nlohmann::json j;
    j["alpha"] = cfg.alpha;
    j["tau"] = cfg.tau;
    if (cfg.positives_all) {
        j["positives_x"] = "all";
    } else {
        j["positives_x"] = cfg.positives_x;
    }
    j["sampling"] = to_string(cfg.sampling);
    j["lr"] = cfg.lr;
    j["dropout"] = cfg.dropout;
    j["l2"] = cfg.l2;
    j["epochs"] = cfg.epochs;
    j["hidden"] = cfg.hidden;
    j["seeds"] = cfg.seeds;
    j["denominator"] = to_string(cfg.denominator);
    j["arch"] = to_string(cfg.arch);
    j["normalize_features"] = cfg.normalize_features;
    if (cfg.batch_full) {
        j["batch_size"] = "full";
    } else {
        j["batch_size"] = cfg.batch_size;
    }
    j["resample_per_epoch"] = cfg.resample_per_epoch;
    return j.dump(2);
}

}  // namespace n2n
