#include "n2n/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "n2n/objectives.hpp"
#include "n2n/rng.hpp"

namespace n2n {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Matrix working_features(const Dataset& d, const TrainConfig& cfg) {
    return cfg.normalize_features ? normalize_rows_l1(d.features) : d.features;
}

std::vector<int> argmax_predictions(const Matrix& logits) {
    std::vector<int> preds(logits.rows);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const auto row = logits.row(i);
        preds[i] =
            static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return preds;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Seed-stream tags, one per independent random decision in a run.
constexpr std::uint64_t kTagRandomPositives = 0x705;
constexpr std::uint64_t kTagBatch = 0xba7c;
constexpr std::uint64_t kTagProbeHead = 0xbead;

/// Uniform batch of `size` distinct node ids, ascending.
std::vector<NodeId> draw_batch(std::size_t n, std::size_t size, Rng& rng) {
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    rng.shuffle(ids);
    ids.resize(std::min(size, n));
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct EvalSnapshot {
    double train_f1 = 0.0;
    double val_f1 = 0.0;
    double test_f1 = 0.0;
    double delta_f = 0.0;
};

EvalSnapshot evaluate(const Dataset& d, const ForwardCache& eval_cache, bool with_f1) {
    EvalSnapshot s;
    s.delta_f = feature_smoothness(d.graph, eval_cache.h);
    if (with_f1) {
        const std::vector<int> preds = argmax_predictions(eval_cache.logits);
        s.train_f1 = micro_f1(preds, d.labels, d.train);
        s.val_f1 = micro_f1(preds, d.labels, d.val);
        s.test_f1 = micro_f1(preds, d.labels, d.test);
    }
    return s;
}

/// Shared JL / URL-pretraining loop. URL skips CE and head updates entirely
/// and leaves the F1 columns at zero.
SeedOutcome train_encoder_seed(const Dataset& d, const TrainConfig& cfg, std::uint64_t seed,
                               const DependencyTable* table, bool url) {
    cfg.validate();
    const Matrix x = working_features(d, cfg);
    const double alpha_eff = url ? 1.0 : cfg.alpha;

    DependencyTable local_table;
    if (cfg.sampling == SamplingStrategy::Taps && !cfg.positives_all && table == nullptr) {
        local_table = build_dependency_table(d.graph);
        table = &local_table;
    }

    Rng pos_rng(mix_seed(seed, kTagRandomPositives));
    PositiveAssignment positives;
    if (cfg.positives_all) {
        positives = all_neighbour_positives(d.graph);
    } else if (cfg.sampling == SamplingStrategy::Taps) {
        positives = select_positives(*table, cfg.positives_x);
    } else {
        positives = random_positives(d.graph, cfg.positives_x, pos_rng);
    }

    SeedOutcome out;
    out.seed = seed;
    out.params = init_params(x.cols, cfg.hidden, d.num_classes, cfg.arch, seed);
    AdamState adam = init_adam(out.params);
    Rng batch_rng(mix_seed(seed, kTagBatch));

    double best_val = -1.0;

    // Epoch 0: the untouched initialization, evaluated in eval mode.
    {
        const auto t0 = Clock::now();
        const ForwardCache eval_cache = forward(out.params, x, 0.0, ForwardMode::Eval);
        const auto h = Representations::from(eval_cache.h);
        const auto s = Representations::from(aggregate_positives(eval_cache.h, positives));
        const double nce = infonce_loss_grad(h, s, cfg.tau, cfg.denominator).loss;
        const double ce =
            url ? 0.0 : cross_entropy_loss_grad(eval_cache.logits, d.labels, d.train).loss;
        const EvalSnapshot snap = evaluate(d, eval_cache, !url);

        EpochRecord r;
        r.epoch = 0;
        r.ce = ce;
        r.infonce = nce;
        r.loss = combine_losses(ce, nce, alpha_eff).loss;
        r.train_f1 = snap.train_f1;
        r.val_f1 = snap.val_f1;
        r.test_f1 = snap.test_f1;
        r.delta_f = snap.delta_f;
        r.ms = elapsed_ms(t0);
        out.log.append(r);
        out.delta_f_init = snap.delta_f;
        if (!url) {
            best_val = snap.val_f1;
            out.best_epoch = 0;
            out.best_val_f1 = snap.val_f1;
            out.test_f1 = snap.test_f1;
        }
    }

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = Clock::now();

        if (cfg.resample_per_epoch && !cfg.positives_all &&
            cfg.sampling == SamplingStrategy::Random) {
            positives = random_positives(d.graph, cfg.positives_x, pos_rng);
        }
        std::vector<NodeId> batch;
        if (!cfg.batch_full) batch = draw_batch(d.graph.num_nodes(), cfg.batch_size, batch_rng);

        const ForwardCache cache =
            forward(out.params, x, cfg.dropout, ForwardMode::Train, mix_seed(seed, epoch));
        const auto h = Representations::from(cache.h);
        const auto s = Representations::from(aggregate_positives(cache.h, positives));
        const InfoNceResult nce =
            infonce_loss_grad(h, s, cfg.tau, cfg.denominator, batch, batch);

        double ce_loss = 0.0;
        Matrix d_logits(cache.logits.rows, cache.logits.cols);
        if (!url) {
            CrossEntropyResult ce = cross_entropy_loss_grad(cache.logits, d.labels, d.train);
            ce_loss = ce.loss;
            d_logits = std::move(ce.d_logits);
        }
        const CombinedLoss combined = combine_losses(ce_loss, nce.loss, alpha_eff);

        Matrix d_h = nce.d_h;
        {
            const Matrix scattered = scatter_positive_grad(nce.d_s, positives);
            for (std::size_t i = 0; i < d_h.size(); ++i) {
                d_h.data[i] = combined.infonce_weight * (d_h.data[i] + scattered.data[i]);
            }
        }
        for (double& v : d_logits.data) v *= combined.ce_weight;

        const MlpGrads grads = backward(out.params, cache, d_h, d_logits, cfg.l2);
        adam_step(out.params, grads, adam, cfg.lr, /*update_head=*/!url);

        const ForwardCache eval_cache = forward(out.params, x, 0.0, ForwardMode::Eval);
        const EvalSnapshot snap = evaluate(d, eval_cache, !url);

        EpochRecord r;
        r.epoch = epoch;
        r.ce = ce_loss;
        r.infonce = nce.loss;
        r.loss = combined.loss;
        r.train_f1 = snap.train_f1;
        r.val_f1 = snap.val_f1;
        r.test_f1 = snap.test_f1;
        r.delta_f = snap.delta_f;
        r.ms = elapsed_ms(t0);
        out.log.append(r);

        if (!url && snap.val_f1 > best_val) {
            best_val = snap.val_f1;
            out.best_epoch = epoch;
            out.best_val_f1 = snap.val_f1;
            out.test_f1 = snap.test_f1;
        }
        if (!url) out.final_test_f1 = snap.test_f1;
        out.delta_f_final = snap.delta_f;
    }
    return out;
}

void probe_adam_update(std::vector<double>& p, const std::vector<double>& g,
                       std::vector<double>& m, std::vector<double>& v, std::uint64_t step,
                       double lr) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
        p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
    }
}

}  // namespace

PipelineMode pipeline_mode_from_string(const std::string& s) {
    if (s == "jl") return PipelineMode::Jl;
    if (s == "url") return PipelineMode::Url;
    throw std::invalid_argument("unknown pipeline mode '" + s + "' (expected jl or url)");
}

std::string to_string(PipelineMode m) { return m == PipelineMode::Jl ? "jl" : "url"; }

PositiveAssignment positives_for(const Dataset& d, const TrainConfig& cfg,
                                 const DependencyTable* table, std::uint64_t seed) {
    if (cfg.positives_all) return all_neighbour_positives(d.graph);
    if (cfg.sampling == SamplingStrategy::Random) {
        Rng rng(mix_seed(seed, kTagRandomPositives));
        return random_positives(d.graph, cfg.positives_x, rng);
    }
    DependencyTable local;
    if (table == nullptr) {
        local = build_dependency_table(d.graph);
        table = &local;
    }
    return select_positives(*table, cfg.positives_x);
}

SeedOutcome run_jl_seed(const Dataset& d, const TrainConfig& cfg, std::uint64_t seed,
                        const DependencyTable* table) {
    return train_encoder_seed(d, cfg, seed, table, /*url=*/false);
}

SeedOutcome run_url_seed(const Dataset& d, const TrainConfig& cfg, std::uint64_t seed,
                         const DependencyTable* table) {
    SeedOutcome out = train_encoder_seed(d, cfg, seed, table, /*url=*/true);
    SeedOutcome probe = probe_seed(d, out.params, cfg, seed);
    out.probe_log = std::move(probe.log);
    out.best_epoch = probe.best_epoch;
    out.best_val_f1 = probe.best_val_f1;
    out.test_f1 = probe.test_f1;
    out.final_test_f1 = probe.final_test_f1;
    return out;
}

SeedOutcome probe_seed(const Dataset& d, const MlpParams& encoder, const TrainConfig& cfg,
                       std::uint64_t seed) {
    cfg.validate();
    const Matrix x = working_features(d, cfg);
    const ForwardCache frozen = forward(encoder, x, 0.0, ForwardMode::Eval);
    const Matrix& h = frozen.h;
    const double delta_f = feature_smoothness(d.graph, h);
    const std::size_t dim = h.cols;
    const std::size_t classes = d.num_classes;
    const std::size_t n = h.rows;

    // Fresh Glorot-initialized linear head; the encoder stays untouched.
    Matrix w(dim, classes);
    std::vector<double> b(classes, 0.0);
    {
        Rng rng(mix_seed(seed, kTagProbeHead));
        const double limit = std::sqrt(6.0 / static_cast<double>(dim + classes));
        for (double& v : w.data) v = (2.0 * rng.uniform01() - 1.0) * limit;
    }
    std::vector<double> mw(w.size(), 0.0), vw(w.size(), 0.0);
    std::vector<double> mb(classes, 0.0), vb(classes, 0.0);
    std::uint64_t step = 0;

    const auto logits_of = [&] {
        Matrix logits(n, classes);
        for (std::size_t i = 0; i < n; ++i) {
            const auto hi = h.row(i);
            auto out_row = logits.row(i);
            for (std::size_t c = 0; c < classes; ++c) out_row[c] = b[c];
            for (std::size_t k = 0; k < dim; ++k) {
                const double hv = hi[k];
                if (hv == 0.0) continue;
                const auto wrow = w.row(k);
                for (std::size_t c = 0; c < classes; ++c) out_row[c] += hv * wrow[c];
            }
        }
        return logits;
    };

    SeedOutcome out;
    out.seed = seed;
    out.params = encoder;
    out.delta_f_init = delta_f;
    out.delta_f_final = delta_f;
    double best_val = -1.0;

    const auto record_epoch = [&](std::size_t epoch, double ce_loss, double ms,
                                  const Matrix& logits) {
        const std::vector<int> preds = argmax_predictions(logits);
        EpochRecord r;
        r.epoch = epoch;
        r.ce = ce_loss;
        r.infonce = 0.0;
        r.loss = ce_loss;
        r.train_f1 = micro_f1(preds, d.labels, d.train);
        r.val_f1 = micro_f1(preds, d.labels, d.val);
        r.test_f1 = micro_f1(preds, d.labels, d.test);
        r.delta_f = delta_f;
        r.ms = ms;
        out.log.append(r);
        if (r.val_f1 > best_val) {
            best_val = r.val_f1;
            out.best_epoch = epoch;
            out.best_val_f1 = r.val_f1;
            out.test_f1 = r.test_f1;
        }
        out.final_test_f1 = r.test_f1;
    };

    {
        const auto t0 = Clock::now();
        const Matrix logits = logits_of();
        const double ce = cross_entropy_loss_grad(logits, d.labels, d.train).loss;
        record_epoch(0, ce, elapsed_ms(t0), logits);
    }

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = Clock::now();
        const Matrix logits = logits_of();
        const CrossEntropyResult ce = cross_entropy_loss_grad(logits, d.labels, d.train);

        Matrix dw(dim, classes);
        std::vector<double> db(classes, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto hi = h.row(i);
            const auto gi = ce.d_logits.row(i);
            for (std::size_t c = 0; c < classes; ++c) db[c] += gi[c];
            for (std::size_t k = 0; k < dim; ++k) {
                const double hv = hi[k];
                if (hv == 0.0) continue;
                auto dwrow = dw.row(k);
                for (std::size_t c = 0; c < classes; ++c) dwrow[c] += hv * gi[c];
            }
        }
        for (std::size_t i = 0; i < w.size(); ++i) dw.data[i] += 2.0 * cfg.l2 * w.data[i];

        ++step;
        probe_adam_update(w.data, dw.data, mw, vw, step, cfg.lr);
        probe_adam_update(b, db, mb, vb, step, cfg.lr);

        const Matrix post = logits_of();
        record_epoch(epoch, ce.loss, elapsed_ms(t0), post);
    }
    return out;
}

namespace {

RunResult aggregate_seeds(std::vector<SeedOutcome> seeds, PipelineMode mode) {
    RunResult r;
    r.mode = mode;
    r.seeds = std::move(seeds);
    const double n = static_cast<double>(r.seeds.size());
    for (const auto& s : r.seeds) r.mean_test_f1 += s.test_f1;
    r.mean_test_f1 /= n;
    double var = 0.0;
    for (const auto& s : r.seeds) {
        const double dlt = s.test_f1 - r.mean_test_f1;
        var += dlt * dlt;
    }
    r.std_test_f1 = std::sqrt(var / n);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * r.mean_test_f1, 100.0 * r.std_test_f1);
    r.summary = buf;
    return r;
}

}  // namespace

RunResult multi_seed_run(const Dataset& d, const TrainConfig& cfg, PipelineMode mode,
                         const DependencyTable* table) {
    cfg.validate();
    DependencyTable local;
    if (cfg.sampling == SamplingStrategy::Taps && !cfg.positives_all && table == nullptr) {
        local = build_dependency_table(d.graph);
        table = &local;
    }
    std::vector<SeedOutcome> seeds;
    seeds.reserve(cfg.seeds.size());
    for (const std::uint64_t seed : cfg.seeds) {
        seeds.push_back(mode == PipelineMode::Jl ? run_jl_seed(d, cfg, seed, table)
                                                 : run_url_seed(d, cfg, seed, table));
    }
    return aggregate_seeds(std::move(seeds), mode);
}

RunResult probe_multi_seed(const Dataset& d, const MlpParams& encoder, const TrainConfig& cfg) {
    cfg.validate();
    std::vector<SeedOutcome> seeds;
    seeds.reserve(cfg.seeds.size());
    for (const std::uint64_t seed : cfg.seeds) {
        seeds.push_back(probe_seed(d, encoder, cfg, seed));
    }
    return aggregate_seeds(std::move(seeds), PipelineMode::Url);
}

std::vector<BenchmarkRow> benchmark_epoch(
    const Dataset& d, const std::vector<std::pair<std::string, TrainConfig>>& cfgs,
    const DependencyTable* table, std::size_t warmup, std::size_t timed) {
    DependencyTable local;
    bool built = false;
    std::vector<BenchmarkRow> rows;
    for (const auto& [name, cfg] : cfgs) {
        cfg.validate();
        const DependencyTable* tp = table;
        if (cfg.sampling == SamplingStrategy::Taps && !cfg.positives_all && tp == nullptr) {
            if (!built) {
                local = build_dependency_table(d.graph);
                built = true;
            }
            tp = &local;
        }
        const Matrix x = working_features(d, cfg);
        const std::uint64_t seed = cfg.seeds.front();
        const PositiveAssignment positives = positives_for(d, cfg, tp, seed);
        MlpParams params = init_params(x.cols, cfg.hidden, d.num_classes, cfg.arch, seed);
        AdamState adam = init_adam(params);

        const auto train_step = [&](std::size_t epoch) {
            const ForwardCache cache =
                forward(params, x, cfg.dropout, ForwardMode::Train, mix_seed(seed, epoch));
            const auto h = Representations::from(cache.h);
            const auto s = Representations::from(aggregate_positives(cache.h, positives));
            const InfoNceResult nce = infonce_loss_grad(h, s, cfg.tau, cfg.denominator);
            CrossEntropyResult ce = cross_entropy_loss_grad(cache.logits, d.labels, d.train);
            const CombinedLoss combined = combine_losses(ce.loss, nce.loss, cfg.alpha);
            Matrix d_h = nce.d_h;
            const Matrix scattered = scatter_positive_grad(nce.d_s, positives);
            for (std::size_t i = 0; i < d_h.size(); ++i) {
                d_h.data[i] = combined.infonce_weight * (d_h.data[i] + scattered.data[i]);
            }
            for (double& v : ce.d_logits.data) v *= combined.ce_weight;
            const MlpGrads grads = backward(params, cache, d_h, ce.d_logits, cfg.l2);
            adam_step(params, grads, adam, cfg.lr);
        };

        std::size_t epoch = 0;
        for (std::size_t i = 0; i < warmup; ++i) train_step(++epoch);
        std::vector<double> train_ms;
        train_ms.reserve(timed);
        for (std::size_t i = 0; i < timed; ++i) {
            const auto t0 = Clock::now();
            train_step(++epoch);
            train_ms.push_back(elapsed_ms(t0));
        }

        std::vector<double> infer_ms;
        infer_ms.reserve(timed);
        for (std::size_t i = 0; i < warmup; ++i) {
            (void)forward(params, x, 0.0, ForwardMode::Eval);
        }
        for (std::size_t i = 0; i < timed; ++i) {
            const auto t0 = Clock::now();
            (void)forward(params, x, 0.0, ForwardMode::Eval);
            infer_ms.push_back(elapsed_ms(t0));
        }

        rows.push_back({name, median(train_ms), median(infer_ms)});
    }
    return rows;
}

namespace {

NeighbourhoodConvention convention_from_string(const std::string& s) {
    if (s == "closed") return NeighbourhoodConvention::Closed;
    if (s == "open") return NeighbourhoodConvention::Open;
    throw std::invalid_argument("unknown convention '" + s + "' (expected closed or open)");
}

/// Loads taps.bin from the dataset directory when present, otherwise builds
/// the table with the default convention.
DependencyTable table_for_dataset(const Dataset& d, const std::filesystem::path& dir) {
    const auto file = dir / "taps.bin";
    if (std::filesystem::exists(file)) return DependencyTable::load(file);
    return build_dependency_table(d.graph);
}

nlohmann::json seed_outcome_json(const SeedOutcome& s) {
    return {{"seed", s.seed},
            {"test_f1", s.test_f1},
            {"best_epoch", s.best_epoch},
            {"best_val_f1", s.best_val_f1},
            {"final_test_f1", s.final_test_f1},
            {"delta_f_init", s.delta_f_init},
            {"delta_f_final", s.delta_f_final}};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace

int cmd_prepare(const std::filesystem::path& dataset_dir, const std::string& convention) {
    const Dataset d = load_dataset(dataset_dir);
    const NeighbourhoodConvention conv = convention_from_string(convention);

    const auto t0 = Clock::now();
    const DependencyTable table = build_dependency_table(d.graph, conv);
    const double build_ms = elapsed_ms(t0);
    table.save(dataset_dir / "taps.bin");

    double min_score = 0.0, max_score = 0.0, sum = 0.0;
    bool first = true;
    for (NodeId i = 0; i < table.num_nodes(); ++i) {
        for (const double v : table.scores(i)) {
            if (first) {
                min_score = max_score = v;
                first = false;
            }
            min_score = std::min(min_score, v);
            max_score = std::max(max_score, v);
            sum += v;
        }
    }
    const std::size_t entries = table.num_entries();
    std::vector<std::size_t> histogram(10, 0);
    const double width = max_score > 0.0 ? max_score / 10.0 : 1.0;
    for (NodeId i = 0; i < table.num_nodes(); ++i) {
        for (const double v : table.scores(i)) {
            const auto bucket = std::min<std::size_t>(9, static_cast<std::size_t>(v / width));
            ++histogram[bucket];
        }
    }

    nlohmann::json report = {
        {"convention", convention},
        {"num_nodes", table.num_nodes()},
        {"num_entries", entries},
        {"build_ms", build_ms},
        {"scores",
         {{"min", min_score},
          {"max", max_score},
          {"mean", entries == 0 ? 0.0 : sum / static_cast<double>(entries)},
          {"bucket_width", width},
          {"histogram", histogram}}}};
    write_json(report, dataset_dir / "taps_report.json");

    std::cout << "prepared " << (dataset_dir / "taps.bin").string() << ": " << table.num_nodes()
              << " nodes, " << entries << " entries, build " << build_ms << " ms\n";
    return 0;
}

int cmd_train(const std::string& mode_str, const std::filesystem::path& dataset_dir,
              const std::filesystem::path& config_path, const std::filesystem::path& out_dir) {
    const PipelineMode mode = pipeline_mode_from_string(mode_str);
    const Dataset d = load_dataset(dataset_dir);
    const TrainConfig cfg = load_train_config(config_path);

    DependencyTable table;
    const DependencyTable* tp = nullptr;
    if (cfg.sampling == SamplingStrategy::Taps && !cfg.positives_all) {
        table = table_for_dataset(d, dataset_dir);
        tp = &table;
    }

    const RunResult result = multi_seed_run(d, cfg, mode, tp);

    std::filesystem::create_directories(out_dir);
    nlohmann::json seeds_json = nlohmann::json::array();
    for (const auto& s : result.seeds) {
        const auto seed_dir = out_dir / ("seed_" + std::to_string(s.seed));
        std::filesystem::create_directories(seed_dir);
        s.log.save_json(seed_dir / "metrics.json");
        s.log.save_csv(seed_dir / "metrics.csv");
        save_checkpoint(s.params, seed_dir / "checkpoint.json");
        if (mode == PipelineMode::Url) {
            s.probe_log.save_json(seed_dir / "probe_metrics.json");
            s.probe_log.save_csv(seed_dir / "probe_metrics.csv");
        }
        nlohmann::json sj = seed_outcome_json(s);
        sj["checkpoint"] = ("seed_" + std::to_string(s.seed)) + "/checkpoint.json";
        seeds_json.push_back(std::move(sj));
    }

    nlohmann::json result_json = {{"mode", to_string(mode)},
                                  {"mean_test_f1", result.mean_test_f1},
                                  {"std_test_f1", result.std_test_f1},
                                  {"summary", result.summary},
                                  {"seeds", std::move(seeds_json)},
                                  {"config", nlohmann::json::parse(to_json_text(cfg))}};
    write_json(result_json, out_dir / "result.json");

    std::cout << to_string(mode) << " test micro-F1: " << result.summary << "\n";
    return 0;
}

int cmd_probe(const std::filesystem::path& checkpoint_path,
              const std::filesystem::path& dataset_dir, const std::filesystem::path& config_path,
              const std::filesystem::path& out_dir) {
    const MlpParams encoder = load_checkpoint(checkpoint_path);
    const Dataset d = load_dataset(dataset_dir);
    const TrainConfig cfg = load_train_config(config_path);

    const RunResult result = probe_multi_seed(d, encoder, cfg);

    std::filesystem::create_directories(out_dir);
    nlohmann::json seeds_json = nlohmann::json::array();
    for (const auto& s : result.seeds) seeds_json.push_back(seed_outcome_json(s));
    nlohmann::json result_json = {{"mode", "probe"},
                                  {"checkpoint", checkpoint_path.string()},
                                  {"mean_test_f1", result.mean_test_f1},
                                  {"std_test_f1", result.std_test_f1},
                                  {"summary", result.summary},
                                  {"seeds", std::move(seeds_json)},
                                  {"config", nlohmann::json::parse(to_json_text(cfg))}};
    write_json(result_json, out_dir / "result.json");

    std::cout << "probe test micro-F1: " << result.summary << "\n";
    return 0;
}

int cmd_partition(const std::filesystem::path& dataset_dir) {
    const Dataset d = load_dataset(dataset_dir);
    const DependencyTable table = table_for_dataset(d, dataset_dir);
    const Partition partition = taps_partition(table);
    const PartitionStats stats = partition_stats(partition, d.labels);

    {
        std::ofstream out(dataset_dir / "partition.csv");
        if (!out) throw std::runtime_error("cannot write partition.csv");
        out << "node,component\n";
        for (NodeId i = 0; i < partition.component_of.size(); ++i) {
            out << i << ',' << partition.component_of[i] << '\n';
        }
    }

    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [size, count] : stats.size_histogram) {
        hist[std::to_string(size)] = count;
    }
    nlohmann::json stats_json = {{"num_nodes", partition.component_of.size()},
                                 {"num_components", partition.num_components()},
                                 {"size_histogram", std::move(hist)},
                                 {"mean_purity", stats.mean_purity},
                                 {"component_purity", stats.component_purity}};
    write_json(stats_json, dataset_dir / "stats.json");

    static const char* kPalette[] = {"#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231",
                                     "#911eb4", "#46f0f0", "#f032e6", "#bcf60c", "#fabebe"};
    std::ofstream dot(dataset_dir / "subgraphs.dot");
    if (!dot) throw std::runtime_error("cannot write subgraphs.dot");
    dot << "graph taps_partition {\n  node [style=filled];\n";
    for (std::size_t c = 0; c < partition.members.size(); ++c) {
        dot << "  subgraph cluster_" << c << " {\n";
        for (const NodeId i : partition.members[c]) {
            dot << "    " << i << " [fillcolor=\"" << kPalette[d.labels[i] % 10] << "\"];\n";
        }
        dot << "  }\n";
    }
    std::set<std::pair<NodeId, NodeId>> emitted;
    for (NodeId i = 0; i < table.num_nodes(); ++i) {
        const auto ranked = table.ranked_neighbours(i);
        if (ranked.empty()) continue;
        const NodeId j = ranked.front();
        const auto edge = std::minmax(i, j);
        if (emitted.insert({edge.first, edge.second}).second) {
            dot << "  " << edge.first << " -- " << edge.second << ";\n";
        }
    }
    dot << "}\n";

    std::cout << "partition: " << partition.num_components() << " components, mean purity "
              << stats.mean_purity << "\n";
    return 0;
}

int cmd_bench(const std::filesystem::path& dataset_dir, const std::filesystem::path& configs_path,
              const std::filesystem::path& out_csv) {
    const Dataset d = load_dataset(dataset_dir);

    std::ifstream in(configs_path);
    if (!in) throw std::runtime_error("cannot read config list " + configs_path.string());
    const nlohmann::json list = nlohmann::json::parse(in);
    if (!list.is_array() || list.empty()) {
        throw std::runtime_error("config list must be a nonempty JSON array");
    }
    std::vector<std::pair<std::string, TrainConfig>> cfgs;
    bool needs_table = false;
    for (const auto& entry : list) {
        const std::string name = entry.at("name").get<std::string>();
        TrainConfig cfg = train_config_from_json_text(entry.at("config").dump());
        if (cfg.sampling == SamplingStrategy::Taps && !cfg.positives_all) needs_table = true;
        cfgs.emplace_back(name, std::move(cfg));
    }

    DependencyTable table;
    const DependencyTable* tp = nullptr;
    if (needs_table) {
        const auto t0 = Clock::now();
        table = table_for_dataset(d, dataset_dir);
        std::cout << "dependency table ready in " << elapsed_ms(t0)
                  << " ms (excluded from epoch timings)\n";
        tp = &table;
    }

    const auto rows = benchmark_epoch(d, cfgs, tp);

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv.string());
    out << "config,train_epoch_ms,inference_ms\n";
    for (const auto& row : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f", row.train_epoch_ms, row.inference_ms);
        out << row.name << ',' << buf << '\n';
        std::cout << row.name << ": train " << row.train_epoch_ms << " ms, inference "
                  << row.inference_ms << " ms\n";
    }
    return 0;
}

int cmd_gen_sbm(const SbmConfig& cfg, const std::filesystem::path& out_dir) {
    const Dataset d = generate_sbm(cfg);
    std::filesystem::create_directories(out_dir);
    save_dataset(d, out_dir);
    std::cout << "wrote " << out_dir.string() << ": " << d.graph.num_nodes() << " nodes, "
              << d.graph.num_undirected_edges() << " edges, mean degree " << d.graph.mean_degree()
              << "\n";
    return 0;
}

}  // namespace n2n
