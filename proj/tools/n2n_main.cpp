// Command-line frontend: dataset preparation, JL/URL training, linear
// probing, dependency-partition inspection, epoch benchmarking and synthetic
// dataset generation.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "n2n/pipeline.hpp"
#include "n2n/sbm.hpp"

int main(int argc, char** argv) {
    CLI::App app{"node-to-neighbourhood contrastive representation learning"};
    app.require_subcommand(1);

    std::string dataset_dir;
    std::string convention = "closed";
    auto* prepare = app.add_subcommand("prepare", "build the structural dependency table");
    prepare->add_option("dataset-dir", dataset_dir, "dataset directory")->required();
    prepare->add_option("--convention", convention, "neighbourhood convention: closed|open")
        ->check(CLI::IsMember({"closed", "open"}));

    std::string train_mode;
    std::string train_dataset, train_config, train_out;
    auto* train = app.add_subcommand("train", "run the JL or URL training pipeline");
    train->add_option("--mode", train_mode, "jl|url")
        ->required()
        ->check(CLI::IsMember({"jl", "url"}));
    train->add_option("--dataset", train_dataset, "dataset directory")->required();
    train->add_option("--config", train_config, "training config JSON")->required();
    train->add_option("--out", train_out, "output directory")->required();

    std::string probe_checkpoint, probe_dataset, probe_config, probe_out = ".";
    auto* probe = app.add_subcommand("probe", "linear probe of a saved encoder");
    probe->add_option("--checkpoint", probe_checkpoint, "encoder checkpoint file")->required();
    probe->add_option("--dataset", probe_dataset, "dataset directory")->required();
    probe->add_option("--config", probe_config, "probe config JSON")->required();
    probe->add_option("--out", probe_out, "output directory (default: current)");

    std::string partition_dataset;
    auto* partition = app.add_subcommand("partition", "top-1 dependency partition statistics");
    partition->add_option("--dataset", partition_dataset, "dataset directory")->required();

    std::string bench_dataset, bench_configs, bench_out = "timings.csv";
    auto* bench = app.add_subcommand("bench", "median per-epoch timings for a config list");
    bench->add_option("--dataset", bench_dataset, "dataset directory")->required();
    bench->add_option("--configs", bench_configs, "JSON array of {name, config}")->required();
    bench->add_option("--out", bench_out, "output CSV (default: timings.csv)");

    n2n::SbmConfig sbm;
    std::string sbm_out;
    auto* gen = app.add_subcommand("gen-sbm", "generate a stochastic block model dataset");
    gen->add_option("--out", sbm_out, "output dataset directory")->required();
    gen->add_option("--n", sbm.n_nodes, "number of nodes");
    gen->add_option("--blocks", sbm.n_blocks, "number of blocks (= classes)");
    gen->add_option("--p-in", sbm.p_in, "intra-block edge probability");
    gen->add_option("--p-out", sbm.p_out, "inter-block edge probability");
    gen->add_option("--dim", sbm.feature_dim, "feature dimensionality");
    gen->add_option("--mean-sep", sbm.mean_separation, "distance between block feature means");
    gen->add_option("--noise", sbm.noise_sigma, "feature noise standard deviation");
    gen->add_option("--seed", sbm.seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) return n2n::cmd_prepare(dataset_dir, convention);
        if (train->parsed()) {
            return n2n::cmd_train(train_mode, train_dataset, train_config, train_out);
        }
        if (probe->parsed()) {
            return n2n::cmd_probe(probe_checkpoint, probe_dataset, probe_config, probe_out);
        }
        if (partition->parsed()) return n2n::cmd_partition(partition_dataset);
        if (bench->parsed()) return n2n::cmd_bench(bench_dataset, bench_configs, bench_out);
        if (gen->parsed()) return n2n::cmd_gen_sbm(sbm, sbm_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
