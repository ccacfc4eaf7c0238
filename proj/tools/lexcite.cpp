#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lexcite/pipeline.hpp"

namespace {

std::vector<int> parse_kernel_list(const std::string& text) {
    std::vector<int> kernels;
    std::string current;
    for (char c : text) {
        if (c == ',' || c == '+' || c == ' ') {
            if (!current.empty()) {
                kernels.push_back(std::stoi(current));
                current.clear();
            }
        } else {
            current += c;
        }
    }
    if (!current.empty()) kernels.push_back(std::stoi(current));
    if (kernels.empty()) throw std::runtime_error("kernel list '" + text + "' is empty");
    return kernels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"legal citation-treatment classification pipeline"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, data_dir, corpus_path, out_dir;
    std::string kernels_text, init_text, mode_text, weights_text, input_path;
    std::uint64_t seed = 42;
    double sigma = 0.0;
    int reps = 0, warmup = 0;

    auto* config_opt = app.add_option("--config", config_path, "JSON run configuration file");
    auto* data_opt = app.add_option("--data-dir", data_dir, "data root (default $LEXCITE_DATA_DIR or data)");
    auto* corpus_opt = app.add_option("--corpus", corpus_path, "corpus CSV path");
    auto* out_opt = app.add_option("--out", out_dir, "output directory root");
    auto* seed_opt = app.add_option("--seed", seed, "seed for split, embeddings and model");
    auto* kernels_opt = app.add_option("--kernels", kernels_text, "kernel sizes, e.g. 2,3,5");
    auto* init_opt = app.add_option("--embedding-init", init_text, "embedding initialization")
                         ->check(CLI::IsMember({"pretrained", "random"}));
    auto* mode_opt = app.add_option("--mode", mode_text, "token normalization mode")
                         ->check(CLI::IsMember({"stemmed", "lemmatized"}));
    auto* weights_opt = app.add_option("--class-weights", weights_text, "loss class weighting")
                            ->check(CLI::IsMember({"none", "inverse-frequency"}));
    auto* sigma_opt = app.add_option("--sigma", sigma, "noise stddev for the robustness check");
    auto* reps_opt = app.add_option("--reps", reps, "benchmark repetitions");
    auto* warmup_opt = app.add_option("--warmup", warmup, "benchmark warmup iterations");

    CLI::App* prepare = app.add_subcommand("prepare", "split the corpus and cache tokens");
    CLI::App* train_embeddings =
        app.add_subcommand("train-embeddings", "train subword embeddings on the training split");
    CLI::App* train = app.add_subcommand("train", "train the convolutional classifier");
    CLI::App* evaluate = app.add_subcommand("evaluate", "score the model on the test split");
    CLI::App* ablate = app.add_subcommand("ablate", "sweep kernel-size configurations");
    CLI::App* bench = app.add_subcommand("bench", "measure single-document inference latency");
    CLI::App* classify = app.add_subcommand("classify", "classify documents, one per line");
    classify->add_option("--input", input_path, "document file (default: standard input)");

    CLI11_PARSE(app, argc, argv);

    try {
        lexcite::RunConfig cfg = lexcite::load_run_config(config_path);
        if (data_opt->count()) {
            cfg.data_dir = data_dir;
            cfg.corpus_csv.clear();
            cfg.finalize();
        }
        if (corpus_opt->count()) cfg.corpus_csv = corpus_path;
        if (out_opt->count()) cfg.out_dir = out_dir;
        if (seed_opt->count()) {
            cfg.split.seed = seed;
            cfg.model.seed = seed;
            cfg.embed_seed = seed;
        }
        if (kernels_opt->count()) cfg.model.kernels = parse_kernel_list(kernels_text);
        if (init_opt->count()) cfg.model.init = lexcite::embedding_init_from_string(init_text);
        if (mode_opt->count()) {
            cfg.mode = lexcite::prep_mode_from_string(mode_text);
            cfg.model.prep_mode = cfg.mode;
        }
        if (weights_opt->count()) cfg.class_weighting = weights_text;
        if (sigma_opt->count()) cfg.sigma = sigma;
        if (reps_opt->count()) cfg.reps = reps;
        if (warmup_opt->count()) cfg.warmup = warmup;
        (void)config_opt;

        if (prepare->parsed()) {
            lexcite::cmd_prepare(cfg, std::cout);
        } else if (train_embeddings->parsed()) {
            lexcite::cmd_train_embeddings(cfg, std::cout);
        } else if (train->parsed()) {
            lexcite::cmd_train(cfg, std::cout);
        } else if (evaluate->parsed()) {
            lexcite::cmd_evaluate(cfg, std::cout);
        } else if (ablate->parsed()) {
            lexcite::cmd_ablate(cfg, std::cout);
        } else if (bench->parsed()) {
            lexcite::cmd_bench(cfg, std::cout);
        } else if (classify->parsed()) {
            if (input_path.empty()) {
                lexcite::cmd_classify(cfg, std::cin, std::cout);
            } else {
                std::ifstream in(input_path);
                if (!in) throw std::runtime_error("cannot open '" + input_path + "' for reading");
                lexcite::cmd_classify(cfg, in, std::cout);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
