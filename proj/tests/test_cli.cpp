#include <sys/stat.h>
#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthetic.hpp"

namespace {

const std::string kBin = LEXCITE_BIN;
const std::string kWork = "cliwork";

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    std::string cmd = "\"" + kBin + "\" " + args + " > " + kWork + "/stdout.txt 2> " +
                      kWork + "/stderr.txt";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(kWork + "/stdout.txt");
    r.err = slurp(kWork + "/stderr.txt");
    return r;
}

bool exists(const std::string& path) {
    struct stat st{};
    return ::stat(path.c_str(), &st) == 0;
}

int line_count(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

std::string config_json() {
    std::ostringstream ss;
    ss << "{\n"
       << "  \"corpus_csv\": \"" << kWork << "/corpus.csv\",\n"
       << "  \"out_dir\": \"" << kWork << "/out\",\n"
       << "  \"mode\": \"lemmatized\",\n"
       << "  \"embeddings\": {\"dimension\": 16, \"window\": 3, \"min_frequency\": 2,\n"
       << "    \"ngram_min\": 3, \"ngram_max\": 4, \"buckets\": 2000, \"negatives\": 3,\n"
       << "    \"epochs\": 2, \"step_size\": 0.05, \"seed\": 42},\n"
       << "  \"model\": {\"kernels\": [2, 3], \"filters\": 8, \"dropout\": 0.3,\n"
       << "    \"sequence_length\": 40, \"batch_size\": 16, \"max_epochs\": 2,\n"
       << "    \"patience\": 3, \"seed\": 42, \"init\": \"pretrained\"},\n"
       << "  \"sigma\": 0.05,\n"
       << "  \"reps\": 5,\n"
       << "  \"warmup\": 1\n"
       << "}\n";
    return ss.str();
}

}  // namespace

TEST_CASE("workspace setup") {
    int rc = std::system(("rm -rf " + kWork).c_str());
    REQUIRE(rc == 0);
    REQUIRE(::mkdir(kWork.c_str(), 0755) == 0);

    synthetic::Spec spec;
    spec.docs_per_class = 40;
    synthetic::Corpus corpus = synthetic::make(spec);
    synthetic::write_csv(corpus, kWork + "/corpus.csv");
    REQUIRE(exists(kWork + "/corpus.csv"));

    std::ofstream cfg(kWork + "/config.json");
    cfg << config_json();
    REQUIRE(cfg.good());
}

TEST_CASE("running without a subcommand fails, help succeeds") {
    CHECK(run("").exit_code != 0);
    RunResult help = run("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("prepare") != std::string::npos);
    CHECK(help.out.find("train") != std::string::npos);
    CHECK(help.out.find("classify") != std::string::npos);
}

TEST_CASE("prepare writes manifests, labels and both token caches") {
    RunResult r = run("prepare --config " + kWork + "/config.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("documents=120") != std::string::npos);

    const std::string prep = kWork + "/out/prepare";
    REQUIRE(exists(prep + "/train.ids"));
    REQUIRE(exists(prep + "/val.ids"));
    REQUIRE(exists(prep + "/test.ids"));
    REQUIRE(exists(prep + "/labels.txt"));
    REQUIRE(exists(prep + "/doc_labels.tsv"));
    REQUIRE(exists(prep + "/tokens_stemmed.tsv"));
    REQUIRE(exists(prep + "/tokens_lemmatized.tsv"));
    REQUIRE(exists(prep + "/resolved_config.json"));

    CHECK(slurp(prep + "/labels.txt") == "affirmed\ndistinguished\noverruled\n");
    // 40 per class: 10 to test, 3 of the remaining 30 to validation
    CHECK(line_count(slurp(prep + "/train.ids")) == 81);
    CHECK(line_count(slurp(prep + "/val.ids")) == 9);
    CHECK(line_count(slurp(prep + "/test.ids")) == 30);
    CHECK(line_count(slurp(prep + "/doc_labels.tsv")) == 120);
}

TEST_CASE("a second prepare run reproduces the split byte for byte") {
    const std::string prep = kWork + "/out/prepare";
    std::string train_before = slurp(prep + "/train.ids");
    std::string val_before = slurp(prep + "/val.ids");
    std::string test_before = slurp(prep + "/test.ids");

    RunResult r = run("prepare --config " + kWork + "/config.json");
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(prep + "/train.ids") == train_before);
    CHECK(slurp(prep + "/val.ids") == val_before);
    CHECK(slurp(prep + "/test.ids") == test_before);
}

TEST_CASE("a missing corpus is reported on stderr with its path") {
    RunResult r = run("prepare --corpus " + kWork + "/absent.csv --out " + kWork + "/out2");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("absent.csv") != std::string::npos);
}

TEST_CASE("embedding training reports its pair budget and writes the table") {
    RunResult r = run("train-embeddings --config " + kWork + "/config.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("vocab=") != std::string::npos);
    CHECK(r.out.find("pairs_per_epoch=") != std::string::npos);
    REQUIRE(exists(kWork + "/out/embeddings/embeddings.bin"));
}

TEST_CASE("classifier training writes the model and its history") {
    RunResult r = run("train --config " + kWork + "/config.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("best_epoch=") != std::string::npos);
    REQUIRE(exists(kWork + "/out/train/model.bin"));
    REQUIRE(exists(kWork + "/out/train/history.csv"));
    std::string hist = slurp(kWork + "/out/train/history.csv");
    CHECK(hist.rfind("epoch,train_loss,train_acc,val_loss,val_acc,seconds", 0) == 0);
    CHECK(line_count(hist) == 3);  // header plus two epochs
}

TEST_CASE("evaluation emits fixed-precision summary lines and artifacts") {
    RunResult r = run("evaluate --config " + kWork + "/config.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("accuracy=0.") != std::string::npos);
    CHECK(r.out.find("macro_f1=") != std::string::npos);
    CHECK(r.out.find("macro_auc=") != std::string::npos);
    CHECK(r.out.find("noise_sigma=0.0500") != std::string::npos);

    // four decimal places after the point
    std::size_t pos = r.out.find("accuracy=");
    std::string digits = r.out.substr(pos + 9);
    std::size_t dot = digits.find('.');
    REQUIRE(dot != std::string::npos);
    int count = 0;
    for (std::size_t i = dot + 1; i < digits.size() && isdigit(static_cast<unsigned char>(digits[i])); ++i)
        ++count;
    CHECK(count == 4);

    REQUIRE(exists(kWork + "/out/evaluate/metrics.txt"));
    REQUIRE(exists(kWork + "/out/evaluate/confusion.csv"));
    REQUIRE(exists(kWork + "/out/evaluate/noise.txt"));
    std::string metrics = slurp(kWork + "/out/evaluate/metrics.txt");
    CHECK(metrics.find("accuracy=") != std::string::npos);
    CHECK(metrics.find("macro_auc=") != std::string::npos);
}

TEST_CASE("classification labels each input line with probabilities") {
    {
        std::ofstream in(kWork + "/to_classify.txt");
        in << "The court cited Smith v. Jones and affirmed the judgment below.\n";
        in << "\n";  // blank lines are skipped
        in << "This precedent was overruled kovar rilden mazot in later cases.\n";
    }
    RunResult r = run("classify --config " + kWork + "/config.json --input " + kWork +
                      "/to_classify.txt");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        std::vector<std::string> fields;
        std::istringstream fs(line);
        std::string field;
        while (std::getline(fs, field, '\t')) fields.push_back(field);
        REQUIRE(fields.size() == 4);  // label + one probability per class
        CHECK((fields[0] == "affirmed" || fields[0] == "distinguished" ||
               fields[0] == "overruled"));
        double total = 0.0;
        for (int i = 1; i < 4; ++i) total += std::stod(fields[static_cast<std::size_t>(i)]);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(rows == 2);
}

TEST_CASE("latency benchmarking writes its table") {
    RunResult r = run("bench --config " + kWork + "/config.json");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("samples=") != std::string::npos);
    REQUIRE(exists(kWork + "/out/bench/bench.csv"));
    std::string bench = slurp(kWork + "/out/bench/bench.csv");
    CHECK(bench.rfind("metric,value", 0) == 0);
    CHECK(bench.find("p95_ms,") != std::string::npos);
}

TEST_CASE("unknown flags and subcommands fail cleanly") {
    CHECK(run("prepare --no-such-flag").exit_code != 0);
    CHECK(run("frobnicate").exit_code != 0);
    RunResult r = run("evaluate --config " + kWork + "/missing_config.json");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error") != std::string::npos);
}
