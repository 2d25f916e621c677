#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groklab/checks.hpp"
#include "groklab/energy.hpp"
#include "groklab/train.hpp"

namespace groklab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroupSpec {
    enum Kind { Cyclic, Product, Dihedral, File } kind = Kind::Cyclic;
    int M = 71;
    std::vector<int> orders;   // product factors
    int n = 3;                 // dihedral
    std::string path;          // cayley file
    std::string catalog_path;  // optional irrep sidecar
};

struct ExperimentConfig {
    GroupSpec group;

    double p = 0.4;
    std::uint64_t split_seed = 0;
    SplitMode split_mode = SplitMode::FixedCount;
    Centering centering = Centering::ExactProjection;

    int width = 512;
    int depth = 1;
    ActFun act;
    bool residual = false;
    double init_scale = 1.0;

    TrainConfig train;

    // ascend
    int ascend_seeds = 64;
    AscendConfig ascend;
    std::vector<int> suppressed;          // modulated-energy irrep ids
    std::optional<int> single_target;     // weighted single-target task
    std::vector<double> target_weights;
    bool with_flatness = true;

    // scan
    std::vector<int> scan_orders = {11, 17, 23, 31};
    std::vector<double> scan_ps = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int scan_seeds = 5;
    double scan_threshold = 0.99;

    std::string out_dir = "runs";
    std::string tag = "run";
    std::string run_dir;  // when set, used verbatim instead of out/<stamp>-<tag>
    int workers = 0;      // 0 = hardware concurrency
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// --set key=value overrides using dotted keys, e.g. train.lr=0.001.
void apply_override(std::string& json_text, const std::string& keyval);
std::string config_to_json(const ExperimentConfig& cfg);

Group build_group(const GroupSpec& spec);
std::optional<IrrepCatalog> build_catalog(const GroupSpec& spec, const Group& g);
std::string group_desc(const GroupSpec& spec);

struct TrainOutcome {
    std::string dir;
    RunLog log;
    long delay = -1;
};

// Writes manifest.json, dataset.json, runlog.csv, summary.json, weights.bin.
TrainOutcome run_train(const ExperimentConfig& cfg);

struct BoundaryCell {
    std::string label;
    int M = 0;
    double p = 0;
    int seed = 0;
    double train_acc = 0, test_acc = 0;
    long delay = -1;
    bool converged = false;  // train accuracy reached the threshold in budget
};

struct ScanOutcome {
    std::string dir;
    std::vector<BoundaryCell> cells;
    std::vector<std::pair<int, double>> pstar;  // NaN rows excluded
    double fit_c = 0, fit_residual = 0;
    int nonconverged = 0;
    std::string table_csv;
};

// One cell per (M, p, seed); cells run on a worker pool with per-cell seeds,
// merged in deterministic order.
ScanOutcome run_scan(const ExperimentConfig& cfg);

struct AscendOutcome {
    std::string dir;
    std::vector<AscentResult> results;
    std::string catalog_csv;
};

AscendOutcome run_ascend(const ExperimentConfig& cfg);

// Named verification suites; "all" runs every registered suite.
std::vector<std::string> verify_suite_names();
std::vector<VerifyReport> run_verify(const std::string& suite, std::uint64_t seed, int workers = 0);

// weights.bin: little-endian [u32 rank][u32 dims...][f64 row-major data] per
// matrix, hidden layers then the output layer.
void write_weights(const std::string& path, const ModelState& m);
std::vector<Mat> read_weights(const std::string& path);

}  // namespace groklab
