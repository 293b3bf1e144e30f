#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exsis/model_core.hpp"
#include "exsis/synth.hpp"

namespace exsis {

enum class DRule { two_n, n_over_logp, sqrt_n, explicit_d };

struct BetaGenSpec {
    enum class Kind { uniform, shifted };
    Kind kind = Kind::uniform;
    Index k = 5;
    double a = 1.0;   // uniform family only
    double e = 10.0;  // uniform family only
    double sigma = 0.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    Index trials = 100;
    std::uint64_t master_seed = 0;
    DesignSpec design;
    BetaGenSpec beta_gen;
    std::vector<double> mu_grid;  // oracle-mms targets
    std::vector<double> e_grid{2.0, 10.0};
    double mu_tolerance = 0.01;
    Index lambda_grid_size = 200;
    DRule d_rule = DRule::two_n;
    Index explicit_d = 0;
    std::string output_dir;

    // Sentiment study knobs.
    Index bins = 2;
    Index train_per_bin = 200;
    Index test_per_bin = 100;
    double correlation_drop_threshold = 0.95;
    Index cv_folds = 5;
    Index cv_grid_size = 50;
    Index min_df = 5;

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

Index resolve_d(DRule rule, Index n, Index p, Index explicit_d);

// One row per trial outcome; unused fields stay at their defaults so every
// experiment writes the same CSV schema.
struct ExperimentRecord {
    Index trial = 0;
    std::uint64_t trial_seed = 0;
    double mu_target = 0.0;
    double mu_achieved = 0.0;
    double e = 0.0;
    double lambda = 0.0;
    std::string method;
    Index mms = 0;
    double detection_rate = 0.0;
    Index post_screen_size = 0;
    double screen_seconds = 0.0;
    double solve_seconds = 0.0;
    bool complete = true;
    std::string note;
};

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records);

enum class Statistic { median, quartiles, mean_sd };

struct AggregateRow {
    Index count = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

// Order-independent reduction: records are sorted by (trial_seed, value)
// before the fold. Median of an even count is the mean of the middle two;
// quartiles interpolate linearly between closest ranks.
AggregateRow aggregate(std::vector<std::pair<std::uint64_t, double>> records, Statistic statistic);

// ---- Oracle minimum-model-size study --------------------------------------

struct OracleMmsCell {
    double mu_target = 0.0;
    double e = 0.0;
    double mu_achieved_median = 0.0;
    double median_mms = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    Index completed = 0;
    Index failed = 0;
};

struct OracleMmsResult {
    std::vector<OracleMmsCell> cells;  // mu-major, e-minor
    std::vector<ExperimentRecord> records;
};

OracleMmsResult run_oracle_mms(const ExperimentConfig& config);

// ---- Screening comparison (marginal screening vs lasso-path rules) --------

struct ComparisonRow {
    std::string method;  // exsis, safe-lasso, strong-lasso, safe-en, strong-en
    double lambda = 0.0;  // 0 for exsis
    double median_post_screen_size = 0.0;
    double median_detection_rate = 0.0;
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;
    // Per method, the largest lambda whose median detection rate is 1.0.
    std::vector<std::pair<std::string, double>> full_detection_lambda;
    std::vector<ExperimentRecord> records;
};

ComparisonResult run_screening_comparison(const ExperimentConfig& config);

// ---- Deterministic sure-screening audit ------------------------------------

// Counts synthetic trials whose exact screening-condition statistics,
// noise event and MSR margin all hold, and how many of those kept the whole
// support inside the screened model at the guaranteed d.
struct Theorem1Audit {
    Index trials = 0;
    Index qualifying = 0;
    Index successes = 0;  // support fully retained among qualifying trials
};

struct Theorem1AuditConfig {
    Index trials = 600;
    Index n = 500;
    Index p = 2000;
    Index k = 5;
    double beta_value = 10.0;
    std::vector<double> sigmas{0.0, 0.1};
    std::uint64_t master_seed = 20240901;
};

Theorem1Audit run_theorem1_audit(const Theorem1AuditConfig& config);

// ---- Sentiment study --------------------------------------------------------

struct SentimentRow {
    std::string method;  // lasso, exsis-lasso, elastic-net, exsis-elastic-net
    double train_tp_mean = 0.0;
    double train_tp_sd = 0.0;
    double test_tp_mean = 0.0;
    double test_tp_sd = 0.0;
    double fit_seconds_mean = 0.0;
    double fit_seconds_sd = 0.0;
};

struct SentimentResult {
    std::vector<SentimentRow> rows;
    std::vector<ExperimentRecord> records;  // one per (bin, method)
    Index feature_count = 0;                // columns before screening
};

SentimentResult run_sentiment(const ExperimentConfig& config,
                              const std::filesystem::path& corpus_dir);

// ---- Plot output ------------------------------------------------------------

// Minimal SVG line chart: one polyline per series over a shared x grid.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::vector<SvgSeries>& series, const std::string& x_label,
                     const std::string& y_label);

}  // namespace exsis
