#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <random>

#include "exsis/baselines.hpp"
#include "exsis/bounds.hpp"
#include "exsis/coherence.hpp"
#include "exsis/experiments.hpp"
#include "exsis/ingest_text.hpp"
#include "exsis/matrix_io.hpp"
#include "exsis/rng.hpp"
#include "exsis/screening.hpp"
#include "exsis/synth.hpp"

// Exit codes: 0 success, 1 usage, 2 data/IO error, 3 infeasible bound or
// precondition failure. Failure reasons go to stderr as JSON.

namespace {

using json = nlohmann::json;
using namespace exsis;

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    std::uint64_t value;
    if (seed) {
        value = *seed;
    } else {
        std::random_device rd;
        value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::cerr << "seed: " << value << "\n";
    return value;
}

DesignMatrix load_design(const std::filesystem::path& path) {
    // File matrices are re-normalized when their columns drift off unit
    // norm; a zero column is a data error.
    return DesignMatrix::from_unit_columns(load_matrix(path));
}

int run_screen(const std::string& matrix_file, const std::string& response_file,
               std::optional<Index> d_flag, const std::string& d_rule, bool as_json) {
    const DesignMatrix X = load_design(matrix_file);
    const Vector y = load_vector(response_file);
    Index d;
    if (d_flag) {
        d = *d_flag;
    } else {
        DRule rule = DRule::two_n;
        if (d_rule == "n-over-logp") rule = DRule::n_over_logp;
        else if (d_rule == "sqrt-n") rule = DRule::sqrt_n;
        else if (d_rule != "two-n") throw std::invalid_argument("unknown --d-rule " + d_rule);
        d = resolve_d(rule, X.n(), X.p(), 0);
    }
    const Vector w = marginal_correlations(X, y);
    const ScreeningOutcome outcome = screen_top_d(w, d);
    for (Index i : outcome.selected) std::cout << (i + 1) << "\n";  // 1-based in files
    json summary{{"d", outcome.d},
                 {"threshold_value", outcome.threshold_value},
                 {"tie_broken", outcome.tie_broken}};
    (as_json ? std::cout : std::cerr) << summary.dump() << "\n";
    return 0;
}

int run_coherence(const std::string& matrix_file, double c_mu, bool as_json) {
    const DesignMatrix X = load_design(matrix_file);
    const CoherenceReport report = coherence_report(X);
    const CoherencePropertyVerdict verdict = coherence_property_check(report, X.n(), X.p(), c_mu);
    if (as_json) {
        json out{{"mu", report.mu},
                 {"nu", report.nu},
                 {"welch", report.welch},
                 {"mu_threshold", verdict.mu_threshold},
                 {"nu_threshold", verdict.nu_threshold},
                 {"property_holds", verdict.holds},
                 {"c_mu", verdict.c_mu}};
        if (verdict.dimension_infeasible) out["reason"] = verdict.reason;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << std::left;
        std::cout << std::setw(26) << "worst-case coherence mu" << report.mu << "\n"
                  << std::setw(26) << "argmax pair (1-based)"
                  << "(" << report.argmax_pair.first + 1 << ", " << report.argmax_pair.second + 1
                  << ")\n"
                  << std::setw(26) << "average coherence nu" << report.nu << "\n"
                  << std::setw(26) << "welch lower bound" << report.welch << "\n"
                  << std::setw(26) << "mu threshold" << verdict.mu_threshold << "\n"
                  << std::setw(26) << "nu threshold" << verdict.nu_threshold << "\n"
                  << std::setw(26) << "coherence property" << (verdict.holds ? "holds" : "fails")
                  << "\n";
        if (verdict.dimension_infeasible) std::cout << "note: " << verdict.reason << "\n";
    }
    return 0;
}

void print_bound_result(const char* name, const BoundResult& result, bool as_json,
                        json& json_out) {
    if (as_json) {
        json entry;
        entry["route"] = name;
        if (result.d_min) entry["d_min"] = *result.d_min;
        else entry["infeasible_reason"] = result.infeasible_reason;
        if (result.fallback_d) entry["fallback_d"] = *result.fallback_d;
        if (result.success_probability) entry["success_probability"] = *result.success_probability;
        for (const auto& pre : result.preconditions)
            entry["preconditions"].push_back(
                {{"name", pre.name}, {"holds", pre.holds}, {"lhs", pre.lhs}, {"rhs", pre.rhs}});
        for (const auto& w : result.warnings) entry["warnings"].push_back(w);
        json_out["routes"].push_back(entry);
        return;
    }
    std::cout << std::left << std::setw(14) << name;
    if (result.d_min) std::cout << "d_min = " << *result.d_min;
    else std::cout << "infeasible (" << result.infeasible_reason << ")";
    if (result.fallback_d) std::cout << "  fallback d = " << *result.fallback_d;
    if (result.success_probability)
        std::cout << "  success prob >= " << *result.success_probability;
    std::cout << "\n";
    for (const auto& pre : result.preconditions)
        std::cout << "    [" << (pre.holds ? "ok" : "FAIL") << "] " << pre.name << " (" << pre.lhs
                  << " vs " << pre.rhs << ")\n";
    for (const auto& w : result.warnings) std::cout << "    warning: " << w << "\n";
}

int run_bounds(const BoundInput& input, const std::string& rule, bool as_json) {
    json json_out;
    bool any_feasible = false;
    bool any_requested = false;

    auto handle = [&](const char* name, auto&& fn) {
        if (rule != "all" && rule != name) return;
        any_requested = true;
        const BoundResult result = fn();
        any_feasible = any_feasible || result.feasible();
        print_bound_result(name, result, as_json, json_out);
    };

    if (rule == "n-over-logp") {
        std::cout << d_simple_n_over_logp(input.n, input.p) << "\n";
        return 0;
    }
    if (rule == "sqrt-n") {
        std::cout << static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(input.n)))) << "\n";
        return 0;
    }

    handle("general", [&] { return d_general(input); });
    handle("subgaussian", [&] { return d_subgaussian(input); });
    handle("mu", [&] { return d_mu_route(input); });
    handle("coherence", [&] { return d_coherence_route(input); });
    if (!any_requested) throw std::invalid_argument("unknown --rule " + rule);
    if (as_json) std::cout << json_out.dump(2) << "\n";
    if (!any_feasible) {
        std::cerr << json{{"error", "no requested route is feasible"}}.dump() << "\n";
        return 3;
    }
    return 0;
}

int run_synth(const DesignSpec& spec, const std::string& beta_kind, Index k, double a, double e,
              double sigma, std::uint64_t seed, const std::string& matrix_out,
              const std::string& response_out, const std::string& truth_out) {
    const DesignMatrix X = generate_design(spec, derive_seed(seed, 0));
    SparseModel model = beta_kind == "shifted"
                            ? generate_beta_shifted(spec.p, k, sigma, derive_seed(seed, 1))
                            : generate_beta_uniform(spec.p, k, a, e, sigma, derive_seed(seed, 1));
    const ResponseVector response = simulate_response(X, model, derive_seed(seed, 2));
    save_matrix(matrix_out, X.data());
    save_vector(response_out, response.y);
    if (!truth_out.empty()) {
        json truth;
        for (Index i : model.support) truth["support"].push_back(i + 1);  // 1-based
        for (Index i : model.support) truth["beta_values"].push_back(model.beta[i]);
        truth["sigma"] = sigma;
        truth["seed"] = seed;
        std::ofstream out(truth_out);
        if (!out) throw io_error("cannot write " + truth_out);
        out << truth.dump(2) << "\n";
    }
    return 0;
}

std::vector<Index> load_truth_support(const std::string& truth_file) {
    std::ifstream in(truth_file);
    if (!in) throw io_error("cannot open " + truth_file);
    json truth = json::parse(in);
    std::vector<Index> support;
    for (const auto& v : truth.at("support")) support.push_back(v.get<Index>() - 1);
    return support;
}

int run_lasso(const std::string& matrix_file, const std::string& response_file,
              std::optional<double> lambda_flag, Index lambda_grid, double alpha,
              const std::string& rule, const std::string& truth_file) {
    const DesignMatrix X = load_design(matrix_file);
    const Vector y = load_vector(response_file);
    std::vector<Index> support;
    if (!truth_file.empty()) support = load_truth_support(truth_file);

    const double lmax = lambda_max(X, y, alpha);
    std::vector<double> grid;
    if (lambda_flag) {
        grid.push_back(*lambda_flag);
    } else {
        for (Index g = 0; g < lambda_grid; ++g) {
            const double frac = 1.0 - static_cast<double>(g) / static_cast<double>(lambda_grid - 1) *
                                          (1.0 - 1.0 / static_cast<double>(lambda_grid));
            grid.push_back(lmax * frac);
        }
    }

    std::cout << "lambda,kept_count,active_count,kkt_residual";
    if (!support.empty()) std::cout << ",detection_rate";
    std::cout << "\n";

    Vector warm = Vector::Zero(X.p());
    Index violation_total = 0;
    for (double lambda : grid) {
        std::optional<ScreenRuleOutcome> outcome;
        if (rule == "safe") outcome = safe_filter(X, y, alpha * lambda, lmax * alpha);
        else if (rule == "strong") outcome = strong_filter(X, y, lambda, lmax, alpha);
        else if (rule != "none") throw std::invalid_argument("unknown --rule " + rule);

        const auto fit = solve_penalized_warm(X, y, PenaltySpec::elastic_net(lambda, alpha), warm);
        warm = fit.beta_hat;
        const Index kept_count = outcome ? static_cast<Index>(outcome->kept.size()) : X.p();
        if (outcome) {
            const auto violations = rule_violations(*outcome, fit.beta_hat);
            violation_total += static_cast<Index>(violations.size());
            for (Index j : violations)
                std::cerr << "rule violation: lambda=" << lambda << " discarded active index "
                          << (j + 1) << "\n";
        }
        std::cout << lambda << ',' << kept_count << ',' << fit.active_set.size() << ','
                  << fit.kkt_residual;
        if (!support.empty()) {
            std::vector<Index> kept_indices;
            if (outcome) kept_indices = outcome->kept;
            else {
                kept_indices.resize(static_cast<std::size_t>(X.p()));
                std::iota(kept_indices.begin(), kept_indices.end(), Index{0});
            }
            std::cout << ',' << detection_rate(kept_indices, support);
        }
        std::cout << "\n";
    }
    if (violation_total > 0)
        std::cerr << "rule violations total: " << violation_total << "\n";
    return 0;
}

void write_comparison_summary(const std::filesystem::path& path, const ComparisonResult& result) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << "method,lambda,median_post_screen_size,median_detection_rate\n";
    out.precision(12);
    for (const auto& row : result.rows)
        out << row.method << ',' << row.lambda << ',' << row.median_post_screen_size << ','
            << row.median_detection_rate << "\n";
}

int run_experiment(const std::string& kind, const std::string& config_file,
                   const std::string& corpus_dir, std::optional<std::uint64_t> seed_flag) {
    ExperimentConfig config = ExperimentConfig::from_json_file(config_file);
    if (seed_flag) config.master_seed = *seed_flag;
    std::cerr << "seed: " << config.master_seed << "\n";
    const std::filesystem::path out_dir =
        config.output_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(config.output_dir);
    std::filesystem::create_directories(out_dir);

    if (kind == "oracle-mms") {
        const OracleMmsResult result = run_oracle_mms(config);
        write_records_csv(out_dir / (config.name + "_records.csv"), result.records);
        std::ofstream summary(out_dir / (config.name + "_summary.csv"));
        summary << "mu_target,e,mu_achieved_median,median_mms,q1,q3,completed,failed\n";
        summary.precision(12);
        for (const auto& cell : result.cells)
            summary << cell.mu_target << ',' << cell.e << ',' << cell.mu_achieved_median << ','
                    << cell.median_mms << ',' << cell.q1 << ',' << cell.q3 << ','
                    << cell.completed << ',' << cell.failed << "\n";
        std::vector<SvgSeries> series;
        for (double e : config.e_grid) {
            SvgSeries line;
            line.label = "e=" + std::to_string(static_cast<int>(e));
            for (const auto& cell : result.cells) {
                if (cell.e != e || cell.completed == 0) continue;
                line.x.push_back(cell.mu_target);
                line.y.push_back(cell.median_mms);
            }
            series.push_back(std::move(line));
        }
        write_svg_lines(out_dir / (config.name + ".svg"), "median minimum model size vs coherence",
                        series, "target mu", "median MMS");
        for (const auto& cell : result.cells)
            std::cout << "mu=" << cell.mu_target << " e=" << cell.e
                      << " median_mms=" << cell.median_mms << " (q1=" << cell.q1
                      << ", q3=" << cell.q3 << ", n=" << cell.completed << ")\n";
        return 0;
    }
    if (kind == "compare") {
        const ComparisonResult result = run_screening_comparison(config);
        write_records_csv(out_dir / (config.name + "_records.csv"), result.records);
        write_comparison_summary(out_dir / (config.name + "_summary.csv"), result);
        std::vector<SvgSeries> size_series, det_series;
        for (const char* method : {"safe-lasso", "strong-lasso", "safe-en", "strong-en"}) {
            SvgSeries sizes{method, {}, {}}, dets{method, {}, {}};
            for (const auto& row : result.rows) {
                if (row.method != method) continue;
                sizes.x.push_back(row.lambda);
                sizes.y.push_back(row.median_post_screen_size);
                dets.x.push_back(row.lambda);
                dets.y.push_back(row.median_detection_rate);
            }
            size_series.push_back(std::move(sizes));
            det_series.push_back(std::move(dets));
        }
        write_svg_lines(out_dir / (config.name + "_size.svg"), "post-screening model size",
                        size_series, "lambda", "median size");
        write_svg_lines(out_dir / (config.name + "_detection.svg"), "detection rate", det_series,
                        "lambda", "median detection");
        for (const auto& row : result.rows)
            if (row.method == "exsis")
                std::cout << "exsis: post_screen_size=" << row.median_post_screen_size
                          << " median_detection=" << row.median_detection_rate << "\n";
        for (const auto& [method, lambda] : result.full_detection_lambda)
            std::cout << method << ": largest lambda with median detection 1.0 = " << lambda
                      << "\n";
        return 0;
    }
    if (kind == "sentiment") {
        if (corpus_dir.empty()) throw std::invalid_argument("sentiment needs --corpus DIR");
        const SentimentResult result = run_sentiment(config, corpus_dir);
        write_records_csv(out_dir / (config.name + "_records.csv"), result.records);
        std::ofstream summary(out_dir / (config.name + "_summary.csv"));
        summary << "method,train_tp_mean,train_tp_sd,test_tp_mean,test_tp_sd,fit_seconds_mean,"
                   "fit_seconds_sd\n";
        summary.precision(12);
        for (const auto& row : result.rows)
            summary << row.method << ',' << row.train_tp_mean << ',' << row.train_tp_sd << ','
                    << row.test_tp_mean << ',' << row.test_tp_sd << ',' << row.fit_seconds_mean
                    << ',' << row.fit_seconds_sd << "\n";
        std::cout << "features: " << result.feature_count << "\n";
        for (const auto& row : result.rows)
            std::cout << std::left << std::setw(20) << row.method << " train TP "
                      << row.train_tp_mean << " (" << row.train_tp_sd << ")  test TP "
                      << row.test_tp_mean << " (" << row.test_tp_sd << ")  fit seconds "
                      << row.fit_seconds_mean << " (" << row.fit_seconds_sd << ")\n";
        return 0;
    }
    throw std::invalid_argument("unknown experiment kind " + kind);
}

int run_ingest(const std::string& corpus_dir, const std::string& matrix_out,
               const std::string& labels_out, Index min_df, bool smooth) {
    const Corpus corpus = load_corpus(corpus_dir);
    TfidfOptions options;
    options.min_df = min_df;
    options.smooth = smooth;
    const TfidfMatrix tfidf = build_tfidf(corpus, options);
    save_matrix(matrix_out, tfidf.features);
    if (!labels_out.empty()) {
        std::ofstream out(labels_out);
        if (!out) throw io_error("cannot write " + labels_out);
        out << "doc_id,label\n";
        for (const auto& doc : corpus.docs) out << doc.id << ',' << doc.label << "\n";
    }
    std::cerr << "docs: " << corpus.docs.size() << " terms: " << tfidf.vocabulary.size();
    if (!tfidf.zero_rows.empty())
        std::cerr << " zero-rows: " << tfidf.zero_rows.size();
    std::cerr << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"marginal-correlation screening toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags (--seed, --json) are valid after a subcommand

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "master seed; drawn and printed when omitted");
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    // screen
    auto* screen = app.add_subcommand("screen", "top-d marginal correlation screening");
    std::string matrix_file, response_file, d_rule = "two-n";
    std::optional<Index> d_flag;
    screen->add_option("--matrix", matrix_file, "design matrix file")->required();
    screen->add_option("--response", response_file, "response vector file")->required();
    screen->add_option("--d", d_flag, "screened model size");
    screen->add_option("--d-rule", d_rule, "two-n | n-over-logp | sqrt-n");

    // coherence
    auto* coherence = app.add_subcommand("coherence", "coherence report and property check");
    std::string coherence_matrix;
    double c_mu = default_c_mu();
    coherence->add_option("--matrix", coherence_matrix, "design matrix file")->required();
    coherence->add_option("--c-mu", c_mu, "coherence property constant");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "screened-model-size calculators");
    BoundInput input;
    std::string bounds_rule = "all";
    long long bn = 0, bp = 0, bk = -1;
    double beta_min = 0, beta_l2 = 0, b_param = -1, mu_param = -1;
    bounds->add_option("--n", bn, "sample count")->required();
    bounds->add_option("--p", bp, "variable count")->required();
    bounds->add_option("--k", bk, "sparsity");
    bounds->add_option("--beta-min", beta_min, "smallest active |beta_i|");
    bounds->add_option("--beta-l2", beta_l2, "||beta||_2");
    bounds->add_option("--sigma", input.sigma, "noise level");
    bounds->add_option("--b", b_param, "screening parameter (general route)");
    bounds->add_option("--ratio", input.subgauss_ratio, "sub-Gaussian b*/sigma*");
    bounds->add_option("--mu", mu_param, "worst-case coherence");
    bounds->add_option("--c-mu", input.c_mu, "coherence property constant");
    bounds->add_option("--c1", input.c1, "corollary slack constant");
    bounds->add_option("--c2", input.c2, "corollary slack constant");
    bounds->add_option("--rule", bounds_rule,
                       "all | general | subgaussian | mu | coherence | n-over-logp | sqrt-n");

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic instance");
    DesignSpec spec;
    std::string family = "gaussian", beta_kind = "uniform";
    std::string out_matrix = "matrix.bin", out_response = "response.bin", out_truth = "truth.json";
    long long sn = 0, sp = 0, sk = 5;
    double sa = 1.0, se = 10.0, ssigma = 0.0;
    synth->add_option("--family", family, "gaussian | uniform | rademacher | equicorrelated");
    synth->add_option("--n", sn, "rows")->required();
    synth->add_option("--p", sp, "columns")->required();
    synth->add_option("--rho", spec.rho, "pairwise correlation (equicorrelated)");
    synth->add_option("--beta", beta_kind, "uniform | shifted");
    synth->add_option("--k", sk, "sparsity");
    synth->add_option("--a", sa, "uniform lower bound");
    synth->add_option("--e", se, "uniform upper bound");
    synth->add_option("--sigma", ssigma, "noise level");
    synth->add_option("--out-matrix", out_matrix, "matrix output file");
    synth->add_option("--out-response", out_response, "response output file");
    synth->add_option("--out-truth", out_truth, "truth JSON output file");

    // lasso
    auto* lasso = app.add_subcommand("lasso", "penalized path with screening rules");
    std::string lasso_matrix, lasso_response, lasso_rule = "none", truth_file;
    std::optional<double> lambda_flag;
    long long lambda_grid = 200;
    double alpha = 1.0;
    lasso->add_option("--matrix", lasso_matrix, "design matrix file")->required();
    lasso->add_option("--response", lasso_response, "response vector file")->required();
    lasso->add_option("--lambda", lambda_flag, "single penalty value");
    lasso->add_option("--lambda-grid", lambda_grid, "grid size (lambda_max down to /grid)");
    lasso->add_option("--alpha", alpha, "elastic-net mixing, 1 = lasso");
    lasso->add_option("--rule", lasso_rule, "none | safe | strong");
    lasso->add_option("--truth", truth_file, "truth JSON for detection rate");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a study from a JSON config");
    std::string experiment_kind, config_file, corpus_dir;
    experiment->add_option("kind", experiment_kind, "oracle-mms | compare | sentiment")->required();
    experiment->add_option("--config", config_file, "JSON config")->required();
    experiment->add_option("--corpus", corpus_dir, "corpus directory (sentiment)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "corpus directory to TF-IDF matrix");
    std::string ingest_dir, ingest_matrix = "tfidf.bin", ingest_labels;
    long long min_df = 5;
    bool smooth = false;
    ingest->add_option("--corpus", ingest_dir, "corpus directory")->required();
    ingest->add_option("--out-matrix", ingest_matrix, "feature matrix output");
    ingest->add_option("--out-labels", ingest_labels, "labels CSV output");
    ingest->add_option("--min-df", min_df, "minimum document frequency");
    ingest->add_flag("--smooth", smooth, "smoothed idf variant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (screen->parsed()) return run_screen(matrix_file, response_file, d_flag, d_rule, as_json);
        if (coherence->parsed()) return run_coherence(coherence_matrix, c_mu, as_json);
        if (bounds->parsed()) {
            input.n = bn;
            input.p = bp;
            if (bk >= 0) input.k = bk;
            if (beta_min > 0) input.beta_min = beta_min;
            if (beta_l2 > 0) input.beta_l2 = beta_l2;
            if (b_param >= 0) input.b = b_param;
            if (mu_param >= 0) input.mu = mu_param;
            return run_bounds(input, bounds_rule, as_json);
        }
        if (synth->parsed()) {
            if (family == "gaussian") spec.family = DesignFamily::gaussian;
            else if (family == "uniform") spec.family = DesignFamily::uniform;
            else if (family == "rademacher") spec.family = DesignFamily::rademacher;
            else if (family == "equicorrelated") spec.family = DesignFamily::equicorrelated_gaussian;
            else throw std::invalid_argument("unknown --family " + family);
            spec.n = sn;
            spec.p = sp;
            return run_synth(spec, beta_kind, sk, sa, se, ssigma, resolve_seed(seed), out_matrix,
                             out_response, out_truth);
        }
        if (lasso->parsed())
            return run_lasso(lasso_matrix, lasso_response, lambda_flag, lambda_grid, alpha,
                             lasso_rule, truth_file);
        if (experiment->parsed())
            return run_experiment(experiment_kind, config_file, corpus_dir, seed);
        if (ingest->parsed()) return run_ingest(ingest_dir, ingest_matrix, ingest_labels, min_df, smooth);
    } catch (const exsis::io_error& ex) {
        std::cerr << json{{"error", ex.what()}, {"kind", "io"}}.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << json{{"error", ex.what()}, {"kind", "precondition"}}.dump() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << json{{"error", ex.what()}, {"kind", "runtime"}}.dump() << "\n";
        return 2;
    }
    return 1;
}
