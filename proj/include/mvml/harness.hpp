/**
 * harness.hpp — seeded Monte Carlo experiment runner.
 *
 * Five experiments, each with defaults matching the study settings:
 *   table3  sample-identification power vs ||Z1 - Z2|| at K in {10, 50};
 *   fig4    two-sample test power: sweep r at lambda = 1, and sweep lambda
 *           with r = 0.3/lambda;
 *   table5  2-means mis-clustering vs r, random and oracle starts;
 *   fig5    k-NN excess risk: sweep s at r = 0.9 and sweep r at s = 2000;
 *   table6  shift-augmented image k-NN (requires IDX files on disk).
 *
 * Every replicate derives its random streams purely from (seed, label
 * string), so results are independent of execution order and reruns with
 * the same seed reproduce the output CSV byte for byte.  Estimated metrics
 * are re-learned each replicate from a fresh unlabeled multi-view pool; the
 * smaller training size reuses the leading samples of the same pool.
 */
#ifndef MVML_HARNESS_HPP
#define MVML_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvml/model.hpp"

namespace mvml {

struct ExperimentConfig {
    std::string experiment;  // table3 | fig4 | table5 | fig5 | table6
    uint64_t seed = 20240801;
    int reps = 500;
    int n_perm = 199;
    double alpha = 0.05;  // test level
    bool fast = false;    // reps / 5 and thinned sweeps
    int threads = 1;      // replicate work pool size
    std::string out_path; // CSV destination ("" = <experiment>.csv)
    std::string svg_path; // optional plot destination ("" = none)

    // Model family (simulation experiments).
    int d = 100;
    int K = 10;
    int n = 10;
    double lambda = 4.0;  // signal amplitude; factor spectrum scales as lambda^2
    double sigma2 = 1.0;
    double r = 0.0;       // mixture separation ||alpha|| (fixed-r experiments)
    int s = 500;          // downstream sample size (fixed-s experiments)
    int test_size = 500;  // fresh draws for k-NN evaluation
    int m_cal = 100000;   // calibration pairs for known-metric thresholds

    // Grids.
    std::vector<int> m_list{1000, 5000};  // metric-learning sample sizes
    std::vector<int> K_list;              // table3
    std::vector<double> dz_grid;          // table3 ||Z1 - Z2|| values
    std::vector<double> r_grid;           // fig4 setting 1 / table5 / fig5
    std::vector<double> lambda_grid;      // fig4 setting 2
    std::vector<int> s_list;              // fig5 / table6

    // k-NN.
    int knn_k = 0;  // 0 = select by cross-validation
    std::vector<int> k_grid{1, 3, 5, 9, 15, 25, 51};
    int cv_folds = 5;

    // Two-sample method.
    bool permutation = true;  // false = asymptotic calibration

    // table6 inputs.
    std::string mnist_dir;
    int mnist_m = 10000;
    int shift_px = 2;
    int mnist_k = 32;
};

/// Defaults for one experiment id; throws on an unknown id.
ExperimentConfig default_config(const std::string& experiment);

/// Apply key=value overrides (config-file or CLI); unknown keys throw.
void apply_overrides(ExperimentConfig& config,
                     const std::map<std::string, std::string>& overrides);

struct ResultRow {
    std::string experiment;
    std::string distance;        // euclid | dstar_hat_m#### | dstar_true | ...
    std::string condition_name;  // e.g. "dz_K10", "r", "lambda", "s"
    double condition_value = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    int reps = 0;
    uint64_t seed = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

/// Run one experiment to completion (no file output).
ResultTable run_experiment(const ExperimentConfig& config);

/// CSV with header experiment,distance,condition_name,condition_value,
/// estimate,se,reps,seed.
void emit_csv(const ResultTable& table, const std::string& path);

/// Best-effort static plot: one panel per condition_name, one polyline per
/// distance.
void emit_svg(const ResultTable& table, const std::string& path);

}  // namespace mvml

#endif  // MVML_HARNESS_HPP
