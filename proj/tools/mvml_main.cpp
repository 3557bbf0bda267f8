/**
 * mvml_main.cpp — command-line front end.
 *
 * Subcommands:
 *   reproduce       run a full Monte Carlo experiment and write its CSV
 *   simulate        draw a synthetic dataset (multi-view or labeled) to CSV
 *   learn           spectral metric learning on a multi-view CSV
 *   eval-knn        k-NN misclassification under a chosen metric
 *   eval-twosample  energy-distance two-sample test
 *   eval-kmeans     2-means clustering against recorded labels
 *   eval-sampleid   threshold calibration + same-sample rejection rate
 *
 * Configuration precedence for `reproduce`: built-in experiment defaults,
 * then a --config key=value file, then explicit command-line flags.
 */
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvml/harness.hpp"
#include "mvml/io.hpp"
#include "mvml/kmeans.hpp"
#include "mvml/knn.hpp"
#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"
#include "mvml/sampleid.hpp"
#include "mvml/spectral.hpp"
#include "mvml/twosample.hpp"

namespace {

mvml::Vector parse_vector(const std::string& text) {
    mvml::Vector out;
    std::vector<double> values;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(start, end - start);
        size_t used = 0;
        values.push_back(std::stod(part, &used));
        if (used != part.size()) {
            throw std::invalid_argument("bad numeric entry: " + part);
        }
        start = end + 1;
        if (end == text.size()) break;
    }
    out.resize(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
    return out;
}

/// Metric for the eval subcommands: either the identity (euclid) or a PSD
/// matrix loaded from CSV.
mvml::MahalanobisMetric load_metric(const std::string& path, int dim) {
    if (path.empty()) return mvml::euclidean_metric(dim);
    const mvml::Matrix m = mvml::read_matrix_csv(path);
    if (m.rows() != dim || m.cols() != dim) {
        throw std::invalid_argument("metric matrix is " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) +
                                    " but the data has dimension " +
                                    std::to_string(dim));
    }
    return mvml::metric_from_matrix(m, "file");
}

int run_reproduce(const std::string& experiment,
                  const std::string& config_path,
                  const std::map<std::string, std::string>& flag_overrides) {
    mvml::ExperimentConfig config = mvml::default_config(experiment);
    if (!config_path.empty()) {
        mvml::apply_overrides(config, mvml::read_config_file(config_path));
    }
    mvml::apply_overrides(config, flag_overrides);

    const mvml::ResultTable table = mvml::run_experiment(config);
    const std::string out =
        config.out_path.empty() ? experiment + ".csv" : config.out_path;
    mvml::emit_csv(table, out);
    std::cout << "wrote " << table.rows.size() << " rows to " << out << "\n";
    if (!config.svg_path.empty()) {
        mvml::emit_svg(table, config.svg_path);
        std::cout << "wrote plot to " << config.svg_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view metric learning toolkit"};
    app.require_subcommand(1);

    // ---- reproduce ----
    auto* reproduce = app.add_subcommand(
        "reproduce", "run a Monte Carlo experiment and write results as CSV");
    std::string experiment;
    reproduce->add_option("--experiment", experiment, "experiment id")
        ->required()
        ->check(CLI::IsMember({"table3", "fig4", "table5", "fig5", "table6"}));
    std::string config_path;
    reproduce->add_option("--config", config_path, "key=value config file");
    std::uint64_t seed = 0;
    auto* seed_opt = reproduce->add_option("--seed", seed, "RNG seed");
    int reps = 0;
    auto* reps_opt = reproduce->add_option("--reps", reps, "Monte Carlo replicates");
    int n_perm = 0;
    auto* n_perm_opt =
        reproduce->add_option("--n-perm", n_perm, "permutations per test");
    int threads = 0;
    auto* threads_opt = reproduce->add_option("--threads", threads, "worker threads");
    std::string out_path;
    auto* out_opt = reproduce->add_option("--out", out_path, "output CSV path");
    std::string svg_path;
    auto* svg_opt = reproduce->add_option("--svg", svg_path, "optional SVG plot path");
    bool fast = false;
    reproduce->add_flag("--fast", fast, "reduced replicates and thinned grids");
    std::string mnist_dir;
    auto* mnist_opt =
        reproduce->add_option("--mnist-dir", mnist_dir, "directory with IDX files");
    int shift_px = 0;
    auto* shift_opt =
        reproduce->add_option("--shift-px", shift_px, "augmentation shift in pixels");
    int mnist_k = 0;
    auto* mnk_opt =
        reproduce->add_option("--mnist-k", mnist_k, "spectral rank for table6");
    std::vector<std::string> sets;
    reproduce->add_option("--set", sets, "extra key=value overrides")
        ->take_all();

    // ---- simulate ----
    auto* simulate = app.add_subcommand(
        "simulate", "draw a synthetic dataset from the latent factor model");
    std::string sim_out;
    simulate->add_option("--out", sim_out, "output CSV path")->required();
    std::uint64_t sim_seed = 1;
    simulate->add_option("--seed", sim_seed, "RNG seed");
    int sim_d = 100, sim_K = 10, sim_m = 1000, sim_n = 10, sim_s = 500;
    double sim_lambda = 1.0, sim_sigma2 = 1.0;
    std::string sim_alpha;
    simulate->add_option("--d", sim_d, "ambient dimension");
    simulate->add_option("--K", sim_K, "latent dimension");
    simulate->add_option("--lambda", sim_lambda, "signal amplitude");
    simulate->add_option("--sigma2", sim_sigma2, "noise variance");
    simulate->add_option("--alpha", sim_alpha,
                         "mixture center, comma-separated (default zero)");
    simulate->add_option("--m", sim_m, "samples (multi-view mode)");
    simulate->add_option("--n", sim_n, "views per sample (multi-view mode)");
    simulate->add_option("--s", sim_s, "points (labeled mode)");
    bool sim_labeled = false;
    simulate->add_flag("--labeled", sim_labeled,
                       "emit single-view labeled points instead of views");

    // ---- learn ----
    auto* learn = app.add_subcommand(
        "learn", "estimate the factor metrics from a multi-view CSV");
    std::string learn_data;
    learn->add_option("--data", learn_data, "multi-view CSV")->required();
    int learn_K = 0;
    learn->add_option("--K", learn_K, "latent dimension")->required();
    std::string rhat_out, mstar_out, mss_out;
    learn->add_option("--rhat-out", rhat_out, "write the moment estimator");
    learn->add_option("--mstar-out", mstar_out, "write the estimated M*");
    learn->add_option("--mss-out", mss_out, "write the estimated M**");

    // ---- eval-knn ----
    auto* eknn = app.add_subcommand("eval-knn", "k-NN misclassification rate");
    std::string knn_train, knn_test, knn_metric;
    eknn->add_option("--train", knn_train, "labeled CSV")->required();
    eknn->add_option("--test", knn_test, "labeled CSV")->required();
    eknn->add_option("--metric", knn_metric, "metric matrix CSV (default euclid)");
    int knn_k = 0;
    eknn->add_option("--k", knn_k, "neighbor count (omit to cross-validate)");
    std::string knn_grid = "1,3,5,9,15,25,51";
    eknn->add_option("--k-grid", knn_grid, "CV grid (comma-separated)");
    int knn_folds = 5;
    eknn->add_option("--folds", knn_folds, "CV folds");
    std::uint64_t knn_seed = 1;
    eknn->add_option("--seed", knn_seed, "CV fold shuffle seed");

    // ---- eval-twosample ----
    auto* ets = app.add_subcommand("eval-twosample",
                                   "energy-distance two-sample test");
    std::string ts_data, ts_metric, ts_method = "permutation";
    ets->add_option("--data", ts_data, "labeled CSV (+1/-1 groups)")->required();
    ets->add_option("--metric", ts_metric, "metric matrix CSV (default euclid)");
    ets->add_option("--method", ts_method, "permutation | asymptotic")
        ->check(CLI::IsMember({"permutation", "asymptotic"}));
    int ts_nperm = 199;
    ets->add_option("--n-perm", ts_nperm, "permutations");
    double ts_alpha = 0.05;
    ets->add_option("--alpha", ts_alpha, "test level");
    std::uint64_t ts_seed = 1;
    ets->add_option("--seed", ts_seed, "permutation seed");

    // ---- eval-kmeans ----
    auto* ekm = app.add_subcommand("eval-kmeans",
                                   "2-means clustering vs recorded labels");
    std::string km_data, km_metric;
    ekm->add_option("--data", km_data, "labeled CSV")->required();
    ekm->add_option("--metric", km_metric, "metric matrix CSV (default euclid)");
    std::uint64_t km_seed = 1;
    ekm->add_option("--seed", km_seed, "random-init seed");

    // ---- eval-sampleid ----
    auto* eid = app.add_subcommand(
        "eval-sampleid", "calibrate a threshold and report the rejection rate");
    std::string id_calib, id_data, id_metric;
    eid->add_option("--calib", id_calib, "multi-view CSV for calibration")
        ->required();
    eid->add_option("--data", id_data,
                    "multi-view CSV whose first two views form each test pair")
        ->required();
    eid->add_option("--metric", id_metric, "metric matrix CSV (default euclid)");
    double id_alpha = 0.05;
    eid->add_option("--alpha", id_alpha, "calibration level");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reproduce->parsed()) {
            std::map<std::string, std::string> overrides;
            for (const std::string& kv : sets) {
                const size_t eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw std::invalid_argument("--set expects key=value, got: " + kv);
                }
                overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            if (*seed_opt) overrides["seed"] = std::to_string(seed);
            if (*reps_opt) overrides["reps"] = std::to_string(reps);
            if (*n_perm_opt) overrides["n_perm"] = std::to_string(n_perm);
            if (*threads_opt) overrides["threads"] = std::to_string(threads);
            if (*out_opt) overrides["out"] = out_path;
            if (*svg_opt) overrides["svg"] = svg_path;
            if (fast) overrides["fast"] = "1";
            if (*mnist_opt) overrides["mnist_dir"] = mnist_dir;
            if (*shift_opt) overrides["shift_px"] = std::to_string(shift_px);
            if (*mnk_opt) overrides["mnist_k"] = std::to_string(mnist_k);
            return run_reproduce(experiment, config_path, overrides);
        }

        if (simulate->parsed()) {
            mvml::Rng rng(sim_seed, "simulate");
            mvml::Vector alpha = sim_alpha.empty() ? mvml::Vector::Zero(sim_K)
                                                   : parse_vector(sim_alpha);
            if (alpha.size() != sim_K) {
                throw std::invalid_argument("--alpha must have K entries");
            }
            const mvml::FactorModelSpec model = mvml::build_model(
                sim_d, sim_K, sim_lambda * sim_lambda, sim_sigma2, alpha, rng);
            if (sim_labeled) {
                mvml::write_labeled_csv(sim_out,
                                        mvml::sample_labeled(model, sim_s, rng));
            } else {
                mvml::write_multiview_csv(
                    sim_out, mvml::sample_multiview(model, sim_m, sim_n, rng));
            }
            std::cout << "wrote " << sim_out << "\n";
            return 0;
        }

        if (learn->parsed()) {
            const mvml::MultiViewDataset data = mvml::read_multiview_csv(learn_data);
            const mvml::SpectralEstimate est = mvml::spectral_learn(data, learn_K);
            std::cout << "top eigenvalues:";
            for (int k = 0; k < est.eigenvalues.size(); ++k) {
                std::cout << ' ' << mvml::format_double(est.eigenvalues(k));
            }
            std::cout << "\n";
            if (!rhat_out.empty()) mvml::write_matrix_csv(rhat_out, est.rhat);
            if (!mstar_out.empty()) mvml::write_matrix_csv(mstar_out, est.m_star);
            if (!mss_out.empty()) mvml::write_matrix_csv(mss_out, est.m_star_star);
            return 0;
        }

        if (eknn->parsed()) {
            const mvml::LabeledDataset train = mvml::read_labeled_csv(knn_train);
            const mvml::LabeledDataset test = mvml::read_labeled_csv(knn_test);
            const mvml::MahalanobisMetric metric = load_metric(knn_metric, train.dim());
            mvml::KnnConfig config;
            if (knn_k > 0) {
                config.k = knn_k;
            } else {
                std::vector<int> grid;
                size_t start = 0;
                while (start <= knn_grid.size()) {
                    size_t end = knn_grid.find(',', start);
                    if (end == std::string::npos) end = knn_grid.size();
                    grid.push_back(std::stoi(knn_grid.substr(start, end - start)));
                    start = end + 1;
                    if (end == knn_grid.size()) break;
                }
                mvml::Rng rng(knn_seed, "eval-knn/cv");
                config.k = mvml::select_k_cv(train, metric, grid, knn_folds, rng);
                std::cout << "selected k = " << config.k << "\n";
            }
            const double err =
                mvml::misclassification_rate(train, test, metric, config);
            std::cout << "misclassification = " << mvml::format_double(err) << "\n";
            return 0;
        }

        if (ets->parsed()) {
            const mvml::LabeledDataset data = mvml::read_labeled_csv(ts_data);
            const mvml::MahalanobisMetric metric = load_metric(ts_metric, data.dim());
            mvml::TestResult result;
            if (ts_method == "permutation") {
                mvml::Rng rng(ts_seed, "eval-twosample/perm");
                result = mvml::permutation_test(data, metric, ts_nperm, ts_alpha, rng);
            } else {
                result = mvml::asymptotic_test(data, metric, ts_alpha);
            }
            std::cout << "statistic = " << mvml::format_double(result.statistic)
                      << "\np_value = " << mvml::format_double(result.p_value)
                      << "\nreject = " << (result.reject ? "yes" : "no") << "\n";
            return 0;
        }

        if (ekm->parsed()) {
            const mvml::LabeledDataset data = mvml::read_labeled_csv(km_data);
            const mvml::MahalanobisMetric metric = load_metric(km_metric, data.dim());
            mvml::Rng rng(km_seed, "eval-kmeans/init");
            const auto init = mvml::init_random(data.points, rng);
            const mvml::ClusteringResult fit =
                mvml::kmeans_fit(data.points, metric, init);
            std::cout << "miscluster = "
                      << mvml::format_double(
                             mvml::miscluster_rate(fit.labels, data.labels))
                      << "\niterations = " << fit.iterations << "\n";
            return 0;
        }

        if (eid->parsed()) {
            const mvml::MultiViewDataset calib = mvml::read_multiview_csv(id_calib);
            const mvml::MultiViewDataset data = mvml::read_multiview_csv(id_data);
            const mvml::MahalanobisMetric metric = load_metric(id_metric, calib.d);
            const mvml::IdThreshold threshold =
                mvml::estimate_threshold(calib, metric, id_alpha);
            int rejected = 0;
            for (int i = 0; i < data.m; ++i) {
                const mvml::Vector x1 = data.view(i, 0).transpose();
                const mvml::Vector x2 = data.view(i, 1).transpose();
                rejected += mvml::identify(x1, x2, metric, threshold) ==
                            mvml::IdDecision::different_sample;
            }
            std::cout << "threshold = " << mvml::format_double(threshold.value)
                      << "\nrejection_rate = "
                      << mvml::format_double(static_cast<double>(rejected) / data.m)
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
