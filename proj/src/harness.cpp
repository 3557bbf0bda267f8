#include "mvml/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "mvml/io.hpp"
#include "mvml/kmeans.hpp"
#include "mvml/knn.hpp"
#include "mvml/metric.hpp"
#include "mvml/mnist.hpp"
#include "mvml/rng.hpp"
#include "mvml/sampleid.hpp"
#include "mvml/spectral.hpp"
#include "mvml/twosample.hpp"

namespace mvml {

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Replicate work pool: run fn(0..items-1), each item exactly once. Callers
/// write only into per-item slots, so the reduction that follows is a
/// deterministic, order-independent pass over those slots.
void parallel_run(int items, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || items <= 1) {
        for (int i = 0; i < items; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < items; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int count = std::min(threads, items);
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
}

double proportion_se(double p, int reps) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / reps);
}

/// Mean and standard-error reduction for continuous per-replicate values.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe reduce_mean(const std::vector<double>& values) {
    MeanSe out;
    const size_t n = values.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return out;
}

/// Mixture-center pattern for each experiment family; the separation r is
/// spread over a fixed coordinate block so that ||alpha|| = r.
Vector alpha_pattern(const std::string& experiment, int K, double r) {
    Vector alpha = Vector::Zero(K);
    if (r == 0.0 || experiment == "table3") return alpha;
    if (!(r > 0.0 && r <= 1.0)) {
        throw std::invalid_argument("alpha pattern: r must lie in [0, 1]");
    }
    if (K != 10) {
        throw std::invalid_argument(
            "alpha pattern for " + experiment + " is defined for K = 10");
    }
    if (experiment == "fig4") {
        for (int k = 4; k < 10; ++k) alpha(k) = r / std::sqrt(6.0);
    } else if (experiment == "table5") {
        for (int k = 0; k < 4; ++k) alpha(k) = r / std::sqrt(4.0);
    } else if (experiment == "fig5") {
        for (int k = 5; k < 10; ++k) alpha(k) = r / std::sqrt(5.0);
    } else {
        throw std::invalid_argument("alpha pattern: unknown experiment " + experiment);
    }
    return alpha;
}

/// The factor spectrum is lambda_k = lambda^2 * (K-k+1)/K: `lambda` is the
/// signal amplitude (loading column norms scale linearly in it), and
/// covariance eigenvalues scale as amplitude squared.
FactorModelSpec draw_model(const ExperimentConfig& config, int K, double lambda,
                           const Vector& alpha, Rng& rng) {
    return build_model(config.d, K, lambda * lambda, config.sigma2, alpha, rng);
}

MultiViewDataset head_samples(const MultiViewDataset& pool, int m) {
    MultiViewDataset sub;
    sub.m = m;
    sub.n = pool.n;
    sub.d = pool.d;
    sub.views = pool.views.topRows(static_cast<Eigen::Index>(m) * pool.n);
    return sub;
}

/// The seven-distance comparison set, in fixed reporting order. Metrics are
/// built from explicit factors (no extra eigendecompositions): the estimate
/// provides sqrt-eigenvalue-scaled eigenvectors, the model its loading/basis.
struct DistanceSet {
    std::vector<MahalanobisMetric> metrics;
    std::vector<int> learned_m;  // per metric: training size (0 = not learned)
};

MahalanobisMetric metric_from_estimate_star(const SpectralEstimate& est,
                                            const std::string& name) {
    const int K = static_cast<int>(est.eigenvalues.size());
    Matrix w(K, est.eigenvectors.rows());
    int rank = 0;
    for (int k = 0; k < K; ++k) {
        if (est.eigenvalues(k) > 0.0) {
            w.row(rank++) =
                std::sqrt(est.eigenvalues(k)) * est.eigenvectors.col(k).transpose();
        }
    }
    w.conservativeResize(rank, w.cols());
    return metric_from_factor(w, name);
}

DistanceSet simulation_metrics(const FactorModelSpec& model,
                               const MultiViewDataset& pool,
                               const std::vector<int>& m_list, int K) {
    DistanceSet set;
    std::vector<SpectralEstimate> estimates;
    estimates.reserve(m_list.size());
    for (int m : m_list) {
        estimates.push_back(m == pool.m ? spectral_learn(pool, K)
                                        : spectral_learn(head_samples(pool, m), K));
    }

    set.metrics.push_back(euclidean_metric(model.d));
    set.learned_m.push_back(0);
    for (size_t i = 0; i < m_list.size(); ++i) {
        set.metrics.push_back(metric_from_estimate_star(
            estimates[i], "dstar_hat_m" + std::to_string(m_list[i])));
        set.learned_m.push_back(m_list[i]);
    }
    set.metrics.push_back(
        metric_from_factor(model.loading().transpose(), "dstar_true"));
    set.learned_m.push_back(0);
    for (size_t i = 0; i < m_list.size(); ++i) {
        set.metrics.push_back(
            metric_from_factor(estimates[i].eigenvectors.transpose(),
                               "dss_hat_m" + std::to_string(m_list[i])));
        set.learned_m.push_back(m_list[i]);
    }
    set.metrics.push_back(metric_from_factor(model.U.transpose(), "dss_true"));
    set.learned_m.push_back(0);
    return set;
}

LabeledDataset draw_two_sample(const FactorModelSpec& model, int s, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        LabeledDataset data = sample_labeled(model, s, rng);
        int plus = 0;
        for (int i = 0; i < data.size(); ++i) plus += data.labels(i) == 1;
        if (plus >= 2 && data.size() - plus >= 2) return data;
    }
    throw std::runtime_error("draw_two_sample: could not populate both groups");
}

double disagreement(const IntVector& a, const IntVector& b) {
    int wrong = 0;
    for (int i = 0; i < a.size(); ++i) wrong += a(i) != b(i);
    return static_cast<double>(wrong) / a.size();
}

// ---------------------------------------------------------------------------
// table3 — sample identification power
// ---------------------------------------------------------------------------

ResultTable run_table3(const ExperimentConfig& config) {
    ResultTable out;
    const int n_dz = static_cast<int>(config.dz_grid.size());
    const int m_max = *std::max_element(config.m_list.begin(), config.m_list.end());

    for (int K : config.K_list) {
        if (K < 2 || K % 2 != 0 || K > config.d) {
            throw std::invalid_argument("table3: K must be even and <= d");
        }
        const std::string kprefix = "table3/K=" + std::to_string(K);

        // Known-metric thresholds transfer across basis draws: a within-pair
        // distance is ||W(e1 - e2)||^2 with isotropic noise, whose law
        // depends only on the singular values of W — identical for every
        // basis with the same spectrum. Calibrate them once per K.
        Rng cal_rng(config.seed, kprefix + "/cal");
        const FactorModelSpec cal_model =
            draw_model(config, K, config.lambda, Vector::Zero(K), cal_rng);
        const MultiViewDataset cal_pool =
            sample_multiview(cal_model, config.m_cal, 2, cal_rng);
        const IdThreshold cal_euclid = estimate_threshold(
            cal_pool, euclidean_metric(config.d), config.alpha);
        const IdThreshold cal_star = estimate_threshold(
            cal_pool, metric_from_factor(cal_model.loading().transpose(), "dstar_true"),
            config.alpha);
        const IdThreshold cal_ss = estimate_threshold(
            cal_pool, metric_from_factor(cal_model.U.transpose(), "dss_true"),
            config.alpha);

        const int n_metrics = 3 + 2 * static_cast<int>(config.m_list.size());
        std::vector<uint8_t> rejections(
            static_cast<size_t>(config.reps) * n_metrics * n_dz, 0);

        parallel_run(config.reps, config.threads, [&](int rep) {
            const std::string prefix = kprefix + "/rep=" + std::to_string(rep);
            Rng model_rng(config.seed, prefix + "/model");
            const FactorModelSpec model =
                draw_model(config, K, config.lambda, Vector::Zero(K), model_rng);
            Rng train_rng(config.seed, prefix + "/train");
            const MultiViewDataset pool =
                sample_multiview(model, m_max, config.n, train_rng);
            const DistanceSet set =
                simulation_metrics(model, pool, config.m_list, K);

            std::vector<IdThreshold> thresholds(set.metrics.size());
            for (size_t mi = 0; mi < set.metrics.size(); ++mi) {
                const std::string& name = set.metrics[mi].name;
                if (set.learned_m[mi] > 0) {
                    // Estimated metrics calibrate on their own training set
                    // (first two views of the samples used for learning).
                    const int m = set.learned_m[mi];
                    thresholds[mi] = estimate_threshold(
                        m == pool.m ? pool : head_samples(pool, m),
                        set.metrics[mi], config.alpha);
                } else if (name == "euclid") {
                    thresholds[mi] = cal_euclid;
                } else if (name == "dstar_true") {
                    thresholds[mi] = cal_star;
                } else {
                    thresholds[mi] = cal_ss;
                }
            }

            const Matrix b = model.loading();
            const double sigma = std::sqrt(model.sigma2);
            for (int zi = 0; zi < n_dz; ++zi) {
                Rng pair_rng(config.seed, prefix + "/pair=" + std::to_string(zi));
                auto [z, y] = sample_population(model, 1, pair_rng);
                (void)y;
                Vector delta = Vector::Zero(K);
                const double c = config.dz_grid[zi] / std::sqrt(K / 2.0);
                for (int k = K / 2; k < K; ++k) delta(k) = c;
                Vector noise1(config.d), noise2(config.d);
                for (int k = 0; k < config.d; ++k) noise1(k) = sigma * pair_rng.normal();
                for (int k = 0; k < config.d; ++k) noise2(k) = sigma * pair_rng.normal();
                const Vector x1 = b * z.row(0).transpose() + noise1;
                const Vector x2 = x1 - noise1 + b * delta + noise2;
                for (size_t mi = 0; mi < set.metrics.size(); ++mi) {
                    const bool reject =
                        identify(x1, x2, set.metrics[mi], thresholds[mi]) ==
                        IdDecision::different_sample;
                    rejections[(static_cast<size_t>(rep) * n_metrics + mi) * n_dz + zi] =
                        reject;
                }
            }
        });

        // Deterministic reduction over replicate slots.
        std::vector<std::string> names;
        names.push_back("euclid");
        for (int m : config.m_list) names.push_back("dstar_hat_m" + std::to_string(m));
        names.push_back("dstar_true");
        for (int m : config.m_list) names.push_back("dss_hat_m" + std::to_string(m));
        names.push_back("dss_true");
        for (int mi = 0; mi < n_metrics; ++mi) {
            for (int zi = 0; zi < n_dz; ++zi) {
                long count = 0;
                for (int rep = 0; rep < config.reps; ++rep) {
                    count += rejections[(static_cast<size_t>(rep) * n_metrics + mi) *
                                            n_dz + zi];
                }
                const double power = static_cast<double>(count) / config.reps;
                ResultRow row;
                row.experiment = config.experiment;
                row.distance = names[mi];
                row.condition_name = "dz_K" + std::to_string(K);
                row.condition_value = config.dz_grid[zi];
                row.estimate = power;
                row.se = proportion_se(power, config.reps);
                row.reps = config.reps;
                row.seed = config.seed;
                out.rows.push_back(std::move(row));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// fig4 — two-sample testing power
// ---------------------------------------------------------------------------

ResultTable run_fig4(const ExperimentConfig& config) {
    ResultTable out;
    const int m_max = *std::max_element(config.m_list.begin(), config.m_list.end());
    const int n_metrics = 3 + 2 * static_cast<int>(config.m_list.size());

    auto run_condition = [&](const std::string& cprefix, double lambda, double r,
                             const std::string& cond_name, double cond_value) {
        const Vector alpha = alpha_pattern("fig4", config.K, r);
        std::vector<uint8_t> rejections(
            static_cast<size_t>(config.reps) * n_metrics, 0);

        parallel_run(config.reps, config.threads, [&](int rep) {
            const std::string prefix = cprefix + "/rep=" + std::to_string(rep);
            Rng model_rng(config.seed, prefix + "/model");
            const FactorModelSpec model =
                draw_model(config, config.K, lambda, alpha, model_rng);
            Rng train_rng(config.seed, prefix + "/train");
            const MultiViewDataset pool =
                sample_multiview(model, m_max, config.n, train_rng);
            const DistanceSet set =
                simulation_metrics(model, pool, config.m_list, config.K);
            Rng data_rng(config.seed, prefix + "/data");
            const LabeledDataset data = draw_two_sample(model, config.s, data_rng);

            for (size_t mi = 0; mi < set.metrics.size(); ++mi) {
                TestResult result;
                if (config.permutation) {
                    Rng perm_rng(config.seed,
                                 prefix + "/perm/" + set.metrics[mi].name);
                    result = permutation_test(data, set.metrics[mi], config.n_perm,
                                              config.alpha, perm_rng);
                } else {
                    result = asymptotic_test(data, set.metrics[mi], config.alpha);
                }
                rejections[static_cast<size_t>(rep) * n_metrics + mi] = result.reject;
            }
        });

        // Names for reporting (metric order is fixed by construction).
        std::vector<std::string> names;
        names.push_back("euclid");
        for (int m : config.m_list) names.push_back("dstar_hat_m" + std::to_string(m));
        names.push_back("dstar_true");
        for (int m : config.m_list) names.push_back("dss_hat_m" + std::to_string(m));
        names.push_back("dss_true");
        for (int mi = 0; mi < n_metrics; ++mi) {
            long count = 0;
            for (int rep = 0; rep < config.reps; ++rep) {
                count += rejections[static_cast<size_t>(rep) * n_metrics + mi];
            }
            const double power = static_cast<double>(count) / config.reps;
            ResultRow row;
            row.experiment = config.experiment;
            row.distance = names[mi];
            row.condition_name = cond_name;
            row.condition_value = cond_value;
            row.estimate = power;
            row.se = proportion_se(power, config.reps);
            row.reps = config.reps;
            row.seed = config.seed;
            out.rows.push_back(std::move(row));
        }
    };

    for (size_t ci = 0; ci < config.r_grid.size(); ++ci) {
        run_condition("fig4/r/cond=" + std::to_string(ci), config.lambda,
                      config.r_grid[ci], "r", config.r_grid[ci]);
    }
    for (size_t ci = 0; ci < config.lambda_grid.size(); ++ci) {
        const double lambda = config.lambda_grid[ci];
        run_condition("fig4/lambda/cond=" + std::to_string(ci), lambda,
                      config.r / lambda, "lambda", lambda);
    }
    return out;
}

// ---------------------------------------------------------------------------
// table5 — 2-means mis-clustering
// ---------------------------------------------------------------------------

ResultTable run_table5(const ExperimentConfig& config) {
    ResultTable out;
    const int m_max = *std::max_element(config.m_list.begin(), config.m_list.end());
    const int n_metrics = 3 + 2 * static_cast<int>(config.m_list.size());

    for (size_t ci = 0; ci < config.r_grid.size(); ++ci) {
        const double r = config.r_grid[ci];
        const Vector alpha = alpha_pattern("table5", config.K, r);
        const std::string cprefix = "table5/cond=" + std::to_string(ci);
        // Layout: [rep][metric][init] with init 0 = random, 1 = oracle.
        std::vector<double> rates(
            static_cast<size_t>(config.reps) * n_metrics * 2, 0.0);

        parallel_run(config.reps, config.threads, [&](int rep) {
            const std::string prefix = cprefix + "/rep=" + std::to_string(rep);
            Rng model_rng(config.seed, prefix + "/model");
            const FactorModelSpec model =
                draw_model(config, config.K, config.lambda, alpha, model_rng);
            Rng train_rng(config.seed, prefix + "/train");
            const MultiViewDataset pool =
                sample_multiview(model, m_max, config.n, train_rng);
            const DistanceSet set =
                simulation_metrics(model, pool, config.m_list, config.K);
            Rng data_rng(config.seed, prefix + "/data");
            const LabeledDataset data = sample_labeled(model, config.s, data_rng);

            // One random draw per replicate, shared by all metrics, so the
            // distance comparison is paired rather than confounded by luck.
            Rng init_rng(config.seed, prefix + "/init");
            const auto random_init = init_random(data.points, init_rng);
            const auto oracle_init = init_oracle(model);

            for (size_t mi = 0; mi < set.metrics.size(); ++mi) {
                for (int which = 0; which < 2; ++which) {
                    const auto& init = which == 0 ? random_init : oracle_init;
                    const ClusteringResult fit =
                        kmeans_fit(data.points, set.metrics[mi], init);
                    rates[(static_cast<size_t>(rep) * n_metrics + mi) * 2 + which] =
                        miscluster_rate(fit.labels, data.labels);
                }
            }
        });

        std::vector<std::string> names;
        names.push_back("euclid");
        for (int m : config.m_list) names.push_back("dstar_hat_m" + std::to_string(m));
        names.push_back("dstar_true");
        for (int m : config.m_list) names.push_back("dss_hat_m" + std::to_string(m));
        names.push_back("dss_true");
        for (int which = 0; which < 2; ++which) {
            for (int mi = 0; mi < n_metrics; ++mi) {
                std::vector<double> values(config.reps);
                for (int rep = 0; rep < config.reps; ++rep) {
                    values[rep] =
                        rates[(static_cast<size_t>(rep) * n_metrics + mi) * 2 + which];
                }
                const MeanSe stat = reduce_mean(values);
                ResultRow row;
                row.experiment = config.experiment;
                row.distance = names[mi];
                row.condition_name = which == 0 ? "random_r" : "perfect_r";
                row.condition_value = r;
                row.estimate = stat.mean;
                row.se = stat.se;
                row.reps = config.reps;
                row.seed = config.seed;
                out.rows.push_back(std::move(row));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// fig5 — k-NN misclassification and excess risk
// ---------------------------------------------------------------------------

ResultTable run_fig5(const ExperimentConfig& config) {
    ResultTable out;
    const int m_max = *std::max_element(config.m_list.begin(), config.m_list.end());
    const int n_metrics = 3 + 2 * static_cast<int>(config.m_list.size());

    std::vector<std::string> names;
    names.push_back("euclid");
    for (int m : config.m_list) names.push_back("dstar_hat_m" + std::to_string(m));
    names.push_back("dstar_true");
    for (int m : config.m_list) names.push_back("dss_hat_m" + std::to_string(m));
    names.push_back("dss_true");

    // One replicate body shared by both sweeps: returns, per (train size,
    // metric), the misclassification rate and the excess over the Bayes rule
    // evaluated on the same fresh test set.
    auto replicate = [&](const std::string& prefix, double r,
                         const std::vector<int>& train_sizes,
                         std::vector<double>& miscls_slot,
                         std::vector<double>& excess_slot) {
        const Vector alpha = alpha_pattern("fig5", config.K, r);
        Rng model_rng(config.seed, prefix + "/model");
        const FactorModelSpec model =
            draw_model(config, config.K, config.lambda, alpha, model_rng);
        Rng train_rng(config.seed, prefix + "/train");
        const MultiViewDataset pool =
            sample_multiview(model, m_max, config.n, train_rng);
        const DistanceSet set =
            simulation_metrics(model, pool, config.m_list, config.K);

        Rng test_rng(config.seed, prefix + "/test");
        const LabeledDataset test =
            sample_labeled(model, config.test_size, test_rng);
        const BayesRule rule = bayes_rule(model);
        const Vector scores = test.points * rule.w;
        int bayes_wrong = 0;
        for (int i = 0; i < test.size(); ++i) {
            bayes_wrong += (scores(i) >= 0.0 ? +1 : -1) != test.labels(i);
        }
        const double bayes_err = static_cast<double>(bayes_wrong) / test.size();

        for (size_t si = 0; si < train_sizes.size(); ++si) {
            Rng draw_rng(config.seed, prefix + "/knn/s=" + std::to_string(si));
            const LabeledDataset train =
                sample_labeled(model, train_sizes[si], draw_rng);
            for (size_t mi = 0; mi < set.metrics.size(); ++mi) {
                KnnConfig knn;
                if (config.knn_k > 0) {
                    knn.k = config.knn_k;
                } else {
                    Rng cv_rng(config.seed, prefix + "/cv/s=" + std::to_string(si) +
                                                "/" + set.metrics[mi].name);
                    knn.k = select_k_cv(train, set.metrics[mi], config.k_grid,
                                        config.cv_folds, cv_rng);
                }
                const IntVector pred =
                    knn_classify_batch(train, set.metrics[mi], knn, test.points);
                const double err = disagreement(pred, test.labels);
                miscls_slot[si * n_metrics + mi] = err;
                excess_slot[si * n_metrics + mi] = err - bayes_err;
            }
        }
    };

    auto emit_rows = [&](const std::vector<std::vector<double>>& miscls,
                         const std::vector<std::vector<double>>& excess,
                         size_t flat_index, const std::string& cond_name,
                         double cond_value) {
        for (int mi = 0; mi < n_metrics; ++mi) {
            std::vector<double> excess_values(config.reps), miscls_values(config.reps);
            for (int rep = 0; rep < config.reps; ++rep) {
                excess_values[rep] = excess[rep][flat_index * n_metrics + mi];
                miscls_values[rep] = miscls[rep][flat_index * n_metrics + mi];
            }
            const MeanSe ex = reduce_mean(excess_values);
            const MeanSe mc = reduce_mean(miscls_values);
            ResultRow row;
            row.experiment = config.experiment;
            row.distance = names[mi];
            row.condition_name = cond_name;
            row.condition_value = cond_value;
            row.estimate = ex.mean;
            row.se = ex.se;
            row.reps = config.reps;
            row.seed = config.seed;
            out.rows.push_back(row);
            row.condition_name = cond_name + "_misclass";
            row.estimate = mc.mean;
            row.se = mc.se;
            out.rows.push_back(std::move(row));
        }
    };

    // Sweep A: fixed r, training size varies. The model does not depend on
    // s, so one replicate serves every entry of s_list.
    if (!config.s_list.empty()) {
        std::vector<std::vector<double>> miscls(
            config.reps, std::vector<double>(config.s_list.size() * n_metrics));
        std::vector<std::vector<double>> excess = miscls;
        parallel_run(config.reps, config.threads, [&](int rep) {
            replicate("fig5/s/rep=" + std::to_string(rep), config.r, config.s_list,
                      miscls[rep], excess[rep]);
        });
        for (size_t si = 0; si < config.s_list.size(); ++si) {
            emit_rows(miscls, excess, si, "s",
                      static_cast<double>(config.s_list[si]));
        }
    }

    // Sweep B: fixed training size, r varies (fresh model per condition).
    for (size_t ci = 0; ci < config.r_grid.size(); ++ci) {
        std::vector<std::vector<double>> miscls(config.reps,
                                                std::vector<double>(n_metrics));
        std::vector<std::vector<double>> excess = miscls;
        const std::vector<int> sizes{config.s};
        parallel_run(config.reps, config.threads, [&](int rep) {
            replicate("fig5/r/cond=" + std::to_string(ci) +
                          "/rep=" + std::to_string(rep),
                      config.r_grid[ci], sizes, miscls[rep], excess[rep]);
        });
        emit_rows(miscls, excess, 0, "r", config.r_grid[ci]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// table6 — shift-augmented image classification
// ---------------------------------------------------------------------------

std::string resolve_idx_path(const std::string& dir, const std::string& base) {
    const std::string plain = dir + "/" + base;
    if (std::ifstream(plain, std::ios::binary).good()) return plain;
    const std::string gz = plain + ".gz";
    if (std::ifstream(gz, std::ios::binary).good()) return gz;
    throw std::runtime_error("dataset file not found: " + plain + " (or .gz)");
}

/// Plurality vote over neighbor labels; ties go to the smallest class.
int plurality_vote(const std::vector<int>& neighbors, const IntVector& labels) {
    std::array<int, 10> counts{};
    for (int idx : neighbors) ++counts[labels(idx)];
    int best = 0;
    for (int c = 1; c < 10; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return best;
}

ResultTable run_table6(const ExperimentConfig& config) {
    if (config.mnist_dir.empty()) {
        throw std::runtime_error("table6 requires --mnist-dir (IDX files)");
    }
    const ImageSet train_set =
        read_idx(resolve_idx_path(config.mnist_dir, "train-images-idx3-ubyte"),
                 resolve_idx_path(config.mnist_dir, "train-labels-idx1-ubyte"));
    const ImageSet test_set =
        read_idx(resolve_idx_path(config.mnist_dir, "t10k-images-idx3-ubyte"),
                 resolve_idx_path(config.mnist_dir, "t10k-labels-idx1-ubyte"));

    const int s_max = *std::max_element(config.s_list.begin(), config.s_list.end());
    if (train_set.count < std::max(config.mnist_m, s_max) ||
        test_set.count < config.test_size) {
        throw std::runtime_error("table6: dataset smaller than requested sizes");
    }
    if (config.knn_k < 1) {
        throw std::invalid_argument("table6: knn_k must be pinned (>= 1)");
    }

    const int n_metrics = 3;
    const int d = train_set.height * train_set.width;
    std::vector<double> errors(static_cast<size_t>(config.reps) *
                                   config.s_list.size() * n_metrics,
                               0.0);

    parallel_run(config.reps, config.threads, [&](int rep) {
        const std::string prefix = "table6/rep=" + std::to_string(rep);

        // Unlabeled multi-view subset for metric learning.
        Rng subset_rng(config.seed, prefix + "/subset");
        std::vector<int> train_order(train_set.count);
        std::iota(train_order.begin(), train_order.end(), 0);
        subset_rng.shuffle(train_order);
        ImageSet subset;
        subset.count = config.mnist_m;
        subset.height = train_set.height;
        subset.width = train_set.width;
        subset.pixels.resize(config.mnist_m, d);
        subset.labels.resize(config.mnist_m);
        for (int i = 0; i < config.mnist_m; ++i) {
            subset.pixels.row(i) = train_set.pixels.row(train_order[i]);
            subset.labels(i) = train_set.labels(train_order[i]);
        }
        const MultiViewDataset views = build_multiview(subset, config.shift_px);
        const SpectralEstimate est = spectral_learn(views, config.mnist_k);

        std::vector<MahalanobisMetric> metrics;
        metrics.push_back(euclidean_metric(d));
        metrics.push_back(metric_from_estimate_star(
            est, "dstar_hat_m" + std::to_string(config.mnist_m)));
        metrics.push_back(metric_from_factor(
            est.eigenvectors.transpose(),
            "dss_hat_m" + std::to_string(config.mnist_m)));

        // Labeled pools: classifier training from the train split, held-out
        // queries from the test split; sizes nest within one shuffle each.
        Rng knn_rng(config.seed, prefix + "/knn");
        std::vector<int> pool_order(train_set.count);
        std::iota(pool_order.begin(), pool_order.end(), 0);
        knn_rng.shuffle(pool_order);
        Rng test_rng(config.seed, prefix + "/test");
        std::vector<int> test_order(test_set.count);
        std::iota(test_order.begin(), test_order.end(), 0);
        test_rng.shuffle(test_order);

        Matrix test_points(config.test_size, d);
        IntVector test_labels(config.test_size);
        for (int i = 0; i < config.test_size; ++i) {
            test_points.row(i) = test_set.pixels.row(test_order[i]);
            test_labels(i) = test_set.labels(test_order[i]);
        }

        for (size_t si = 0; si < config.s_list.size(); ++si) {
            const int s = config.s_list[si];
            Matrix train_points(s, d);
            IntVector train_labels(s);
            for (int i = 0; i < s; ++i) {
                train_points.row(i) = train_set.pixels.row(pool_order[i]);
                train_labels(i) = train_set.labels(pool_order[i]);
            }
            for (size_t mi = 0; mi < metrics.size(); ++mi) {
                const auto neighbors = knn_neighbors(metrics[mi], train_points,
                                                     test_points, config.knn_k);
                int wrong = 0;
                for (int q = 0; q < config.test_size; ++q) {
                    wrong += plurality_vote(neighbors[q], train_labels) !=
                             test_labels(q);
                }
                errors[(static_cast<size_t>(rep) * config.s_list.size() + si) *
                           n_metrics + mi] =
                    static_cast<double>(wrong) / config.test_size;
            }
        }
    });

    ResultTable out;
    const std::array<std::string, 3> names{
        "euclid", "dstar_hat_m" + std::to_string(config.mnist_m),
        "dss_hat_m" + std::to_string(config.mnist_m)};
    for (int mi = 0; mi < n_metrics; ++mi) {
        for (size_t si = 0; si < config.s_list.size(); ++si) {
            std::vector<double> values(config.reps);
            for (int rep = 0; rep < config.reps; ++rep) {
                values[rep] = errors[(static_cast<size_t>(rep) * config.s_list.size() +
                                      si) * n_metrics + mi];
            }
            const MeanSe stat = reduce_mean(values);
            ResultRow row;
            row.experiment = config.experiment;
            row.distance = names[mi];
            row.condition_name = "s";
            row.condition_value = static_cast<double>(config.s_list[si]);
            row.estimate = stat.mean;
            row.se = stat.se;
            row.reps = config.reps;
            row.seed = config.seed;
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

/// --fast: fifth of the replicates, thinned sweeps (every second grid point,
/// always keeping the last).
template <typename T>
std::vector<T> thin_grid(const std::vector<T>& grid) {
    if (grid.size() <= 2) return grid;
    std::vector<T> result;
    for (size_t i = 0; i < grid.size(); i += 2) result.push_back(grid[i]);
    if (result.back() != grid.back()) result.push_back(grid.back());
    return result;
}

ExperimentConfig effective_config(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    if (config.fast) {
        config.reps = std::max(config.experiment == "table6" ? 2 : 20,
                               config.reps / 5);
        config.r_grid = thin_grid(config.r_grid);
        config.lambda_grid = thin_grid(config.lambda_grid);
        config.s_list = thin_grid(config.s_list);
        config.dz_grid = thin_grid(config.dz_grid);
    }
    return config;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig config;
    config.experiment = experiment;
    if (experiment == "table3") {
        config.lambda = 4.0;
        config.K_list = {10, 50};
        config.dz_grid = {1, 2, 3, 4, 5};
    } else if (experiment == "fig4") {
        config.lambda = 1.0;
        config.r = 0.3;
        config.s = 500;
        for (int i = 0; i <= 10; ++i) config.r_grid.push_back(0.05 * i);
        for (int i = 1; i <= 10; ++i) config.lambda_grid.push_back(0.5 * i);
    } else if (experiment == "table5") {
        config.lambda = 2.0;
        config.s = 500;
        config.r_grid = {0.4, 0.6, 0.8, 1.0};
    } else if (experiment == "fig5") {
        config.lambda = 2.0;
        config.r = 0.9;
        config.s = 2000;
        for (int s = 500; s <= 5000; s += 500) config.s_list.push_back(s);
        for (int i = 1; i <= 10; ++i) config.r_grid.push_back(0.1 * i);
    } else if (experiment == "table6") {
        config.reps = 10;
        config.s_list = {1000, 2000, 5000};
        config.test_size = 1000;
        config.knn_k = 5;
    } else {
        throw std::invalid_argument("unknown experiment: " + experiment);
    }
    return config;
}

namespace {

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const long parsed = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(parsed);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer for " + key + ": " + value);
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number for " + key + ": " + value);
    }
}

uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const unsigned long long parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad unsigned integer for " + key + ": " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off")
        return false;
    throw std::invalid_argument("bad boolean for " + key + ": " + value);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= value.size()) {
        size_t end = value.find(',', start);
        if (end == std::string::npos) end = value.size();
        parts.push_back(value.substr(start, end - start));
        start = end + 1;
        if (end == value.size()) break;
    }
    return parts;
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
    std::vector<int> list;
    for (const std::string& part : split_list(value)) list.push_back(to_int(key, part));
    return list;
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> list;
    for (const std::string& part : split_list(value))
        list.push_back(to_double(key, part));
    return list;
}

}  // namespace

void apply_overrides(ExperimentConfig& config,
                     const std::map<std::string, std::string>& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key == "seed") config.seed = to_u64(key, value);
        else if (key == "reps") config.reps = to_int(key, value);
        else if (key == "n_perm") config.n_perm = to_int(key, value);
        else if (key == "alpha") config.alpha = to_double(key, value);
        else if (key == "fast") config.fast = to_bool(key, value);
        else if (key == "threads") config.threads = to_int(key, value);
        else if (key == "out") config.out_path = value;
        else if (key == "svg") config.svg_path = value;
        else if (key == "d") config.d = to_int(key, value);
        else if (key == "K") config.K = to_int(key, value);
        else if (key == "n") config.n = to_int(key, value);
        else if (key == "lambda") config.lambda = to_double(key, value);
        else if (key == "sigma2") config.sigma2 = to_double(key, value);
        else if (key == "r") config.r = to_double(key, value);
        else if (key == "s") config.s = to_int(key, value);
        else if (key == "test_size") config.test_size = to_int(key, value);
        else if (key == "m_cal") config.m_cal = to_int(key, value);
        else if (key == "m_list") config.m_list = to_int_list(key, value);
        else if (key == "K_list") config.K_list = to_int_list(key, value);
        else if (key == "dz_grid") config.dz_grid = to_double_list(key, value);
        else if (key == "r_grid") config.r_grid = to_double_list(key, value);
        else if (key == "lambda_grid") config.lambda_grid = to_double_list(key, value);
        else if (key == "s_list") config.s_list = to_int_list(key, value);
        else if (key == "knn_k") config.knn_k = to_int(key, value);
        else if (key == "k_grid") config.k_grid = to_int_list(key, value);
        else if (key == "cv_folds") config.cv_folds = to_int(key, value);
        else if (key == "method") {
            if (value == "permutation" || value == "perm") config.permutation = true;
            else if (value == "asymptotic") config.permutation = false;
            else throw std::invalid_argument("bad method: " + value);
        }
        else if (key == "mnist_dir") config.mnist_dir = value;
        else if (key == "mnist_m") config.mnist_m = to_int(key, value);
        else if (key == "shift_px") config.shift_px = to_int(key, value);
        else if (key == "mnist_k") config.mnist_k = to_int(key, value);
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

ResultTable run_experiment(const ExperimentConfig& input) {
    const ExperimentConfig config = effective_config(input);
    if (config.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (config.experiment == "table3") return run_table3(config);
    if (config.experiment == "fig4") return run_fig4(config);
    if (config.experiment == "table5") return run_table5(config);
    if (config.experiment == "fig5") return run_fig5(config);
    if (config.experiment == "table6") return run_table6(config);
    throw std::invalid_argument("unknown experiment: " + config.experiment);
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << "experiment,distance,condition_name,condition_value,estimate,se,reps,seed\n";
    for (const ResultRow& row : table.rows) {
        file << row.experiment << ',' << row.distance << ',' << row.condition_name
             << ',' << format_double(row.condition_value) << ','
             << format_double(row.estimate) << ',' << format_double(row.se) << ','
             << row.reps << ',' << row.seed << '\n';
    }
    if (!file.good()) throw std::runtime_error("write failed: " + path);
}

namespace {

const char* kPalette[] = {"#4269d0", "#efb118", "#ff725c", "#6cc5b0",
                          "#3ca951", "#ff8ab7", "#a463f2", "#97bbf5"};

}  // namespace

void emit_svg(const ResultTable& table, const std::string& path) {
    // Collect panels (condition names) and series (distances) in first-seen
    // order so reruns render identically.
    std::vector<std::string> panels;
    std::vector<std::string> distances;
    for (const ResultRow& row : table.rows) {
        if (std::find(panels.begin(), panels.end(), row.condition_name) ==
            panels.end())
            panels.push_back(row.condition_name);
        if (std::find(distances.begin(), distances.end(), row.distance) ==
            distances.end())
            distances.push_back(row.distance);
    }

    const int width = 760, panel_h = 300, left = 70, right = 560, top_pad = 40,
              bottom_pad = 45;
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
         << "\" height=\"" << panel_h * std::max<size_t>(panels.size(), 1)
         << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    file << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (size_t pi = 0; pi < panels.size(); ++pi) {
        const std::string& panel = panels[pi];
        const int y0 = static_cast<int>(pi) * panel_h;
        double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
        for (const ResultRow& row : table.rows) {
            if (row.condition_name != panel) continue;
            xmin = std::min(xmin, row.condition_value);
            xmax = std::max(xmax, row.condition_value);
            ymin = std::min(ymin, row.estimate);
            ymax = std::max(ymax, row.estimate);
        }
        if (xmax <= xmin) xmax = xmin + 1.0;
        if (ymax <= ymin) ymax = ymin + 1.0;
        ymax *= 1.05;

        const double plot_top = y0 + top_pad, plot_bottom = y0 + panel_h - bottom_pad;
        auto sx = [&](double x) {
            return left + (x - xmin) / (xmax - xmin) * (right - left);
        };
        auto sy = [&](double y) {
            return plot_bottom - (y - ymin) / (ymax - ymin) * (plot_bottom - plot_top);
        };

        file << "<text x=\"" << left << "\" y=\"" << y0 + 20
             << "\" font-weight=\"bold\">" << table.rows.front().experiment << " — "
             << panel << "</text>\n";
        file << "<line x1=\"" << left << "\" y1=\"" << plot_bottom << "\" x2=\""
             << right << "\" y2=\"" << plot_bottom << "\" stroke=\"black\"/>\n";
        file << "<line x1=\"" << left << "\" y1=\"" << plot_top << "\" x2=\"" << left
             << "\" y2=\"" << plot_bottom << "\" stroke=\"black\"/>\n";
        for (int tick = 0; tick <= 4; ++tick) {
            const double xv = xmin + (xmax - xmin) * tick / 4.0;
            const double yv = ymin + (ymax - ymin) * tick / 4.0;
            file << "<text x=\"" << sx(xv) << "\" y=\"" << plot_bottom + 18
                 << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1e4) / 1e4)
                 << "</text>\n";
            file << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
                 << "\" text-anchor=\"end\">" << format_double(std::round(yv * 1e4) / 1e4)
                 << "</text>\n";
        }

        for (size_t di = 0; di < distances.size(); ++di) {
            const char* color = kPalette[di % 8];
            std::string points;
            for (const ResultRow& row : table.rows) {
                if (row.condition_name != panel || row.distance != distances[di])
                    continue;
                points += std::to_string(sx(row.condition_value)) + "," +
                          std::to_string(sy(row.estimate)) + " ";
                file << "<circle cx=\"" << sx(row.condition_value) << "\" cy=\""
                     << sy(row.estimate) << "\" r=\"2.5\" fill=\"" << color
                     << "\"/>\n";
            }
            if (!points.empty()) {
                file << "<polyline fill=\"none\" stroke=\"" << color
                     << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            }
            file << "<text x=\"" << right + 14 << "\" y=\""
                 << plot_top + 16 * static_cast<int>(di) << "\" fill=\"" << color
                 << "\">" << distances[di] << "</text>\n";
        }
    }
    file << "</svg>\n";
    if (!file.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace mvml
