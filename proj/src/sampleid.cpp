#include "mvml/sampleid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mvml {

IdThreshold estimate_threshold(const MultiViewDataset& data,
                               const MahalanobisMetric& metric, double alpha) {
    if (data.n < 2) {
        throw std::invalid_argument("estimate_threshold: need n >= 2 views");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("estimate_threshold: alpha must lie in (0,1)");
    }
    const int m = data.m;
    if (m < 1) throw std::invalid_argument("estimate_threshold: empty dataset");

    // Batched within-sample distances: gather the first two views and whiten
    // the differences once.
    Matrix diff(m, data.d);
    for (int i = 0; i < m; ++i) {
        diff.row(i) = data.view(i, 0) - data.view(i, 1);
    }
    std::vector<double> dists(m);
    const Matrix wdiff = whiten(metric, diff);
    for (int i = 0; i < m; ++i) dists[i] = wdiff.row(i).squaredNorm();

    // ceil((1-alpha)*m)-th ascending order statistic, 1-based. The tiny
    // epsilon keeps exact-integer products (e.g. 0.95 * 20) from rounding up.
    const int index = static_cast<int>(std::ceil((1.0 - alpha) * m - 1e-9));
    const int pos = std::min(std::max(index, 1), m) - 1;
    std::nth_element(dists.begin(), dists.begin() + pos, dists.end());

    IdThreshold threshold;
    threshold.value = dists[pos];
    threshold.alpha = alpha;
    threshold.n_calibration = m;
    return threshold;
}

IdDecision identify(const Vector& x1, const Vector& x2,
                    const MahalanobisMetric& metric, const IdThreshold& threshold) {
    return mahalanobis_sq(metric, x1, x2) > threshold.value
               ? IdDecision::different_sample
               : IdDecision::same_sample;
}

double id_power(const FactorModelSpec& model, const MahalanobisMetric& metric,
                const IdThreshold& threshold, const Vector& delta_z, int reps,
                Rng& rng) {
    if (reps < 1) throw std::invalid_argument("id_power: need reps >= 1");
    if (delta_z.size() != model.K) {
        throw std::invalid_argument("id_power: delta_z must have K entries");
    }
    const Matrix b = model.loading();
    const double sigma = std::sqrt(model.sigma2);
    const Vector signal_shift = b * delta_z;

    int rejections = 0;
    Vector noise1(model.d), noise2(model.d);
    for (int rep = 0; rep < reps; ++rep) {
        auto [z, y] = sample_population(model, 1, rng);
        (void)y;
        for (int k = 0; k < model.d; ++k) noise1(k) = sigma * rng.normal();
        for (int k = 0; k < model.d; ++k) noise2(k) = sigma * rng.normal();
        const Vector x1 = b * z.row(0).transpose() + noise1;
        const Vector x2 = x1 - noise1 + signal_shift + noise2;
        rejections += identify(x1, x2, metric, threshold) == IdDecision::different_sample;
    }
    return static_cast<double>(rejections) / reps;
}

}  // namespace mvml
