/**
 * sampleid.hpp — distance-threshold sample identification.
 *
 * The test decides whether two views share a latent sample: reject
 * ("different sample") exactly when D(x1, x2) > T, with T calibrated as the
 * empirical upper-alpha quantile of within-sample view distances
 * D(X_{i,1}, X_{i,2}).  The quantile convention is pinned to the
 * ceil((1-alpha)*m)-th ascending order statistic (1-based) and unit-tested,
 * since off-by-one conventions differ between libraries.
 */
#ifndef MVML_SAMPLEID_HPP
#define MVML_SAMPLEID_HPP

#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"

namespace mvml {

struct IdThreshold {
    double value = 0.0;     // T >= 0
    double alpha = 0.05;    // calibration level
    int n_calibration = 0;  // within-sample pairs used
};

enum class IdDecision { same_sample, different_sample };

/// Calibrate T on the first two views of each sample in `data`.
IdThreshold estimate_threshold(const MultiViewDataset& data,
                               const MahalanobisMetric& metric, double alpha);

/// different_sample iff D(x1, x2) > T (strict).
IdDecision identify(const Vector& x1, const Vector& x2,
                    const MahalanobisMetric& metric, const IdThreshold& threshold);

/// Rejection rate over `reps` fresh pairs (Z, Z + delta_z), one view each.
/// delta_z = 0 measures size rather than power.
double id_power(const FactorModelSpec& model, const MahalanobisMetric& metric,
                const IdThreshold& threshold, const Vector& delta_z, int reps,
                Rng& rng);

}  // namespace mvml

#endif  // MVML_SAMPLEID_HPP
