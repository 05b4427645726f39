#pragma once

#include "conceptkit/activation_store.hpp"
#include "conceptkit/conceptor.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conceptkit {

inline constexpr double kDefaultProbeLambda = 1.0;
inline constexpr int kProbeMaxIterations = 500;
inline constexpr double kProbeGradientTolerance = 1e-8;

// L2-regularised logistic regression on standardised features.
struct ProbeModel {
    Eigen::VectorXd weights;        // in standardised feature space
    double bias = 0.0;
    double lambda = kDefaultProbeLambda;
    Eigen::VectorXd feature_mean;   // train-split statistics
    Eigen::VectorXd feature_scale;
    int iterations = 0;
    bool converged = false;

    [[nodiscard]] Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) const;
    [[nodiscard]] Eigen::VectorXd decision_scores(const Eigen::MatrixXd& x) const;
};

// Minimises mean logistic loss + (λ/2)‖w‖² (bias unpenalised) with damped
// Newton steps from w = 0, b = 0. Stops when ‖∇‖∞ < 1e-8 or after 500 steps.
[[nodiscard]] ProbeModel fit_probe(const Eigen::MatrixXd& x, std::span<const int> labels,
                                   double lambda = kDefaultProbeLambda);
// Labels from the pole tags: positive → 1, negative → 0. Neutral rows are rejected.
[[nodiscard]] ProbeModel fit_probe(const ActivationBundle& train, double lambda = kDefaultProbeLambda);
[[nodiscard]] std::vector<int> binary_labels(const ActivationBundle& bundle);

// Mann–Whitney AUC, ties count one half.
[[nodiscard]] double auc(std::span<const double> scores, std::span<const int> labels);

[[nodiscard]] double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct LayerRecord {
    std::int64_t layer = 0;
    double aperture = kDefaultAperture;
    double quota = 0.0;
    double evr = 0.0;
    double trace = 0.0;
    std::optional<double> auc;
};

struct LayerReport {
    double aperture = kDefaultAperture;
    Eigen::Index k = 0;
    std::vector<LayerRecord> records;  // strictly increasing layer
    std::optional<double> r_quota_auc;
    std::optional<double> r_evr_auc;
    double mean_trace = 0.0;
};

struct ProbeSplit {
    ActivationBundle train;
    ActivationBundle test;
};

// Per layer: R, conceptor at α, quota, EVR@k, trace and, with probe data,
// held-out probe AUC plus r(quota, AUC) and r(EVR, AUC) across layers.
// probe_data, when given, is index-aligned with `layers`.
[[nodiscard]] LayerReport layer_sweep(std::span<const ActivationBundle> layers, double aperture, Eigen::Index k,
                                      std::span<const ProbeSplit> probe_data = {},
                                      double lambda = kDefaultProbeLambda);

// One report per aperture; R is decomposed once per layer and re-gated.
[[nodiscard]] std::vector<LayerReport> layer_sweep(std::span<const ActivationBundle> layers,
                                                   std::span<const double> apertures, Eigen::Index k,
                                                   std::span<const ProbeSplit> probe_data = {},
                                                   double lambda = kDefaultProbeLambda);

// CSV with the fixed header `layer,quota,evr,trace,auc`.
[[nodiscard]] std::string report_csv(const LayerReport& report);
// Long format, one row per layer×α: `alpha,layer,quota,evr,trace,auc`.
[[nodiscard]] std::string stacked_report_csv(std::span<const LayerReport> reports);
// JSON summary (correlations and mean trace per aperture).
[[nodiscard]] std::string report_summary_json(std::span<const LayerReport> reports);

} // namespace conceptkit
