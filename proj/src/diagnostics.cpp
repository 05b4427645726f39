#include "conceptkit/diagnostics.hpp"

#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"
#include "conceptkit/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conceptkit {

namespace {

double softplus(double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

double sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

struct Objective {
    const Eigen::MatrixXd& xs;   // standardised features
    const Eigen::VectorXd& y;
    double lambda;

    [[nodiscard]] double value(const Eigen::VectorXd& w, double b) const {
        const Eigen::VectorXd s = (xs * w).array() + b;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i) loss += softplus(s(i)) - y(i) * s(i);
        return loss / static_cast<double>(s.size()) + 0.5 * lambda * w.squaredNorm();
    }
};

void check_labels(std::span<const int> labels, std::size_t n, const char* what) {
    if (labels.size() != n) throw DimensionError(std::string(what) + ": label count does not match rows");
    std::size_t pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw DomainError(std::string(what) + ": labels must be 0 or 1");
        pos += static_cast<std::size_t>(l);
    }
    if (pos == 0 || pos == labels.size()) throw DomainError(std::string(what) + ": single-class input");
}

std::optional<double> correlation_or_empty(const std::vector<double>& xs, const std::vector<double>& ys) {
    try {
        return pearson_r(xs, ys);
    } catch (const DomainError&) {
        return std::nullopt;  // zero variance on one side
    }
}

void fill_correlations(LayerReport& report) {
    if (report.records.empty() || !report.records.front().auc) return;
    std::vector<double> q, e, a;
    for (const auto& r : report.records) {
        q.push_back(r.quota);
        e.push_back(r.evr);
        a.push_back(*r.auc);
    }
    report.r_quota_auc = correlation_or_empty(q, a);
    report.r_evr_auc = correlation_or_empty(e, a);
}

std::string csv_value(double v) {
    return io::format_double(v);
}

} // namespace

Eigen::MatrixXd ProbeModel::standardize(const Eigen::MatrixXd& x) const {
    if (x.cols() != feature_mean.size()) throw DimensionError("probe: feature dimension mismatch");
    return (x.rowwise() - feature_mean.transpose()).array().rowwise() / feature_scale.transpose().array();
}

Eigen::VectorXd ProbeModel::decision_scores(const Eigen::MatrixXd& x) const {
    return (standardize(x) * weights).array() + bias;
}

ProbeModel fit_probe(const Eigen::MatrixXd& x, std::span<const int> labels, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("fit_probe: lambda must be > 0");
    check_labels(labels, static_cast<std::size_t>(x.rows()), "fit_probe");
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();

    ProbeModel model;
    model.lambda = lambda;
    model.feature_mean = x.colwise().mean().transpose();
    model.feature_scale = ((x.rowwise() - model.feature_mean.transpose()).colwise().squaredNorm() /
                           static_cast<double>(n))
                              .cwiseSqrt()
                              .transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(model.feature_scale(j) > 0.0)) model.feature_scale(j) = 1.0;
    }
    const Eigen::MatrixXd xs = model.standardize(x);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
    const Objective objective{xs, y, lambda};

    // Parameters θ = [w; b].
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    Eigen::MatrixXd design(n, d + 1);
    design << xs, Eigen::VectorXd::Ones(n);
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, lambda);
    penalty(d) = 0.0;

    double current = objective.value(theta.head(d), theta(d));
    for (int iter = 0; iter < kProbeMaxIterations; ++iter) {
        const Eigen::VectorXd s = design * theta;
        Eigen::VectorXd p(n), weight(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = sigmoid(s(i));
            weight(i) = p(i) * (1.0 - p(i));
        }
        Eigen::VectorXd grad = design.transpose() * (p - y) / static_cast<double>(n);
        grad += penalty.cwiseProduct(theta);
        model.iterations = iter;
        if (grad.lpNorm<Eigen::Infinity>() < kProbeGradientTolerance) {
            model.converged = true;
            break;
        }
        Eigen::MatrixXd hessian = design.transpose() * weight.asDiagonal() * design / static_cast<double>(n);
        hessian.diagonal() += penalty;
        // Keeps the bias block invertible when every sample is saturated.
        hessian.diagonal().array() += 1e-12;
        const Eigen::VectorXd step = hessian.ldlt().solve(grad);
        if (!step.allFinite()) throw NumericError("fit_probe: Newton step is not finite");

        double t = 1.0;
        Eigen::VectorXd candidate = theta - step;
        double next = objective.value(candidate.head(d), candidate(d));
        const double slope = grad.dot(step);
        while (next > current - 1e-4 * t * slope && t > 1e-10) {
            t *= 0.5;
            candidate = theta - t * step;
            next = objective.value(candidate.head(d), candidate(d));
        }
        theta = candidate;
        current = next;
        model.iterations = iter + 1;
    }
    model.weights = theta.head(d);
    model.bias = theta(d);
    return model;
}

std::vector<int> binary_labels(const ActivationBundle& bundle) {
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(bundle.rows()));
    for (Eigen::Index i = 0; i < bundle.rows(); ++i) {
        switch (bundle.pole(i)) {
            case Pole::positive: labels.push_back(1); break;
            case Pole::negative: labels.push_back(0); break;
            case Pole::neutral: throw DomainError("probe bundles must not contain neutral rows");
        }
    }
    return labels;
}

ProbeModel fit_probe(const ActivationBundle& train, double lambda) {
    const auto labels = binary_labels(train);
    return fit_probe(train.to_double(), labels, lambda);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_labels(labels, scores.size(), "auc");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        // Average 1-based rank over the tie group [i, j].
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[order[t]] == 1) {
                rank_sum_pos += rank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const auto pos = static_cast<double>(n_pos);
    const auto neg = static_cast<double>(n - n_pos);
    return (rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionError("pearson_r: length mismatch");
    if (xs.size() < 2) throw DomainError("pearson_r: need at least two points");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DomainError("pearson_r: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<LayerReport> layer_sweep(std::span<const ActivationBundle> layers, std::span<const double> apertures,
                                     Eigen::Index k, std::span<const ProbeSplit> probe_data, double lambda) {
    if (layers.empty()) throw DomainError("layer_sweep: no layers");
    if (apertures.empty()) throw DomainError("layer_sweep: no apertures");
    if (!probe_data.empty()) {
        if (probe_data.size() != layers.size()) throw DimensionError("layer_sweep: probe data does not match layers");
        if (layers.size() < 2) throw DomainError("layer_sweep: correlations need at least 2 layers");
    }

    // Sort layers so records come out strictly increasing.
    std::vector<std::size_t> order(layers.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return layers[a].manifest().layer < layers[b].manifest().layer;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (layers[order[i]].manifest().layer == layers[order[i - 1]].manifest().layer) {
            throw DataError("layer_sweep: duplicate layer " + std::to_string(layers[order[i]].manifest().layer));
        }
    }

    std::vector<LayerReport> reports(apertures.size());
    for (std::size_t a = 0; a < apertures.size(); ++a) {
        reports[a].aperture = apertures[a];
        reports[a].k = k;
    }
    for (std::size_t idx : order) {
        const auto& bundle = layers[idx];
        const auto r = correlation_matrix(bundle);
        const Conceptor base = fit_conceptor(r, apertures.front());
        const double explained = evr(base.spectrum(), k);

        std::optional<double> held_out_auc;
        if (!probe_data.empty()) {
            const auto& split = probe_data[idx];
            if (split.train.manifest().layer != bundle.manifest().layer ||
                split.test.manifest().layer != bundle.manifest().layer) {
                throw DataError("layer_sweep: probe bundles for layer " + std::to_string(bundle.manifest().layer) +
                                " carry a different layer field");
            }
            const auto model = fit_probe(split.train, lambda);
            const Eigen::VectorXd scores = model.decision_scores(split.test.to_double());
            held_out_auc = auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                               binary_labels(split.test));
        }
        for (std::size_t a = 0; a < apertures.size(); ++a) {
            const Conceptor c = a == 0 ? base : regate(base, apertures[a]);
            reports[a].records.push_back(
                LayerRecord{bundle.manifest().layer, apertures[a], quota(c), explained, trace_dim(c), held_out_auc});
        }
    }
    for (auto& report : reports) {
        double total = 0.0;
        for (const auto& rec : report.records) total += rec.trace;
        report.mean_trace = total / static_cast<double>(report.records.size());
        fill_correlations(report);
    }
    return reports;
}

LayerReport layer_sweep(std::span<const ActivationBundle> layers, double aperture, Eigen::Index k,
                        std::span<const ProbeSplit> probe_data, double lambda) {
    const double apertures[] = {aperture};
    return std::move(layer_sweep(layers, apertures, k, probe_data, lambda).front());
}

std::string report_csv(const LayerReport& report) {
    std::string out = "layer,quota,evr,trace,auc\n";
    for (const auto& r : report.records) {
        out += std::to_string(r.layer) + "," + csv_value(r.quota) + "," + csv_value(r.evr) + "," +
               csv_value(r.trace) + "," + (r.auc ? csv_value(*r.auc) : std::string()) + "\n";
    }
    return out;
}

std::string stacked_report_csv(std::span<const LayerReport> reports) {
    std::string out = "alpha,layer,quota,evr,trace,auc\n";
    for (const auto& report : reports) {
        for (const auto& r : report.records) {
            out += csv_value(r.aperture) + "," + std::to_string(r.layer) + "," + csv_value(r.quota) + "," +
                   csv_value(r.evr) + "," + csv_value(r.trace) + "," + (r.auc ? csv_value(*r.auc) : std::string()) +
                   "\n";
        }
    }
    return out;
}

std::string report_summary_json(std::span<const LayerReport> reports) {
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& report : reports) {
        nlohmann::json entry;
        entry["alpha"] = report.aperture;
        entry["k"] = report.k;
        entry["layers"] = report.records.size();
        entry["mean_trace"] = report.mean_trace;
        entry["r_quota_auc"] = report.r_quota_auc ? nlohmann::json(*report.r_quota_auc) : nlohmann::json(nullptr);
        entry["r_evr_auc"] = report.r_evr_auc ? nlohmann::json(*report.r_evr_auc) : nlohmann::json(nullptr);
        summary.push_back(std::move(entry));
    }
    return summary.dump(2) + "\n";
}

} // namespace conceptkit
