#include "conceptkit/synthetic.hpp"

#include "conceptkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace conceptkit {

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
    }
    return g;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(d, d, rng));
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

// n×r coordinates with zero column means and (1/n)·GᵀG = I on the first
// min(r, n-1) columns; any remaining columns are zero.
Eigen::MatrixXd whitened_coordinates(Eigen::Index n, Eigen::Index r, std::mt19937_64& rng) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, r);
    const Eigen::Index usable = std::min(r, n - 1);
    if (usable <= 0) return out;
    Eigen::MatrixXd g = gaussian(n, usable, rng);
    g.rowwise() -= g.colwise().mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, usable);
    out.leftCols(usable) = q * std::sqrt(static_cast<double>(n));
    return out;
}

BundleManifest synthetic_manifest(std::string concept_name, std::int64_t layer) {
    BundleManifest m;
    m.model_id = "synthetic";
    m.concept_name = std::move(concept_name);
    m.layer = layer;
    return m;
}

} // namespace

double within_pole_spread(double pole_gap) {
    return 0.6 * std::max(pole_gap, 1.0);
}

ActivationBundle synth_bipolar(const SynthBipolarParams& p) {
    if (p.d <= 0 || p.n_per_pole <= 0) throw DomainError("synth_bipolar: d and n_per_pole must be positive");
    if (p.within_pole_rank < 0) throw DomainError("synth_bipolar: within_pole_rank must be >= 0");
    if (p.within_pole_rank >= p.d) {
        throw DomainError("synth_bipolar: within_pole_rank (" + std::to_string(p.within_pole_rank) +
                          ") must be < d (" + std::to_string(p.d) + ")");
    }
    if (!(p.pole_gap >= 0.0) || !std::isfinite(p.pole_gap)) throw DomainError("synth_bipolar: pole_gap must be >= 0");
    if (p.noise_scale && (!(*p.noise_scale >= 0.0) || !std::isfinite(*p.noise_scale))) {
        throw DomainError("synth_bipolar: noise_scale must be a finite real >= 0");
    }

    std::mt19937_64 rng(p.seed);
    const Eigen::MatrixXd basis = random_orthonormal(p.d, rng);
    const Eigen::VectorXd u = basis.col(0);
    const Eigen::Index r = p.within_pole_rank;
    const Eigen::Index complement = p.d - 1;

    auto pole_directions = [&](Eigen::Index offset) {
        Eigen::MatrixXd dirs(p.d, r);
        for (Eigen::Index j = 0; j < r; ++j) dirs.col(j) = basis.col(1 + (offset + j) % complement);
        return dirs;
    };
    const double spread = p.noise_scale.value_or(within_pole_spread(p.pole_gap));
    const Eigen::Index n = p.n_per_pole;

    Eigen::MatrixXd x(2 * n, p.d);
    BundleManifest m = synthetic_manifest("synthetic_bipolar", 0);
    for (int pole = 0; pole < 2; ++pole) {
        const double sign = pole == 0 ? 1.0 : -1.0;
        const Eigen::MatrixXd dirs = pole_directions(pole == 0 ? 0 : r);
        const Eigen::MatrixXd coords = whitened_coordinates(n, r, rng) * spread;
        Eigen::MatrixXd rows = coords * dirs.transpose();
        rows.rowwise() += (sign * p.pole_gap / 2.0) * u.transpose();
        x.middleRows(pole * n, n) = rows;
        for (Eigen::Index i = 0; i < n; ++i) m.pole_labels.push_back(pole == 0 ? Pole::positive : Pole::negative);
    }
    return ActivationBundle(std::move(m), x.cast<float>());
}

ConceptPair synth_concept_pair(Eigen::Index d, Eigen::Index n, Eigen::Index k, Eigen::Index shared,
                               std::uint64_t seed) {
    if (k <= 0 || n < k) throw DomainError("synth_concept_pair: need 1 <= k <= n");
    if (shared < 0 || shared > k) throw DomainError("synth_concept_pair: need 0 <= shared <= k");
    if (2 * k - shared > d) throw DomainError("synth_concept_pair: need 2k - shared <= d");

    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd basis = random_orthonormal(d, rng);
    Eigen::MatrixXd dirs_a = basis.leftCols(k);
    Eigen::MatrixXd dirs_b(d, k);
    dirs_b.leftCols(shared) = basis.leftCols(shared);
    dirs_b.rightCols(k - shared) = basis.middleCols(k, k - shared);

    // Signal energies decay from 4 to 1 across the k directions; the noise
    // floor sits three orders of magnitude below the weakest direction.
    Eigen::VectorXd scale(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        scale(j) = std::sqrt(4.0 - 3.0 * static_cast<double>(j) / static_cast<double>(std::max<Eigen::Index>(k - 1, 1)));
    }
    auto make = [&](const Eigen::MatrixXd& dirs, const char* name) {
        Eigen::MatrixXd coords = gaussian(n, k, rng) * scale.asDiagonal();
        Eigen::MatrixXd x = coords * dirs.transpose() + gaussian(n, d, rng, 0.03);
        BundleManifest m = synthetic_manifest(name, 0);
        for (Eigen::Index i = 0; i < n; ++i) m.pole_labels.push_back(i % 2 == 0 ? Pole::positive : Pole::negative);
        return ActivationBundle(std::move(m), x.cast<float>());
    };
    auto a = make(dirs_a, "concept_a");
    auto b = make(dirs_b, "concept_b");
    return {std::move(a), std::move(b)};
}

std::vector<SuiteLayer> synth_layer_suite(Eigen::Index d, Eigen::Index n_per_pole, int layers,
                                          std::uint64_t seed) {
    if (layers < 1) throw DomainError("synth_layer_suite: need at least one layer");
    if (d < 4) throw DomainError("synth_layer_suite: need d >= 4");
    if (n_per_pole < 2) throw DomainError("synth_layer_suite: need n_per_pole >= 2");

    const Eigen::Index max_rank = std::max<Eigen::Index>(1, d / 2 - 1);
    std::vector<SuiteLayer> suite;
    suite.reserve(static_cast<std::size_t>(layers));
    for (int layer = 0; layer < layers; ++layer) {
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(layer));
        const double t = (layer + 0.5) / layers;
        const double profile = std::sin(std::numbers::pi * t);
        const double margin = 0.4 + 2.4 * profile;
        const auto rank = static_cast<Eigen::Index>(1 + std::lround(profile * static_cast<double>(max_rank - 1)));

        const Eigen::MatrixXd basis = random_orthonormal(d, rng);
        const Eigen::VectorXd u = basis.col(0);
        const Eigen::MatrixXd structure = basis.middleCols(1, rank);

        auto draw = [&](const char* name, std::optional<Split> split) {
            const Eigen::Index n = 2 * n_per_pole;
            Eigen::MatrixXd x = gaussian(n, rank, rng) * structure.transpose() + gaussian(n, d, rng, 0.05);
            const Eigen::VectorXd axis = gaussian(n, 1, rng).col(0);
            BundleManifest m = synthetic_manifest(name, layer);
            m.split = split;
            for (Eigen::Index i = 0; i < n; ++i) {
                const bool positive = i < n_per_pole;
                const double offset = (positive ? 0.5 : -0.5) * margin + axis(i);
                x.row(i) += offset * u.transpose();
                m.pole_labels.push_back(positive ? Pole::positive : Pole::negative);
            }
            return ActivationBundle(std::move(m), x.cast<float>());
        };
        auto pooled = draw("synthetic_suite", std::nullopt);
        auto train = draw("synthetic_suite_probe", Split::train);
        auto test = draw("synthetic_suite_probe", Split::test);
        suite.push_back(SuiteLayer{std::move(pooled), std::move(train), std::move(test), margin, rank});
    }
    return suite;
}

} // namespace conceptkit
