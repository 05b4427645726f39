#pragma once

#include "conceptkit/activation_store.hpp"
#include "conceptkit/conceptor.hpp"

#include <Eigen/Dense>

#include <string>

namespace conceptkit {

inline constexpr Eigen::Index kDefaultSubspaceRank = 10;

// d×k orthonormal basis of the top-k right singular vectors of X, columns in
// descending singular-value order. Each column's largest-magnitude entry is
// positive.
struct SubspaceBasis {
    Eigen::MatrixXd basis;
    Eigen::VectorXd singular_values;
    std::string source;

    [[nodiscard]] Eigen::Index dim() const { return basis.rows(); }
    [[nodiscard]] Eigen::Index rank() const { return basis.cols(); }
    [[nodiscard]] Eigen::MatrixXd projector() const { return basis * basis.transpose(); }
};

[[nodiscard]] SubspaceBasis top_k_subspace(const ActivationBundle& bundle, Eigen::Index k);
[[nodiscard]] SubspaceBasis top_k_subspace(const Eigen::MatrixXd& x, Eigen::Index k, std::string source = {});

enum class DiffMeanVariant { bipolar_vs_null, unipolar_pos_minus_neg, unipolar_neg_minus_pos };

[[nodiscard]] std::string_view to_string(DiffMeanVariant v);
[[nodiscard]] DiffMeanVariant parse_diffmean_variant(std::string_view text);

struct DiffMeanVector {
    Eigen::VectorXd vector;
    DiffMeanVariant variant = DiffMeanVariant::unipolar_pos_minus_neg;
};

// v̄₊ − v̄₋, v̄₋ − v̄₊, or v̄(pos ∪ neg) − v̄(neutral).
[[nodiscard]] DiffMeanVector diffmean(const ActivationBundle& bundle, DiffMeanVariant variant);

// Mean of all rows; the Addition baseline's steering vector.
[[nodiscard]] Eigen::VectorXd mean_activation(const ActivationBundle& bundle);

// ‖V_kV_kᵀv‖² / ‖v‖². Throws for ‖v‖ < 1e-12.
[[nodiscard]] double capture_fraction(const Eigen::VectorXd& v, const SubspaceBasis& basis);
[[nodiscard]] double capture_fraction(const DiffMeanVector& v, const SubspaceBasis& basis);

// (1/k)‖V_aᵀV_b‖²_F, the mean squared cosine of the principal angles.
[[nodiscard]] double subspace_overlap(const SubspaceBasis& a, const SubspaceBasis& b);

// Cumulative explained variance ratio of the top-k eigenvalues of R.
[[nodiscard]] double evr(const CorrelationMatrix& r, Eigen::Index k);
// Same quantity from an already-descending nonnegative spectrum.
[[nodiscard]] double evr(const Eigen::VectorXd& descending_spectrum, Eigen::Index k);

} // namespace conceptkit
