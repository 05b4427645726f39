#pragma once

#include "conceptkit/activation_store.hpp"

#include <Eigen/Dense>

#include <vector>

namespace conceptkit {

// Table-1 style default aperture.
inline constexpr double kDefaultAperture = 10.0;

// Eigenvalues of R below this fraction of the largest are treated as zero.
inline constexpr double kSpectrumClampRatio = 1e-12;

// R = (1/N)·XᵀX on raw activations: no centering, 1/N normalisation.
class CorrelationMatrix {
public:
    // Validates symmetry (1e-12 relative Frobenius) and PSD
    // (min eigenvalue >= -1e-10·max), then stores (R + Rᵀ)/2.
    CorrelationMatrix(Eigen::MatrixXd r, Eigen::Index n_samples);

    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return r_; }
    [[nodiscard]] Eigen::Index n_samples() const { return n_samples_; }
    [[nodiscard]] Eigen::Index dim() const { return r_.rows(); }

private:
    Eigen::MatrixXd r_;
    Eigen::Index n_samples_;
};

[[nodiscard]] CorrelationMatrix correlation_matrix(const ActivationBundle& bundle);
[[nodiscard]] CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& x);

// Soft gate for one principal direction: σ / (σ + α⁻²). An infinite σ gates to 1.
[[nodiscard]] double gate(double sigma, double aperture);

// C = U·diag(γ)·Uᵀ with γ_j = gate(σ_j, α), stored in eigen form so that
// re-gating at a new aperture costs O(d).
class Conceptor {
public:
    // U: orthonormal columns; spectrum: nonnegative, descending, finite.
    Conceptor(Eigen::MatrixXd eigenvectors, Eigen::VectorXd spectrum, double aperture);

    [[nodiscard]] Eigen::Index dim() const { return u_.rows(); }
    [[nodiscard]] double aperture() const { return aperture_; }
    [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const { return u_; }
    [[nodiscard]] const Eigen::VectorXd& spectrum() const { return sigma_; }
    [[nodiscard]] const Eigen::VectorXd& gates() const { return gamma_; }

    // Dense d×d matrix, rebuilt on every call.
    [[nodiscard]] Eigen::MatrixXd matrix() const;

private:
    Eigen::MatrixXd u_;
    Eigen::VectorXd sigma_;
    Eigen::VectorXd gamma_;
    double aperture_;
};

// Closed-form minimiser of (1/N)Σ‖xᵢ − Cxᵢ‖² + α⁻²‖C‖²_F, obtained by
// gating the eigenvalues of R. Never inverts a general matrix.
[[nodiscard]] Conceptor fit_conceptor(const CorrelationMatrix& r, double aperture = kDefaultAperture);

// Same eigenbasis and spectrum, gates recomputed at the new aperture.
[[nodiscard]] Conceptor regate(const Conceptor& c, double aperture);

[[nodiscard]] double quota(const Conceptor& c);
[[nodiscard]] double trace_dim(const Conceptor& c);

struct GatePair {
    double sigma;
    double gamma;
};

[[nodiscard]] std::vector<GatePair> gating_coefficients(const Conceptor& c);

// Descending eigen-decomposition of a symmetric matrix. Ties keep the
// solver's original order. Throws NumericError on non-convergence.
struct SymmetricEigen {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};
[[nodiscard]] SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& m);

} // namespace conceptkit
