#include "conceptkit/conceptor.hpp"

#include "conceptkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace conceptkit {

namespace {

void check_aperture(double aperture) {
    if (!(aperture > 0.0) || !std::isfinite(aperture)) {
        throw DomainError("aperture must be a finite real > 0");
    }
}

} // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd r, Eigen::Index n_samples)
    : n_samples_(n_samples) {
    if (r.rows() == 0 || r.rows() != r.cols()) throw DimensionError("correlation matrix must be square and non-empty");
    if (!r.allFinite()) throw DataError("correlation matrix has non-finite entries");
    const double norm = r.norm();
    if (norm > 0.0 && (r - r.transpose()).norm() > 1e-12 * norm) {
        throw DataError("correlation matrix is not symmetric");
    }
    r_ = 0.5 * (r + r.transpose());
    if (norm > 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(r_, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition did not converge");
        const auto& ev = solver.eigenvalues();
        if (ev(0) < -1e-10 * std::max(ev(ev.size() - 1), 0.0)) {
            throw DataError("correlation matrix is not positive semidefinite");
        }
    }
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& x) {
    if (x.rows() < 1 || x.cols() < 1) throw DimensionError("correlation_matrix: need N >= 1 and d >= 1");
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    r.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
    Eigen::MatrixXd full = r.selfadjointView<Eigen::Lower>();
    return CorrelationMatrix(std::move(full), x.rows());
}

CorrelationMatrix correlation_matrix(const ActivationBundle& bundle) {
    return correlation_matrix(bundle.to_double());
}

double gate(double sigma, double aperture) {
    if (std::isinf(sigma)) return 1.0;
    return sigma / (sigma + 1.0 / (aperture * aperture));
}

Conceptor::Conceptor(Eigen::MatrixXd eigenvectors, Eigen::VectorXd spectrum, double aperture)
    : u_(std::move(eigenvectors)), sigma_(std::move(spectrum)), aperture_(aperture) {
    check_aperture(aperture);
    const Eigen::Index d = u_.rows();
    if (d == 0 || u_.cols() != d || sigma_.size() != d) {
        throw DimensionError("conceptor needs a d×d eigenvector matrix and d spectrum values");
    }
    if (!u_.allFinite()) throw DataError("conceptor eigenvectors have non-finite entries");
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(sigma_(j) >= 0.0) || !std::isfinite(sigma_(j))) {
            throw DataError("conceptor spectrum must be finite and nonnegative");
        }
        if (j > 0 && sigma_(j) > sigma_(j - 1)) throw DataError("conceptor spectrum must be descending");
    }
    gamma_.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) gamma_(j) = gate(sigma_(j), aperture_);
}

Eigen::MatrixXd Conceptor::matrix() const {
    Eigen::MatrixXd c = u_ * gamma_.asDiagonal() * u_.transpose();
    return 0.5 * (c + c.transpose());
}

SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition did not converge");
    const Eigen::Index d = m.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
    SymmetricEigen out{Eigen::MatrixXd(d, d), Eigen::VectorXd(d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto src = order[static_cast<std::size_t>(j)];
        out.vectors.col(j) = solver.eigenvectors().col(src);
        out.values(j) = values(src);
    }
    return out;
}

Conceptor fit_conceptor(const CorrelationMatrix& r, double aperture) {
    check_aperture(aperture);
    auto eig = symmetric_eigen_descending(r.matrix());
    const double top = std::max(eig.values(0), 0.0);
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        if (eig.values(j) < kSpectrumClampRatio * top || top == 0.0) eig.values(j) = 0.0;
    }
    return Conceptor(std::move(eig.vectors), std::move(eig.values), aperture);
}

Conceptor regate(const Conceptor& c, double aperture) {
    check_aperture(aperture);
    return Conceptor(c.eigenvectors(), c.spectrum(), aperture);
}

double quota(const Conceptor& c) {
    return c.gates().mean();
}

double trace_dim(const Conceptor& c) {
    return c.gates().sum();
}

std::vector<GatePair> gating_coefficients(const Conceptor& c) {
    std::vector<GatePair> out;
    out.reserve(static_cast<std::size_t>(c.dim()));
    for (Eigen::Index j = 0; j < c.dim(); ++j) out.push_back({c.spectrum()(j), c.gates()(j)});
    return out;
}

} // namespace conceptkit
