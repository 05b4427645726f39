#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library; loops and dense LU only.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

// Orthonormal columns by modified Gram-Schmidt on a Gaussian matrix.
inline Eigen::MatrixXd random_orthonormal(Eigen::Index d, std::mt19937_64& rng) {
    Eigen::MatrixXd q = random_matrix(d, d, rng);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        q.col(j) /= q.col(j).norm();
    }
    return q;
}

// R = (1/N) Σ x xᵀ, triple loop.
inline Eigen::MatrixXd correlation(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows(), d = x.cols();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) r(i, j) += x(s, i) * x(s, j);
        }
    }
    return r / static_cast<double>(n);
}

// R (R + α⁻² I)⁻¹ by LU solve; R and (R + α⁻²I)⁻¹ commute.
inline Eigen::MatrixXd dense_conceptor(const Eigen::MatrixXd& r, double alpha) {
    const Eigen::Index d = r.rows();
    const Eigen::MatrixXd shifted = r + Eigen::MatrixXd::Identity(d, d) / (alpha * alpha);
    return shifted.fullPivLu().solve(r);
}

// (1/N) Σ ‖x − Cx‖² + α⁻² ‖C‖²_F evaluated sample by sample.
inline double conceptor_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c, double alpha) {
    double loss = 0.0;
    for (Eigen::Index s = 0; s < x.rows(); ++s) {
        const Eigen::VectorXd v = x.row(s).transpose();
        loss += (v - c * v).squaredNorm();
    }
    return loss / static_cast<double>(x.rows()) + c.squaredNorm() / (alpha * alpha);
}

// ∇_C of the objective above: 2(C − I)R + 2α⁻²C.
inline Eigen::MatrixXd conceptor_gradient(const Eigen::MatrixXd& r, const Eigen::MatrixXd& c, double alpha) {
    const Eigen::Index d = r.rows();
    return 2.0 * (c - Eigen::MatrixXd::Identity(d, d)) * r + 2.0 * c / (alpha * alpha);
}

inline Eigen::MatrixXd finite_difference_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c, double alpha,
                                                  double h = 1e-5) {
    Eigen::MatrixXd g(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            Eigen::MatrixXd plus = c, minus = c;
            plus(i, j) += h;
            minus(i, j) -= h;
            g(i, j) = (conceptor_objective(x, plus, alpha) - conceptor_objective(x, minus, alpha)) / (2.0 * h);
        }
    }
    return g;
}

// Plain gradient descent from C = 0. The step uses tr(R) + α⁻² as a bound on
// the Hessian's top eigenvalue, so no eigen solver is involved.
inline Eigen::MatrixXd gradient_descent_conceptor(const Eigen::MatrixXd& r, double alpha, double tol = 1e-11,
                                                  long max_iter = 5'000'000) {
    const Eigen::Index d = r.rows();
    const double step = 1.0 / (2.0 * (r.trace() + 1.0 / (alpha * alpha)));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (long it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd g = conceptor_gradient(r, c, alpha);
        if (g.norm() < tol) break;
        c -= step * g;
    }
    return c;
}

// Scalar Boolean operations on gate values in [0,1].
inline double scalar_not(double a) { return 1.0 - a; }
inline double scalar_and(double a, double b) {
    const double denom = a + b - a * b;
    return denom == 0.0 ? 0.0 : a * b / denom;
}
inline double scalar_or(double a, double b) { return scalar_not(scalar_and(scalar_not(a), scalar_not(b))); }

// Largest principal angle between column spaces of orthonormal a and b.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
    const double smallest = svd.singularValues().minCoeff();
    return std::acos(std::clamp(smallest, -1.0, 1.0));
}

// Pairwise Mann-Whitney AUC; ties count one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// L2-penalised logistic regression on already standardised features by
// gradient descent: mean log-loss + (λ/2)‖w‖², bias unpenalised.
struct LogisticFit {
    Eigen::VectorXd w;
    double b = 0.0;
};

inline LogisticFit gradient_descent_logistic(const Eigen::MatrixXd& xs, const std::vector<int>& y, double lambda,
                                             long iters = 200'000, double lr = 0.2) {
    const Eigen::Index n = xs.rows(), d = xs.cols();
    LogisticFit fit{Eigen::VectorXd::Zero(d), 0.0};
    for (long it = 0; it < iters; ++it) {
        Eigen::VectorXd gw = lambda * fit.w;
        double gb = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = xs.row(i).dot(fit.w) + fit.b;
            const double p = 1.0 / (1.0 + std::exp(-s));
            const double e = (p - y[static_cast<std::size_t>(i)]) / static_cast<double>(n);
            gw += e * xs.row(i).transpose();
            gb += e;
        }
        if (gw.norm() + std::abs(gb) < 1e-12) break;
        fit.w -= lr * gw;
        fit.b -= lr * gb;
    }
    return fit;
}

} // namespace oracle
