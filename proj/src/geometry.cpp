#include "conceptkit/geometry.hpp"

#include "conceptkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace conceptkit {

SubspaceBasis top_k_subspace(const Eigen::MatrixXd& x, Eigen::Index k, std::string source) {
    const Eigen::Index limit = std::min(x.rows(), x.cols());
    if (k < 1 || k > limit) {
        throw DomainError("k=" + std::to_string(k) + " out of range [1, " + std::to_string(limit) + "]");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");

    SubspaceBasis out;
    out.basis = svd.matrixV().leftCols(k);
    out.singular_values = svd.singularValues().head(k);
    out.source = std::move(source);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index arg = 0;
        out.basis.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.basis(arg, j) < 0.0) out.basis.col(j) *= -1.0;
    }
    return out;
}

SubspaceBasis top_k_subspace(const ActivationBundle& bundle, Eigen::Index k) {
    const auto& m = bundle.manifest();
    return top_k_subspace(bundle.to_double(), k, m.concept_name + "@layer" + std::to_string(m.layer));
}

std::string_view to_string(DiffMeanVariant v) {
    switch (v) {
        case DiffMeanVariant::bipolar_vs_null: return "bipolar_vs_null";
        case DiffMeanVariant::unipolar_pos_minus_neg: return "unipolar_pos_minus_neg";
        case DiffMeanVariant::unipolar_neg_minus_pos: return "unipolar_neg_minus_pos";
    }
    return "?";
}

DiffMeanVariant parse_diffmean_variant(std::string_view text) {
    if (text == "bipolar_vs_null") return DiffMeanVariant::bipolar_vs_null;
    if (text == "unipolar_pos_minus_neg") return DiffMeanVariant::unipolar_pos_minus_neg;
    if (text == "unipolar_neg_minus_pos") return DiffMeanVariant::unipolar_neg_minus_pos;
    throw FormatError("unknown diffmean variant '" + std::string(text) + "'");
}

namespace {

Eigen::VectorXd mean_where(const ActivationBundle& bundle, bool (*keep)(Pole), const char* what) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(bundle.dim());
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < bundle.rows(); ++i) {
        if (!keep(bundle.pole(i))) continue;
        sum += bundle.matrix().row(i).transpose().cast<double>();
        ++n;
    }
    if (n == 0) throw DomainError(std::string("diffmean: bundle has no ") + what + " rows");
    return sum / static_cast<double>(n);
}

bool is_positive(Pole p) { return p == Pole::positive; }
bool is_negative(Pole p) { return p == Pole::negative; }
bool is_neutral(Pole p) { return p == Pole::neutral; }
bool is_polar(Pole p) { return p != Pole::neutral; }

} // namespace

DiffMeanVector diffmean(const ActivationBundle& bundle, DiffMeanVariant variant) {
    switch (variant) {
        case DiffMeanVariant::unipolar_pos_minus_neg:
            return {mean_where(bundle, is_positive, "positive") - mean_where(bundle, is_negative, "negative"), variant};
        case DiffMeanVariant::unipolar_neg_minus_pos:
            return {mean_where(bundle, is_negative, "negative") - mean_where(bundle, is_positive, "positive"), variant};
        case DiffMeanVariant::bipolar_vs_null: {
            // Both poles must be present, not just one of them.
            (void)mean_where(bundle, is_positive, "positive");
            (void)mean_where(bundle, is_negative, "negative");
            return {mean_where(bundle, is_polar, "pole") - mean_where(bundle, is_neutral, "neutral"), variant};
        }
    }
    throw DomainError("diffmean: unknown variant");
}

Eigen::VectorXd mean_activation(const ActivationBundle& bundle) {
    return bundle.to_double().colwise().mean().transpose();
}

double capture_fraction(const Eigen::VectorXd& v, const SubspaceBasis& basis) {
    if (v.size() != basis.dim()) {
        throw DimensionError("capture_fraction: vector has d=" + std::to_string(v.size()) + ", basis has d=" +
                             std::to_string(basis.dim()));
    }
    const double norm2 = v.squaredNorm();
    if (!(std::sqrt(norm2) >= 1e-12)) throw DomainError("capture_fraction: vector norm below 1e-12");
    const double captured = (basis.basis.transpose() * v).squaredNorm();
    return std::clamp(captured / norm2, 0.0, 1.0);
}

double capture_fraction(const DiffMeanVector& v, const SubspaceBasis& basis) {
    return capture_fraction(v.vector, basis);
}

double subspace_overlap(const SubspaceBasis& a, const SubspaceBasis& b) {
    if (a.dim() != b.dim()) throw DimensionError("subspace_overlap: bases live in different dimensions");
    if (a.rank() != b.rank()) {
        throw DimensionError("subspace_overlap: k mismatch (" + std::to_string(a.rank()) + " vs " +
                             std::to_string(b.rank()) + ")");
    }
    const double value = (a.basis.transpose() * b.basis).squaredNorm() / static_cast<double>(a.rank());
    return std::clamp(value, 0.0, 1.0);
}

double evr(const Eigen::VectorXd& spectrum, Eigen::Index k) {
    if (k < 1 || k > spectrum.size()) {
        throw DomainError("evr: k=" + std::to_string(k) + " out of range [1, " + std::to_string(spectrum.size()) + "]");
    }
    const double total = spectrum.sum();
    if (!(total > 0.0)) throw DomainError("evr: correlation matrix has zero trace");
    return std::clamp(spectrum.head(k).sum() / total, 0.0, 1.0);
}

double evr(const CorrelationMatrix& r, Eigen::Index k) {
    if (k < 1 || k > r.dim()) {
        throw DomainError("evr: k=" + std::to_string(k) + " out of range [1, " + std::to_string(r.dim()) + "]");
    }
    if (!(r.matrix().trace() > 0.0)) throw DomainError("evr: correlation matrix has zero trace");
    auto eig = symmetric_eigen_descending(r.matrix());
    return evr(Eigen::VectorXd(eig.values.cwiseMax(0.0)), k);
}

} // namespace conceptkit
