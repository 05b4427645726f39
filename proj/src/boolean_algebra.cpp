#include "conceptkit/boolean_algebra.hpp"

#include "conceptkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace conceptkit {

namespace {

void check_same_dim(const MatrixConceptor& a, const MatrixConceptor& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("dimension mismatch: operands have d=" + std::to_string(a.dim()) + " and d=" +
                             std::to_string(b.dim()));
    }
}

Eigen::MatrixXd floored_inverse(const MatrixConceptor& c) {
    const Eigen::VectorXd inv = c.gates().unaryExpr([](double g) { return 1.0 / std::max(g, kInversionFloor); });
    return c.eigenvectors() * inv.asDiagonal() * c.eigenvectors().transpose();
}

} // namespace

Expression Expression::leaf(std::string name) {
    Expression e;
    e.op_ = Op::leaf;
    e.name_ = std::move(name);
    return e;
}

Expression Expression::negation(Expression operand) {
    Expression e;
    e.op_ = Op::not_op;
    e.operands_.push_back(std::move(operand));
    return e;
}

Expression Expression::conjunction(Expression lhs, Expression rhs) {
    Expression e;
    e.op_ = Op::and_op;
    e.operands_.push_back(std::move(lhs));
    e.operands_.push_back(std::move(rhs));
    return e;
}

Expression Expression::disjunction(Expression lhs, Expression rhs) {
    Expression e;
    e.op_ = Op::or_op;
    e.operands_.push_back(std::move(lhs));
    e.operands_.push_back(std::move(rhs));
    return e;
}

std::string Expression::to_string() const {
    switch (op_) {
        case Op::leaf: return name_;
        case Op::not_op: return "NOT(" + operands_[0].to_string() + ")";
        case Op::and_op: return "AND(" + operands_[0].to_string() + "," + operands_[1].to_string() + ")";
        case Op::or_op: return "OR(" + operands_[0].to_string() + "," + operands_[1].to_string() + ")";
    }
    return {};
}

MatrixConceptor::MatrixConceptor(Eigen::MatrixXd eigenvectors, Eigen::VectorXd gates, Expression provenance)
    : u_(std::move(eigenvectors)), gamma_(std::move(gates)), provenance_(std::move(provenance)) {
    const Eigen::Index d = u_.rows();
    if (d == 0 || u_.cols() != d || gamma_.size() != d) {
        throw DimensionError("matrix conceptor needs a d×d eigenvector matrix and d gates");
    }
    if (!u_.allFinite() || !gamma_.allFinite()) throw NumericError("matrix conceptor has non-finite entries");
    gamma_ = gamma_.cwiseMax(0.0).cwiseMin(1.0);
}

MatrixConceptor::MatrixConceptor(const Conceptor& c, std::string name)
    : MatrixConceptor(c.eigenvectors(), c.gates(), Expression::leaf(std::move(name))) {}

MatrixConceptor MatrixConceptor::from_matrix(const Eigen::MatrixXd& c, std::string name) {
    if (c.rows() == 0 || c.rows() != c.cols()) throw DimensionError("conceptor matrix must be square");
    auto eig = symmetric_eigen_descending(0.5 * (c + c.transpose()));
    return MatrixConceptor(std::move(eig.vectors), std::move(eig.values), Expression::leaf(std::move(name)));
}

Eigen::MatrixXd MatrixConceptor::matrix() const {
    Eigen::MatrixXd c = u_ * gamma_.asDiagonal() * u_.transpose();
    return 0.5 * (c + c.transpose());
}

MatrixConceptor not_conceptor(const MatrixConceptor& c) {
    // 1 − γ reverses the order; flip columns to keep gates descending.
    const Eigen::VectorXd gates = (1.0 - c.gates().array()).matrix().reverse();
    const Eigen::MatrixXd u = c.eigenvectors().rowwise().reverse();
    return MatrixConceptor(u, gates, Expression::negation(c.provenance()));
}

MatrixConceptor and_conceptor(const MatrixConceptor& a, const MatrixConceptor& b) {
    check_same_dim(a, b);
    const Eigen::Index d = a.dim();
    Eigen::MatrixXd m = floored_inverse(a) + floored_inverse(b) - Eigen::MatrixXd::Identity(d, d);
    m = 0.5 * (m + m.transpose());
    if (!m.allFinite()) throw NumericError("AND: non-finite intermediate matrix");
    auto eig = symmetric_eigen_descending(m);
    if (!(eig.values(d - 1) > 0.0)) throw NumericError("AND: final solve is singular");
    // Largest gate belongs to the smallest eigenvalue of m.
    const Eigen::VectorXd gates = eig.values.cwiseInverse().reverse();
    const Eigen::MatrixXd u = eig.vectors.rowwise().reverse();
    return MatrixConceptor(u, gates, Expression::conjunction(a.provenance(), b.provenance()));
}

MatrixConceptor or_conceptor(const MatrixConceptor& a, const MatrixConceptor& b) {
    check_same_dim(a, b);
    const auto joined = not_conceptor(and_conceptor(not_conceptor(a), not_conceptor(b)));
    return MatrixConceptor(joined.eigenvectors(), joined.gates(),
                           Expression::disjunction(a.provenance(), b.provenance()));
}

MatrixConceptor and_not(const MatrixConceptor& a, const MatrixConceptor& b) {
    return and_conceptor(a, not_conceptor(b));
}

} // namespace conceptkit
