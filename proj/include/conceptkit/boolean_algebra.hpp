#pragma once

#include "conceptkit/conceptor.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace conceptkit {

// Eigenvalue floor applied before any inversion.
inline constexpr double kInversionFloor = 1e-10;

// Boolean expression that produced a composed conceptor, e.g.
// AND(abortion,NOT(lgbtq)).
class Expression {
public:
    enum class Op { leaf, not_op, and_op, or_op };

    static Expression leaf(std::string name);
    static Expression negation(Expression operand);
    static Expression conjunction(Expression lhs, Expression rhs);
    static Expression disjunction(Expression lhs, Expression rhs);

    [[nodiscard]] Op op() const { return op_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<Expression>& operands() const { return operands_; }
    [[nodiscard]] std::string to_string() const;

private:
    Op op_ = Op::leaf;
    std::string name_;
    std::vector<Expression> operands_;
};

// Symmetric d×d operator with eigenvalues in [0,1], kept in eigen form
// (descending gates) together with its provenance.
class MatrixConceptor {
public:
    MatrixConceptor(Eigen::MatrixXd eigenvectors, Eigen::VectorXd gates, Expression provenance);
    // A conceptor becomes a leaf of the expression tree.
    MatrixConceptor(const Conceptor& c, std::string name = "C");  // NOLINT(google-explicit-constructor)

    // Decomposes an arbitrary symmetric matrix; eigenvalues are clipped to [0,1].
    static MatrixConceptor from_matrix(const Eigen::MatrixXd& c, std::string name);

    [[nodiscard]] Eigen::Index dim() const { return u_.rows(); }
    [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const { return u_; }
    [[nodiscard]] const Eigen::VectorXd& gates() const { return gamma_; }
    [[nodiscard]] const Expression& provenance() const { return provenance_; }
    [[nodiscard]] std::string expression() const { return provenance_.to_string(); }
    [[nodiscard]] Eigen::MatrixXd matrix() const;

private:
    Eigen::MatrixXd u_;
    Eigen::VectorXd gamma_;
    Expression provenance_;
};

// I − C. The eigenbasis is reused, so NOT(NOT(C)) returns C's own basis.
[[nodiscard]] MatrixConceptor not_conceptor(const MatrixConceptor& c);

// (A_ε⁻¹ + B_ε⁻¹ − I)⁻¹ where X_ε floors eigenvalues at kInversionFloor.
[[nodiscard]] MatrixConceptor and_conceptor(const MatrixConceptor& a, const MatrixConceptor& b);

// ¬(¬A ∧ ¬B).
[[nodiscard]] MatrixConceptor or_conceptor(const MatrixConceptor& a, const MatrixConceptor& b);

// A ∧ ¬B: steer toward A while suppressing B.
[[nodiscard]] MatrixConceptor and_not(const MatrixConceptor& a, const MatrixConceptor& b);

} // namespace conceptkit
