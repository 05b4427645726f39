#pragma once

#include "conceptkit/activation_store.hpp"
#include "conceptkit/conceptor_file.hpp"
#include "conceptkit/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <optional>
#include <variant>

namespace conceptkit {

// Hyperparameter grids searched per layer.
inline constexpr std::array<double, 9> kApertureGrid = {0.001, 0.0125, 0.05, 0.1, 0.2, 0.5, 2.0, 5.0, 10.0};
inline constexpr std::array<double, 3> kInterpolateBetaGrid = {0.4, 0.6, 0.8};
inline constexpr std::array<double, 4> kReplaceBetaGrid = {1.0, 2.0, 5.0, 10.0};
inline constexpr std::array<double, 4> kAdditiveBetaGrid = {0.5, 1.0, 2.0, 5.0};

// z' = β·C·z
[[nodiscard]] Eigen::VectorXd steer_replace(const Eigen::VectorXd& z, const Eigen::MatrixXd& c, double beta);
// z' = (1 − β)·z + β·C·z, β ∈ [0,1]
[[nodiscard]] Eigen::VectorXd steer_interpolate(const Eigen::VectorXd& z, const Eigen::MatrixXd& c, double beta);
// z' = z + β·v̄ with v̄ the mean activation
[[nodiscard]] Eigen::VectorXd steer_addition(const Eigen::VectorXd& z, const Eigen::VectorXd& mean, double beta);
// z' = z + β·v with v a DiffMean vector
[[nodiscard]] Eigen::VectorXd steer_diffmean(const Eigen::VectorXd& z, const DiffMeanVector& v, double beta);

enum class SteeringOperator { conceptor, addition, diffmean };
// Additive operators always carry `add`; conceptors use replace or interpolate.
enum class Combination { replace, interpolate, add };
enum class SteeringScope { last_token, all_tokens };
enum class Injection { once, autoregressive };

[[nodiscard]] std::string_view to_string(SteeringOperator op);
[[nodiscard]] std::string_view to_string(Combination c);
[[nodiscard]] std::string_view to_string(SteeringScope s);
[[nodiscard]] std::string_view to_string(Injection i);
[[nodiscard]] SteeringOperator parse_steering_operator(std::string_view text);
[[nodiscard]] Combination parse_combination(std::string_view text);
[[nodiscard]] SteeringScope parse_steering_scope(std::string_view text);
[[nodiscard]] Injection parse_injection(std::string_view text);

struct PlanSettings {
    Combination combination = Combination::interpolate;
    double beta = 0.6;
    std::int64_t layer = 0;
    Placement placement = Placement::residual_pre_block;
    SteeringScope scope = SteeringScope::all_tokens;
    Injection injection = Injection::once;
};

// A single-layer steering intervention, validated at construction.
class SteeringPlan {
public:
    // Operator `conceptor`.
    SteeringPlan(ConceptorRecord conceptor, PlanSettings settings);
    // Operators `addition` and `diffmean`.
    SteeringPlan(SteeringOperator op, Eigen::VectorXd vector, PlanSettings settings,
                 std::optional<DiffMeanVariant> variant = std::nullopt);

    [[nodiscard]] SteeringOperator op() const { return op_; }
    [[nodiscard]] const PlanSettings& settings() const { return settings_; }
    [[nodiscard]] Eigen::Index dim() const;
    [[nodiscard]] const ConceptorRecord* conceptor() const { return std::get_if<ConceptorRecord>(&payload_); }
    [[nodiscard]] const Eigen::VectorXd* vector() const { return std::get_if<Eigen::VectorXd>(&payload_); }
    [[nodiscard]] std::optional<DiffMeanVariant> variant() const { return variant_; }

    // Applies the operator to one hidden state.
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& z) const;

private:
    void validate() const;

    SteeringOperator op_;
    std::variant<ConceptorRecord, Eigen::VectorXd> payload_;
    PlanSettings settings_;
    std::optional<DiffMeanVariant> variant_;
    Eigen::MatrixXd conceptor_matrix_;
};

// T×d token states. last_token touches only row T−1; other rows are copied
// bit-for-bit.
[[nodiscard]] Eigen::MatrixXd apply_plan(const Eigen::MatrixXd& z, const SteeringPlan& plan);
[[nodiscard]] ActivationBundle apply_plan(const ActivationBundle& bundle, const SteeringPlan& plan);

[[nodiscard]] std::string encode_plan(const SteeringPlan& plan);
[[nodiscard]] SteeringPlan decode_plan(std::string bytes);
void save_plan(const SteeringPlan& plan, const std::filesystem::path& path);
[[nodiscard]] SteeringPlan load_plan(const std::filesystem::path& path);

} // namespace conceptkit
