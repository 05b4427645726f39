#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conceptkit {

enum class Placement { residual_pre_block, attention_output };
enum class TokenScope { last_token, mean_pooled };
enum class Pole : std::uint8_t { positive, negative, neutral };
enum class PoleSelection { bipolar, positive_only, negative_only, neutral_only };
enum class Split { train, test };

[[nodiscard]] std::string_view to_string(Placement p);
[[nodiscard]] std::string_view to_string(TokenScope s);
[[nodiscard]] std::string_view to_string(Pole p);
[[nodiscard]] std::string_view to_string(Split s);
[[nodiscard]] Placement parse_placement(std::string_view text);
[[nodiscard]] TokenScope parse_token_scope(std::string_view text);
[[nodiscard]] Pole parse_pole(std::string_view text);
[[nodiscard]] Split parse_split(std::string_view text);

// Row-major float32, the exact in-memory image of the file payload.
using ActivationMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BundleManifest {
    std::string model_id;
    std::string concept_name;
    std::int64_t layer = 0;
    Placement placement = Placement::residual_pre_block;
    TokenScope token_scope = TokenScope::last_token;
    std::vector<Pole> pole_labels;
    // Optional: marks a probe bundle as the train or held-out split.
    std::optional<Split> split;

    bool operator==(const BundleManifest&) const = default;
};

// N×d hidden states plus their manifest. Immutable once constructed; the
// constructor enforces every invariant (label count, finite entries).
class ActivationBundle {
public:
    ActivationBundle(BundleManifest manifest, ActivationMatrix matrix);

    [[nodiscard]] const BundleManifest& manifest() const { return manifest_; }
    [[nodiscard]] const ActivationMatrix& matrix() const { return matrix_; }
    [[nodiscard]] Eigen::Index rows() const { return matrix_.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return matrix_.cols(); }
    [[nodiscard]] Pole pole(Eigen::Index row) const { return manifest_.pole_labels[static_cast<std::size_t>(row)]; }
    [[nodiscard]] std::size_t count(Pole p) const;

    // Activations upcast to double for the numerical routines.
    [[nodiscard]] Eigen::MatrixXd to_double() const { return matrix_.cast<double>(); }

    bool operator==(const ActivationBundle& other) const {
        return manifest_ == other.manifest_ && matrix_.rows() == other.matrix_.rows() &&
               matrix_.cols() == other.matrix_.cols() && matrix_ == other.matrix_;
    }

private:
    BundleManifest manifest_;
    ActivationMatrix matrix_;
};

[[nodiscard]] std::string encode_bundle(const ActivationBundle& bundle);
[[nodiscard]] ActivationBundle decode_bundle(std::string bytes);

[[nodiscard]] ActivationBundle load_bundle(const std::filesystem::path& path);
void save_bundle(const ActivationBundle& bundle, const std::filesystem::path& path);

// Rows matching the selection, in original order. bipolar = positive ∪ negative.
[[nodiscard]] ActivationBundle pool_poles(const ActivationBundle& bundle, PoleSelection selection);

} // namespace conceptkit
