#pragma once

// Conceptor export format: manifest (concept, layer, alpha, d[, expression])
// followed by U as d×d float32 LE row-major and the R spectrum as d float32.
//
// Composed conceptors carry an `expression` key. Their spectrum entries are
// the equivalent R eigenvalues σ = α⁻²·γ/(1 − γ) at the stored aperture, so
// gating reproduces the composed gates; γ = 1 is written as +inf.

#include "conceptkit/boolean_algebra.hpp"
#include "conceptkit/conceptor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace conceptkit {

struct ConceptorRecord {
    std::string concept_name;
    std::int64_t layer = 0;
    double aperture = kDefaultAperture;
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd spectrum;
    std::optional<std::string> expression;

    [[nodiscard]] Eigen::Index dim() const { return eigenvectors.rows(); }
};

[[nodiscard]] ConceptorRecord make_record(const Conceptor& c, std::string concept_name, std::int64_t layer);
// The expression key is taken from the provenance tree.
[[nodiscard]] ConceptorRecord make_record(const MatrixConceptor& c, std::string concept_name, std::int64_t layer,
                                          double aperture);

// Plain conceptors only: rejects records with an expression or infinite σ.
[[nodiscard]] Conceptor to_conceptor(const ConceptorRecord& record);
// Any record; leaves are named after the record's concept.
[[nodiscard]] MatrixConceptor to_matrix_conceptor(const ConceptorRecord& record);

// Binary payload only (U then σ), shared with the plan format.
void append_conceptor_payload(std::string& out, const ConceptorRecord& record);
// Validates and reads d²+d floats from the start of `payload`.
void read_conceptor_payload(std::string_view payload, ConceptorRecord& record);

[[nodiscard]] std::string encode_conceptor(const ConceptorRecord& record);
[[nodiscard]] ConceptorRecord decode_conceptor(std::string bytes);
[[nodiscard]] ConceptorRecord load_conceptor(const std::filesystem::path& path);
void save_conceptor(const ConceptorRecord& record, const std::filesystem::path& path);

} // namespace conceptkit
