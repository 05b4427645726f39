#include "conceptkit/conceptor_file.hpp"

#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace conceptkit {

namespace {

constexpr std::array<std::string_view, 4> kKeys = {"concept", "layer", "alpha", "d"};
constexpr std::array<std::string_view, 1> kOptionalKeys = {"expression"};

// Loose enough for eigenvectors that went through float32.
constexpr double kOrthonormalTolerance = 1e-4;

void validate(const ConceptorRecord& r) {
    const Eigen::Index d = r.dim();
    if (d <= 0 || r.eigenvectors.cols() != d || r.spectrum.size() != d) {
        throw DimensionError("conceptor record needs a d×d eigenvector matrix and d spectrum values");
    }
    if (!(r.aperture > 0.0) || !std::isfinite(r.aperture)) throw FormatError("conceptor alpha must be finite and > 0");
    if (!r.eigenvectors.allFinite()) throw FormatError("conceptor eigenvectors contain non-finite values");
    for (Eigen::Index j = 0; j < d; ++j) {
        const double s = r.spectrum(j);
        if (std::isnan(s) || s < 0.0) throw FormatError("conceptor spectrum entry " + std::to_string(j) + " is negative or NaN");
        if (std::isinf(s) && !r.expression) {
            throw FormatError("conceptor spectrum entry " + std::to_string(j) + " is infinite in a non-composed file");
        }
        if (j > 0 && s > r.spectrum(j - 1)) throw FormatError("conceptor spectrum is not descending");
    }
    const double err = (r.eigenvectors.transpose() * r.eigenvectors - Eigen::MatrixXd::Identity(d, d)).norm();
    if (err > kOrthonormalTolerance * static_cast<double>(d)) {
        throw FormatError("conceptor eigenvectors are not orthonormal");
    }
}

} // namespace

ConceptorRecord make_record(const Conceptor& c, std::string concept_name, std::int64_t layer) {
    return ConceptorRecord{std::move(concept_name), layer, c.aperture(), c.eigenvectors(), c.spectrum(), std::nullopt};
}

ConceptorRecord make_record(const MatrixConceptor& c, std::string concept_name, std::int64_t layer, double aperture) {
    if (!(aperture > 0.0) || !std::isfinite(aperture)) throw DomainError("aperture must be a finite real > 0");
    const double floor = 1.0 / (aperture * aperture);
    Eigen::VectorXd sigma(c.dim());
    for (Eigen::Index j = 0; j < c.dim(); ++j) {
        const double g = c.gates()(j);
        sigma(j) = g >= 1.0 ? std::numeric_limits<double>::infinity() : floor * g / (1.0 - g);
    }
    // Rounding can break monotonicity between nearly equal gates.
    for (Eigen::Index j = 1; j < sigma.size(); ++j) sigma(j) = std::min(sigma(j), sigma(j - 1));
    return ConceptorRecord{std::move(concept_name), layer, aperture, c.eigenvectors(), sigma, c.expression()};
}

Conceptor to_conceptor(const ConceptorRecord& record) {
    validate(record);
    if (record.expression) {
        throw DataError("'" + record.concept_name + "' is a composed conceptor (" + *record.expression +
                        "); it has no R spectrum to re-gate");
    }
    return Conceptor(record.eigenvectors, record.spectrum, record.aperture);
}

MatrixConceptor to_matrix_conceptor(const ConceptorRecord& record) {
    validate(record);
    Eigen::VectorXd gates(record.dim());
    for (Eigen::Index j = 0; j < record.dim(); ++j) gates(j) = gate(record.spectrum(j), record.aperture);
    return MatrixConceptor(record.eigenvectors, gates, Expression::leaf(record.concept_name));
}

void append_conceptor_payload(std::string& out, const ConceptorRecord& record) {
    const Eigen::Index d = record.dim();
    out.reserve(out.size() + static_cast<std::size_t>(4 * (d * d + d)));
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) io::append_f32(out, static_cast<float>(record.eigenvectors(i, j)));
    }
    for (Eigen::Index j = 0; j < d; ++j) io::append_f32(out, static_cast<float>(record.spectrum(j)));
}

void read_conceptor_payload(std::string_view payload, ConceptorRecord& record) {
    const auto expected = static_cast<std::size_t>(record.eigenvectors.rows());
    const std::size_t need = 4 * (expected * expected + expected);
    if (payload.size() != need) {
        throw DimensionError("dimension mismatch: conceptor payload for d=" + std::to_string(expected) + " needs " +
                             std::to_string(need) + " bytes, found " + std::to_string(payload.size()));
    }
    const auto n = static_cast<Eigen::Index>(expected);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) record.eigenvectors(i, j) = io::read_f32(payload, k++);
    }
    for (Eigen::Index j = 0; j < n; ++j) record.spectrum(j) = io::read_f32(payload, k++);
    validate(record);
}

std::string encode_conceptor(const ConceptorRecord& record) {
    validate(record);
    io::Manifest m;
    m.set("concept", record.concept_name);
    m.set("layer", std::to_string(record.layer));
    m.set("alpha", io::format_double(record.aperture));
    m.set("d", std::to_string(record.dim()));
    if (record.expression) m.set("expression", *record.expression);
    std::string payload;
    append_conceptor_payload(payload, record);
    return io::serialize(m, payload);
}

ConceptorRecord decode_conceptor(std::string bytes) {
    auto file = io::parse_file(std::move(bytes), "conceptor");
    const auto& mf = file.manifest;
    mf.check_keys(kKeys, kOptionalKeys, "conceptor");
    ConceptorRecord r;
    r.concept_name = mf.require("concept");
    r.layer = io::parse_int(mf.require("layer"), "layer");
    r.aperture = io::parse_double(mf.require("alpha"), "alpha");
    if (auto e = mf.find("expression")) r.expression = *e;
    const auto d = io::parse_int(mf.require("d"), "d");
    if (d <= 0) throw FormatError("malformed header: d must be positive");
    r.eigenvectors.resize(d, d);
    r.spectrum.resize(d);
    read_conceptor_payload(file.payload, r);
    return r;
}

ConceptorRecord load_conceptor(const std::filesystem::path& path) {
    return decode_conceptor(io::read_file(path));
}

void save_conceptor(const ConceptorRecord& record, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_conceptor(record));
}

} // namespace conceptkit
