#include "conceptkit/activation_store.hpp"

#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"

#include <array>
#include <cmath>

namespace conceptkit {

namespace {

constexpr std::array<std::string_view, 8> kBundleKeys = {
    "model_id", "concept", "layer", "placement", "token_scope", "d", "n", "pole_labels"};
constexpr std::array<std::string_view, 1> kBundleOptionalKeys = {"split"};

bool matches(Pole pole, PoleSelection selection) {
    switch (selection) {
        case PoleSelection::bipolar: return pole == Pole::positive || pole == Pole::negative;
        case PoleSelection::positive_only: return pole == Pole::positive;
        case PoleSelection::negative_only: return pole == Pole::negative;
        case PoleSelection::neutral_only: return pole == Pole::neutral;
    }
    return false;
}

std::string_view selection_name(PoleSelection s) {
    switch (s) {
        case PoleSelection::bipolar: return "bipolar";
        case PoleSelection::positive_only: return "positive_only";
        case PoleSelection::negative_only: return "negative_only";
        case PoleSelection::neutral_only: return "neutral_only";
    }
    return "?";
}

} // namespace

std::string_view to_string(Placement p) {
    return p == Placement::residual_pre_block ? "residual_pre_block" : "attention_output";
}

std::string_view to_string(TokenScope s) {
    return s == TokenScope::last_token ? "last_token" : "mean_pooled";
}

std::string_view to_string(Pole p) {
    switch (p) {
        case Pole::positive: return "positive";
        case Pole::negative: return "negative";
        case Pole::neutral: return "neutral";
    }
    return "?";
}

std::string_view to_string(Split s) {
    return s == Split::train ? "train" : "test";
}

Placement parse_placement(std::string_view text) {
    if (text == "residual_pre_block") return Placement::residual_pre_block;
    if (text == "attention_output") return Placement::attention_output;
    throw FormatError("malformed header: unknown placement '" + std::string(text) + "'");
}

TokenScope parse_token_scope(std::string_view text) {
    if (text == "last_token") return TokenScope::last_token;
    if (text == "mean_pooled") return TokenScope::mean_pooled;
    throw FormatError("malformed header: unknown token_scope '" + std::string(text) + "'");
}

Pole parse_pole(std::string_view text) {
    if (text == "positive") return Pole::positive;
    if (text == "negative") return Pole::negative;
    if (text == "neutral") return Pole::neutral;
    throw FormatError("malformed header: unknown pole label '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "test") return Split::test;
    throw FormatError("malformed header: unknown split '" + std::string(text) + "'");
}

ActivationBundle::ActivationBundle(BundleManifest manifest, ActivationMatrix matrix)
    : manifest_(std::move(manifest)), matrix_(std::move(matrix)) {
    if (matrix_.rows() <= 0 || matrix_.cols() <= 0) {
        throw DimensionError("bundle must have N > 0 rows and d > 0 columns");
    }
    if (manifest_.layer < 0) throw DomainError("bundle layer must be >= 0");
    if (manifest_.pole_labels.size() != static_cast<std::size_t>(matrix_.rows())) {
        throw DimensionError("dimension mismatch: " + std::to_string(manifest_.pole_labels.size()) +
                             " pole labels for " + std::to_string(matrix_.rows()) + " rows");
    }
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
            if (!std::isfinite(matrix_(i, j))) {
                throw DataError("non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

std::size_t ActivationBundle::count(Pole p) const {
    std::size_t n = 0;
    for (Pole label : manifest_.pole_labels) n += label == p ? 1 : 0;
    return n;
}

std::string encode_bundle(const ActivationBundle& bundle) {
    const auto& m = bundle.manifest();
    io::Manifest manifest;
    manifest.set("model_id", m.model_id);
    manifest.set("concept", m.concept_name);
    manifest.set("layer", std::to_string(m.layer));
    manifest.set("placement", std::string(to_string(m.placement)));
    manifest.set("token_scope", std::string(to_string(m.token_scope)));
    manifest.set("d", std::to_string(bundle.dim()));
    manifest.set("n", std::to_string(bundle.rows()));
    if (m.split) manifest.set("split", std::string(to_string(*m.split)));
    std::string labels;
    for (std::size_t i = 0; i < m.pole_labels.size(); ++i) {
        if (i) labels += ',';
        labels += to_string(m.pole_labels[i]);
    }
    manifest.set("pole_labels", labels);

    std::string payload;
    const auto& x = bundle.matrix();
    payload.reserve(static_cast<std::size_t>(x.size()) * 4);
    io::append_f32(payload, std::span<const float>(x.data(), static_cast<std::size_t>(x.size())));
    return io::serialize(manifest, payload);
}

ActivationBundle decode_bundle(std::string bytes) {
    auto file = io::parse_file(std::move(bytes), "bundle");
    const auto& mf = file.manifest;
    mf.check_keys(kBundleKeys, kBundleOptionalKeys, "bundle");

    BundleManifest m;
    m.model_id = mf.require("model_id");
    m.concept_name = mf.require("concept");
    m.layer = io::parse_int(mf.require("layer"), "layer");
    if (m.layer < 0) throw FormatError("malformed header: layer must be >= 0");
    m.placement = parse_placement(mf.require("placement"));
    m.token_scope = parse_token_scope(mf.require("token_scope"));
    if (auto split = mf.find("split")) m.split = parse_split(*split);
    const auto d = io::parse_int(mf.require("d"), "d");
    const auto n = io::parse_int(mf.require("n"), "n");
    if (d <= 0 || n <= 0) throw FormatError("malformed header: d and n must be positive");

    std::string_view labels = mf.require("pole_labels");
    while (!labels.empty()) {
        const auto comma = labels.find(',');
        auto token = labels.substr(0, comma);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        m.pole_labels.push_back(parse_pole(token));
        if (comma == std::string_view::npos) break;
        labels.remove_prefix(comma + 1);
    }
    if (m.pole_labels.size() != static_cast<std::size_t>(n)) {
        throw DimensionError("dimension mismatch: manifest n=" + std::to_string(n) + " but " +
                             std::to_string(m.pole_labels.size()) + " pole labels");
    }

    const auto expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 4;
    if (file.payload.size() != expected) {
        const auto rows_present = file.payload.size() / (static_cast<std::size_t>(d) * 4);
        throw DimensionError("dimension mismatch: manifest n=" + std::to_string(n) + ", d=" +
                             std::to_string(d) + " requires " + std::to_string(expected) +
                             " payload bytes, found " + std::to_string(file.payload.size()) + " (" +
                             std::to_string(rows_present) + " complete rows)");
    }
    ActivationMatrix x(n, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(x.size()); ++i) {
        x.data()[i] = io::read_f32(file.payload, i);
    }
    return ActivationBundle(std::move(m), std::move(x));
}

ActivationBundle load_bundle(const std::filesystem::path& path) {
    return decode_bundle(io::read_file(path));
}

void save_bundle(const ActivationBundle& bundle, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_bundle(bundle));
}

ActivationBundle pool_poles(const ActivationBundle& bundle, PoleSelection selection) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < bundle.rows(); ++i) {
        if (matches(bundle.pole(i), selection)) keep.push_back(i);
    }
    if (keep.empty()) {
        throw DomainError("empty selection: no rows match '" + std::string(selection_name(selection)) + "'");
    }
    BundleManifest m = bundle.manifest();
    m.pole_labels.clear();
    ActivationMatrix x(static_cast<Eigen::Index>(keep.size()), bundle.dim());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        x.row(static_cast<Eigen::Index>(r)) = bundle.matrix().row(keep[r]);
        m.pole_labels.push_back(bundle.pole(keep[r]));
    }
    return ActivationBundle(std::move(m), std::move(x));
}

} // namespace conceptkit
