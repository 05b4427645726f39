#include "conceptkit/steering.hpp"

#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"

#include <cmath>

namespace conceptkit {

namespace {

void check_dims(Eigen::Index z, Eigen::Index op) {
    if (z != op) {
        throw DimensionError("dimension mismatch: state has d=" + std::to_string(z) + ", operator has d=" +
                             std::to_string(op));
    }
}

void check_square(const Eigen::VectorXd& z, const Eigen::MatrixXd& c) {
    if (c.rows() != c.cols()) throw DimensionError("steering operator must be square");
    check_dims(z.size(), c.rows());
}

constexpr std::array<std::string_view, 8> kPlanKeys = {"operator", "combination", "beta", "layer",
                                                       "placement", "token_scope", "injection", "d"};
constexpr std::array<std::string_view, 4> kPlanOptionalKeys = {"alpha", "concept", "expression", "variant"};

} // namespace

Eigen::VectorXd steer_replace(const Eigen::VectorXd& z, const Eigen::MatrixXd& c, double beta) {
    check_square(z, c);
    return beta * (c * z);
}

Eigen::VectorXd steer_interpolate(const Eigen::VectorXd& z, const Eigen::MatrixXd& c, double beta) {
    check_square(z, c);
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("interpolate requires beta in [0,1]");
    return (1.0 - beta) * z + beta * (c * z);
}

Eigen::VectorXd steer_addition(const Eigen::VectorXd& z, const Eigen::VectorXd& mean, double beta) {
    check_dims(z.size(), mean.size());
    return z + beta * mean;
}

Eigen::VectorXd steer_diffmean(const Eigen::VectorXd& z, const DiffMeanVector& v, double beta) {
    check_dims(z.size(), v.vector.size());
    return z + beta * v.vector;
}

std::string_view to_string(SteeringOperator op) {
    switch (op) {
        case SteeringOperator::conceptor: return "conceptor";
        case SteeringOperator::addition: return "addition";
        case SteeringOperator::diffmean: return "diffmean";
    }
    return "?";
}

std::string_view to_string(Combination c) {
    switch (c) {
        case Combination::replace: return "replace";
        case Combination::interpolate: return "interpolate";
        case Combination::add: return "add";
    }
    return "?";
}

std::string_view to_string(SteeringScope s) {
    return s == SteeringScope::last_token ? "last_token" : "all_tokens";
}

std::string_view to_string(Injection i) {
    return i == Injection::once ? "once" : "autoregressive";
}

SteeringOperator parse_steering_operator(std::string_view text) {
    if (text == "conceptor") return SteeringOperator::conceptor;
    if (text == "addition") return SteeringOperator::addition;
    if (text == "diffmean") return SteeringOperator::diffmean;
    throw FormatError("unknown steering operator '" + std::string(text) + "'");
}

Combination parse_combination(std::string_view text) {
    if (text == "replace") return Combination::replace;
    if (text == "interpolate") return Combination::interpolate;
    if (text == "add") return Combination::add;
    throw FormatError("unknown combination '" + std::string(text) + "'");
}

SteeringScope parse_steering_scope(std::string_view text) {
    if (text == "last_token") return SteeringScope::last_token;
    if (text == "all_tokens") return SteeringScope::all_tokens;
    throw FormatError("unknown token_scope '" + std::string(text) + "'");
}

Injection parse_injection(std::string_view text) {
    if (text == "once") return Injection::once;
    if (text == "autoregressive") return Injection::autoregressive;
    throw FormatError("unknown injection '" + std::string(text) + "'");
}

SteeringPlan::SteeringPlan(ConceptorRecord conceptor, PlanSettings settings)
    : op_(SteeringOperator::conceptor), payload_(std::move(conceptor)), settings_(settings) {
    validate();
    conceptor_matrix_ = to_matrix_conceptor(std::get<ConceptorRecord>(payload_)).matrix();
}

SteeringPlan::SteeringPlan(SteeringOperator op, Eigen::VectorXd vector, PlanSettings settings,
                           std::optional<DiffMeanVariant> variant)
    : op_(op), payload_(std::move(vector)), settings_(settings), variant_(variant) {
    if (op == SteeringOperator::conceptor) throw DomainError("conceptor plans need a conceptor payload");
    validate();
}

void SteeringPlan::validate() const {
    const double beta = settings_.beta;
    if (!std::isfinite(beta) || beta < 0.0) throw DomainError("beta must be a finite real >= 0");
    if (settings_.layer < 0) throw DomainError("layer must be >= 0");
    if (op_ == SteeringOperator::conceptor) {
        if (settings_.combination == Combination::add) {
            throw DomainError("conceptor plans combine by replace or interpolate, not add");
        }
        if (settings_.combination == Combination::interpolate && beta > 1.0) {
            throw DomainError("interpolate requires beta in [0,1]");
        }
    } else {
        if (settings_.combination != Combination::add) {
            throw DomainError(std::string(to_string(op_)) + " is additive; combination '" +
                              std::string(to_string(settings_.combination)) + "' is not allowed");
        }
        const auto& v = std::get<Eigen::VectorXd>(payload_);
        if (v.size() == 0) throw DimensionError("steering vector is empty");
        if (!v.allFinite()) throw DataError("steering vector has non-finite entries");
        if (op_ == SteeringOperator::addition && variant_) {
            throw DomainError("addition plans carry no diffmean variant");
        }
    }
}

Eigen::Index SteeringPlan::dim() const {
    if (const auto* c = conceptor()) return c->dim();
    return std::get<Eigen::VectorXd>(payload_).size();
}

Eigen::VectorXd SteeringPlan::apply(const Eigen::VectorXd& z) const {
    const double beta = settings_.beta;
    switch (op_) {
        case SteeringOperator::conceptor:
            return settings_.combination == Combination::replace ? steer_replace(z, conceptor_matrix_, beta)
                                                                 : steer_interpolate(z, conceptor_matrix_, beta);
        case SteeringOperator::addition: return steer_addition(z, *vector(), beta);
        case SteeringOperator::diffmean:
            return steer_diffmean(z, DiffMeanVector{*vector(), variant_.value_or(DiffMeanVariant::unipolar_pos_minus_neg)},
                                  beta);
    }
    return z;
}

Eigen::MatrixXd apply_plan(const Eigen::MatrixXd& z, const SteeringPlan& plan) {
    if (z.rows() == 0) throw DimensionError("apply_plan: no token states");
    check_dims(z.cols(), plan.dim());
    Eigen::MatrixXd out = z;
    const Eigen::Index first = plan.settings().scope == SteeringScope::last_token ? z.rows() - 1 : 0;
    for (Eigen::Index t = first; t < z.rows(); ++t) out.row(t) = plan.apply(z.row(t).transpose()).transpose();
    return out;
}

ActivationBundle apply_plan(const ActivationBundle& bundle, const SteeringPlan& plan) {
    check_dims(bundle.dim(), plan.dim());
    ActivationMatrix out = bundle.matrix();
    const Eigen::Index first = plan.settings().scope == SteeringScope::last_token ? out.rows() - 1 : 0;
    for (Eigen::Index t = first; t < out.rows(); ++t) {
        const Eigen::VectorXd z = out.row(t).transpose().cast<double>();
        out.row(t) = plan.apply(z).transpose().cast<float>();
    }
    return ActivationBundle(bundle.manifest(), std::move(out));
}

std::string encode_plan(const SteeringPlan& plan) {
    const auto& s = plan.settings();
    io::Manifest m;
    m.set("operator", std::string(to_string(plan.op())));
    m.set("combination", std::string(to_string(s.combination)));
    m.set("beta", io::format_double(s.beta));
    m.set("layer", std::to_string(s.layer));
    m.set("placement", std::string(to_string(s.placement)));
    m.set("token_scope", std::string(to_string(s.scope)));
    m.set("injection", std::string(to_string(s.injection)));
    m.set("d", std::to_string(plan.dim()));
    std::string payload;
    if (const auto* c = plan.conceptor()) {
        m.set("alpha", io::format_double(c->aperture));
        m.set("concept", c->concept_name);
        if (c->expression) m.set("expression", *c->expression);
        append_conceptor_payload(payload, *c);
    } else {
        if (plan.variant()) m.set("variant", std::string(to_string(*plan.variant())));
        const auto& v = *plan.vector();
        for (Eigen::Index j = 0; j < v.size(); ++j) io::append_f32(payload, static_cast<float>(v(j)));
    }
    return io::serialize(m, payload);
}

SteeringPlan decode_plan(std::string bytes) {
    auto file = io::parse_file(std::move(bytes), "plan");
    const auto& mf = file.manifest;
    mf.check_keys(kPlanKeys, kPlanOptionalKeys, "plan");

    PlanSettings s;
    const auto op = parse_steering_operator(mf.require("operator"));
    s.combination = parse_combination(mf.require("combination"));
    s.beta = io::parse_double(mf.require("beta"), "beta");
    s.layer = io::parse_int(mf.require("layer"), "layer");
    s.placement = parse_placement(mf.require("placement"));
    s.scope = parse_steering_scope(mf.require("token_scope"));
    s.injection = parse_injection(mf.require("injection"));
    const auto d = io::parse_int(mf.require("d"), "d");
    if (d <= 0) throw FormatError("malformed header: d must be positive");

    if (op == SteeringOperator::conceptor) {
        if (mf.contains("variant")) throw FormatError("malformed header: conceptor plans take no 'variant'");
        ConceptorRecord r;
        r.concept_name = mf.require("concept");
        r.layer = s.layer;
        r.aperture = io::parse_double(mf.require("alpha"), "alpha");
        if (auto e = mf.find("expression")) r.expression = *e;
        r.eigenvectors.resize(d, d);
        r.spectrum.resize(d);
        read_conceptor_payload(file.payload, r);
        return SteeringPlan(std::move(r), s);
    }
    for (auto key : {"alpha", "concept", "expression"}) {
        if (mf.contains(key)) throw FormatError(std::string("malformed header: additive plans take no '") + key + "'");
    }
    const auto expected = static_cast<std::size_t>(d) * 4;
    if (file.payload.size() != expected) {
        throw DimensionError("dimension mismatch: vector payload for d=" + std::to_string(d) + " needs " +
                             std::to_string(expected) + " bytes, found " + std::to_string(file.payload.size()));
    }
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v(j) = io::read_f32(file.payload, static_cast<std::size_t>(j));
    std::optional<DiffMeanVariant> variant;
    if (auto text = mf.find("variant")) variant = parse_diffmean_variant(*text);
    return SteeringPlan(op, std::move(v), s, variant);
}

void save_plan(const SteeringPlan& plan, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_plan(plan));
}

SteeringPlan load_plan(const std::filesystem::path& path) {
    return decode_plan(io::read_file(path));
}

} // namespace conceptkit
