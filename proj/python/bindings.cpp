#include "conceptkit/activation_store.hpp"
#include "conceptkit/boolean_algebra.hpp"
#include "conceptkit/conceptor.hpp"
#include "conceptkit/conceptor_file.hpp"
#include "conceptkit/diagnostics.hpp"
#include "conceptkit/errors.hpp"
#include "conceptkit/evaluation.hpp"
#include "conceptkit/expression_parser.hpp"
#include "conceptkit/geometry.hpp"
#include "conceptkit/steering.hpp"
#include "conceptkit/synthetic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace conceptkit;

namespace {

ActivationBundle make_bundle(const Eigen::MatrixXd& matrix, const std::vector<std::string>& poles,
                             const std::string& concept_name, std::int64_t layer, const std::string& model_id,
                             const std::string& placement, const std::string& token_scope,
                             const std::optional<std::string>& split) {
    BundleManifest m;
    m.model_id = model_id;
    m.concept_name = concept_name;
    m.layer = layer;
    m.placement = parse_placement(placement);
    m.token_scope = parse_token_scope(token_scope);
    for (const auto& p : poles) m.pole_labels.push_back(parse_pole(p));
    if (split) m.split = parse_split(*split);
    return ActivationBundle(std::move(m), matrix.cast<float>());
}

std::vector<std::string> pole_names(const ActivationBundle& b) {
    std::vector<std::string> out;
    for (auto p : b.manifest().pole_labels) out.emplace_back(to_string(p));
    return out;
}

PlanSettings settings_from(const std::string& combination, double beta, std::int64_t layer,
                           const std::string& placement, const std::string& scope, const std::string& injection) {
    PlanSettings s;
    s.combination = parse_combination(combination);
    s.beta = beta;
    s.layer = layer;
    s.placement = parse_placement(placement);
    s.scope = parse_steering_scope(scope);
    s.injection = parse_injection(injection);
    return s;
}

PoleSelection parse_selection(const std::string& s) {
    if (s == "bipolar") return PoleSelection::bipolar;
    if (s == "pos" || s == "positive") return PoleSelection::positive_only;
    if (s == "neg" || s == "negative") return PoleSelection::negative_only;
    if (s == "neutral") return PoleSelection::neutral_only;
    throw DomainError("unknown pole selection '" + s + "'");
}

} // namespace

PYBIND11_MODULE(_conceptkit, m) {
    m.doc() = "Conceptor fitting, Boolean composition, subspace geometry, steering and diagnostics.";

    // Registered base first; pybind11 tries the most recent translator first.
    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<DataError> data_error(m, "DataError", error.ptr());
    static py::exception<FormatError> format_error(m, "FormatError", data_error.ptr());
    static py::exception<DimensionError> dimension_error(m, "DimensionError", data_error.ptr());
    static py::exception<DomainError> domain_error(m, "DomainError", data_error.ptr());
    static py::exception<IoError> io_error(m, "IoError", data_error.ptr());
    static py::exception<ParseError> parse_error(m, "ParseError", data_error.ptr());
    static py::exception<NumericError> numeric_error(m, "NumericError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::set_error(parse_error, e.what());
        } catch (const FormatError& e) {
            py::set_error(format_error, e.what());
        } catch (const DimensionError& e) {
            py::set_error(dimension_error, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        } catch (const DataError& e) {
            py::set_error(data_error, e.what());
        } catch (const NumericError& e) {
            py::set_error(numeric_error, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.attr("DEFAULT_APERTURE") = kDefaultAperture;
    m.attr("APERTURE_GRID") = std::vector<double>(kApertureGrid.begin(), kApertureGrid.end());

    // ---------------------------------------------------------- bundles
    py::class_<ActivationBundle>(m, "Bundle")
        .def(py::init(&make_bundle), py::arg("matrix"), py::arg("poles"), py::arg("concept") = "",
             py::arg("layer") = 0, py::arg("model_id") = "", py::arg("placement") = "residual_pre_block",
             py::arg("token_scope") = "last_token", py::arg("split") = py::none())
        .def_property_readonly("matrix", [](const ActivationBundle& b) { return Eigen::MatrixXf(b.matrix()); })
        .def_property_readonly("poles", &pole_names)
        .def_property_readonly("concept", [](const ActivationBundle& b) { return b.manifest().concept_name; })
        .def_property_readonly("layer", [](const ActivationBundle& b) { return b.manifest().layer; })
        .def_property_readonly("model_id", [](const ActivationBundle& b) { return b.manifest().model_id; })
        .def_property_readonly("placement",
                               [](const ActivationBundle& b) { return std::string(to_string(b.manifest().placement)); })
        .def_property_readonly(
            "token_scope", [](const ActivationBundle& b) { return std::string(to_string(b.manifest().token_scope)); })
        .def_property_readonly("split",
                               [](const ActivationBundle& b) -> std::optional<std::string> {
                                   if (!b.manifest().split) return std::nullopt;
                                   return std::string(to_string(*b.manifest().split));
                               })
        .def_property_readonly("rows", &ActivationBundle::rows)
        .def_property_readonly("dim", &ActivationBundle::dim)
        .def("select", [](const ActivationBundle& b, const std::string& s) { return pool_poles(b, parse_selection(s)); },
             py::arg("poles"))
        .def("__eq__", [](const ActivationBundle& a, const ActivationBundle& b) { return a == b; })
        .def("__repr__", [](const ActivationBundle& b) {
            return "<Bundle concept='" + b.manifest().concept_name + "' layer=" + std::to_string(b.manifest().layer) +
                   " rows=" + std::to_string(b.rows()) + " d=" + std::to_string(b.dim()) + ">";
        });
    m.def("load_bundle", &load_bundle, py::arg("path"));
    m.def("save_bundle", &save_bundle, py::arg("bundle"), py::arg("path"));
    m.def("encode_bundle", [](const ActivationBundle& b) { return py::bytes(encode_bundle(b)); });
    m.def("decode_bundle", [](const py::bytes& data) { return decode_bundle(std::string(data)); });

    // ------------------------------------------------------- conceptors
    py::class_<Conceptor>(m, "Conceptor")
        .def_property_readonly("dim", &Conceptor::dim)
        .def_property_readonly("aperture", &Conceptor::aperture)
        .def_property_readonly("eigenvectors", &Conceptor::eigenvectors)
        .def_property_readonly("spectrum", &Conceptor::spectrum)
        .def_property_readonly("gates", &Conceptor::gates)
        .def_property_readonly("matrix", &Conceptor::matrix)
        .def_property_readonly("quota", [](const Conceptor& c) { return quota(c); })
        .def_property_readonly("trace", [](const Conceptor& c) { return trace_dim(c); })
        .def("regate", [](const Conceptor& c, double alpha) { return regate(c, alpha); }, py::arg("aperture"));

    m.def("correlation_matrix", [](const Eigen::MatrixXd& x) { return correlation_matrix(x).matrix(); },
          py::arg("samples"), "R = XᵀX / N for samples in rows.");
    m.def("fit_conceptor",
          [](const Eigen::MatrixXd& x, double alpha) { return fit_conceptor(correlation_matrix(x), alpha); },
          py::arg("samples"), py::arg("aperture") = kDefaultAperture);
    m.def("fit_conceptor_bundle",
          [](const ActivationBundle& b, const std::string& poles, double alpha) {
              return fit_conceptor(correlation_matrix(pool_poles(b, parse_selection(poles))), alpha);
          },
          py::arg("bundle"), py::arg("poles") = "bipolar", py::arg("aperture") = kDefaultAperture);
    m.def("fit_conceptor_from_correlation",
          [](const Eigen::MatrixXd& r, Eigen::Index n, double alpha) {
              return fit_conceptor(CorrelationMatrix(r, n), alpha);
          },
          py::arg("correlation"), py::arg("n_samples"), py::arg("aperture") = kDefaultAperture);

    py::class_<MatrixConceptor>(m, "ComposedConceptor")
        .def(py::init<const Conceptor&, std::string>(), py::arg("conceptor"), py::arg("name") = "C")
        .def_property_readonly("dim", &MatrixConceptor::dim)
        .def_property_readonly("eigenvectors", &MatrixConceptor::eigenvectors)
        .def_property_readonly("gates", &MatrixConceptor::gates)
        .def_property_readonly("matrix", &MatrixConceptor::matrix)
        .def_property_readonly("expression", &MatrixConceptor::expression);
    py::implicitly_convertible<Conceptor, MatrixConceptor>();
    m.def("NOT", &not_conceptor, py::arg("c"));
    m.def("AND", &and_conceptor, py::arg("a"), py::arg("b"));
    m.def("OR", &or_conceptor, py::arg("a"), py::arg("b"));
    m.def("AND_NOT", &and_not, py::arg("a"), py::arg("b"));
    m.def("compose",
          [](const std::string& expression, const std::map<std::string, MatrixConceptor>& leaves) {
              return evaluate_expression(parse_expression(expression), [&](const std::string& name) {
                  auto it = leaves.find(name);
                  if (it == leaves.end()) throw DataError("no conceptor bound to '" + name + "'");
                  const auto& c = it->second;
                  return MatrixConceptor(c.eigenvectors(), c.gates(), Expression::leaf(name));
              });
          },
          py::arg("expression"), py::arg("leaves"));

    py::class_<ConceptorRecord>(m, "ConceptorRecord")
        .def_readonly("concept", &ConceptorRecord::concept_name)
        .def_readonly("layer", &ConceptorRecord::layer)
        .def_readonly("aperture", &ConceptorRecord::aperture)
        .def_readonly("eigenvectors", &ConceptorRecord::eigenvectors)
        .def_readonly("spectrum", &ConceptorRecord::spectrum)
        .def_readonly("expression", &ConceptorRecord::expression)
        .def("to_conceptor", &to_conceptor)
        .def("to_composed", &to_matrix_conceptor);
    m.def("conceptor_record",
          [](const Conceptor& c, std::string name, std::int64_t layer) { return make_record(c, std::move(name), layer); },
          py::arg("conceptor"), py::arg("concept"), py::arg("layer"));
    m.def("composed_record",
          [](const MatrixConceptor& c, std::string name, std::int64_t layer, double alpha) {
              return make_record(c, std::move(name), layer, alpha);
          },
          py::arg("conceptor"), py::arg("concept"), py::arg("layer"), py::arg("aperture") = kDefaultAperture);
    m.def("load_conceptor", &load_conceptor, py::arg("path"));
    m.def("save_conceptor", &save_conceptor, py::arg("record"), py::arg("path"));

    // --------------------------------------------------------- geometry
    m.def("top_k_subspace",
          [](const Eigen::MatrixXd& x, Eigen::Index k) {
              const auto b = top_k_subspace(x, k);
              return py::make_tuple(b.basis, b.singular_values);
          },
          py::arg("samples"), py::arg("k"), "Returns (basis d×k, singular values).");
    m.def("diffmean",
          [](const ActivationBundle& b, const std::string& variant) {
              return diffmean(b, parse_diffmean_variant(variant)).vector;
          },
          py::arg("bundle"), py::arg("variant") = "unipolar_pos_minus_neg");
    m.def("capture_fraction",
          [](const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
              SubspaceBasis b;
              b.basis = basis;
              return capture_fraction(v, b);
          },
          py::arg("vector"), py::arg("basis"));
    m.def("subspace_overlap",
          [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
              SubspaceBasis x, y;
              x.basis = a;
              y.basis = b;
              return subspace_overlap(x, y);
          },
          py::arg("a"), py::arg("b"));
    m.def("evr", [](const Eigen::MatrixXd& x, Eigen::Index k) { return evr(correlation_matrix(x), k); },
          py::arg("samples"), py::arg("k"));

    // --------------------------------------------------------- steering
    m.def("steer_replace", &steer_replace, py::arg("z"), py::arg("c"), py::arg("beta"));
    m.def("steer_interpolate", &steer_interpolate, py::arg("z"), py::arg("c"), py::arg("beta"));
    m.def("steer_addition", &steer_addition, py::arg("z"), py::arg("vector"), py::arg("beta"));

    py::class_<SteeringPlan>(m, "SteeringPlan")
        .def_property_readonly("operator", [](const SteeringPlan& p) { return std::string(to_string(p.op())); })
        .def_property_readonly("combination",
                               [](const SteeringPlan& p) { return std::string(to_string(p.settings().combination)); })
        .def_property_readonly("beta", [](const SteeringPlan& p) { return p.settings().beta; })
        .def_property_readonly("layer", [](const SteeringPlan& p) { return p.settings().layer; })
        .def_property_readonly("scope", [](const SteeringPlan& p) { return std::string(to_string(p.settings().scope)); })
        .def_property_readonly("dim", &SteeringPlan::dim)
        .def("apply", [](const SteeringPlan& p, const Eigen::MatrixXd& z) { return apply_plan(z, p); },
             py::arg("activations"), "Steer a tokens×d matrix.");
    m.def("conceptor_plan",
          [](const ConceptorRecord& r, const std::string& combination, double beta, std::int64_t layer,
             const std::string& placement, const std::string& scope, const std::string& injection) {
              return SteeringPlan(r, settings_from(combination, beta, layer, placement, scope, injection));
          },
          py::arg("record"), py::arg("combination") = "interpolate", py::arg("beta") = 0.6, py::arg("layer") = 0,
          py::arg("placement") = "residual_pre_block", py::arg("scope") = "all_tokens",
          py::arg("injection") = "once");
    m.def("additive_plan",
          [](const std::string& op, const Eigen::VectorXd& v, double beta, std::int64_t layer,
             const std::optional<std::string>& variant, const std::string& placement, const std::string& scope,
             const std::string& injection) {
              std::optional<DiffMeanVariant> dv;
              if (variant) dv = parse_diffmean_variant(*variant);
              return SteeringPlan(parse_steering_operator(op), v,
                                  settings_from("add", beta, layer, placement, scope, injection), dv);
          },
          py::arg("operator"), py::arg("vector"), py::arg("beta"), py::arg("layer") = 0,
          py::arg("variant") = py::none(), py::arg("placement") = "residual_pre_block",
          py::arg("scope") = "all_tokens", py::arg("injection") = "once");
    m.def("load_plan", &load_plan, py::arg("path"));
    m.def("save_plan", &save_plan, py::arg("plan"), py::arg("path"));

    // ------------------------------------------------------ diagnostics
    m.def("auc", [](const std::vector<double>& s, const std::vector<int>& l) { return auc(s, l); }, py::arg("scores"),
          py::arg("labels"));
    m.def("pearson_r", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_r(x, y); },
          py::arg("xs"), py::arg("ys"));
    m.def("probe_auc",
          [](const ActivationBundle& train, const ActivationBundle& test, double lambda) {
              const auto model = fit_probe(train, lambda);
              const Eigen::VectorXd s = model.decision_scores(test.to_double());
              return auc(std::vector<double>(s.data(), s.data() + s.size()), binary_labels(test));
          },
          py::arg("train"), py::arg("test"), py::arg("lam") = kDefaultProbeLambda);
    m.def("layer_sweep_csv",
          [](const std::vector<ActivationBundle>& layers, double alpha, Eigen::Index k) {
              return report_csv(layer_sweep(layers, alpha, k));
          },
          py::arg("layers"), py::arg("aperture"), py::arg("k"));

    // ------------------------------------------------------- evaluation
    m.def("win_ratio",
          [](const std::vector<double>& base, const std::vector<double>& steered) {
              if (base.size() != steered.size()) throw DimensionError("win_ratio: length mismatch");
              std::vector<ScoredPair> pairs;
              for (std::size_t i = 0; i < base.size(); ++i) pairs.push_back({std::to_string(i), base[i], steered[i], 0, 0});
              return win_ratio(pairs);
          },
          py::arg("base_scores"), py::arg("steered_scores"));
    m.def("degeneracy_flag",
          [](const std::vector<std::int64_t>& base, const std::vector<std::int64_t>& steered, double threshold) {
              if (base.size() != steered.size()) throw DimensionError("degeneracy_flag: length mismatch");
              std::vector<ScoredPair> pairs;
              for (std::size_t i = 0; i < base.size(); ++i) {
                  pairs.push_back({std::to_string(i), std::nullopt, std::nullopt, base[i], steered[i]});
              }
              const auto r = degeneracy_flag(pairs, threshold);
              return py::make_tuple(r.ratio, r.degenerate);
          },
          py::arg("base_lens"), py::arg("steered_lens"), py::arg("threshold") = kDegeneracyThreshold);
    m.def("mcq_tally",
          [](const std::string& jsonl) {
              py::dict out;
              for (const auto& t : mcq_tally(parse_mcq_records(jsonl))) {
                  out[py::str(t.category)] = py::make_tuple(t.mean_probability, t.choice_rate);
              }
              return out;
          },
          py::arg("jsonl"), "Category → (mean_probability, choice_rate) from McqRecord JSON lines.");

    // -------------------------------------------------------- synthetic
    m.def("synth_bipolar",
          [](Eigen::Index d, Eigen::Index n, double gap, Eigen::Index rank, std::uint64_t seed,
             std::optional<double> noise) {
              SynthBipolarParams p;
              p.d = d;
              p.n_per_pole = n;
              p.pole_gap = gap;
              p.within_pole_rank = rank;
              p.seed = seed;
              p.noise_scale = noise;
              return synth_bipolar(p);
          },
          py::arg("d") = 8, py::arg("n_per_pole") = 50, py::arg("gap") = 10.0, py::arg("rank") = 3,
          py::arg("seed") = 0, py::arg("noise_scale") = py::none());
}
