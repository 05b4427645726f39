#include "conceptkit_cli.hpp"

#include "conceptkit/activation_store.hpp"
#include "conceptkit/boolean_algebra.hpp"
#include "conceptkit/conceptor.hpp"
#include "conceptkit/conceptor_file.hpp"
#include "conceptkit/diagnostics.hpp"
#include "conceptkit/errors.hpp"
#include "conceptkit/evaluation.hpp"
#include "conceptkit/expression_parser.hpp"
#include "conceptkit/file_format.hpp"
#include "conceptkit/geometry.hpp"
#include "conceptkit/steering.hpp"
#include "conceptkit/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace conceptkit::cli {

namespace fs = std::filesystem;

namespace {

// Flag combinations CLI11 cannot express on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const CLI::Validator kFinitePositive(
    [](std::string& text) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(text);
        } catch (const std::exception&) {
            return "'" + text + "' is not a number";
        }
        if (!std::isfinite(v) || v <= 0.0) return "value must be a finite real > 0, got " + text;
        return {};
    },
    "POSITIVE");

const CLI::Validator kFiniteNonNegative(
    [](std::string& text) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(text);
        } catch (const std::exception&) {
            return "'" + text + "' is not a number";
        }
        if (!std::isfinite(v) || v < 0.0) return "value must be a finite real >= 0, got " + text;
        return {};
    },
    "NONNEGATIVE");

PoleSelection pole_selection(const std::string& flag) {
    if (flag == "pos") return PoleSelection::positive_only;
    if (flag == "neg") return PoleSelection::negative_only;
    if (flag == "neutral") return PoleSelection::neutral_only;
    return PoleSelection::bipolar;
}

SteeringScope steering_scope(const std::string& flag) {
    return flag == "last" ? SteeringScope::last_token : SteeringScope::all_tokens;
}

std::string fmt(double v) { return io::format_double(v); }

fs::path sibling(const fs::path& path, const std::string& suffix) {
    fs::path out = path;
    out.replace_extension(suffix);
    return out;
}

void write_text(const fs::path& path, const std::string& text) { io::write_file_atomic(path, text); }

// Gnuplot script drawing selected CSV columns against the first column.
std::string gnuplot_script(const fs::path& csv, const std::string& title, const std::string& xlabel,
                           const std::vector<std::pair<int, std::string>>& series) {
    std::ostringstream gp;
    gp << "# columns follow the CSV header; run: gnuplot -p " << sibling(csv, ".gp").filename().string() << "\n";
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set title '" << title << "'\n";
    gp << "set xlabel '" << xlabel << "'\n";
    gp << "plot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) gp << ", \\\n     ";
        gp << "'" << csv.filename().string() << "' using 1:" << series[i].first << " with linespoints title '"
           << series[i].second << "'";
    }
    gp << "\n";
    return gp.str();
}

std::vector<fs::path> bundle_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bundle") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .bundle files in " + dir.string());
    return files;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string bundle;
    double alpha = kDefaultAperture;
    std::string pole = "bipolar";
    std::string name;
    std::string out;
};

void cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto bundle = load_bundle(a.bundle);
    const auto pooled = pool_poles(bundle, pole_selection(a.pole));
    const Conceptor c = fit_conceptor(correlation_matrix(pooled), a.alpha);
    const std::string name = a.name.empty() ? bundle.manifest().concept_name : a.name;
    save_conceptor(make_record(c, name, bundle.manifest().layer), a.out);
    out << "fit " << name << " layer=" << bundle.manifest().layer << " d=" << c.dim() << " rows=" << pooled.rows()
        << " alpha=" << fmt(a.alpha) << " quota=" << fmt(quota(c)) << " -> " << a.out << "\n";
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string bundle_dir;
    std::vector<double> alphas{kDefaultAperture};
    std::optional<Eigen::Index> k;  // unset: min(10, d)
    std::string pole = "bipolar";
    std::string probe_dir;
    std::string out;
};

std::vector<ProbeSplit> load_probes(const fs::path& dir, const std::vector<ActivationBundle>& layers) {
    std::map<std::int64_t, std::optional<ActivationBundle>> train;
    std::map<std::int64_t, std::optional<ActivationBundle>> test;
    for (const auto& path : bundle_files(dir)) {
        auto b = load_bundle(path);
        const auto& m = b.manifest();
        if (!m.split) throw DataError(path.string() + ": probe bundle has no split field");
        auto& slot = *m.split == Split::train ? train[m.layer] : test[m.layer];
        if (slot) throw DataError(path.string() + ": second " + std::string(to_string(*m.split)) +
                                  " bundle for layer " + std::to_string(m.layer));
        slot.emplace(std::move(b));
    }
    std::vector<ProbeSplit> splits;
    for (const auto& layer : layers) {
        const auto l = layer.manifest().layer;
        auto tr = train.find(l);
        auto te = test.find(l);
        if (tr == train.end() || te == test.end()) {
            throw DataError("probe dir lacks a train/test pair for layer " + std::to_string(l));
        }
        splits.push_back(ProbeSplit{*tr->second, *te->second});
    }
    return splits;
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
    std::vector<ActivationBundle> layers;
    for (const auto& path : bundle_files(a.bundle_dir)) {
        layers.push_back(pool_poles(load_bundle(path), pole_selection(a.pole)));
    }
    std::vector<ProbeSplit> probes;
    if (!a.probe_dir.empty()) probes = load_probes(a.probe_dir, layers);

    const Eigen::Index k = a.k.value_or(std::min<Eigen::Index>(kDefaultSubspaceRank, layers.front().dim()));
    const auto reports = layer_sweep(layers, a.alphas, k, probes);
    const fs::path csv = a.out;
    write_text(csv, stacked_report_csv(reports));
    write_text(sibling(csv, ".summary.json"), report_summary_json(reports));
    write_text(sibling(csv, ".gp"), gnuplot_script(csv, "quota and probe AUC by layer", "layer (grouped by alpha)",
                                                   {{3, "quota"}, {4, "evr"}, {6, "auc"}}));
    out << "sweep " << layers.size() << " layers x " << a.alphas.size() << " apertures -> " << csv.string() << "\n";
    for (const auto& r : reports) {
        out << "  alpha=" << fmt(r.aperture) << " mean_trace=" << fmt(r.mean_trace);
        if (r.r_quota_auc) out << " r(quota,auc)=" << fmt(*r.r_quota_auc);
        if (r.r_evr_auc) out << " r(evr,auc)=" << fmt(*r.r_evr_auc);
        out << "\n";
    }
}

// ---------------------------------------------------------------- compose

struct ComposeArgs {
    std::string expression;
    std::string name;
    std::string out;
};

void collect_leaves(const Expression& e, std::vector<std::string>& leaves) {
    if (e.op() == Expression::Op::leaf) {
        leaves.push_back(e.name());
        return;
    }
    for (const auto& child : e.operands()) collect_leaves(child, leaves);
}

void cmd_compose(const ComposeArgs& a, std::ostream& out) {
    const Expression expr = parse_expression(a.expression);
    std::vector<std::string> leaves;
    collect_leaves(expr, leaves);

    std::map<std::string, ConceptorRecord> records;
    for (const auto& leaf : leaves) {
        if (!records.count(leaf)) records.emplace(leaf, load_conceptor(leaf));
    }
    const ConceptorRecord& first = records.at(leaves.front());

    if (expr.op() == Expression::Op::leaf) {
        ConceptorRecord copy = first;
        if (!a.name.empty()) copy.concept_name = a.name;
        save_conceptor(copy, a.out);
        out << "compose " << leaves.front() << " (single operand, copied) -> " << a.out << "\n";
        return;
    }
    const MatrixConceptor result =
        evaluate_expression(expr, [&](const std::string& leaf) { return to_matrix_conceptor(records.at(leaf)); });
    const std::string name = a.name.empty() ? result.expression() : a.name;
    save_conceptor(make_record(result, name, first.layer, first.aperture), a.out);
    out << "compose " << result.expression() << " d=" << result.dim() << " trace=" << fmt(result.gates().sum())
        << " -> " << a.out << "\n";
}

// ---------------------------------------------------------------- geometry

struct GeometryArgs {
    std::vector<std::string> bundles;
    std::optional<Eigen::Index> k;  // unset: min(10, d)
    std::string mode = "capture";
    std::string out;
};

std::string capture_rows(const std::vector<ActivationBundle>& bundles, Eigen::Index k) {
    std::string csv = "layer,k,capture_bipolar,capture_pos,capture_neg\n";
    for (const auto& b : bundles) {
        const auto delta = diffmean(b, DiffMeanVariant::unipolar_pos_minus_neg);
        const auto polar = pool_poles(b, PoleSelection::bipolar);
        const double bip = capture_fraction(delta, top_k_subspace(polar, k));
        const double pos = capture_fraction(delta, top_k_subspace(pool_poles(b, PoleSelection::positive_only), k));
        const double neg = capture_fraction(delta, top_k_subspace(pool_poles(b, PoleSelection::negative_only), k));
        csv += std::to_string(b.manifest().layer) + "," + std::to_string(k) + "," + fmt(bip) + "," + fmt(pos) + "," +
               fmt(neg) + "\n";
    }
    return csv;
}

std::string overlap_rows(const std::vector<ActivationBundle>& bundles, const std::vector<std::string>& names,
                         Eigen::Index k) {
    std::vector<SubspaceBasis> bases;
    for (const auto& b : bundles) bases.push_back(top_k_subspace(b, k));
    std::string csv = "a,b,k,overlap\n";
    auto row = [&](std::size_t i, std::size_t j) {
        csv += names[i] + "," + names[j] + "," + std::to_string(k) + "," + fmt(subspace_overlap(bases[i], bases[j])) +
               "\n";
    };
    if (bases.size() == 1) row(0, 0);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        for (std::size_t j = i + 1; j < bases.size(); ++j) row(i, j);
    }
    return csv;
}

std::string evr_rows(const std::vector<ActivationBundle>& bundles, Eigen::Index k) {
    std::string csv = "layer,k,evr\n";
    for (const auto& b : bundles) {
        csv += std::to_string(b.manifest().layer) + "," + std::to_string(k) + "," +
               fmt(evr(correlation_matrix(b), k)) + "\n";
    }
    return csv;
}

void cmd_geometry(const GeometryArgs& a, std::ostream& out) {
    std::vector<ActivationBundle> bundles;
    std::vector<std::string> names;
    for (const auto& path : a.bundles) {
        bundles.push_back(load_bundle(path));
        names.push_back(fs::path(path).stem().string());
    }
    const Eigen::Index k = a.k.value_or(std::min<Eigen::Index>(kDefaultSubspaceRank, bundles.front().dim()));
    std::string csv;
    std::vector<std::pair<int, std::string>> series;
    if (a.mode == "capture") {
        csv = capture_rows(bundles, k);
        series = {{3, "capture_bipolar"}, {4, "capture_pos"}, {5, "capture_neg"}};
    } else if (a.mode == "overlap") {
        csv = overlap_rows(bundles, names, k);
        series = {{4, "overlap"}};
    } else {
        csv = evr_rows(bundles, k);
        series = {{3, "evr"}};
    }
    write_text(a.out, csv);
    write_text(sibling(a.out, ".gp"), gnuplot_script(a.out, a.mode + " (k=" + std::to_string(k) + ")",
                                                     a.mode == "overlap" ? "pair" : "layer", series));
    out << csv;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    std::string conceptor;
    std::string bundle;
    std::string op = "conceptor";
    std::string combination;
    double beta = 0.6;
    std::optional<std::int64_t> layer;
    std::string pole = "bipolar";
    std::string variant = "unipolar_pos_minus_neg";
    std::string scope = "all";
    std::string placement = "residual_pre_block";
    std::string injection = "once";
    std::string out;
};

void cmd_plan(const PlanArgs& a, std::ostream& out) {
    PlanSettings s;
    s.beta = a.beta;
    s.scope = steering_scope(a.scope);
    s.placement = parse_placement(a.placement);
    s.injection = parse_injection(a.injection);

    if (a.op == "conceptor") {
        if (a.conceptor.empty()) throw UsageError("conceptor plans need --conceptor");
        if (!a.bundle.empty()) throw UsageError("conceptor plans take --conceptor, not --bundle");
        auto record = load_conceptor(a.conceptor);
        s.combination = a.combination.empty() ? Combination::interpolate : parse_combination(a.combination);
        s.layer = a.layer.value_or(record.layer);
        const SteeringPlan plan(std::move(record), s);
        save_plan(plan, a.out);
    } else {
        if (a.bundle.empty()) throw UsageError(a.op + " plans need --bundle");
        if (!a.conceptor.empty()) throw UsageError(a.op + " plans take --bundle, not --conceptor");
        if (!a.combination.empty()) throw UsageError(a.op + " plans are additive; drop --combination");
        const auto bundle = load_bundle(a.bundle);
        s.combination = Combination::add;
        s.layer = a.layer.value_or(bundle.manifest().layer);
        if (a.op == "addition") {
            const SteeringPlan plan(SteeringOperator::addition,
                                    mean_activation(pool_poles(bundle, pole_selection(a.pole))), s);
            save_plan(plan, a.out);
        } else {
            const auto v = diffmean(bundle, parse_diffmean_variant(a.variant));
            save_plan(SteeringPlan(SteeringOperator::diffmean, v.vector, s, v.variant), a.out);
        }
    }
    out << "plan " << a.op << " beta=" << fmt(a.beta) << " scope=" << to_string(s.scope) << " -> " << a.out << "\n";
}

// ---------------------------------------------------------------- steer

struct SteerArgs {
    std::string plan;
    std::string bundle;
    std::string out;
};

void cmd_steer(const SteerArgs& a, std::ostream& out) {
    const auto plan = load_plan(a.plan);
    const auto bundle = load_bundle(a.bundle);
    const auto steered = apply_plan(bundle, plan);
    save_bundle(steered, a.out);
    out << "steer " << to_string(plan.op()) << " rows=" << bundle.rows() << " d=" << bundle.dim() << " -> " << a.out
        << "\n";
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string mode = "winratio";
    std::string input;
    double threshold = kDegeneracyThreshold;
    std::string out;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
    const std::string text = io::read_file(a.input);
    std::string report;
    if (a.mode == "mcq") {
        const auto records = parse_mcq_records(text);
        if (records.empty()) throw DataError("mcq: no records in " + a.input);
        report = tally_csv(mcq_tally(records));
    } else {
        const auto pairs = parse_scored_pairs(text);
        nlohmann::json j;
        j["mode"] = a.mode;
        j["n"] = pairs.size();
        if (a.mode == "winratio") {
            j["win_ratio"] = win_ratio(pairs);
        } else {
            const auto d = degeneracy_flag(pairs, a.threshold);
            j["length_ratio"] = d.ratio;
            j["threshold"] = a.threshold;
            j["degenerate"] = d.degenerate;
        }
        report = j.dump() + "\n";
    }
    if (!a.out.empty()) write_text(a.out, report);
    out << report;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    Eigen::Index d = 8;
    Eigen::Index n = 50;
    double gap = 10.0;
    Eigen::Index rank = 3;
    std::optional<double> noise;
    std::uint64_t seed = 0;
    int suite = 0;
    bool pair = false;
    Eigen::Index k = kDefaultSubspaceRank;
    Eigen::Index shared = 0;
    std::string out;
};

std::string layer_file(int layer, const char* suffix) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "layer_%02d%s.bundle", layer, suffix);
    return buf;
}

void cmd_synth(const SynthArgs& a, std::ostream& out) {
    if (a.suite > 0 && a.pair) throw UsageError("--suite and --pair are exclusive");
    if (a.suite > 0) {
        const fs::path dir = a.out;
        fs::create_directories(dir / "probe");
        const auto suite = synth_layer_suite(a.d, a.n, a.suite, a.seed);
        for (std::size_t l = 0; l < suite.size(); ++l) {
            const int layer = static_cast<int>(l);
            save_bundle(suite[l].pooled, dir / layer_file(layer, ""));
            save_bundle(suite[l].probe_train, dir / "probe" / layer_file(layer, ".train"));
            save_bundle(suite[l].probe_test, dir / "probe" / layer_file(layer, ".test"));
        }
        out << "synth suite " << suite.size() << " layers d=" << a.d << " -> " << dir.string() << "\n";
        return;
    }
    if (a.pair) {
        const fs::path dir = a.out;
        fs::create_directories(dir);
        const auto p = synth_concept_pair(a.d, a.n, a.k, a.shared, a.seed);
        save_bundle(p.a, dir / "a.bundle");
        save_bundle(p.b, dir / "b.bundle");
        out << "synth pair k=" << a.k << " shared=" << a.shared << " -> " << dir.string() << "\n";
        return;
    }
    SynthBipolarParams p;
    p.d = a.d;
    p.n_per_pole = a.n;
    p.pole_gap = a.gap;
    p.within_pole_rank = a.rank;
    p.noise_scale = a.noise;
    p.seed = a.seed;
    save_bundle(synth_bipolar(p), a.out);
    out << "synth bipolar d=" << a.d << " n=" << 2 * a.n << " gap=" << fmt(a.gap) << " -> " << a.out << "\n";
}

// ---------------------------------------------------------------- wiring

const std::vector<std::string> kPoleChoices = {"bipolar", "pos", "neg", "neutral"};

CLI::Option* add_pole(CLI::App* app, std::string& target) {
    return app->add_option("--pole", target, "pole selection")->check(CLI::IsMember(kPoleChoices));
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"conceptkit: conceptor estimation, Boolean composition, diagnostics and steering"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a conceptor to a bundle");
    fit_cmd->add_option("bundle", fit.bundle, "activation bundle")->required();
    fit_cmd->add_option("--alpha", fit.alpha, "aperture")->check(kFinitePositive);
    add_pole(fit_cmd, fit.pole);
    fit_cmd->add_option("--name", fit.name, "concept name (default: bundle concept)");
    fit_cmd->add_option("--out", fit.out, "conceptor file")->required();

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "per-layer quota/EVR/trace with optional probe AUC");
    sweep_cmd->add_option("bundle-dir", sweep.bundle_dir, "directory of per-layer .bundle files")->required();
    sweep_cmd->add_option("--alpha", sweep.alphas, "aperture list (comma separated or repeated)")
        ->delimiter(',')
        ->check(kFinitePositive);
    sweep_cmd->add_option("--k", sweep.k, "EVR rank")->check(CLI::PositiveNumber);
    add_pole(sweep_cmd, sweep.pole);
    sweep_cmd->add_option("--probe-dir", sweep.probe_dir, "directory of train/test probe bundles");
    sweep_cmd->add_option("--out", sweep.out, "long-format CSV")->required();

    ComposeArgs compose;
    auto* compose_cmd = app.add_subcommand("compose", "evaluate a Boolean expression over conceptor files");
    compose_cmd->add_option("expression", compose.expression, "e.g. AND(a.cpt,NOT(b.cpt))")->required();
    compose_cmd->add_option("--name", compose.name, "concept name (default: the expression)");
    compose_cmd->add_option("--out", compose.out, "conceptor file")->required();

    GeometryArgs geometry;
    auto* geometry_cmd = app.add_subcommand("geometry", "capture fraction, subspace overlap or EVR");
    geometry_cmd->add_option("bundles", geometry.bundles, "bundle files")->required();
    geometry_cmd->add_option("--k", geometry.k, "subspace rank")->check(CLI::PositiveNumber);
    geometry_cmd->add_option("--mode", geometry.mode, "capture|overlap|evr")
        ->check(CLI::IsMember({"capture", "overlap", "evr"}));
    geometry_cmd->add_option("--out", geometry.out, "CSV report")->required();

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "build a steering plan file");
    plan_cmd->add_option("--operator", plan.op, "conceptor|addition|diffmean")
        ->check(CLI::IsMember({"conceptor", "addition", "diffmean"}));
    plan_cmd->add_option("--conceptor", plan.conceptor, "conceptor file (conceptor plans)");
    plan_cmd->add_option("--bundle", plan.bundle, "bundle file (additive plans)");
    plan_cmd->add_option("--combination", plan.combination, "replace|interpolate")
        ->check(CLI::IsMember({"replace", "interpolate"}));
    plan_cmd->add_option("--beta", plan.beta, "steering strength")->check(kFiniteNonNegative);
    plan_cmd->add_option("--layer", plan.layer, "target layer (default: source layer)")
        ->check(CLI::NonNegativeNumber);
    add_pole(plan_cmd, plan.pole);
    plan_cmd->add_option("--variant", plan.variant, "diffmean variant")
        ->check(CLI::IsMember({"bipolar_vs_null", "unipolar_pos_minus_neg", "unipolar_neg_minus_pos"}));
    plan_cmd->add_option("--scope", plan.scope, "last|all")->check(CLI::IsMember({"last", "all"}));
    plan_cmd->add_option("--placement", plan.placement, "residual_pre_block|attention_output")
        ->check(CLI::IsMember({"residual_pre_block", "attention_output"}));
    plan_cmd->add_option("--injection", plan.injection, "once|autoregressive")
        ->check(CLI::IsMember({"once", "autoregressive"}));
    plan_cmd->add_option("--out", plan.out, "plan file")->required();

    SteerArgs steer;
    auto* steer_cmd = app.add_subcommand("steer", "apply a plan to a bundle offline");
    steer_cmd->add_option("plan", steer.plan, "plan file")->required();
    steer_cmd->add_option("bundle", steer.bundle, "activation bundle")->required();
    steer_cmd->add_option("--out", steer.out, "steered bundle")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "win ratio, degeneracy or MCQ tally from JSONL");
    eval_cmd->add_option("input", eval.input, "JSONL file")->required();
    eval_cmd->add_option("--mode", eval.mode, "winratio|degeneracy|mcq")
        ->check(CLI::IsMember({"winratio", "degeneracy", "mcq"}));
    eval_cmd->add_option("--threshold", eval.threshold, "degeneracy length ratio")->check(kFinitePositive);
    eval_cmd->add_option("--out", eval.out, "report file (also printed)");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "write synthetic bundles");
    synth_cmd->add_option("--d", synth.d, "dimension")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--n", synth.n, "rows per pole (suite: per pole per split)")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--gap", synth.gap, "pole gap")->check(kFiniteNonNegative);
    synth_cmd->add_option("--rank", synth.rank, "within-pole rank")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--noise", synth.noise, "per-direction noise RMS (default 0.6 * gap)")
        ->check(kFiniteNonNegative);
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--suite", synth.suite, "write a multi-layer suite with this many layers")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_flag("--pair", synth.pair, "write two bundles sharing --shared of --k directions");
    synth_cmd->add_option("--k", synth.k, "pair: generator rank")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--shared", synth.shared, "pair: shared directions")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--out", synth.out, "bundle file, or directory for --suite/--pair")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream e_stream;
        const int code = app.exit(e, o, e_stream);
        out << o.str();
        err << e_stream.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (fit_cmd->parsed()) cmd_fit(fit, out);
    else if (sweep_cmd->parsed()) cmd_sweep(sweep, out);
    else if (compose_cmd->parsed()) cmd_compose(compose, out);
    else if (geometry_cmd->parsed()) cmd_geometry(geometry, out);
    else if (plan_cmd->parsed()) cmd_plan(plan, out);
    else if (steer_cmd->parsed()) cmd_steer(steer, out);
    else if (eval_cmd->parsed()) cmd_eval(eval, out);
    else if (synth_cmd->parsed()) cmd_synth(synth, out);
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(argc, argv, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"conceptkit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace conceptkit::cli
