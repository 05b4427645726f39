#include "conceptkit/conceptor_file.hpp"
#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>

using namespace conceptkit;

namespace {

ConceptorRecord sample_record(unsigned seed = 1, Eigen::Index d = 6) {
    std::mt19937_64 rng(seed);
    const auto c = fit_conceptor(correlation_matrix(oracle::random_matrix(20, d, rng)), 10.0);
    auto r = make_record(c, "sentiment", 7);
    // Store float32-representable values so decode reproduces them exactly.
    r.eigenvectors = r.eigenvectors.cast<float>().cast<double>();
    r.spectrum = r.spectrum.cast<float>().cast<double>();
    return r;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
}

} // namespace

TEST_CASE("conceptor files round-trip bit-exactly") {
    const auto r = sample_record();
    const std::string bytes = encode_conceptor(r);
    const auto back = decode_conceptor(bytes);
    CHECK(back.concept_name == "sentiment");
    CHECK(back.layer == 7);
    CHECK(back.aperture == 10.0);
    CHECK(back.eigenvectors == r.eigenvectors);
    CHECK(back.spectrum == r.spectrum);
    CHECK_FALSE(back.expression.has_value());
    CHECK(encode_conceptor(back) == bytes);

    const auto path = std::filesystem::temp_directory_path() / "conceptkit_rt.cpt";
    save_conceptor(r, path);
    CHECK(conceptkit::io::read_file(path) == bytes);
    std::filesystem::remove(path);
}

TEST_CASE("manifest carries concept, layer, alpha and d") {
    const std::string bytes = encode_conceptor(sample_record());
    CHECK(bytes.rfind("concept: sentiment\nlayer: 7\nalpha: 10\nd: 6\n\n", 0) == 0);
    CHECK(bytes.size() == bytes.find("\n\n") + 2 + 4 * (36 + 6));
}

TEST_CASE("loaded conceptor regates like the original") {
    const auto r = sample_record(3);
    const auto c = to_conceptor(decode_conceptor(encode_conceptor(r)));
    const auto direct = Conceptor(r.eigenvectors, r.spectrum, r.aperture);
    CHECK((c.matrix() - direct.matrix()).norm() == 0.0);
    CHECK((regate(c, 2.0).matrix() - regate(direct, 2.0).matrix()).norm() == 0.0);
}

TEST_CASE("composed conceptors keep their expression and reconstruct their gates") {
    std::mt19937_64 rng(4);
    const MatrixConceptor a(fit_conceptor(correlation_matrix(oracle::random_matrix(30, 5, rng)), 10.0), "abortion");
    const MatrixConceptor b(fit_conceptor(correlation_matrix(oracle::random_matrix(30, 5, rng)), 10.0), "lgbtq");
    const auto composed = and_not(a, b);
    const auto record = make_record(composed, "targeted", 3, 10.0);
    CHECK(record.expression == std::optional<std::string>("AND(abortion,NOT(lgbtq))"));
    const auto back = decode_conceptor(encode_conceptor(record));
    CHECK(back.expression == record.expression);
    CHECK_THROWS_AS((void)to_conceptor(back), DataError);
    // float32 storage limits agreement to single precision.
    CHECK((to_matrix_conceptor(back).matrix() - composed.matrix()).norm() < 1e-5);

    // gate exactly 1 (NOT of a zero direction) is stored as +inf
    const MatrixConceptor zero(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3), Expression::leaf("z"));
    const auto full = make_record(not_conceptor(zero), "full", 0, 10.0);
    CHECK(std::isinf(full.spectrum(0)));
    const auto full_back = decode_conceptor(encode_conceptor(full));
    CHECK((to_matrix_conceptor(full_back).matrix() - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("NOT(NOT(x)) written and reloaded equals x") {
    const auto r = sample_record(5);
    const auto x = to_matrix_conceptor(r);
    const auto nn = not_conceptor(not_conceptor(x));
    const auto reloaded = to_matrix_conceptor(decode_conceptor(encode_conceptor(make_record(nn, "nn", 7, r.aperture))));
    CHECK((reloaded.matrix() - x.matrix()).norm() <= 1e-12);
}

TEST_CASE("validators reject each malformation class") {
    const auto r = sample_record();
    const std::string good = encode_conceptor(r);
    const std::size_t header = good.find("\n\n") + 2;
    auto with_float = [&](std::size_t index, float v) {
        std::string bad = good;
        std::string f;
        conceptkit::io::append_f32(f, v);
        bad.replace(header + 4 * index, 4, f);
        return bad;
    };
    SUBCASE("missing key") { CHECK_THROWS_AS((void)decode_conceptor(replace_once(good, "layer: 7\n", "")), FormatError); }
    SUBCASE("unknown key") {
        CHECK_THROWS_AS((void)decode_conceptor(replace_once(good, "d: 6\n", "d: 6\nfoo: bar\n")), FormatError);
    }
    SUBCASE("alpha not positive") {
        CHECK_THROWS_AS((void)decode_conceptor(replace_once(good, "alpha: 10", "alpha: 0")), FormatError);
    }
    SUBCASE("alpha not a number") {
        CHECK_THROWS_AS((void)decode_conceptor(replace_once(good, "alpha: 10", "alpha: ten")), FormatError);
    }
    SUBCASE("payload too short") {
        CHECK_THROWS_AS((void)decode_conceptor(good.substr(0, good.size() - 4)), DimensionError);
    }
    SUBCASE("d disagrees with payload") {
        CHECK_THROWS_AS((void)decode_conceptor(replace_once(good, "d: 6", "d: 5")), DimensionError);
    }
    SUBCASE("negative spectrum") { CHECK_THROWS_AS((void)decode_conceptor(with_float(36 + 5, -1.0f)), FormatError); }
    SUBCASE("ascending spectrum") { CHECK_THROWS_AS((void)decode_conceptor(with_float(36 + 5, 1e6f)), FormatError); }
    SUBCASE("infinite spectrum without expression") {
        CHECK_THROWS_AS((void)decode_conceptor(with_float(36, std::numeric_limits<float>::infinity())), FormatError);
    }
    SUBCASE("NaN eigenvector") {
        CHECK_THROWS_AS((void)decode_conceptor(with_float(0, std::numeric_limits<float>::quiet_NaN())), FormatError);
    }
    SUBCASE("non-orthonormal eigenvectors") {
        CHECK_THROWS_AS((void)decode_conceptor(with_float(0, 3.0f)), FormatError);
    }
}
