#include "conceptkit/errors.hpp"
#include "conceptkit/evaluation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conceptkit;

namespace {

ScoredPair pair(double base, double steered, std::int64_t bl = 10, std::int64_t sl = 10) {
    return {"p", base, steered, bl, sl};
}

McqRecord record(std::array<double, 4> logits,
                 std::array<std::string, 4> cats = {"both", "concept1_only", "concept2_only", "neutral"}) {
    return {"q", logits, cats};
}

const CategoryTally& find(const std::vector<CategoryTally>& t, const std::string& name) {
    for (const auto& c : t) {
        if (c.category == name) return c;
    }
    FAIL("missing category " << name);
    return t.front();
}

} // namespace

TEST_CASE("win ratio examples") {
    CHECK(win_ratio(std::vector{pair(0, 1), pair(0.2, 0.3)}) == 1.0);
    CHECK(win_ratio(std::vector{pair(1, 1), pair(2, 2)}) == 0.0);
    const std::vector five = {pair(0, 1), pair(0, 2), pair(0.1, 0.5), pair(0.4, 0.4), pair(0.9, 0.1)};
    CHECK(std::abs(win_ratio(five) - 0.6) < 1e-12);
    CHECK_THROWS_AS((void)win_ratio(std::vector<ScoredPair>{}), DomainError);
    CHECK_THROWS_AS((void)win_ratio(std::vector{ScoredPair{"x", std::nullopt, 1.0, 1, 1}}), DataError);

    // strictly increasing transform applied to both scores
    std::vector<ScoredPair> t = five;
    for (auto& p : t) {
        p.base_score = std::exp(3.0 * *p.base_score);
        p.steered_score = std::exp(3.0 * *p.steered_score);
    }
    CHECK(win_ratio(t) == win_ratio(five));
}

TEST_CASE("degeneracy examples") {
    auto r = degeneracy_flag(std::vector{pair(0, 0, 10, 10), pair(0, 0, 4, 4)});
    CHECK(r.ratio == 1.0);
    CHECK_FALSE(r.degenerate);
    r = degeneracy_flag(std::vector{pair(0, 0, 10, 20), pair(0, 0, 5, 10)});
    CHECK(r.ratio == 2.0);
    CHECK_FALSE(r.degenerate);
    r = degeneracy_flag(std::vector{pair(0, 0, 10, 30), pair(0, 0, 10, 15)});
    CHECK(std::abs(r.ratio - 2.25) < 1e-12);
    CHECK(r.degenerate);
    CHECK_THROWS_AS((void)degeneracy_flag(std::vector{pair(0, 0, 0, 5)}), DomainError);
    CHECK_THROWS_AS((void)degeneracy_flag(std::vector<ScoredPair>{}), DomainError);

    const auto scaled = degeneracy_flag(std::vector{pair(0, 0, 70, 210), pair(0, 0, 70, 105)});
    CHECK(scaled.ratio == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("mcq tally examples") {
    const auto uniform = mcq_tally(std::vector{record({0, 0, 0, 0})});
    REQUIRE(uniform.size() == 4);
    for (const auto& c : uniform) CHECK(std::abs(c.mean_probability - 0.25) < 1e-12);
    CHECK(find(uniform, "both").choice_rate == 1.0);
    CHECK(find(uniform, "neutral").choice_rate == 0.0);

    const auto peaked = mcq_tally(std::vector{record({10, 0, 0, 0}, {"neutral", "both", "concept1_only", "concept2_only"})});
    const double p = std::exp(10.0) / (std::exp(10.0) + 3.0);
    CHECK(std::abs(find(peaked, "neutral").mean_probability - p) < 1e-12);
    CHECK(find(peaked, "neutral").mean_probability > 0.9998);
    CHECK(find(peaked, "neutral").choice_rate == 1.0);

    // single-concept mode with two neutral slots
    const auto single = mcq_tally(std::vector{record({1, 2, 3, 3}, {"positive", "negative", "neutral", "neutral"})});
    REQUIRE(single.size() == 3);
    CHECK(single[0].category == "positive");
    CHECK(find(single, "neutral").choice_rate == 1.0);
    const double z = std::exp(1.0) + std::exp(2.0) + 2.0 * std::exp(3.0);
    CHECK(std::abs(find(single, "neutral").mean_probability - 2.0 * std::exp(3.0) / z) < 1e-12);

    CHECK_THROWS_AS((void)mcq_tally(std::vector<McqRecord>{}), DomainError);
    CHECK_THROWS_AS((void)mcq_tally(std::vector{record({NAN, 0, 0, 0})}), DataError);
    CHECK_THROWS_AS((void)mcq_tally(std::vector{record({0, 0, 0, 0}, {"both", "both", "neutral", "neutral"})}),
                    DataError);
}

TEST_CASE("property: mcq probabilities sum to one and ignore logit shifts") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<McqRecord> recs, shifted;
        for (int i = 0; i < 15; ++i) {
            std::array<double, 4> l = {n(rng), n(rng), n(rng), n(rng)};
            recs.push_back(record(l));
            const double c = n(rng) * 10.0;
            for (auto& v : l) v += c;
            shifted.push_back(record(l));
        }
        const auto a = mcq_tally(recs), b = mcq_tally(shifted);
        double total = 0.0, rate = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            total += a[i].mean_probability;
            rate += a[i].choice_rate;
            CHECK(a[i].mean_probability >= 0.0);
            CHECK(a[i].mean_probability <= 1.0);
            CHECK(a[i].choice_rate == b[i].choice_rate);
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
        CHECK(std::abs(rate - 1.0) < 1e-12);
    }
}

TEST_CASE("best config selection") {
    const std::vector<ConfigRow> single = {{"a", {{"win_ratio", 0.3}}, false}};
    CHECK(best_config_select(single).row.config == "a");

    const std::vector<ConfigRow> two = {{"a", {{"win_ratio", 0.7}}, true}, {"b", {{"win_ratio", 0.7}}, false}};
    const auto s = best_config_select(two);
    CHECK(s.row.config == "b");
    CHECK_FALSE(s.degeneracy_warning);

    const std::vector<ConfigRow> tie = {{"zeta", {{"win_ratio", 0.5}}, false}, {"alpha", {{"win_ratio", 0.5}}, false}};
    CHECK(best_config_select(tie).row.config == "alpha");

    const std::vector<ConfigRow> all_bad = {{"x", {{"win_ratio", 0.2}}, true}, {"y", {{"win_ratio", 0.9}}, true}};
    const auto w = best_config_select(all_bad);
    CHECK(w.row.config == "y");
    CHECK(w.degeneracy_warning);

    const std::vector<ConfigRow> mcq = {{"m1", {{"choice_rate", 0.1}, {"mean_probability", 0.9}}, false},
                                        {"m2", {{"choice_rate", 0.8}, {"mean_probability", 0.2}}, false}};
    CHECK(best_config_select(mcq, "choice_rate").row.config == "m2");
    CHECK(best_config_select(mcq, "mean_probability").row.config == "m1");
    CHECK_THROWS_AS((void)best_config_select(mcq, "win_ratio"), DataError);
    CHECK_THROWS_AS((void)best_config_select(std::vector<ConfigRow>{}), DomainError);
}

TEST_CASE("JSON-lines ingestion") {
    const std::string text =
        "{\"prompt_id\":\"a\",\"base_score\":0.1,\"steered_score\":0.9,\"base_len\":12,\"steered_len\":14}\n"
        "\n"
        "{\"prompt_id\":\"b\",\"base_score\":null,\"steered_score\":null,\"base_len\":3,\"steered_len\":4}\n";
    const auto pairs = parse_scored_pairs(text);
    REQUIRE(pairs.size() == 2);
    CHECK(*pairs[0].steered_score == 0.9);
    CHECK_FALSE(pairs[1].base_score.has_value());
    CHECK(parse_scored_pairs(scored_pair_jsonl(pairs)).size() == 2);
    CHECK(scored_pair_jsonl(parse_scored_pairs(scored_pair_jsonl(pairs))) == scored_pair_jsonl(pairs));

    CHECK_THROWS_WITH_AS((void)parse_scored_pairs("{\"prompt_id\":\"a\"}\n{bad"), doctest::Contains("line 1"),
                         FormatError);
    CHECK_THROWS_WITH_AS((void)parse_scored_pairs(std::string(text) + "{bad\n"), doctest::Contains("line 4"),
                         FormatError);
    CHECK_THROWS_AS(
        (void)parse_scored_pairs("{\"prompt_id\":\"a\",\"base_score\":1,\"steered_score\":1,\"base_len\":-1,"
                                 "\"steered_len\":1}"),
        FormatError);

    const std::string mcq =
        "{\"question_id\":\"q1\",\"letter_logits\":[0,1,2,3],"
        "\"category_of_letter\":{\"A\":\"both\",\"B\":\"neutral\",\"C\":\"concept1_only\",\"D\":\"concept2_only\"}}\n";
    const auto recs = parse_mcq_records(mcq);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].category_of_letter[1] == "neutral");
    CHECK(recs[0].letter_logits[3] == 3.0);
    CHECK(mcq_record_jsonl(parse_mcq_records(mcq_record_jsonl(recs))) == mcq_record_jsonl(recs));
    CHECK_THROWS_AS((void)parse_mcq_records("{\"question_id\":\"q\",\"letter_logits\":[0,1,2],"
                                            "\"category_of_letter\":{}}"),
                    FormatError);

    const auto csv = tally_csv(mcq_tally(recs));
    CHECK(csv.rfind("category,mean_probability,choice_rate\n", 0) == 0);
}
