#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conceptkit {

// One prompt scored with and without steering. Scores stay empty until a
// downstream classifier fills them.
struct ScoredPair {
    std::string prompt_id;
    std::optional<double> base_score;
    std::optional<double> steered_score;
    std::int64_t base_len = 0;
    std::int64_t steered_len = 0;
};

// Fraction of pairs with steered_score > base_score; ties are losses.
[[nodiscard]] double win_ratio(std::span<const ScoredPair> pairs);

inline constexpr double kDegeneracyThreshold = 2.0;

struct DegeneracyResult {
    double ratio = 0.0;
    bool degenerate = false;
};

// mean(steered_len) / mean(base_len); degenerate when strictly above threshold.
[[nodiscard]] DegeneracyResult degeneracy_flag(std::span<const ScoredPair> pairs,
                                               double threshold = kDegeneracyThreshold);

inline constexpr std::array<char, 4> kMcqLetters = {'A', 'B', 'C', 'D'};

struct McqRecord {
    std::string question_id;
    std::array<double, 4> letter_logits{};
    // Category of A, B, C, D. Either a bijection onto
    // {both, concept1_only, concept2_only, neutral} or, for a single concept,
    // {positive, negative, neutral, neutral}.
    std::array<std::string, 4> category_of_letter;
};

struct CategoryTally {
    std::string category;
    double mean_probability = 0.0;
    double choice_rate = 0.0;
};

// Softmax over the four letter logits per record, averaged per category.
// The chosen letter is the argmax, earliest letter on ties.
[[nodiscard]] std::vector<CategoryTally> mcq_tally(std::span<const McqRecord> records);

struct ConfigRow {
    std::string config;
    std::map<std::string, double> metrics;  // e.g. win_ratio, choice_rate
    bool degenerate = false;
};

struct ConfigSelection {
    ConfigRow row;
    bool degeneracy_warning = false;  // every candidate was degenerate
};

// Highest `objective` among non-degenerate rows (all rows if none qualify),
// ties broken by the lexicographically smallest config key.
[[nodiscard]] ConfigSelection best_config_select(std::span<const ConfigRow> table,
                                                 std::string_view objective = "win_ratio");

// JSON-lines ingestion, one record per non-blank line.
[[nodiscard]] std::vector<ScoredPair> parse_scored_pairs(std::string_view jsonl);
[[nodiscard]] std::vector<McqRecord> parse_mcq_records(std::string_view jsonl);
[[nodiscard]] std::string scored_pair_jsonl(std::span<const ScoredPair> pairs);
[[nodiscard]] std::string mcq_record_jsonl(std::span<const McqRecord> records);

// `category,mean_probability,choice_rate`
[[nodiscard]] std::string tally_csv(std::span<const CategoryTally> tally);

} // namespace conceptkit
