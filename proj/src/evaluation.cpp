#include "conceptkit/evaluation.hpp"

#include "conceptkit/errors.hpp"
#include "conceptkit/file_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace conceptkit {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kCompositional = {"both", "concept1_only", "concept2_only", "neutral"};
// Report order for every category the tally may see.
constexpr std::array<std::string_view, 6> kCategoryOrder = {"both",     "concept1_only", "concept2_only",
                                                            "positive", "negative",      "neutral"};

void validate_categories(const McqRecord& r) {
    std::multiset<std::string_view> seen(r.category_of_letter.begin(), r.category_of_letter.end());
    std::multiset<std::string_view> compositional(kCompositional.begin(), kCompositional.end());
    std::multiset<std::string_view> single = {"positive", "negative", "neutral", "neutral"};
    if (seen != compositional && seen != single) {
        throw DataError("mcq record '" + r.question_id +
                        "': letters must map onto {both, concept1_only, concept2_only, neutral} or "
                        "{positive, negative, neutral, neutral}");
    }
}

template <typename F>
auto for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw FormatError("line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
            }
            try {
                f(j);
            } catch (const json::exception& e) {
                throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
            } catch (const DataError& e) {
                throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (eol == std::string_view::npos) break;
        text.remove_prefix(eol + 1);
    }
}

std::optional<double> optional_number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw DataError(std::string("field '") + key + "' must be a number or null");
    return v.get<double>();
}

} // namespace

double win_ratio(std::span<const ScoredPair> pairs) {
    if (pairs.empty()) throw DomainError("win_ratio: no pairs");
    std::size_t wins = 0;
    for (const auto& p : pairs) {
        if (!p.base_score || !p.steered_score) {
            throw DataError("win_ratio: pair '" + p.prompt_id + "' has no scores");
        }
        wins += *p.steered_score > *p.base_score ? 1 : 0;
    }
    return static_cast<double>(wins) / static_cast<double>(pairs.size());
}

DegeneracyResult degeneracy_flag(std::span<const ScoredPair> pairs, double threshold) {
    if (pairs.empty()) throw DomainError("degeneracy_flag: no pairs");
    double base = 0.0, steered = 0.0;
    for (const auto& p : pairs) {
        if (p.base_len < 0 || p.steered_len < 0) throw DataError("degeneracy_flag: negative length");
        base += static_cast<double>(p.base_len);
        steered += static_cast<double>(p.steered_len);
    }
    if (!(base > 0.0)) throw DomainError("degeneracy_flag: mean base length is zero");
    // The pair count cancels in the ratio of means.
    const double ratio = steered / base;
    return {ratio, ratio > threshold};
}

std::vector<CategoryTally> mcq_tally(std::span<const McqRecord> records) {
    if (records.empty()) throw DomainError("mcq_tally: no records");
    std::map<std::string, std::pair<double, double>> sums;
    for (const auto& r : records) {
        validate_categories(r);
        for (double l : r.letter_logits) {
            if (!std::isfinite(l)) throw DataError("mcq record '" + r.question_id + "' has a non-finite logit");
        }
        const double top = *std::max_element(r.letter_logits.begin(), r.letter_logits.end());
        std::array<double, 4> prob{};
        double z = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            prob[i] = std::exp(r.letter_logits[i] - top);
            z += prob[i];
        }
        std::size_t choice = 0;
        for (std::size_t i = 1; i < 4; ++i) {
            if (r.letter_logits[i] > r.letter_logits[choice]) choice = i;
        }
        for (std::size_t i = 0; i < 4; ++i) {
            auto& [p, c] = sums[r.category_of_letter[i]];
            p += prob[i] / z;
        }
        sums[r.category_of_letter[choice]].second += 1.0;
    }
    const auto n = static_cast<double>(records.size());
    std::vector<CategoryTally> out;
    for (auto name : kCategoryOrder) {
        auto it = sums.find(std::string(name));
        if (it == sums.end()) continue;
        out.push_back({it->first, it->second.first / n, it->second.second / n});
    }
    return out;
}

ConfigSelection best_config_select(std::span<const ConfigRow> table, std::string_view objective) {
    if (table.empty()) throw DomainError("best_config_select: empty table");
    auto score = [&](const ConfigRow& row) {
        auto it = row.metrics.find(std::string(objective));
        if (it == row.metrics.end()) {
            throw DataError("config '" + row.config + "' has no metric '" + std::string(objective) + "'");
        }
        return it->second;
    };
    const bool any_clean = std::any_of(table.begin(), table.end(), [](const ConfigRow& r) { return !r.degenerate; });
    const ConfigRow* best = nullptr;
    for (const auto& row : table) {
        if (any_clean && row.degenerate) continue;
        const double s = score(row);
        if (!best || s > score(*best) || (s == score(*best) && row.config < best->config)) best = &row;
    }
    return {*best, !any_clean};
}

std::vector<ScoredPair> parse_scored_pairs(std::string_view jsonl) {
    std::vector<ScoredPair> pairs;
    for_each_line(jsonl, [&](const json& j) {
        ScoredPair p;
        p.prompt_id = j.at("prompt_id").get<std::string>();
        p.base_score = optional_number(j, "base_score");
        p.steered_score = optional_number(j, "steered_score");
        p.base_len = j.at("base_len").get<std::int64_t>();
        p.steered_len = j.at("steered_len").get<std::int64_t>();
        if (p.base_len < 0 || p.steered_len < 0) throw DataError("token lengths must be >= 0");
        pairs.push_back(std::move(p));
    });
    return pairs;
}

std::vector<McqRecord> parse_mcq_records(std::string_view jsonl) {
    std::vector<McqRecord> records;
    for_each_line(jsonl, [&](const json& j) {
        McqRecord r;
        r.question_id = j.at("question_id").get<std::string>();
        const auto& logits = j.at("letter_logits");
        if (!logits.is_array() || logits.size() != 4) throw DataError("letter_logits must hold 4 numbers");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!logits[i].is_number()) throw DataError("letter_logits must hold 4 numbers");
            r.letter_logits[i] = logits[i].get<double>();
        }
        const auto& mapping = j.at("category_of_letter");
        if (!mapping.is_object() || mapping.size() != 4) {
            throw DataError("category_of_letter must map exactly the letters A-D");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            r.category_of_letter[i] = mapping.at(std::string(1, kMcqLetters[i])).get<std::string>();
        }
        validate_categories(r);
        records.push_back(std::move(r));
    });
    return records;
}

std::string scored_pair_jsonl(std::span<const ScoredPair> pairs) {
    std::string out;
    for (const auto& p : pairs) {
        json j;
        j["prompt_id"] = p.prompt_id;
        j["base_score"] = p.base_score ? json(*p.base_score) : json(nullptr);
        j["steered_score"] = p.steered_score ? json(*p.steered_score) : json(nullptr);
        j["base_len"] = p.base_len;
        j["steered_len"] = p.steered_len;
        out += j.dump() + "\n";
    }
    return out;
}

std::string mcq_record_jsonl(std::span<const McqRecord> records) {
    std::string out;
    for (const auto& r : records) {
        json j;
        j["question_id"] = r.question_id;
        j["letter_logits"] = r.letter_logits;
        json mapping = json::object();
        for (std::size_t i = 0; i < 4; ++i) mapping[std::string(1, kMcqLetters[i])] = r.category_of_letter[i];
        j["category_of_letter"] = mapping;
        out += j.dump() + "\n";
    }
    return out;
}

std::string tally_csv(std::span<const CategoryTally> tally) {
    std::string out = "category,mean_probability,choice_rate\n";
    for (const auto& t : tally) {
        out += t.category + "," + io::format_double(t.mean_probability) + "," + io::format_double(t.choice_rate) + "\n";
    }
    return out;
}

} // namespace conceptkit
