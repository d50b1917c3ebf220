#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "sqlion/dataset/corpus.hpp"
#include "sqlion/features.hpp"
#include "sqlion/rng.hpp"
#include "test_support.hpp"

using namespace sqlion;
using namespace sqlion::testing;

namespace {

std::uint32_t count_of(const FeatureVector& fv, std::string_view pattern, bool symbol) {
    const auto& d = default_dictionary();
    int i = symbol ? d.symbol_index_of(pattern) : d.index_of(pattern);
    EXPECT_GE(i, 0) << pattern;
    return fv.counts[static_cast<std::size_t>(i)];
}

std::uint32_t total(const FeatureVector& fv) { return std::accumulate(fv.counts.begin(), fv.counts.end(), 0u); }

} // namespace

TEST(CountFeatures, EmptyQueryIsAllZero) {
    auto fv = count_features(normalize(""), default_dictionary());
    EXPECT_EQ(total(fv), 0u);
    EXPECT_EQ(fv.label, unlabeled);
}

TEST(CountFeatures, UnionSelectExample) {
    auto fv = count_features(normalize("?id=1 union select * from users--"), default_dictionary());
    EXPECT_EQ(count_of(fv, "union select", false), 1u);
    EXPECT_EQ(count_of(fv, "union", false), 0u);
    EXPECT_EQ(count_of(fv, "select", false), 0u);
    EXPECT_EQ(count_of(fv, "from", false), 1u);
    EXPECT_EQ(count_of(fv, "=", false), 1u);
    EXPECT_EQ(count_of(fv, "--", true), 1u);
    EXPECT_EQ(count_of(fv, "=", true), 1u);
    EXPECT_EQ(count_of(fv, "\\d+", true), 1u);
    EXPECT_EQ(count_of(fv, "*", true), 1u);
    EXPECT_EQ(total(fv), 7u);
}

TEST(CountFeatures, TautologyExample) {
    auto fv = count_features(normalize("'or 1=1--"), default_dictionary());
    EXPECT_EQ(count_of(fv, "or", false), 1u);
    EXPECT_EQ(count_of(fv, "'", true), 1u);
    EXPECT_EQ(count_of(fv, "=", false), 1u);
    EXPECT_EQ(count_of(fv, "=", true), 1u);
    EXPECT_EQ(count_of(fv, "\\d+", true), 2u);
    EXPECT_EQ(count_of(fv, "--", true), 1u);
    EXPECT_EQ(total(fv), 7u);
}

TEST(CountFeatures, HexPrefixesMatchOnAlphabeticProjection) {
    auto fv = count_features(normalize("0xor\\x41"), default_dictionary());
    EXPECT_EQ(count_of(fv, "0x", true), 1u);
    EXPECT_EQ(count_of(fv, "\\x", true), 1u);
    EXPECT_EQ(count_of(fv, "or", false), 1u);
    EXPECT_EQ(count_of(fv, "\\d+", true), 2u);
}

TEST(CountFeatures, LongestMatchWinsAtEachPosition) {
    const auto& d = default_dictionary();
    auto fv = count_features(normalize("/**/"), d);
    EXPECT_EQ(count_of(fv, "/*", true), 1u);
    EXPECT_EQ(count_of(fv, "*/", true), 1u);
    EXPECT_EQ(count_of(fv, "*", true), 0u);
    fv = count_features(normalize("charset"), d);
    EXPECT_EQ(count_of(fv, "char", false), 1u);
    EXPECT_EQ(count_of(fv, "chr", false), 0u);
    fv = count_features(normalize("12345 678"), d);
    EXPECT_EQ(count_of(fv, "\\d+", true), 1u); // whitespace is gone from l2
}

TEST(CountFeatures, AgreesWithBruteForceOracle) {
    Rng rng(77);
    const auto& d = default_dictionary();
    for (int i = 0; i < 3000; ++i) {
        auto q = normalize(random_bytes(rng, 64));
        ASSERT_EQ(count_features(q, d), brute_force_counts(q, d)) << codec::percent_encode(q.l1);
    }
}

TEST(CountFeatures, NonOverlapConservation) {
    Rng rng(78);
    const auto& d = default_dictionary();
    for (int i = 0; i < 3000; ++i) {
        auto q = normalize(random_bytes(rng, 64));
        auto fv = count_features(q, d);
        std::size_t l1_used = 0, l2_used = 0;
        for (std::size_t j = 0; j < alphabetic_pattern_count; ++j)
            l1_used += fv.counts[j] * alphabetic_key(d.alphabetic()[j].text).size();
        for (std::size_t k = 0; k < symbol_pattern_count; ++k) {
            const auto& s = d.symbols()[k];
            auto n = fv.counts[alphabetic_pattern_count + k];
            if (s.text == digit_class_token)
                l2_used += n; // each run is at least one character
            else if (matches_alphabetic_projection(s))
                l1_used += n * s.text.size();
            else
                l2_used += n * s.text.size();
        }
        ASSERT_LE(l1_used, q.l1.size());
        ASSERT_LE(l2_used, q.l2.size());
    }
}

TEST(CountFeatures, SeparatedConcatenationIsSuperadditive) {
    // '!' occurs in no pattern, so it stops any match from spanning the seam.
    Rng rng(79);
    const auto& d = default_dictionary();
    for (int i = 0; i < 2000; ++i) {
        auto a = normalize(random_bytes(rng, 32));
        auto b = normalize(random_bytes(rng, 32));
        NormalizedQuery ab{a.l1 + "!" + b.l1, a.l2 + "!" + b.l2};
        auto fa = count_features(a, d);
        auto fab = count_features(ab, d);
        for (std::size_t j = 0; j < feature_count; ++j) ASSERT_GE(fab.counts[j], fa.counts[j]);
    }
}

TEST(CountFeatures, PlainConcatenationCanLoseMatches) {
    // The unseparated form of the property does not hold for longest-match
    // scanning; pin the counterexample.
    const auto& d = default_dictionary();
    auto a = count_features(normalize("union"), d);
    auto ab = count_features(normalize("unionselect"), d);
    EXPECT_EQ(count_of(a, "union", false), 1u);
    EXPECT_EQ(count_of(ab, "union", false), 0u);
}

TEST(Dictionary, DefaultSatisfiesInvariants) {
    const auto& d = default_dictionary();
    EXPECT_EQ(d.alphabetic().size(), 30u);
    EXPECT_EQ(d.symbols().size(), 20u);
    EXPECT_TRUE(dictionary_violations(d.alphabetic(), d.symbols()).empty());
    EXPECT_EQ(d.feature_name(0), "union select");
    EXPECT_EQ(d.feature_name(49), "\\d+");
}

TEST(Dictionary, ViolationsAreReported) {
    auto alpha = default_dictionary().alphabetic();
    auto sym = default_dictionary().symbols();
    auto bad = alpha;
    bad.pop_back();
    EXPECT_FALSE(dictionary_violations(bad, sym).empty());
    bad = alpha;
    bad[0].tier = 3; // union select must be tier 4
    EXPECT_FALSE(dictionary_violations(bad, sym).empty());
    bad = alpha;
    bad[29].text = "Information";
    EXPECT_FALSE(dictionary_violations(bad, sym).empty());
    bad = alpha;
    bad[29].text = "or";
    EXPECT_FALSE(dictionary_violations(bad, sym).empty());
    auto bad_sym = sym;
    bad_sym[16].text = "abc";
    EXPECT_FALSE(dictionary_violations(alpha, bad_sym).empty());
    bad_sym = sym;
    bad_sym[6].group = ModifierGroup::C; // ' belongs to A
    EXPECT_FALSE(dictionary_violations(alpha, bad_sym).empty());
    EXPECT_THROW(TokenDictionary(bad, sym), FormatError);
}

TEST(Dictionary, FileRoundTrip) {
    std::ostringstream out;
    write_dictionary(out, default_dictionary());
    std::istringstream in(out.str());
    EXPECT_EQ(read_dictionary(in), default_dictionary());
}

TEST(Dictionary, ShippedFileMatchesBuiltIn) {
    std::ifstream in(source_path("data/default.dict"));
    ASSERT_TRUE(in);
    EXPECT_EQ(read_dictionary(in, "data/default.dict"), default_dictionary());
    std::ostringstream out;
    write_dictionary(out, default_dictionary());
    EXPECT_EQ(read_file(source_path("data/default.dict")), out.str());
}

TEST(Dictionary, ReadErrorsNameTheLine) {
    std::ostringstream out;
    write_dictionary(out, default_dictionary());
    std::string text = out.str();
    auto broken = text;
    broken.replace(broken.find("A,all,3"), 7, "A,all,7");
    std::istringstream in(broken);
    try {
        read_dictionary(in, "x.dict");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("x.dict:2"), std::string::npos) << e.what();
    }
    std::istringstream short_in(text.substr(0, text.find("S,")));
    EXPECT_THROW(read_dictionary(short_in), FormatError);
}

TEST(FrequencyAnalysis, Examples) {
    EXPECT_TRUE(frequency_analysis({}, FrequencyMode::alphabetic_words).entries.empty());
    auto r = frequency_analysis({{"or or and", ""}}, FrequencyMode::alphabetic_words);
    std::vector<std::pair<std::string, std::uint64_t>> expected{{"or", 2}, {"and", 1}};
    EXPECT_EQ(r.entries, expected);
    auto s = frequency_analysis({{"a='1'--%27", ""}}, FrequencyMode::single_symbols);
    std::vector<std::pair<std::string, std::uint64_t>> sym{{"'", 3}, {"-", 2}, {"=", 1}};
    EXPECT_EQ(s.entries, sym);
}

TEST(FrequencyAnalysis, SortedAndConservesTotals) {
    auto corpus = generate_corpus({CorpusKind::malicious, 500, 5, false});
    for (auto mode : {FrequencyMode::alphabetic_words, FrequencyMode::single_symbols}) {
        auto r = frequency_analysis(corpus, mode);
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < r.entries.size(); ++i) {
            ASSERT_GE(r.entries[i].second, 1u);
            sum += r.entries[i].second;
            if (i > 0) {
                const auto& [pt, pc] = r.entries[i - 1];
                const auto& [t, c] = r.entries[i];
                ASSERT_TRUE(pc > c || (pc == c && pt < t));
            }
        }
        // Independent one-pass count.
        std::uint64_t naive = 0;
        for (const auto& q : corpus) {
            if (mode == FrequencyMode::alphabetic_words) {
                bool in_word = false;
                for (unsigned char c : q.text) {
                    bool letter = std::isalpha(c) && c < 0x80;
                    if (letter && !in_word) ++naive;
                    in_word = letter;
                }
            } else {
                for (unsigned char c : codec::html_entity_decode(codec::percent_decode(q.text)))
                    naive += (std::ispunct(c) && c < 0x80) ? 1 : 0;
            }
        }
        EXPECT_EQ(sum, naive);
    }
}

TEST(FrequencyAnalysis, FixtureCorpusRanksSelectHighly) {
    auto corpus = generate_corpus({CorpusKind::malicious, 10'000, 1, false});
    auto r = frequency_analysis(corpus, FrequencyMode::alphabetic_words);
    ASSERT_GE(r.entries.size(), 5u);
    bool found = false;
    for (std::size_t i = 0; i < 5; ++i) found = found || r.entries[i].first == "select";
    EXPECT_TRUE(found);
}

TEST(FrequencyAnalysis, ReportFileRoundTrip) {
    auto corpus = generate_corpus({CorpusKind::malicious, 300, 2, false});
    for (auto mode : {FrequencyMode::alphabetic_words, FrequencyMode::single_symbols}) {
        auto r = frequency_analysis(corpus, mode);
        std::ostringstream out;
        write_frequency_report(out, r);
        std::istringstream in(out.str());
        EXPECT_EQ(read_frequency_report(in), r);
    }
    std::istringstream bad("# sqlion-frequency v1 words\nor,zero\n");
    EXPECT_THROW(read_frequency_report(bad), FormatError);
}

TEST(BuildDictionary, MandatedOnlyReportsGiveMandatedSet) {
    FrequencyReport words{FrequencyMode::alphabetic_words, {}};
    for (const auto& p : default_dictionary().alphabetic()) words.entries.emplace_back(p.text, 1);
    FrequencyReport symbols{FrequencyMode::single_symbols, {}};
    for (const auto& p : default_dictionary().symbols()) symbols.entries.emplace_back(p.text, 1);
    auto d = build_dictionary(words, symbols);
    EXPECT_TRUE(dictionary_violations(d.alphabetic(), d.symbols()).empty());
    for (const auto& m : mandated_alphabetic) {
        int i = d.index_of(m.text);
        ASSERT_GE(i, 0);
        EXPECT_EQ(d.alphabetic()[static_cast<std::size_t>(i)].tier, m.tier);
    }
    for (const auto& p : default_dictionary().alphabetic()) EXPECT_GE(d.index_of(p.text), 0) << p.text;
    for (const auto& p : default_dictionary().symbols()) EXPECT_GE(d.symbol_index_of(p.text), 0) << p.text;
}

TEST(BuildDictionary, ForcesUnionSelect) {
    auto corpus = generate_corpus({CorpusKind::malicious, 2000, 9, false});
    auto words = frequency_analysis(corpus, FrequencyMode::alphabetic_words);
    std::erase_if(words.entries, [](const auto& e) { return e.first == "union select"; });
    auto d = build_dictionary(words, frequency_analysis(corpus, FrequencyMode::single_symbols));
    int i = d.index_of("union select");
    ASSERT_GE(i, 0);
    EXPECT_EQ(d.alphabetic()[static_cast<std::size_t>(i)].tier, 4);
}

TEST(BuildDictionary, FixtureReportsGiveValidDictionary) {
    auto corpus = generate_corpus({CorpusKind::malicious, 10'000, 1, false});
    auto d = build_dictionary(frequency_analysis(corpus, FrequencyMode::alphabetic_words),
                              frequency_analysis(corpus, FrequencyMode::single_symbols));
    EXPECT_TRUE(dictionary_violations(d.alphabetic(), d.symbols()).empty());
}

TEST(BuildDictionary, InsufficientCorpusFails) {
    FrequencyReport words{FrequencyMode::alphabetic_words, {{"select", 3}}};
    FrequencyReport symbols{FrequencyMode::single_symbols, {{"'", 3}}};
    EXPECT_THROW(build_dictionary(words, symbols), InvalidArgument);
    EXPECT_THROW(build_dictionary({}, symbols), InvalidArgument);
}
