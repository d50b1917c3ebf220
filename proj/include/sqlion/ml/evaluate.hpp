#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

#include "sqlion/error.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/labeled_dataset.hpp"
#include "sqlion/ml/model.hpp"

namespace sqlion {

struct EvaluationReport {
    std::string model_kind;
    std::uint64_t split_seed = 0;
    int block_threshold = default_block_threshold;
    std::uint64_t rows = 0;
    double accuracy = 0.0;
    // confusion[true - 1][predicted - 1]
    std::array<std::array<std::uint64_t, 4>, 4> confusion{};
    // Rows whose true verdict is not attack, and how many of them were
    // predicted as attack.
    std::uint64_t benign_rows = 0;
    std::uint64_t benign_flagged = 0;
    double false_positive_rate = 0.0;
    // The same ratio restricted to legitimate-provenance rows.
    std::uint64_t legitimate_benign_rows = 0;
    std::uint64_t legitimate_benign_flagged = 0;
    double legitimate_false_positive_rate = 0.0;
    // Share of all legitimate-provenance rows predicted as attack, whatever
    // their label says.
    std::uint64_t legitimate_rows = 0;
    std::uint64_t legitimate_flagged = 0;
    double legitimate_flag_rate = 0.0;
};

inline EvaluationReport evaluate(const Model& model, const LabeledDataset& test,
                                 int block_threshold = default_block_threshold, std::uint64_t split_seed = 0) {
    if (test.empty()) throw InvalidArgument("evaluate: test set is empty");
    EvaluationReport rep;
    rep.model_kind = std::string(model_kind(model));
    rep.split_seed = split_seed;
    rep.block_threshold = block_threshold;
    rep.rows = test.size();

    std::uint64_t correct = 0;
    for (const auto& row : test.rows) {
        RiskLevel truth(row.features.label);
        RiskLevel predicted = classify(model, row.features).level;
        ++rep.confusion[static_cast<std::size_t>(truth.value() - 1)][static_cast<std::size_t>(predicted.value() - 1)];
        if (truth == predicted) ++correct;
        bool flagged = verdict_from_level(predicted, block_threshold) == Verdict::attack;
        bool legitimate = row.provenance == Provenance::legitimate;
        if (verdict_from_level(truth, block_threshold) != Verdict::attack) {
            ++rep.benign_rows;
            if (flagged) ++rep.benign_flagged;
            if (legitimate) {
                ++rep.legitimate_benign_rows;
                if (flagged) ++rep.legitimate_benign_flagged;
            }
        }
        if (legitimate) {
            ++rep.legitimate_rows;
            if (flagged) ++rep.legitimate_flagged;
        }
    }
    auto ratio = [](std::uint64_t a, std::uint64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
    rep.accuracy = ratio(correct, rep.rows);
    rep.false_positive_rate = ratio(rep.benign_flagged, rep.benign_rows);
    rep.legitimate_false_positive_rate = ratio(rep.legitimate_benign_flagged, rep.legitimate_benign_rows);
    rep.legitimate_flag_rate = ratio(rep.legitimate_flagged, rep.legitimate_rows);
    return rep;
}

inline std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Human-readable table.
inline void write_report_table(std::ostream& out, const EvaluationReport& r) {
    out << "model            " << r.model_kind << '\n'
        << "split seed       " << r.split_seed << '\n'
        << "block threshold  " << r.block_threshold << '\n'
        << "test rows        " << r.rows << '\n'
        << "accuracy         " << format_ratio(r.accuracy) << '\n'
        << "FPR (labels)     " << format_ratio(r.false_positive_rate) << "  (" << r.benign_flagged << '/'
        << r.benign_rows << ")\n"
        << "FPR (legitimate) " << format_ratio(r.legitimate_false_positive_rate) << "  (" << r.legitimate_benign_flagged
        << '/' << r.legitimate_benign_rows << ")\n"
        << "legit flagged    " << format_ratio(r.legitimate_flag_rate) << "  (" << r.legitimate_flagged << '/'
        << r.legitimate_rows << ")\n"
        << "confusion (rows = true level, columns = predicted)\n"
        << "            1        2        3        4\n";
    for (std::size_t t = 0; t < 4; ++t) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %zu %8llu %8llu %8llu %8llu\n", t + 1,
                      static_cast<unsigned long long>(r.confusion[t][0]), static_cast<unsigned long long>(r.confusion[t][1]),
                      static_cast<unsigned long long>(r.confusion[t][2]), static_cast<unsigned long long>(r.confusion[t][3]));
        out << buf;
    }
}

/// `metric,value` CSV.
inline void write_report_csv(std::ostream& out, const EvaluationReport& r) {
    out << "metric,value\n"
        << "model," << r.model_kind << '\n'
        << "split_seed," << r.split_seed << '\n'
        << "block_threshold," << r.block_threshold << '\n'
        << "test_rows," << r.rows << '\n'
        << "accuracy," << format_ratio(r.accuracy) << '\n'
        << "false_positive_rate," << format_ratio(r.false_positive_rate) << '\n'
        << "legitimate_false_positive_rate," << format_ratio(r.legitimate_false_positive_rate) << '\n'
        << "legitimate_flag_rate," << format_ratio(r.legitimate_flag_rate) << '\n';
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t p = 0; p < 4; ++p)
            out << "confusion_" << t + 1 << '_' << p + 1 << ',' << r.confusion[t][p] << '\n';
}

} // namespace sqlion
