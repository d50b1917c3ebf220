#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sqlion/error.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/labeled_dataset.hpp"

namespace sqlion {

// Multinomial Naive Bayes over the 50 pattern counts.
struct NaiveBayesModel {
    struct ClassStats {
        int level = 1;
        std::uint64_t rows = 0;
        double prior = 0.0;
        std::array<double, feature_count> smoothed{}; // per-feature count sum + alpha
        double total = 0.0;                          // all counts in the class + 50 alpha

        friend bool operator==(const ClassStats&, const ClassStats&) = default;
    };

    double alpha = 1.0;
    std::vector<ClassStats> classes; // ascending level, only levels seen in training

    friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;
};

inline NaiveBayesModel train_nb(const LabeledDataset& train, double alpha = 1.0) {
    if (train.empty()) throw InvalidArgument("train_nb: training set is empty");
    if (!(alpha > 0.0)) throw InvalidArgument("train_nb: smoothing constant must be positive");

    std::array<std::uint64_t, 4> rows{};
    std::array<std::array<std::uint64_t, feature_count>, 4> sums{};
    for (const auto& row : train.rows) {
        auto c = static_cast<std::size_t>(RiskLevel(row.features.label).value() - 1);
        ++rows[c];
        for (std::size_t j = 0; j < feature_count; ++j) sums[c][j] += row.features.counts[j];
    }

    NaiveBayesModel model;
    model.alpha = alpha;
    for (std::size_t c = 0; c < 4; ++c) {
        if (rows[c] == 0) continue;
        NaiveBayesModel::ClassStats stats;
        stats.level = static_cast<int>(c) + 1;
        stats.rows = rows[c];
        stats.prior = static_cast<double>(rows[c]) / static_cast<double>(train.size());
        double total = 0.0;
        for (std::size_t j = 0; j < feature_count; ++j) {
            stats.smoothed[j] = static_cast<double>(sums[c][j]) + alpha;
            total += static_cast<double>(sums[c][j]);
        }
        stats.total = total + static_cast<double>(feature_count) * alpha;
        model.classes.push_back(stats);
    }
    return model;
}

struct NaiveBayesPrediction {
    RiskLevel level{1};
    std::array<double, 4> posterior{}; // indexed by level - 1; zero for untrained levels
};

/// Argmax of log prior + sum_j count_j * log p(j | class); ties go to the
/// higher level. Posteriors are normalised with log-sum-exp.
inline NaiveBayesPrediction predict_nb(const NaiveBayesModel& model, const FeatureVector& fv) {
    if (model.classes.empty()) throw InvalidArgument("predict_nb: model has no classes");

    std::vector<double> score(model.classes.size());
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        const auto& cs = model.classes[k];
        double s = std::log(cs.prior);
        const double log_total = std::log(cs.total);
        for (std::size_t j = 0; j < feature_count; ++j) {
            if (fv.counts[j] != 0) s += static_cast<double>(fv.counts[j]) * (std::log(cs.smoothed[j]) - log_total);
        }
        score[k] = s;
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < score.size(); ++k) {
        if (score[k] >= score[best]) best = k;
    }

    NaiveBayesPrediction out;
    out.level = RiskLevel(model.classes[best].level);
    double norm = 0.0;
    for (double s : score) norm += std::exp(s - score[best]);
    for (std::size_t k = 0; k < score.size(); ++k) {
        out.posterior[static_cast<std::size_t>(model.classes[k].level - 1)] = std::exp(score[k] - score[best]) / norm;
    }
    return out;
}

} // namespace sqlion
