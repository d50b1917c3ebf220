#pragma once

#include <string>

#include "sqlion/collab/wire.hpp"
#include "sqlion/dictionary.hpp"
#include "sqlion/features.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/model.hpp"
#include "sqlion/normalize.hpp"

namespace sqlion {

// Server side: classifies routed queries with a trained model. Stateless
// apart from its immutable model, so classify may run concurrently.
class Analyzer {
public:
    Analyzer(std::string name, Model model, TokenDictionary dict, int block_threshold = default_block_threshold)
        : name_(std::move(name)), model_(std::move(model)), dict_(std::move(dict)), threshold_(block_threshold) {
        verdict_from_level(RiskLevel(1), threshold_); // validates the threshold
    }

    wire::Hello hello() const { return {wire::Role::analyzer, name_}; }
    const std::string& name() const { return name_; }

    wire::VerdictRecord classify(const wire::Query& q) const {
        auto c = sqlion::classify(model_, count_features(normalize(q.query), dict_));
        return {q.id, c.level.value(), verdict_from_level(c.level, threshold_), std::string(model_kind(model_)),
                c.confidence, q.ip};
    }

private:
    std::string name_;
    Model model_;
    TokenDictionary dict_;
    int threshold_;
};

} // namespace sqlion
