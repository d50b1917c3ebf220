#pragma once

#include <vector>

#include "sqlion/dictionary.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/labeled_dataset.hpp"
#include "sqlion/normalize.hpp"

namespace sqlion {

struct BuildOptions {
    // Trusted-corpus policy: force legitimate rows to level 1.
    bool legitimate_as_level_one = false;
};

/// Labels every query of both corpora, malicious rows first. Every query of
/// the malicious capture is considered dangerous, but its row still carries
/// the rule label; the capture origin lives in the provenance tag.
inline LabeledDataset build_dataset(const std::vector<RawQuery>& malicious, const std::vector<RawQuery>& legitimate,
                                    const TokenDictionary& dict, BuildOptions options = {}) {
    LabeledDataset data;
    data.rows.reserve(malicious.size() + legitimate.size());
    for (const auto& q : malicious) data.rows.push_back({label_query(q.text, dict), Provenance::malicious});
    for (const auto& q : legitimate) {
        LabeledRow row{label_query(q.text, dict), Provenance::legitimate};
        if (options.legitimate_as_level_one) row.features.label = 1;
        data.rows.push_back(row);
    }
    return data;
}

} // namespace sqlion
