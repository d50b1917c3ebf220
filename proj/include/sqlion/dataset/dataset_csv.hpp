#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sqlion/error.hpp"
#include "sqlion/ml/labeled_dataset.hpp"

namespace sqlion {

// Dataset file:
//   # sqlion-dataset v1
//   f0,...,f49,label,provenance
//   <50 counts>,<1-4>,<mal|leg>

inline constexpr std::string_view dataset_magic = "# sqlion-dataset v1";

inline std::string dataset_header() {
    std::string h;
    for (std::size_t j = 0; j < feature_count; ++j) h += "f" + std::to_string(j) + ",";
    return h + "label,provenance";
}

inline void write_dataset(std::ostream& out, const LabeledDataset& data) {
    out << dataset_magic << '\n' << dataset_header() << '\n';
    std::string line;
    for (const auto& row : data.rows) {
        line.clear();
        for (auto c : row.features.counts) {
            line += std::to_string(c);
            line += ',';
        }
        line += std::to_string(row.features.label);
        line += ',';
        line += to_string(row.provenance);
        line += '\n';
        out << line;
    }
}

inline LabeledDataset read_dataset(std::istream& in, std::string_view origin = "dataset") {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
    };
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) fail("empty file");
    if (line != dataset_magic) {
        if (line.rfind("# sqlion-dataset", 0) == 0) fail("version mismatch: '" + line + "'");
        fail("not a sqlion dataset (missing '" + std::string(dataset_magic) + "')");
    }
    if (!next_line()) fail("missing column header");
    if (line != dataset_header()) fail("unexpected column header");

    LabeledDataset data;
    std::vector<std::string_view> cols;
    while (next_line()) {
        if (line.empty()) continue;
        cols.clear();
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            cols.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cols.size() != feature_count + 2)
            fail("expected " + std::to_string(feature_count + 2) + " columns, got " + std::to_string(cols.size()));

        LabeledRow row;
        for (std::size_t j = 0; j < feature_count; ++j) {
            auto col = cols[j];
            auto [ptr, ec] = std::from_chars(col.data(), col.data() + col.size(), row.features.counts[j]);
            if (ec != std::errc{} || ptr != col.data() + col.size() || col.empty())
                fail("bad count in column f" + std::to_string(j));
        }
        auto label_col = cols[feature_count];
        int label = 0;
        auto [ptr, ec] = std::from_chars(label_col.data(), label_col.data() + label_col.size(), label);
        if (ec != std::errc{} || ptr != label_col.data() + label_col.size() || label_col.empty()) fail("bad label");
        if (label < 1 || label > 4) fail("label out of range: " + std::to_string(label));
        row.features.label = label;
        auto prov = parse_provenance(cols[feature_count + 1]);
        if (!prov) fail("bad provenance '" + std::string(cols[feature_count + 1]) + "'");
        row.provenance = *prov;
        data.rows.push_back(row);
    }
    return data;
}

} // namespace sqlion
