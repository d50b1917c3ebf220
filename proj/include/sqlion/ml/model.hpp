#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlion/error.hpp"
#include "sqlion/ml/decision_tree.hpp"
#include "sqlion/ml/naive_bayes.hpp"

namespace sqlion {

using Model = std::variant<NaiveBayesModel, DecisionTreeModel>;

inline std::string_view model_kind(const Model& m) {
    return std::holds_alternative<NaiveBayesModel>(m) ? "nb" : "tree";
}

struct Classification {
    RiskLevel level{1};
    double confidence = 0.0; // NB: max posterior; tree: leaf purity
};

inline Classification classify(const Model& model, const FeatureVector& fv) {
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        auto p = predict_nb(*nb, fv);
        return {p.level, p.posterior[static_cast<std::size_t>(p.level.value() - 1)]};
    }
    const auto& tree = std::get<DecisionTreeModel>(model);
    return {predict_tree(tree, fv), tree_confidence(tree, fv)};
}

// Model files:
//
//   SQLION-MODEL v1 nb
//   alpha <a>
//   class <level> <rows> <prior> <total> <smoothed_0> ... <smoothed_49>
//
//   SQLION-MODEL v1 tree
//   max_depth <d>
//   node <feature> <threshold>           (preorder; left subtree follows)
//   leaf <level> <n1> <n2> <n3> <n4>
//
// Reals are written with 12 significant digits.

inline constexpr std::string_view model_magic = "SQLION-MODEL";
inline constexpr std::string_view model_version = "v1";

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_model(std::ostream& out, const Model& model) {
    out << model_magic << ' ' << model_version << ' ' << model_kind(model) << '\n';
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
        out << "alpha " << format_real(nb->alpha) << '\n';
        for (const auto& c : nb->classes) {
            out << "class " << c.level << ' ' << c.rows << ' ' << format_real(c.prior) << ' ' << format_real(c.total);
            for (double s : c.smoothed) out << ' ' << format_real(s);
            out << '\n';
        }
        return;
    }
    const auto& tree = std::get<DecisionTreeModel>(model);
    out << "max_depth " << tree.max_depth << '\n';
    for (const auto& n : tree.nodes) {
        if (n.leaf) {
            out << "leaf " << n.prediction;
            for (auto h : n.histogram) out << ' ' << h;
        } else {
            out << "node " << n.feature << ' ' << n.threshold;
        }
        out << '\n';
    }
}

namespace detail {

class ModelReader {
public:
    ModelReader(std::istream& in, std::string_view origin) : in_(in), origin_(origin) {}

    bool next(std::istringstream& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            fields = std::istringstream(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw FormatError(origin_ + ":" + std::to_string(line_no_) + ": " + why);
    }

    template <typename T>
    T field(std::istringstream& fields, const char* what) {
        T v{};
        if (!(fields >> v)) fail(std::string("bad or missing ") + what);
        return v;
    }

    void expect_end(std::istringstream& fields) {
        std::string extra;
        if (fields >> extra) fail("unexpected trailing field '" + extra + "'");
    }

private:
    std::istream& in_;
    std::string origin_;
    std::size_t line_no_ = 0;
};

inline NaiveBayesModel read_nb(ModelReader& r) {
    NaiveBayesModel m;
    std::istringstream f;
    if (!r.next(f) || r.field<std::string>(f, "record") != "alpha") r.fail("expected alpha record");
    m.alpha = r.field<double>(f, "alpha");
    if (!(m.alpha > 0.0)) r.fail("alpha must be positive");
    r.expect_end(f);
    while (r.next(f)) {
        if (r.field<std::string>(f, "record") != "class") r.fail("expected class record");
        NaiveBayesModel::ClassStats c;
        c.level = r.field<int>(f, "level");
        if (c.level < 1 || c.level > 4) r.fail("class level out of range");
        if (!m.classes.empty() && c.level <= m.classes.back().level) r.fail("class records must ascend by level");
        c.rows = r.field<std::uint64_t>(f, "rows");
        c.prior = r.field<double>(f, "prior");
        c.total = r.field<double>(f, "total");
        for (auto& s : c.smoothed) {
            s = r.field<double>(f, "smoothed count");
            if (!(s > 0.0)) r.fail("smoothed counts must be positive");
        }
        if (!(c.prior > 0.0 && c.prior <= 1.0) || !(c.total > 0.0)) r.fail("prior or total out of range");
        r.expect_end(f);
        m.classes.push_back(c);
    }
    if (m.classes.empty()) r.fail("model has no classes");
    return m;
}

inline DecisionTreeModel read_tree(ModelReader& r) {
    DecisionTreeModel m;
    std::istringstream f;
    if (!r.next(f) || r.field<std::string>(f, "record") != "max_depth") r.fail("expected max_depth record");
    m.max_depth = r.field<int>(f, "max_depth");
    if (m.max_depth < 0 || m.max_depth > default_tree_depth) r.fail("max_depth out of range");
    r.expect_end(f);

    // Rebuild right-child links: an internal node's right subtree starts once
    // its left subtree is complete.
    std::vector<std::size_t> open; // internal nodes whose left subtree is still being read
    std::vector<bool> left_done;
    bool complete = false;
    while (r.next(f)) {
        if (complete) r.fail("records after a complete tree");
        auto kind = r.field<std::string>(f, "record");
        TreeNode n;
        if (kind == "node") {
            n.leaf = false;
            n.feature = r.field<int>(f, "feature");
            if (n.feature < 0 || n.feature >= static_cast<int>(feature_count)) r.fail("feature index out of range");
            n.threshold = r.field<std::uint32_t>(f, "threshold");
        } else if (kind == "leaf") {
            n.prediction = r.field<int>(f, "level");
            if (n.prediction < 1 || n.prediction > 4) r.fail("leaf level out of range");
            for (auto& h : n.histogram) h = r.field<std::uint64_t>(f, "histogram count");
            if (std::accumulate(n.histogram.begin(), n.histogram.end(), std::uint64_t{0}) == 0)
                r.fail("leaf histogram is empty");
        } else {
            r.fail("expected node or leaf record");
        }
        r.expect_end(f);
        std::size_t index = m.nodes.size();
        m.nodes.push_back(n);
        if (!n.leaf) {
            // Every node in `open` is an ancestor, so this node's children sit
            // at depth open.size() + 1.
            if (static_cast<int>(open.size()) >= m.max_depth) r.fail("tree deeper than max_depth");
            open.push_back(index);
            left_done.push_back(false);
            continue;
        }
        // A finished subtree closes every ancestor whose right side is done
        // and hands the next node to the nearest one still waiting.
        while (!open.empty() && left_done.back()) {
            open.pop_back();
            left_done.pop_back();
        }
        if (open.empty()) {
            complete = true;
        } else {
            left_done.back() = true;
            m.nodes[open.back()].right = index + 1;
        }
    }
    if (!complete) r.fail("truncated tree");
    return m;
}

} // namespace detail

inline Model read_model(std::istream& in, std::string_view origin = "model") {
    detail::ModelReader r(in, origin);
    std::istringstream f;
    if (!r.next(f)) r.fail("empty model file");
    if (r.field<std::string>(f, "magic") != model_magic) r.fail("not a model file");
    if (r.field<std::string>(f, "version") != model_version) r.fail("unsupported model version");
    auto kind = r.field<std::string>(f, "model kind");
    r.expect_end(f);
    if (kind == "nb") return detail::read_nb(r);
    if (kind == "tree") return detail::read_tree(r);
    r.fail("unknown model kind '" + kind + "'");
}

} // namespace sqlion
