#include "l1tree/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace l1tree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_levels(const std::vector<std::string>& levels) {
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) out += ", ";
        out += levels[i];
    }
    return out;
}

int compare_conditions(const Condition& a, const Condition& b) {
    if (a.universe_index != b.universe_index) return a.universe_index < b.universe_index ? -1 : 1;
    if (a.form != b.form) return int(a.form) < int(b.form) ? -1 : 1;
    if (a.lo != b.lo) return a.lo < b.lo ? -1 : 1;
    if (a.hi != b.hi) return a.hi < b.hi ? -1 : 1;
    std::string al = join_levels(a.levels), bl = join_levels(b.levels);
    if (al != bl) return al < bl ? -1 : 1;
    return 0;
}

bool rule_before(const Rule& a, const Rule& b) {
    std::size_t m = std::min(a.conditions.size(), b.conditions.size());
    for (std::size_t i = 0; i < m; ++i) {
        int c = compare_conditions(a.conditions[i], b.conditions[i]);
        if (c != 0) return c < 0;
    }
    if (a.conditions.size() != b.conditions.size())
        return a.conditions.size() < b.conditions.size();
    return a.predicted_class < b.predicted_class;
}

void extract_rules(const Tree& tree, const NodePtr& node, std::vector<Condition>& path,
                   const DecisionConfig& cfg, std::vector<Rule>& out) {
    if (node->is_leaf()) {
        Rule rule;
        rule.conditions = canonicalize_conditions(path);
        rule.leaf_prob = node->prob;
        rule.support = node->n;
        rule.predicted_class = classify(node->prob, cfg);
        out.push_back(std::move(rule));
        return;
    }
    const Split& sp = *node->split;
    const FeatureInfo& info = tree.universe[std::size_t(sp.feature)];

    Condition left, right;
    left.feature = right.feature = info.name;
    left.universe_index = right.universe_index = sp.feature;
    if (sp.kind == SplitKind::NumericThreshold) {
        left.form = right.form = Condition::Form::Interval;
        left.lo = -kInf;
        left.hi = sp.threshold;
        right.lo = sp.threshold;
        right.hi = kInf;
    } else {
        left.form = right.form = Condition::Form::InLevels;
        left.levels = sp.left_levels;
        for (const auto& lvl : info.vocabulary)
            if (std::find(sp.left_levels.begin(), sp.left_levels.end(), lvl) ==
                sp.left_levels.end())
                right.levels.push_back(lvl);
    }

    path.push_back(left);
    extract_rules(tree, node->left, path, cfg, out);
    path.back() = right;
    extract_rules(tree, node->right, path, cfg, out);
    path.pop_back();
}

}  // namespace

std::string Condition::describe() const {
    switch (form) {
        case Form::Interval:
            if (lo == -kInf) return feature + " <= " + format_double(hi);
            if (hi == kInf) return feature + " > " + format_double(lo);
            return feature + " in (" + format_double(lo) + "; " + format_double(hi) + "]";
        case Form::InLevels:
            if (levels.size() == 1) return feature + " = " + levels[0];
            return feature + " in {" + join_levels(levels) + "}";
        case Form::MissingRouted:
            return feature + " missing -> " + note;
    }
    return feature;
}

std::vector<Condition> canonicalize_conditions(std::vector<Condition> conditions) {
    std::map<int, Condition> merged;
    std::vector<Condition> annotations;
    for (auto& c : conditions) {
        if (c.form == Condition::Form::MissingRouted) {
            annotations.push_back(std::move(c));
            continue;
        }
        auto it = merged.find(c.universe_index);
        if (it == merged.end()) {
            merged.emplace(c.universe_index, std::move(c));
        } else if (c.form == Condition::Form::Interval) {
            it->second.lo = std::max(it->second.lo, c.lo);
            it->second.hi = std::min(it->second.hi, c.hi);
        } else {
            // Intersection, first-set order kept.
            std::vector<std::string> inter;
            for (const auto& lvl : it->second.levels)
                if (std::find(c.levels.begin(), c.levels.end(), lvl) != c.levels.end())
                    inter.push_back(lvl);
            it->second.levels = std::move(inter);
        }
    }
    std::vector<Condition> out;
    for (auto& [idx, cond] : merged) out.push_back(std::move(cond));
    for (auto& a : annotations) out.push_back(std::move(a));
    return out;
}

RuleSet rules_from_tree(const Tree& tree, const DecisionConfig& cfg) {
    RuleSet rs;
    rs.threshold = cfg.threshold;
    rs.universe = tree.universe;
    std::vector<Condition> path;
    extract_rules(tree, tree.root, path, cfg, rs.rules);
    std::sort(rs.rules.begin(), rs.rules.end(), rule_before);
    return rs;
}

bool rule_matches(const Rule& rule, std::span<const CellValue> cells) {
    for (const auto& c : rule.conditions) {
        if (c.form == Condition::Form::MissingRouted) continue;
        const CellValue& cv = cells[std::size_t(c.universe_index)];
        if (cv.kind == CellValue::Kind::Missing) return false;
        if (c.form == Condition::Form::Interval) {
            if (!(cv.number > c.lo && cv.number <= c.hi)) return false;
        } else {
            if (std::find(c.levels.begin(), c.levels.end(), cv.level) == c.levels.end())
                return false;
        }
    }
    return true;
}

RuleValidationReport validate(const RuleSet& rs, const Tree& tree, const Dataset& ds) {
    RuleValidationReport report;
    std::vector<const FeatureColumn*> cols;
    for (const auto& info : rs.universe) {
        int idx = ds.column_index(info.name);
        if (idx < 0) throw DataError("validate: feature " + info.name + " absent from dataset");
        cols.push_back(&ds.columns[std::size_t(idx)]);
    }
    std::vector<CellValue> cells(rs.universe.size());
    for (int i = 0; i < ds.n; ++i) {
        bool complete = true;
        for (std::size_t f = 0; f < cols.size(); ++f) {
            if (cols[f]->is_missing(i)) {
                complete = false;
                break;
            }
            cells[f] = cols[f]->kind == FeatureKind::Numeric
                           ? CellValue::num(cols[f]->numeric[std::size_t(i)])
                           : CellValue::cat(cols[f]->level(i));
        }
        if (!complete) {
            report.rows_skipped_missing += 1;
            continue;
        }
        report.rows_checked += 1;
        int matches = 0;
        const Rule* matched = nullptr;
        for (const auto& rule : rs.rules) {
            if (rule_matches(rule, cells)) {
                ++matches;
                matched = &rule;
            }
        }
        if (matches != 1) {
            report.violations.push_back("row " + std::to_string(i) + ": " +
                                        std::to_string(matches) + " rules match");
            continue;
        }
        double tree_prob = predict(tree, ds, i);
        if (tree_prob != matched->leaf_prob)
            report.violations.push_back("row " + std::to_string(i) +
                                        ": rule probability " + format_double(matched->leaf_prob) +
                                        " != tree prediction " + format_double(tree_prob));
    }
    return report;
}

std::string render(const RuleSet& rs, const std::string& class0_label,
                   const std::string& class1_label) {
    std::vector<std::string> c0, c1;
    for (const auto& rule : rs.rules) {
        std::string text;
        if (rule.conditions.empty()) {
            text = "always";
        } else {
            for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
                if (i) text += ", ";
                text += rule.conditions[i].describe();
            }
        }
        (rule.predicted_class == 0 ? c0 : c1).push_back(text);
    }
    std::string out;
    out += "| " + class0_label + " | " + class1_label + " |\n";
    out += "| --- | --- |\n";
    std::size_t nrows = std::max(c0.size(), c1.size());
    for (std::size_t i = 0; i < nrows; ++i) {
        out += "| " + (i < c0.size() ? c0[i] : std::string()) + " | " +
               (i < c1.size() ? c1[i] : std::string()) + " |\n";
    }
    out += "\nProbability threshold: " + format_double(rs.threshold) + ". ";
    out += "Rules describe complete feature vectors; rows with missing values follow the "
           "tree's surrogate routing.\n";
    return out;
}

}  // namespace l1tree
