#include "l1tree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace l1tree {

namespace {

double node_ss(long n, long sum) {
    // For 0/1 targets: sum of squares = s - s^2/n = s(n-s)/n.
    if (n == 0) return 0.0;
    return double(sum) * double(n - sum) / double(n);
}

// Exact positivity test for SS_T - (SS_L + SS_R) over integer class counts:
// improvement > 0  <=>  sL^2/nL + sR^2/nR > sT^2/nT.
bool improvement_positive(long n_l, long s_l, long n_r, long s_r) {
    using I = __int128;
    I lhs = I(s_l) * s_l * n_r * (n_l + n_r) + I(s_r) * s_r * n_l * (n_l + n_r);
    I rhs = I(s_l + s_r) * (s_l + s_r) * n_l * n_r;
    return lhs > rhs;
}

double improvement_value(long n_l, long s_l, long n_r, long s_r) {
    long n_t = n_l + n_r, s_t = s_l + s_r;
    double v = double(s_l) * double(s_l) / double(n_l) +
               double(s_r) * double(s_r) / double(n_r) -
               double(s_t) * double(s_t) / double(n_t);
    return v;
}

struct NumericCandidate {
    double value;
    int y;
};

std::optional<Split> best_numeric_split(const FeatureColumn& col, std::span<const int> rows,
                                        const std::vector<int>& y, int min_leaf) {
    std::vector<NumericCandidate> pts;
    pts.reserve(rows.size());
    for (int r : rows)
        if (!col.is_missing(r)) pts.push_back({col.numeric[std::size_t(r)], y[std::size_t(r)]});
    if (pts.size() < 2) return std::nullopt;
    // Canonical order (value, then label) keeps sums independent of row order.
    std::sort(pts.begin(), pts.end(), [](const NumericCandidate& a, const NumericCandidate& b) {
        return a.value != b.value ? a.value < b.value : a.y < b.y;
    });
    long n_t = long(pts.size()), s_t = 0;
    for (const auto& p : pts) s_t += p.y;

    bool found = false;
    double best_improvement = 0.0;
    double best_threshold = 0.0;
    long n_l = 0, s_l = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        n_l += 1;
        s_l += pts[i].y;
        if (pts[i].value == pts[i + 1].value) continue;
        long n_r = n_t - n_l, s_r = s_t - s_l;
        if (n_l < min_leaf || n_r < min_leaf) continue;
        if (!improvement_positive(n_l, s_l, n_r, s_r)) continue;
        double imp = improvement_value(n_l, s_l, n_r, s_r);
        if (!found || imp > best_improvement) {
            found = true;
            best_improvement = imp;
            best_threshold = (pts[i].value + pts[i + 1].value) / 2.0;
        }
    }
    if (!found) return std::nullopt;
    Split sp;
    sp.kind = SplitKind::NumericThreshold;
    sp.threshold = best_threshold;
    sp.improvement = best_improvement;
    return sp;
}

std::optional<Split> best_categorical_split(const FeatureColumn& col, std::span<const int> rows,
                                            const std::vector<int>& y, int min_leaf) {
    const std::size_t vocab = col.vocabulary.size();
    std::vector<long> count(vocab, 0), sum(vocab, 0);
    for (int r : rows) {
        if (col.is_missing(r)) continue;
        std::size_t c = std::size_t(col.codes[std::size_t(r)]);
        count[c] += 1;
        sum[c] += y[std::size_t(r)];
    }
    std::vector<int> present;
    long n_t = 0, s_t = 0;
    for (std::size_t c = 0; c < vocab; ++c) {
        if (count[c] > 0) {
            present.push_back(int(c));
            n_t += count[c];
            s_t += sum[c];
        }
    }
    if (present.size() < 2 || n_t < 2) return std::nullopt;
    // Order levels by within-node mean; scanning this order covers the
    // SS-optimal subset for a binary response.
    std::sort(present.begin(), present.end(), [&](int a, int b) {
        double ma = double(sum[std::size_t(a)]) / double(count[std::size_t(a)]);
        double mb = double(sum[std::size_t(b)]) / double(count[std::size_t(b)]);
        return ma != mb ? ma < mb : a < b;
    });

    bool found = false;
    double best_improvement = 0.0;
    std::size_t best_cut = 0;
    long n_l = 0, s_l = 0;
    for (std::size_t i = 0; i + 1 < present.size(); ++i) {
        n_l += count[std::size_t(present[i])];
        s_l += sum[std::size_t(present[i])];
        long n_r = n_t - n_l, s_r = s_t - s_l;
        if (n_l < min_leaf || n_r < min_leaf) continue;
        if (!improvement_positive(n_l, s_l, n_r, s_r)) continue;
        double imp = improvement_value(n_l, s_l, n_r, s_r);
        if (!found || imp > best_improvement) {
            found = true;
            best_improvement = imp;
            best_cut = i;
        }
    }
    if (!found) return std::nullopt;
    Split sp;
    sp.kind = SplitKind::CategorySubset;
    sp.improvement = best_improvement;
    std::vector<int> left(present.begin(), present.begin() + long(best_cut) + 1);
    std::sort(left.begin(), left.end());  // canonical: vocabulary order
    for (int c : left) sp.left_levels.push_back(col.vocabulary[std::size_t(c)]);
    return sp;
}

// Routing of a non-missing value through a split.
Direction route_numeric(const Split& sp, double v) {
    return v <= sp.threshold ? Direction::Left : Direction::Right;
}
Direction route_level(const Split& sp, const std::string& level) {
    return std::find(sp.left_levels.begin(), sp.left_levels.end(), level) != sp.left_levels.end()
               ? Direction::Left
               : Direction::Right;
}

Direction route_column(const Split& sp, const FeatureColumn& col, int row) {
    if (sp.kind == SplitKind::NumericThreshold) return route_numeric(sp, col.numeric[std::size_t(row)]);
    return route_level(sp, col.level(row));
}

struct GrowContext {
    const Dataset& ds;
    const std::vector<FeatureInfo>& universe;
    const GrowParams& params;
    const std::vector<int>& y;
};

NodePtr grow_node(const GrowContext& ctx, std::vector<int>& rows, int depth) {
    auto node = std::make_shared<TreeNode>();
    long n = long(rows.size()), s = 0;
    for (int r : rows) s += ctx.y[std::size_t(r)];
    node->n = int(n);
    node->prob = n > 0 ? double(s) / double(n) : 0.0;
    node->ss = node_ss(n, s);

    if (depth >= ctx.params.max_depth || n < ctx.params.min_split || s == 0 || s == n)
        return node;

    // Best split across the universe; earlier features win exact ties.
    std::optional<Split> best;
    for (std::size_t f = 0; f < ctx.universe.size(); ++f) {
        const FeatureColumn& col = ctx.ds.columns[std::size_t(ctx.universe[f].dataset_column)];
        auto cand = best_split(col, rows, ctx.y, ctx.params.min_leaf);
        if (!cand) continue;
        cand->feature = int(f);
        cand->feature_name = ctx.universe[f].name;
        if (!best || cand->improvement > best->improvement) best = std::move(cand);
    }
    if (!best) return node;

    node->split = *best;
    node->surrogates = surrogate_splits(ctx.ds, rows, *best, ctx.universe);

    const FeatureColumn& pcol = ctx.ds.columns[std::size_t(ctx.universe[std::size_t(best->feature)].dataset_column)];
    long n_left = 0, n_right = 0;
    for (int r : rows) {
        if (pcol.is_missing(r)) continue;
        (route_column(*best, pcol, r) == Direction::Left ? n_left : n_right) += 1;
    }
    node->default_direction = n_left >= n_right ? Direction::Left : Direction::Right;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (int r : rows) {
        Direction dir;
        if (!pcol.is_missing(r)) {
            dir = route_column(*best, pcol, r);
        } else {
            dir = node->default_direction;
            for (const auto& sur : node->surrogates) {
                const FeatureColumn& scol =
                    ctx.ds.columns[std::size_t(ctx.universe[std::size_t(sur.split.feature)].dataset_column)];
                if (!scol.is_missing(r)) {
                    dir = route_column(sur.split, scol, r);
                    break;
                }
            }
        }
        (dir == Direction::Left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    node->left = grow_node(ctx, left_rows, depth + 1);
    node->right = grow_node(ctx, right_rows, depth + 1);
    return node;
}

void collect_risk(const NodePtr& node, double& risk, int& leaves, int& nodes) {
    nodes += 1;
    if (node->is_leaf()) {
        risk += node->ss;
        leaves += 1;
        return;
    }
    collect_risk(node->left, risk, leaves, nodes);
    collect_risk(node->right, risk, leaves, nodes);
}

void render_node(const NodePtr& node, int indent, std::string& out) {
    out.append(std::size_t(indent) * 2, ' ');
    if (node->is_leaf()) {
        out += "leaf p=" + format_double(node->prob) + " n=" + std::to_string(node->n) + "\n";
        return;
    }
    out += "split " + node->split->describe() + " n=" + std::to_string(node->n);
    if (!node->surrogates.empty()) {
        out += " surrogates[";
        for (std::size_t i = 0; i < node->surrogates.size(); ++i) {
            if (i) out += "; ";
            out += node->surrogates[i].split.describe() + " (" +
                   format_double(node->surrogates[i].agreement) + ")";
        }
        out += "]";
    }
    out += node->default_direction == Direction::Left ? " default=left" : " default=right";
    out += "\n";
    render_node(node->left, indent + 1, out);
    render_node(node->right, indent + 1, out);
}

struct SubtreeStat {
    double risk = 0.0;
    int leaves = 0;
};

void subtree_stats(const NodePtr& node, std::unordered_map<const TreeNode*, SubtreeStat>& out) {
    SubtreeStat st;
    if (node->is_leaf()) {
        st.risk = node->ss;
        st.leaves = 1;
    } else {
        subtree_stats(node->left, out);
        subtree_stats(node->right, out);
        const auto& l = out[node->left.get()];
        const auto& r = out[node->right.get()];
        st.risk = l.risk + r.risk;
        st.leaves = l.leaves + r.leaves;
    }
    out[node.get()] = st;
}

NodePtr collapse_nodes(const NodePtr& node, const std::set<const TreeNode*>& to_collapse) {
    if (node->is_leaf()) return node;
    if (to_collapse.count(node.get())) {
        auto leaf = std::make_shared<TreeNode>();
        leaf->n = node->n;
        leaf->prob = node->prob;
        leaf->ss = node->ss;
        return leaf;
    }
    NodePtr l = collapse_nodes(node->left, to_collapse);
    NodePtr r = collapse_nodes(node->right, to_collapse);
    if (l == node->left && r == node->right) return node;
    auto copy = std::make_shared<TreeNode>(*node);
    copy->left = std::move(l);
    copy->right = std::move(r);
    return copy;
}

const FeatureColumn* resolve_column(const Dataset& ds, const FeatureInfo& info) {
    if (info.dataset_column >= 0 && info.dataset_column < int(ds.columns.size()) &&
        ds.columns[std::size_t(info.dataset_column)].name == info.name)
        return &ds.columns[std::size_t(info.dataset_column)];
    int idx = ds.column_index(info.name);
    return idx >= 0 ? &ds.columns[std::size_t(idx)] : nullptr;
}

}  // namespace

std::string Split::describe() const {
    if (kind == SplitKind::NumericThreshold)
        return feature_name + " <= " + format_double(threshold);
    std::string out = feature_name + " in {";
    for (std::size_t i = 0; i < left_levels.size(); ++i) {
        if (i) out += ", ";
        out += left_levels[i];
    }
    out += "}";
    return out;
}

double Tree::risk() const {
    double r = 0.0;
    int l = 0, c = 0;
    collect_risk(root, r, l, c);
    return r;
}

int Tree::leaf_count() const {
    double r = 0.0;
    int l = 0, c = 0;
    collect_risk(root, r, l, c);
    return l;
}

int Tree::node_count() const {
    double r = 0.0;
    int l = 0, c = 0;
    collect_risk(root, r, l, c);
    return c;
}

std::string Tree::to_text() const {
    std::string out;
    render_node(root, 0, out);
    return out;
}

std::optional<Split> best_split(const FeatureColumn& col, std::span<const int> rows,
                                const std::vector<int>& y, int min_leaf) {
    if (col.kind == FeatureKind::Numeric) return best_numeric_split(col, rows, y, min_leaf);
    return best_categorical_split(col, rows, y, min_leaf);
}

std::vector<Surrogate> surrogate_splits(const Dataset& ds, std::span<const int> rows,
                                        const Split& primary,
                                        const std::vector<FeatureInfo>& universe) {
    const FeatureColumn& pcol = ds.columns[std::size_t(universe[std::size_t(primary.feature)].dataset_column)];
    std::vector<int> prows;
    std::vector<Direction> pdir;
    long n_left = 0;
    for (int r : rows) {
        if (pcol.is_missing(r)) continue;
        Direction d = route_column(primary, pcol, r);
        prows.push_back(r);
        pdir.push_back(d);
        if (d == Direction::Left) ++n_left;
    }
    long n_primary = long(prows.size());
    if (n_primary == 0) return {};
    long baseline_num = std::max(n_left, n_primary - n_left);  // over n_primary

    struct Ranked {
        Surrogate sur;
        long matches;
        long total;
        int feature;
    };
    std::vector<Ranked> kept;

    for (std::size_t f = 0; f < universe.size(); ++f) {
        if (int(f) == primary.feature) continue;
        const FeatureColumn& col = ds.columns[std::size_t(universe[f].dataset_column)];
        long best_matches = -1;
        Split best;

        if (col.kind == FeatureKind::Numeric) {
            struct P {
                double value;
                int left;  // primary went left
            };
            std::vector<P> pts;
            for (std::size_t i = 0; i < prows.size(); ++i)
                if (!col.is_missing(prows[i]))
                    pts.push_back({col.numeric[std::size_t(prows[i])],
                                   pdir[i] == Direction::Left ? 1 : 0});
            if (pts.size() < 2) continue;
            std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) {
                return a.value != b.value ? a.value < b.value : a.left < b.left;
            });
            long total = long(pts.size()), total_left = 0;
            for (const auto& p : pts) total_left += p.left;
            long nl = 0, pl = 0;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                nl += 1;
                pl += pts[i].left;
                if (pts[i].value == pts[i + 1].value) continue;
                long matches = pl + (total - nl) - (total_left - pl);
                if (matches > best_matches) {
                    best_matches = matches;
                    best = Split{};
                    best.kind = SplitKind::NumericThreshold;
                    best.threshold = (pts[i].value + pts[i + 1].value) / 2.0;
                }
            }
            if (best_matches < 0) continue;
            kept.push_back(
                {{best, double(best_matches) / double(total)}, best_matches, total, int(f)});
        } else {
            std::vector<long> count(col.vocabulary.size(), 0), leftc(col.vocabulary.size(), 0);
            long total = 0;
            for (std::size_t i = 0; i < prows.size(); ++i) {
                if (col.is_missing(prows[i])) continue;
                std::size_t c = std::size_t(col.codes[std::size_t(prows[i])]);
                count[c] += 1;
                if (pdir[i] == Direction::Left) leftc[c] += 1;
                ++total;
            }
            if (total == 0) continue;
            long matches = 0;
            std::vector<std::string> left_levels;
            for (std::size_t c = 0; c < count.size(); ++c) {
                if (count[c] == 0) continue;
                long right_matches = count[c] - leftc[c];
                if (leftc[c] > right_matches) {
                    matches += leftc[c];
                    left_levels.push_back(col.vocabulary[c]);
                } else {
                    matches += right_matches;
                }
            }
            best = Split{};
            best.kind = SplitKind::CategorySubset;
            best.left_levels = std::move(left_levels);
            kept.push_back({{best, double(matches) / double(total)}, matches, total, int(f)});
        }

        Ranked& r = kept.back();
        r.sur.split.feature = int(f);
        r.sur.split.feature_name = universe[f].name;
        // Keep only surrogates strictly better than blind majority routing.
        if (!(__int128(r.matches) * n_primary > __int128(baseline_num) * r.total)) kept.pop_back();
    }

    std::sort(kept.begin(), kept.end(), [](const Ranked& a, const Ranked& b) {
        __int128 lhs = __int128(a.matches) * b.total;
        __int128 rhs = __int128(b.matches) * a.total;
        if (lhs != rhs) return lhs > rhs;
        return a.feature < b.feature;
    });
    std::vector<Surrogate> out;
    out.reserve(kept.size());
    for (auto& r : kept) out.push_back(std::move(r.sur));
    return out;
}

Tree grow(const Dataset& ds, const std::vector<std::string>& features, const GrowParams& params) {
    Tree tree;
    tree.params = params;

    std::vector<int> cols;
    for (const auto& name : features) {
        int ci = ds.column_index(name);
        if (ci < 0) throw DataError("grow: unknown feature " + name);
        if (std::find(cols.begin(), cols.end(), ci) == cols.end()) cols.push_back(ci);
    }
    std::sort(cols.begin(), cols.end());  // universe in dataset column order
    for (int ci : cols) {
        const FeatureColumn& col = ds.columns[std::size_t(ci)];
        tree.universe.push_back({col.name, col.kind, col.vocabulary, ci});
    }

    std::vector<int> rows(static_cast<std::size_t>(ds.n));
    for (int i = 0; i < ds.n; ++i) rows[std::size_t(i)] = i;

    if (tree.universe.empty()) {
        auto node = std::make_shared<TreeNode>();
        long s = 0;
        for (int r : rows) s += ds.target[std::size_t(r)];
        node->n = ds.n;
        node->prob = ds.n ? double(s) / double(ds.n) : 0.0;
        node->ss = node_ss(ds.n, s);
        tree.root = node;
        tree.degenerate = true;
        return tree;
    }

    GrowContext ctx{ds, tree.universe, params, ds.target};
    tree.root = grow_node(ctx, rows, 0);
    return tree;
}

namespace {

const TreeNode* descend(const Tree& tree, const std::vector<const FeatureColumn*>& cols,
                        int row) {
    const TreeNode* node = tree.root.get();
    while (!node->is_leaf()) {
        const Split& sp = *node->split;
        const FeatureColumn* col = cols[std::size_t(sp.feature)];
        Direction dir;
        if (col && !col->is_missing(row)) {
            dir = route_column(sp, *col, row);
        } else {
            dir = node->default_direction;
            for (const auto& sur : node->surrogates) {
                const FeatureColumn* scol = cols[std::size_t(sur.split.feature)];
                if (scol && !scol->is_missing(row)) {
                    dir = route_column(sur.split, *scol, row);
                    break;
                }
            }
        }
        node = dir == Direction::Left ? node->left.get() : node->right.get();
    }
    return node;
}

}  // namespace

double predict(const Tree& tree, const Dataset& ds, int row) {
    std::vector<const FeatureColumn*> cols(tree.universe.size());
    for (std::size_t f = 0; f < tree.universe.size(); ++f)
        cols[f] = resolve_column(ds, tree.universe[f]);
    return descend(tree, cols, row)->prob;
}

double predict_cells(const Tree& tree, std::span<const CellValue> cells) {
    if (cells.size() != tree.universe.size())
        throw DataError("predict_cells: expected one cell per universe feature");
    const TreeNode* node = tree.root.get();
    auto route_cell = [](const Split& sp, const CellValue& cv) {
        if (sp.kind == SplitKind::NumericThreshold) return route_numeric(sp, cv.number);
        return route_level(sp, cv.level);
    };
    while (!node->is_leaf()) {
        const Split& sp = *node->split;
        const CellValue& cv = cells[std::size_t(sp.feature)];
        Direction dir;
        if (cv.kind != CellValue::Kind::Missing) {
            dir = route_cell(sp, cv);
        } else {
            dir = node->default_direction;
            for (const auto& sur : node->surrogates) {
                const CellValue& sv = cells[std::size_t(sur.split.feature)];
                if (sv.kind != CellValue::Kind::Missing) {
                    dir = route_cell(sur.split, sv);
                    break;
                }
            }
        }
        node = dir == Direction::Left ? node->left.get() : node->right.get();
    }
    return node->prob;
}

CostComplexitySequence cost_complexity_sequence(const Tree& tree) {
    CostComplexitySequence seq;
    Tree current = tree;
    seq.entries.push_back({0.0, current, current.leaf_count()});

    while (!current.root->is_leaf()) {
        std::unordered_map<const TreeNode*, SubtreeStat> stats;
        subtree_stats(current.root, stats);

        // Weakest links: internal nodes minimizing
        // g(t) = (SS(t) - R(T_t)) / (|T_t| - 1).
        double min_g = 0.0;
        bool have = false;
        std::vector<std::pair<const TreeNode*, double>> internal;
        std::vector<const TreeNode*> stack{current.root.get()};
        while (!stack.empty()) {
            const TreeNode* node = stack.back();
            stack.pop_back();
            if (node->is_leaf()) continue;
            const auto& st = stats[node];
            double g = (node->ss - st.risk) / double(st.leaves - 1);
            internal.push_back({node, g});
            if (!have || g < min_g) {
                min_g = g;
                have = true;
            }
            stack.push_back(node->left.get());
            stack.push_back(node->right.get());
        }

        // Collapse every tie at the minimum so the recorded subtree is the
        // smallest R_alpha minimizer on its interval.
        double tie_bound = min_g + 1e-9 * (1.0 + std::fabs(min_g));
        std::set<const TreeNode*> to_collapse;
        for (const auto& [node, g] : internal)
            if (g <= tie_bound) to_collapse.insert(node);

        Tree next = current;
        next.root = collapse_nodes(current.root, to_collapse);
        current = next;

        double alpha = std::max(min_g, 0.0);
        if (!seq.entries.empty() && alpha <= seq.entries.back().alpha) {
            // Degenerate breakpoint (realized-zero split): keep the smaller
            // tree for this alpha.
            seq.entries.back().subtree = current;
            seq.entries.back().leaves = current.leaf_count();
        } else {
            seq.entries.push_back({alpha, current, current.leaf_count()});
        }
    }
    return seq;
}

Tree prune(const CostComplexitySequence& seq, double alpha) {
    if (alpha < 0.0) throw ConfigError("prune: alpha must be non-negative");
    std::size_t pick = 0;
    for (std::size_t k = 0; k < seq.entries.size(); ++k)
        if (seq.entries[k].alpha <= alpha) pick = k;  // breakpoint ties: smaller tree
    return seq.entries[pick].subtree;
}

Tree prune(const Tree& tree, double alpha) {
    return prune(cost_complexity_sequence(tree), alpha);
}

std::pair<double, Tree> cv_alpha(const Dataset& ds, const std::vector<std::string>& features,
                                 const FoldAssignment& folds, const GrowParams& params) {
    Tree full = grow(ds, features, params);
    if (full.root->is_leaf()) {
        full.degenerate = true;
        return {0.0, full};
    }
    CostComplexitySequence seq = cost_complexity_sequence(full);

    std::vector<double> candidates;
    for (std::size_t k = 0; k + 1 < seq.entries.size(); ++k)
        candidates.push_back(
            std::sqrt(seq.entries[k].alpha * seq.entries[k + 1].alpha));
    candidates.push_back(seq.entries.back().alpha);

    const int k = folds.k;
    std::vector<double> cv_err(candidates.size(), 0.0);
    for (int f = 0; f < k; ++f) {
        std::vector<int> train, test;
        for (int i = 0; i < ds.n; ++i)
            (folds.fold_of_row[std::size_t(i)] == f ? test : train).push_back(i);
        if (test.empty()) continue;
        Dataset fold_ds = ds.subset(train);
        Tree fold_tree = grow(fold_ds, features, params);
        CostComplexitySequence fold_seq = cost_complexity_sequence(fold_tree);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            Tree pruned = prune(fold_seq, candidates[c]);
            double err = 0.0;
            for (int i : test) {
                double d = predict(pruned, ds, i) - double(ds.target[std::size_t(i)]);
                err += d * d;
            }
            cv_err[c] += err / double(test.size());
        }
    }
    for (double& e : cv_err) e /= double(k);

    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c)
        if (cv_err[c] <= cv_err[best]) best = c;  // ties: larger alpha
    double alpha_star = candidates[best];
    return {alpha_star, prune(seq, alpha_star)};
}

std::vector<std::string> selected_variables(const Tree& tree) {
    std::vector<std::uint8_t> used(tree.universe.size(), 0);
    std::vector<const TreeNode*> stack{tree.root.get()};
    while (!stack.empty()) {
        const TreeNode* node = stack.back();
        stack.pop_back();
        if (node->is_leaf()) continue;
        used[std::size_t(node->split->feature)] = 1;
        stack.push_back(node->left.get());
        stack.push_back(node->right.get());
    }
    std::vector<std::string> out;
    for (std::size_t f = 0; f < used.size(); ++f)
        if (used[f]) out.push_back(tree.universe[f].name);
    return out;
}

}  // namespace l1tree
