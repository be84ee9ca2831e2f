#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1tree/data.hpp"

namespace l1tree {

enum class SplitKind { NumericThreshold, CategorySubset };
enum class Direction { Left, Right };

// Primary or surrogate split. Numeric: value <= threshold goes left, with
// the threshold at the midpoint of consecutive observed values. Categorical:
// levels in left_levels go left, everything else right.
struct Split {
    int feature = -1;  // index into the tree's universe
    std::string feature_name;
    SplitKind kind = SplitKind::NumericThreshold;
    double threshold = 0.0;
    std::vector<std::string> left_levels;
    double improvement = 0.0;  // SS_T - (SS_L + SS_R), node-local

    std::string describe() const;
};

struct Surrogate {
    Split split;
    double agreement = 0.0;  // fraction of rows routed like the primary
};

struct TreeNode;
using NodePtr = std::shared_ptr<const TreeNode>;

struct TreeNode {
    int n = 0;
    double prob = 0.0;  // mean of y over the node's training rows
    double ss = 0.0;    // sum of squares of the node

    std::optional<Split> split;  // nullopt: leaf
    std::vector<Surrogate> surrogates;
    Direction default_direction = Direction::Left;
    NodePtr left, right;

    bool is_leaf() const { return !split.has_value(); }
};

struct FeatureInfo {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<std::string> vocabulary;  // categorical levels at growth time
    int dataset_column = -1;
};

struct GrowParams {
    int min_leaf = 10;
    int min_split = 20;  // 2 * min_leaf
    int max_depth = 30;
};

struct Tree {
    NodePtr root;
    std::vector<FeatureInfo> universe;
    GrowParams params;
    bool degenerate = false;  // root-only for a structural reason, not lack of signal

    double risk() const;      // sum of leaf SS
    int leaf_count() const;
    int node_count() const;
    std::string to_text() const;
};

// Binary recursive partitioning maximizing the between-groups sum of squares.
// Missing values never block a split: rows missing the split feature are
// routed by the first usable surrogate, else by the majority direction.
Tree grow(const Dataset& ds, const std::vector<std::string>& features,
          const GrowParams& params = {});

// Best split of one feature over the given rows, computed on rows non-missing
// for that feature; both sides must keep at least min_leaf of those rows.
std::optional<Split> best_split(const FeatureColumn& col, std::span<const int> rows,
                                const std::vector<int>& y, int min_leaf);

// Surrogates for a chosen primary split: per candidate feature, the split
// agreeing most with the primary routing, kept only when it beats blind
// majority routing, ranked by agreement.
std::vector<Surrogate> surrogate_splits(const Dataset& ds, std::span<const int> rows,
                                        const Split& primary,
                                        const std::vector<FeatureInfo>& universe);

double predict(const Tree& tree, const Dataset& ds, int row);

// Generic row addressed by universe position (for vectors not backed by a
// Dataset).
struct CellValue {
    enum class Kind { Missing, Number, Level };
    Kind kind = Kind::Missing;
    double number = 0.0;
    std::string level;

    static CellValue missing() { return {}; }
    static CellValue num(double v) { return {Kind::Number, v, {}}; }
    static CellValue cat(std::string s) { return {Kind::Level, 0.0, std::move(s)}; }
};
double predict_cells(const Tree& tree, std::span<const CellValue> cells);

struct CostComplexityEntry {
    double alpha = 0.0;
    Tree subtree;
    int leaves = 0;
};

struct CostComplexitySequence {
    std::vector<CostComplexityEntry> entries;  // alpha strictly increasing, trees nested
};

// Weakest-link pruning sequence: entry k minimizes R(T) + alpha|T| for alpha
// in [alpha_k, alpha_{k+1}).
CostComplexitySequence cost_complexity_sequence(const Tree& tree);

Tree prune(const CostComplexitySequence& seq, double alpha);
Tree prune(const Tree& tree, double alpha);

// Cross-validated alpha over candidates derived from the full-data pruning
// sequence (geometric means of adjacent breakpoints, plus the final
// breakpoint so the root-only tree stays reachable). Ties resolve to the
// larger alpha. Returns alpha_star and the full-data tree pruned there.
std::pair<double, Tree> cv_alpha(const Dataset& ds, const std::vector<std::string>& features,
                                 const FoldAssignment& folds, const GrowParams& params = {});

// Names used by primary splits (surrogates excluded), universe order.
std::vector<std::string> selected_variables(const Tree& tree);

}  // namespace l1tree
