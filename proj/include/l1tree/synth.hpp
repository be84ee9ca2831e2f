#pragma once

#include <memory>
#include <string>
#include <vector>

#include "l1tree/data.hpp"
#include "l1tree/rules.hpp"
#include "l1tree/tree.hpp"

namespace l1tree {

struct SynthFeature {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    enum class Dist { Normal, Uniform } dist = Dist::Normal;
    double a = 0.0, b = 1.0;  // normal: mean/sd, uniform: lo/hi
    std::vector<std::string> levels;
    std::vector<double> level_probs;
    double missing_rate = 0.0;
};

// Generating rule tree: leaves carry the class.
struct GenNode {
    bool is_leaf = true;
    int cls = 0;
    std::string feature;
    SplitKind kind = SplitKind::NumericThreshold;
    double threshold = 0.0;
    std::vector<std::string> left_levels;
    std::shared_ptr<const GenNode> left, right;
};

struct SynthSpec {
    int n = 0;
    std::uint64_t seed = 0;
    double noise = 0.0;  // label flip probability
    std::vector<SynthFeature> features;
    std::shared_ptr<const GenNode> generator;
};

// Text form:
//   n 500
//   seed 42
//   noise 0.15
//   feature Age numeric normal 45 15
//   feature Platelets numeric uniform 10 400
//   feature Sex categorical Male 0.6 Female 0.4
//   missing Platelets 0.1
//   generator
//     split Platelets <= 50
//       leaf 1
//       split Sex in Male
//         leaf 1
//         leaf 0
SynthSpec parse_synth_spec(const std::string& text);
SynthSpec load_synth_spec(const std::string& path);

// Deterministic given the seed. Independent streams drive feature values,
// label noise and missingness, so a noiseless regeneration with the same
// seed reproduces the same features and pre-noise targets.
Dataset synth_generate(const SynthSpec& spec);

// The generating rules as a unit-probability tree over the declared
// features (for rule export and zero-noise validation).
Tree ground_truth_tree(const SynthSpec& spec);
RuleSet ground_truth_rules(const SynthSpec& spec);

Schema synth_schema(const SynthSpec& spec);

}  // namespace l1tree
