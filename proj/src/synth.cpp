#include "l1tree/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace l1tree {

namespace {

std::vector<std::string> tokenize_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::string cur;
    bool quoted = false, have = false;
    for (char c : line) {
        if (quoted) {
            if (c == '"') quoted = false;
            else cur += c;
        } else if (c == '"') {
            quoted = true;
            have = true;
        } else if (c == ' ' || c == '\t') {
            if (have || !cur.empty()) tokens.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur += c;
        }
    }
    if (have || !cur.empty()) tokens.push_back(cur);
    return tokens;
}

int indent_of(const std::string& line) {
    int indent = 0;
    for (char c : line) {
        if (c == ' ') ++indent;
        else if (c == '\t') indent += 2;
        else break;
    }
    return indent;
}

struct GenLine {
    int indent;
    std::vector<std::string> tokens;
    int line_no;
};

std::shared_ptr<const GenNode> parse_gen_node(const std::vector<GenLine>& lines, std::size_t& pos,
                                              int expected_indent) {
    if (pos >= lines.size())
        throw ConfigError("synth spec: generator tree ends unexpectedly");
    const GenLine& line = lines[pos];
    if (line.indent != expected_indent)
        throw ConfigError("synth spec line " + std::to_string(line.line_no) +
                          ": unexpected indentation");
    ++pos;
    auto node = std::make_shared<GenNode>();
    const auto& t = line.tokens;
    if (t[0] == "leaf") {
        if (t.size() != 2 || (t[1] != "0" && t[1] != "1"))
            throw ConfigError("synth spec line " + std::to_string(line.line_no) +
                              ": leaf expects class 0 or 1");
        node->is_leaf = true;
        node->cls = t[1] == "1" ? 1 : 0;
        return node;
    }
    if (t[0] != "split")
        throw ConfigError("synth spec line " + std::to_string(line.line_no) +
                          ": expected 'split' or 'leaf'");
    node->is_leaf = false;
    if (t.size() == 4 && t[2] == "<=") {
        node->feature = t[1];
        node->kind = SplitKind::NumericThreshold;
        node->threshold = std::stod(t[3]);
    } else if (t.size() >= 4 && t[2] == "in") {
        node->feature = t[1];
        node->kind = SplitKind::CategorySubset;
        for (std::size_t i = 3; i < t.size(); ++i) {
            std::string lvl = t[i];
            while (!lvl.empty() && lvl.back() == ',') lvl.pop_back();
            if (!lvl.empty()) node->left_levels.push_back(lvl);
        }
        if (node->left_levels.empty())
            throw ConfigError("synth spec line " + std::to_string(line.line_no) +
                              ": empty level subset");
    } else {
        throw ConfigError("synth spec line " + std::to_string(line.line_no) +
                          ": split expects '<name> <= <value>' or '<name> in <levels>'");
    }
    node->left = parse_gen_node(lines, pos, expected_indent + 2);
    node->right = parse_gen_node(lines, pos, expected_indent + 2);
    return node;
}

const SynthFeature& feature_of(const SynthSpec& spec, const std::string& name) {
    for (const auto& f : spec.features)
        if (f.name == name) return f;
    throw ConfigError("synth spec: generator references undeclared feature " + name);
}

void check_generator(const SynthSpec& spec, const std::shared_ptr<const GenNode>& node) {
    if (!node || node->is_leaf) return;
    const SynthFeature& f = feature_of(spec, node->feature);
    if (node->kind == SplitKind::NumericThreshold && f.kind != FeatureKind::Numeric)
        throw ConfigError("synth spec: numeric split on categorical feature " + node->feature);
    if (node->kind == SplitKind::CategorySubset) {
        if (f.kind != FeatureKind::Categorical)
            throw ConfigError("synth spec: level split on numeric feature " + node->feature);
        for (const auto& lvl : node->left_levels)
            if (std::find(f.levels.begin(), f.levels.end(), lvl) == f.levels.end())
                throw ConfigError("synth spec: unknown level " + lvl + " of feature " +
                                  node->feature);
    }
    check_generator(spec, node->left);
    check_generator(spec, node->right);
}

NodePtr build_truth_node(const std::shared_ptr<const GenNode>& gen,
                         const std::vector<FeatureInfo>& universe) {
    auto node = std::make_shared<TreeNode>();
    if (gen->is_leaf) {
        node->prob = double(gen->cls);
        return node;
    }
    Split sp;
    sp.feature_name = gen->feature;
    for (std::size_t f = 0; f < universe.size(); ++f)
        if (universe[f].name == gen->feature) sp.feature = int(f);
    sp.kind = gen->kind;
    sp.threshold = gen->threshold;
    sp.left_levels = gen->left_levels;
    node->split = sp;
    node->left = build_truth_node(gen->left, universe);
    node->right = build_truth_node(gen->right, universe);
    return node;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& text) {
    SynthSpec spec;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool seen_seed = false;
    std::vector<GenLine> gen_lines;
    bool in_generator = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto tokens = tokenize_line(line);
        if (tokens.empty()) continue;
        if (in_generator) {
            gen_lines.push_back({indent_of(line), tokens, line_no});
            continue;
        }
        const std::string& key = tokens[0];
        if (key == "n") {
            spec.n = std::stoi(tokens.at(1));
        } else if (key == "seed") {
            spec.seed = std::stoull(tokens.at(1));
            seen_seed = true;
        } else if (key == "noise") {
            spec.noise = std::stod(tokens.at(1));
        } else if (key == "feature") {
            SynthFeature f;
            f.name = tokens.at(1);
            const std::string& kind = tokens.at(2);
            if (kind == "numeric") {
                f.kind = FeatureKind::Numeric;
                const std::string& dist = tokens.at(3);
                if (dist == "normal") f.dist = SynthFeature::Dist::Normal;
                else if (dist == "uniform") f.dist = SynthFeature::Dist::Uniform;
                else
                    throw ConfigError("synth spec line " + std::to_string(line_no) +
                                      ": unknown distribution " + dist);
                f.a = std::stod(tokens.at(4));
                f.b = std::stod(tokens.at(5));
            } else if (kind == "categorical") {
                f.kind = FeatureKind::Categorical;
                if (tokens.size() < 5 || (tokens.size() - 3) % 2 != 0)
                    throw ConfigError("synth spec line " + std::to_string(line_no) +
                                      ": categorical expects level/probability pairs");
                double total = 0.0;
                for (std::size_t i = 3; i + 1 < tokens.size(); i += 2) {
                    f.levels.push_back(tokens[i]);
                    double p = std::stod(tokens[i + 1]);
                    if (p < 0.0) throw ConfigError("synth spec: negative level probability");
                    f.level_probs.push_back(p);
                    total += p;
                }
                if (std::fabs(total - 1.0) > 1e-6)
                    throw ConfigError("synth spec line " + std::to_string(line_no) +
                                      ": level probabilities must sum to 1");
            } else {
                throw ConfigError("synth spec line " + std::to_string(line_no) +
                                  ": unknown kind " + kind);
            }
            spec.features.push_back(std::move(f));
        } else if (key == "missing") {
            bool found = false;
            for (auto& f : spec.features) {
                if (f.name == tokens.at(1)) {
                    f.missing_rate = std::stod(tokens.at(2));
                    found = true;
                }
            }
            if (!found)
                throw ConfigError("synth spec line " + std::to_string(line_no) +
                                  ": missing rate for undeclared feature " + tokens.at(1));
        } else if (key == "generator") {
            in_generator = true;
        } else {
            throw ConfigError("synth spec line " + std::to_string(line_no) +
                              ": unknown directive '" + key + "'");
        }
    }
    if (spec.n <= 0) throw ConfigError("synth spec: n must be positive");
    if (!seen_seed) throw ConfigError("synth spec: seed is mandatory");
    if (!(spec.noise >= 0.0 && spec.noise < 1.0))
        throw ConfigError("synth spec: noise rate must be in [0,1)");
    for (const auto& f : spec.features)
        if (!(f.missing_rate >= 0.0 && f.missing_rate < 1.0))
            throw ConfigError("synth spec: missingness rate must be in [0,1)");
    if (spec.features.empty()) throw ConfigError("synth spec: no features declared");
    if (gen_lines.empty()) throw ConfigError("synth spec: generator tree is mandatory");
    std::size_t pos = 0;
    int base = gen_lines[0].indent;
    for (auto& l : gen_lines) l.indent -= base;
    spec.generator = parse_gen_node(gen_lines, pos, 0);
    if (pos != gen_lines.size())
        throw ConfigError("synth spec: trailing lines after generator tree");
    check_generator(spec, spec.generator);
    return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read synth spec file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_synth_spec(buf.str());
}

Tree ground_truth_tree(const SynthSpec& spec) {
    Tree tree;
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const auto& sf = spec.features[f];
        tree.universe.push_back({sf.name, sf.kind, sf.levels, int(f)});
    }
    tree.root = build_truth_node(spec.generator, tree.universe);
    return tree;
}

RuleSet ground_truth_rules(const SynthSpec& spec) {
    return rules_from_tree(ground_truth_tree(spec), {0.5, ThresholdSource::Fixed});
}

Schema synth_schema(const SynthSpec& spec) {
    Schema schema;
    schema.target_name = "target";
    schema.positive_label = "1";
    for (const auto& f : spec.features) schema.features.push_back({f.name, f.kind});
    return schema;
}

Dataset synth_generate(const SynthSpec& spec) {
    check_generator(spec, spec.generator);
    Dataset ds;
    ds.n = spec.n;
    ds.target_name = "target";

    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const SynthFeature& sf = spec.features[f];
        FeatureColumn col;
        col.name = sf.name;
        col.kind = sf.kind;
        col.missing.assign(std::size_t(spec.n), 0);
        Rng rng = Rng::derive(spec.seed, 0x66656174ULL + f);  // feature stream
        if (sf.kind == FeatureKind::Numeric) {
            col.numeric.resize(std::size_t(spec.n));
            for (int i = 0; i < spec.n; ++i) {
                double v = sf.dist == SynthFeature::Dist::Normal
                               ? sf.a + sf.b * rng.normal()
                               : sf.a + (sf.b - sf.a) * rng.uniform();
                col.numeric[std::size_t(i)] = v;
            }
        } else {
            col.vocabulary = sf.levels;
            col.codes.resize(std::size_t(spec.n));
            for (int i = 0; i < spec.n; ++i) {
                double u = rng.uniform();
                double acc = 0.0;
                int code = int(sf.levels.size()) - 1;
                for (std::size_t l = 0; l < sf.level_probs.size(); ++l) {
                    acc += sf.level_probs[l];
                    if (u < acc) {
                        code = int(l);
                        break;
                    }
                }
                col.codes[std::size_t(i)] = code;
            }
        }
        ds.columns.push_back(std::move(col));
    }

    // Targets from the generating rules on the complete values.
    Tree truth = ground_truth_tree(spec);
    ds.target.resize(std::size_t(spec.n));
    for (int i = 0; i < spec.n; ++i)
        ds.target[std::size_t(i)] = predict(truth, ds, i) > 0.5 ? 1 : 0;

    if (spec.noise > 0.0) {
        Rng rng = Rng::derive(spec.seed, 0x6E6F6973ULL);  // noise stream
        for (int i = 0; i < spec.n; ++i)
            if (rng.bernoulli(spec.noise)) ds.target[std::size_t(i)] ^= 1;
    }

    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const SynthFeature& sf = spec.features[f];
        if (sf.missing_rate <= 0.0) continue;
        Rng rng = Rng::derive(spec.seed, 0x6D697373ULL + f);  // missingness stream
        for (int i = 0; i < spec.n; ++i)
            if (rng.bernoulli(sf.missing_rate)) ds.columns[f].missing[std::size_t(i)] = 1;
    }

    // Subset() canonicalizes vocabularies to observed levels; do the same for
    // a fresh cohort so unobserved declared levels do not linger.
    std::vector<int> all(static_cast<std::size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i) all[std::size_t(i)] = i;
    Dataset out = ds.subset(all);
    out.check_valid();
    return out;
}

}  // namespace l1tree
