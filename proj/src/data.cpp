#include "l1tree/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace l1tree {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

// Splits one CSV record. Supports quoted fields with embedded commas and
// doubled quotes. `pos` is advanced past the record's trailing newline.
std::vector<std::string> split_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (;;) {
        if (pos >= text.size()) {
            cells.push_back(cell);
            return cells;
        }
        char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    cell += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c == '\n') {
            cells.push_back(cell);
            return cells;
        } else if (c == '\r') {
            // swallow; newline handled next
        } else {
            cell += c;
        }
    }
}

bool needs_quoting(const std::string& s) {
    if (s.empty()) return false;
    if (s.front() == ' ' || s.back() == ' ') return true;
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// Schema tokens: whitespace separated, double quotes group words.
std::vector<std::string> tokenize(const std::string& line) {
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

}  // namespace

bool FeatureColumn::has_missing() const {
    return std::any_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; });
}

int Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return int(i);
    return -1;
}

const FeatureColumn& Dataset::column(const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0) throw DataError("unknown feature: " + name);
    return columns[std::size_t(idx)];
}

int Dataset::positives() const {
    int p = 0;
    for (int y : target) p += y;
    return p;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.target_name = target_name;
    out.n = int(rows.size());
    out.target.reserve(rows.size());
    for (int r : rows) out.target.push_back(target[std::size_t(r)]);
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        FeatureColumn c;
        c.name = col.name;
        c.kind = col.kind;
        c.missing.reserve(rows.size());
        for (int r : rows) c.missing.push_back(col.missing[std::size_t(r)]);
        if (col.kind == FeatureKind::Numeric) {
            c.numeric.reserve(rows.size());
            for (int r : rows) c.numeric.push_back(col.numeric[std::size_t(r)]);
        } else {
            // Vocabulary restricted to observed levels, original order kept.
            std::vector<int> code_map(col.vocabulary.size(), -1);
            std::vector<std::uint8_t> seen(col.vocabulary.size(), 0);
            for (int r : rows)
                if (!col.is_missing(r)) seen[std::size_t(col.codes[std::size_t(r)])] = 1;
            for (std::size_t v = 0; v < col.vocabulary.size(); ++v) {
                if (seen[v]) {
                    code_map[v] = int(c.vocabulary.size());
                    c.vocabulary.push_back(col.vocabulary[v]);
                }
            }
            c.codes.reserve(rows.size());
            for (int r : rows) {
                int code = col.is_missing(r) ? 0 : code_map[std::size_t(col.codes[std::size_t(r)])];
                c.codes.push_back(std::max(code, 0));
            }
        }
        out.columns.push_back(std::move(c));
    }
    return out;
}

Dataset Dataset::without_row(int row) const {
    std::vector<int> rows;
    rows.reserve(std::size_t(n) - 1);
    for (int i = 0; i < n; ++i)
        if (i != row) rows.push_back(i);
    return subset(rows);
}

std::string Dataset::canonical_csv() const {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out += ',';
        out += csv_quote(columns[j].name);
    }
    if (!columns.empty()) out += ',';
    out += csv_quote(target_name);
    out += '\n';
    for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto& col = columns[j];
            if (j) out += ',';
            if (col.is_missing(i)) continue;
            if (col.kind == FeatureKind::Numeric)
                out += format_double(col.numeric[std::size_t(i)]);
            else
                out += csv_quote(col.level(i));
        }
        if (!columns.empty()) out += ',';
        out += target[std::size_t(i)] ? '1' : '0';
        out += '\n';
    }
    return out;
}

void Dataset::check_valid() const {
    if (int(target.size()) != n) throw DataError("target length mismatch");
    for (const auto& col : columns) {
        if (col.n() != n) throw DataError("column " + col.name + " length mismatch");
        if (col.kind == FeatureKind::Numeric) {
            if (int(col.numeric.size()) != n) throw DataError("column " + col.name + " length mismatch");
        } else {
            if (int(col.codes.size()) != n) throw DataError("column " + col.name + " length mismatch");
            for (int i = 0; i < n; ++i)
                if (!col.is_missing(i) &&
                    (col.codes[std::size_t(i)] < 0 ||
                     col.codes[std::size_t(i)] >= int(col.vocabulary.size())))
                    throw DataError("column " + col.name + " has out-of-vocabulary code");
        }
    }
    int pos = positives();
    if (pos == 0 || pos == n) throw DataError("target has a single class");
}

Schema Schema::parse(const std::string& text) {
    Schema schema;
    bool missing_reset = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        const std::string& key = tokens[0];
        auto want = [&](std::size_t k) {
            if (tokens.size() != k)
                throw ConfigError("schema line " + std::to_string(line_no) + ": '" + key +
                                  "' expects " + std::to_string(k - 1) + " argument(s)");
        };
        if (key == "feature") {
            want(3);
            FeatureKind kind;
            if (tokens[2] == "numeric") kind = FeatureKind::Numeric;
            else if (tokens[2] == "categorical") kind = FeatureKind::Categorical;
            else
                throw ConfigError("schema line " + std::to_string(line_no) +
                                  ": unknown kind '" + tokens[2] + "'");
            schema.features.push_back({tokens[1], kind});
        } else if (key == "target") {
            want(2);
            schema.target_name = tokens[1];
        } else if (key == "positive") {
            want(2);
            schema.positive_label = tokens[1];
        } else if (key == "missing") {
            want(2);
            if (!missing_reset) {
                schema.missing_tokens = {""};
                missing_reset = true;
            }
            schema.missing_tokens.push_back(tokens[1]);
        } else if (key == "max_levels") {
            want(2);
            schema.max_levels = std::stoi(tokens[1]);
        } else {
            throw ConfigError("schema line " + std::to_string(line_no) + ": unknown directive '" +
                              key + "'");
        }
    }
    if (schema.target_name.empty()) throw ConfigError("schema: missing 'target' declaration");
    if (schema.positive_label.empty()) throw ConfigError("schema: missing 'positive' declaration");
    if (schema.features.empty()) throw ConfigError("schema: no features declared");
    return schema;
}

Schema Schema::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read schema file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Schema::to_text() const {
    auto quote = [](const std::string& s) {
        return s.find_first_of(" \t") != std::string::npos || s.empty() ? "\"" + s + "\"" : s;
    };
    std::string out;
    out += "target " + quote(target_name) + "\n";
    out += "positive " + quote(positive_label) + "\n";
    for (const auto& f : features)
        out += "feature " + quote(f.name) +
               (f.kind == FeatureKind::Numeric ? " numeric\n" : " categorical\n");
    return out;
}

Dataset parse_csv(const std::string& content, const Schema& schema) {
    std::size_t pos = 0;
    if (content.empty()) throw DataError("empty CSV input");
    std::vector<std::string> header = split_record(content, pos);
    std::unordered_map<std::string, int> col_of;
    for (std::size_t j = 0; j < header.size(); ++j) col_of.emplace(trim(header[j]), int(j));

    auto require_column = [&](const std::string& name) {
        auto it = col_of.find(name);
        if (it == col_of.end()) throw DataError("column not in CSV header: " + name);
        return it->second;
    };
    std::vector<int> feature_idx;
    for (const auto& f : schema.features) feature_idx.push_back(require_column(f.name));
    int target_idx = require_column(schema.target_name);

    auto is_missing_token = [&](const std::string& cell) {
        return std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), cell) !=
               schema.missing_tokens.end();
    };

    Dataset ds;
    ds.target_name = schema.target_name;
    ds.columns.resize(schema.features.size());
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
        ds.columns[f].name = schema.features[f].name;
        ds.columns[f].kind = schema.features[f].kind;
    }

    std::vector<std::string> raw_targets;
    int row_no = 1;
    while (pos < content.size()) {
        ++row_no;
        std::vector<std::string> cells = split_record(content, pos);
        if (cells.size() == 1 && trim(cells[0]).empty()) continue;  // blank line
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(row_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        for (std::size_t f = 0; f < schema.features.size(); ++f) {
            FeatureColumn& col = ds.columns[f];
            std::string cell = trim(cells[std::size_t(feature_idx[f])]);
            bool miss = is_missing_token(cell);
            col.missing.push_back(miss ? 1 : 0);
            if (col.kind == FeatureKind::Numeric) {
                double v = 0.0;
                if (!miss && !parse_number(cell, v))
                    throw DataError("row " + std::to_string(row_no) + ", column " + col.name +
                                    ": not a number: '" + cell + "'");
                col.numeric.push_back(v);
            } else {
                int code = 0;
                if (!miss) {
                    auto it = std::find(col.vocabulary.begin(), col.vocabulary.end(), cell);
                    if (it == col.vocabulary.end()) {
                        if (int(col.vocabulary.size()) >= schema.max_levels)
                            throw DataError("column " + col.name + ": more than " +
                                            std::to_string(schema.max_levels) +
                                            " categorical levels");
                        code = int(col.vocabulary.size());
                        col.vocabulary.push_back(cell);
                    } else {
                        code = int(it - col.vocabulary.begin());
                    }
                }
                col.codes.push_back(code);
            }
        }
        std::string t = trim(cells[std::size_t(target_idx)]);
        if (is_missing_token(t))
            throw DataError("row " + std::to_string(row_no) + ": missing target value");
        raw_targets.push_back(t);
        ds.n += 1;
    }
    if (ds.n == 0) throw DataError("CSV has no data rows");

    std::vector<std::string> distinct;
    for (const auto& t : raw_targets)
        if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);
    if (distinct.size() != 2)
        throw DataError("non-binary target: " + std::to_string(distinct.size()) +
                        " distinct value(s) in column " + schema.target_name);
    if (std::find(distinct.begin(), distinct.end(), schema.positive_label) == distinct.end())
        throw DataError("positive label '" + schema.positive_label + "' absent from target column");
    for (const auto& t : raw_targets) ds.target.push_back(t == schema.positive_label ? 1 : 0);

    ds.check_valid();
    return ds;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read CSV file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema);
}

std::vector<std::string> complete_features(const Dataset& ds) {
    std::vector<std::string> out;
    for (const auto& col : ds.columns)
        if (!col.has_missing()) out.push_back(col.name);
    return out;
}

int default_fold_count(int n) {
    if (n < 20) throw DataError("cohort too small for protocol: n=" + std::to_string(n) + " < 20");
    return n / 10;
}

FoldAssignment stratified_folds(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2");
    int pos = ds.positives();
    int minority = std::min(pos, ds.n - pos);
    if (k > minority)
        throw DataError("fold count " + std::to_string(k) + " exceeds minority class size " +
                        std::to_string(minority));
    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.fold_of_row.assign(std::size_t(ds.n), -1);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<int> rows;
        for (int i = 0; i < ds.n; ++i)
            if (ds.target[std::size_t(i)] == cls) rows.push_back(i);
        Rng rng = Rng::derive(seed, 0x464F4C44u + std::uint64_t(cls));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            fa.fold_of_row[std::size_t(rows[i])] = int(i % std::size_t(k));
    }
    return fa;
}

DesignMatrix build_design(const Dataset& ds, const std::vector<std::string>& features,
                          bool standardize) {
    DesignMatrix dm;
    dm.n = ds.n;
    dm.standardized = standardize;

    std::vector<DesignColumn> map;
    std::vector<std::vector<double>> cols;
    for (const auto& name : features) {
        int ci = ds.column_index(name);
        if (ci < 0) throw DataError("build_design: unknown feature " + name);
        const FeatureColumn& col = ds.columns[std::size_t(ci)];
        if (col.has_missing())
            throw DataError("build_design: feature " + name + " has missing values");
        if (col.kind == FeatureKind::Numeric) {
            map.push_back({name, ci, std::nullopt});
            cols.push_back(col.numeric);
        } else {
            for (std::size_t v = 0; v < col.vocabulary.size(); ++v) {
                map.push_back({name, ci, col.vocabulary[v]});
                std::vector<double> onehot(std::size_t(ds.n), 0.0);
                for (int i = 0; i < ds.n; ++i)
                    if (col.codes[std::size_t(i)] == int(v)) onehot[std::size_t(i)] = 1.0;
                cols.push_back(std::move(onehot));
            }
        }
    }

    for (std::size_t j = 0; j < cols.size(); ++j) {
        double mean = 0.0;
        for (double v : cols[j]) mean += v;
        mean /= double(ds.n);
        double var = 0.0;
        for (double v : cols[j]) var += (v - mean) * (v - mean);
        var /= double(ds.n);
        double sd = std::sqrt(var);
        if (sd < 1e-12) {
            dm.dropped.push_back(map[j].label());
            continue;
        }
        dm.column_map.push_back(map[j]);
        if (standardize) {
            dm.means.push_back(mean);
            dm.sds.push_back(sd);
            for (double v : cols[j]) dm.values.push_back((v - mean) / sd);
        } else {
            dm.means.push_back(0.0);
            dm.sds.push_back(1.0);
            for (double v : cols[j]) dm.values.push_back(v);
        }
    }
    dm.q = int(dm.column_map.size());
    return dm;
}

}  // namespace l1tree
