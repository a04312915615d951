#include "direx/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "direx/directions.hpp"
#include "direx/errors.hpp"

namespace direx {

namespace {

struct CsvRow {
    std::vector<std::string> cells;
    int line;  // 1-based line where the row starts
};

// Splits one physical line into cells.  Quotes may wrap any field; inside a
// quoted field a doubled quote stands for a literal one.  Embedded newlines
// are not supported (the sample format never produces them).
std::vector<std::string> split_line(const std::string& line, int lineno) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                cell.push_back(c);
                ++i;
            }
        } else if (c == '"') {
            if (!cell.empty()) {
                throw ParseError("stray quote in unquoted field at line " +
                                 std::to_string(lineno) + ", column " +
                                 std::to_string(cells.size() + 1));
            }
            quoted = true;
            ++i;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
            ++i;
        } else {
            cell.push_back(c);
            ++i;
        }
    }
    if (quoted) {
        throw ParseError("unterminated quote at line " + std::to_string(lineno));
    }
    cells.push_back(std::move(cell));
    return cells;
}

double parse_cell(const std::string& cell, int lineno, size_t col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    // strtod skips leading whitespace itself; insist the whole cell was
    // consumed so "1.5x" or an empty cell fails.
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) {
        ++end;
    }
    if (end == begin || (end && *end != '\0')) {
        throw ParseError("cannot parse '" + cell + "' as a number at line " +
                         std::to_string(lineno) + ", column " + std::to_string(col));
    }
    if (!std::isfinite(v)) {
        throw NonFiniteValueError("non-finite value at line " + std::to_string(lineno) +
                                  ", column " + std::to_string(col));
    }
    return v;
}

std::string quote_if_needed(const std::string& field) {
    bool needs = field.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Sample load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::string line;
    int lineno = 0;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && header.empty()) continue;  // leading blank lines
        if (line.empty()) continue;                    // trailing blank lines
        auto cells = split_line(line, lineno);
        if (header.empty()) {
            header = std::move(cells);
            if (header.empty()) {
                throw ParseError("empty header at line " + std::to_string(lineno));
            }
            continue;
        }
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) +
                             " fields but found " + std::to_string(cells.size()) +
                             " at line " + std::to_string(lineno));
        }
        std::vector<double> row(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) {
            row[j] = parse_cell(cells[j], lineno, j + 1);
        }
        rows.push_back(std::move(row));
    }
    if (header.empty()) {
        throw ParseError("'" + path + "' has no header row");
    }
    if (rows.empty()) {
        throw ParseError("'" + path + "' has no data rows");
    }
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(header.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < header.size(); ++j) {
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return Sample(std::move(data), header);
}

void write_csv(const std::string& path, const Sample& s) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    const auto& names = s.column_names();
    for (int j = 0; j < s.dim(); ++j) {
        if (j) out << ',';
        out << quote_if_needed(names[static_cast<size_t>(j)]);
    }
    out << '\n';
    for (int i = 0; i < s.size(); ++i) {
        for (int j = 0; j < s.dim(); ++j) {
            if (j) out << ',';
            out << format_double(s(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigInvalidError(ctx + " needs a numeric '" + key + "'");
    }
    return j[key].get<double>();
}

json marginal_to_json(const MarginalParams& m) {
    json out;
    if (const auto* gev = std::get_if<GevParams>(&m)) {
        out["type"] = "gev";
        out["location"] = gev->location;
        out["scale"] = gev->scale;
        out["shape"] = gev->shape;
    } else if (const auto* g = std::get_if<GaussianParams>(&m)) {
        out["type"] = "gaussian";
        out["mean"] = g->mean;
        out["variance"] = g->variance;
    } else {
        out["type"] = "uniform";
    }
    return out;
}

MarginalParams marginal_from_json(const json& j, size_t index) {
    std::string ctx = "marginal " + std::to_string(index + 1);
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ConfigInvalidError(ctx + " needs a string 'type'");
    }
    std::string type = j["type"].get<std::string>();
    if (type == "gev") {
        GevParams p{require_number(j, "location", ctx), require_number(j, "scale", ctx),
                    require_number(j, "shape", ctx)};
        return p;
    }
    if (type == "gaussian") {
        GaussianParams p{require_number(j, "mean", ctx), require_number(j, "variance", ctx)};
        return p;
    }
    if (type == "uniform") {
        return UniformUnitParams{};
    }
    throw ConfigInvalidError(ctx + " has unknown type '" + type + "'");
}

json copula_to_json(const CopulaModel& c) {
    json out;
    out["family"] = to_string(c.family());
    switch (c.family()) {
        case CopulaFamily::Independence: break;
        case CopulaFamily::Gaussian: out["rho"] = c.parameter(); break;
        case CopulaFamily::Frank:
        case CopulaFamily::Gumbel: out["theta"] = c.parameter(); break;
    }
    out["orientation"] = to_string(c.orientation());
    return out;
}

CopulaOrientation orientation_from_string(const std::string& s) {
    if (s == "plain") return CopulaOrientation::Plain;
    if (s == "survival") return CopulaOrientation::Survival;
    if (s == "rot90") return CopulaOrientation::Rot90;
    if (s == "rot270") return CopulaOrientation::Rot270;
    throw ConfigInvalidError("unknown copula orientation '" + s + "'");
}

CopulaModel copula_from_json(const json& j) {
    if (!j.contains("family") || !j["family"].is_string()) {
        throw ConfigInvalidError("copula needs a string 'family'");
    }
    std::string family = j["family"].get<std::string>();
    CopulaOrientation orient = CopulaOrientation::Plain;
    if (j.contains("orientation")) {
        if (!j["orientation"].is_string()) {
            throw ConfigInvalidError("copula 'orientation' must be a string");
        }
        orient = orientation_from_string(j["orientation"].get<std::string>());
    }
    if (family == "independence") return CopulaModel::independence(orient);
    if (family == "gaussian") return CopulaModel::gaussian(require_number(j, "rho", "gaussian copula"), orient);
    if (family == "frank") return CopulaModel::frank(require_number(j, "theta", "frank copula"), orient);
    if (family == "gumbel") return CopulaModel::gumbel(require_number(j, "theta", "gumbel copula"), orient);
    throw ConfigInvalidError("unknown copula family '" + family + "'");
}

json tree_to_json(const CopulaTree& t) {
    json out;
    if (t.is_pair()) {
        out["type"] = "pair";
        json c = copula_to_json(t.pair_copula());
        out.update(c);
        out["coordinates"] = json::array({t.pair_first() + 1, t.pair_second() + 1});
    } else {
        out["type"] = "product";
        out["coordinate"] = t.product_coord() + 1;
        out["sub"] = tree_to_json(t.product_sub());
    }
    return out;
}

CopulaTree tree_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ConfigInvalidError("copula tree node needs a string 'type'");
    }
    std::string type = j["type"].get<std::string>();
    if (type == "pair") {
        if (!j.contains("coordinates") || !j["coordinates"].is_array() ||
            j["coordinates"].size() != 2) {
            throw ConfigInvalidError("pair node needs 'coordinates' with two entries");
        }
        for (const auto& c : j["coordinates"]) {
            if (!c.is_number_integer() || c.get<int>() < 1) {
                throw ConfigInvalidError("pair coordinates must be positive integers");
            }
        }
        int a = j["coordinates"][0].get<int>() - 1;
        int b = j["coordinates"][1].get<int>() - 1;
        return CopulaTree::pair(copula_from_json(j), a, b);
    }
    if (type == "product") {
        if (!j.contains("coordinate") || !j["coordinate"].is_number_integer() ||
            j["coordinate"].get<int>() < 1) {
            throw ConfigInvalidError("product node needs a positive integer 'coordinate'");
        }
        if (!j.contains("sub")) {
            throw ConfigInvalidError("product node needs a 'sub' tree");
        }
        int coord = j["coordinate"].get<int>() - 1;
        return CopulaTree::product(coord, tree_from_json(j["sub"]));
    }
    throw ConfigInvalidError("unknown copula tree node type '" + type + "'");
}

}  // namespace

nlohmann::json joint_model_to_json(const JointModel& model) {
    json out;
    json margins = json::array();
    for (const auto& m : model.marginals()) {
        margins.push_back(marginal_to_json(m));
    }
    out["marginals"] = std::move(margins);
    out["copula"] = tree_to_json(model.tree());
    out["names"] = model.names();
    return out;
}

JointModel joint_model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigInvalidError("model section must be a JSON object");
    }
    if (!j.contains("marginals") || !j["marginals"].is_array()) {
        throw ConfigInvalidError("model needs a 'marginals' array");
    }
    std::vector<MarginalParams> margins;
    for (size_t i = 0; i < j["marginals"].size(); ++i) {
        margins.push_back(marginal_from_json(j["marginals"][i], i));
    }
    if (!j.contains("copula")) {
        throw ConfigInvalidError("model needs a 'copula' tree");
    }
    CopulaTree tree = tree_from_json(j["copula"]);
    std::vector<std::string> names;
    if (j.contains("names")) {
        if (!j["names"].is_array()) {
            throw ConfigInvalidError("model 'names' must be an array of strings");
        }
        for (const auto& n : j["names"]) {
            if (!n.is_string()) {
                throw ConfigInvalidError("model 'names' must be an array of strings");
            }
            names.push_back(n.get<std::string>());
        }
    }
    return JointModel(std::move(margins), std::move(tree), std::move(names));
}

nlohmann::json dam_spec_to_json(const DamSpec& dam) {
    json out;
    out["spillway_level"] = dam.spillway_level;
    out["max_regulation_level"] = dam.max_regulation_level;
    out["crest_level"] = dam.crest_level;
    json curve = json::array();
    for (const auto& p : dam.storage.points) {
        curve.push_back(json::array({p[0], p[1]}));
    }
    out["storage_curve"] = std::move(curve);
    out["spillway_rating"] = {{"coefficient", dam.rating.coefficient},
                              {"width", dam.rating.width}};
    return out;
}

DamSpec dam_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigInvalidError("dam section must be a JSON object");
    }
    DamSpec dam = default_dam_spec();
    dam.spillway_level = require_number(j, "spillway_level", "dam");
    dam.max_regulation_level = require_number(j, "max_regulation_level", "dam");
    dam.crest_level = require_number(j, "crest_level", "dam");
    if (!j.contains("storage_curve") || !j["storage_curve"].is_array()) {
        throw ConfigInvalidError("dam needs a 'storage_curve' array");
    }
    dam.storage.points.clear();
    for (const auto& p : j["storage_curve"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ConfigInvalidError("storage_curve entries must be [level, volume] pairs");
        }
        dam.storage.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (!j.contains("spillway_rating") || !j["spillway_rating"].is_object()) {
        throw ConfigInvalidError("dam needs a 'spillway_rating' object");
    }
    dam.rating.coefficient = require_number(j["spillway_rating"], "coefficient", "spillway_rating");
    dam.rating.width = require_number(j["spillway_rating"], "width", "spillway_rating");
    dam.validate();
    return dam;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigInvalidError("config root must be a JSON object");
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1) {
        throw ConfigInvalidError("config needs \"schema_version\": 1");
    }
    RunConfig cfg;
    if (doc.contains("model")) {
        cfg.model = joint_model_from_json(doc["model"]);
    }
    if (doc.contains("dam")) {
        cfg.dam = dam_spec_from_json(doc["dam"]);
    }
    return cfg;
}

DirectionVector resolve_direction(const std::string& spec, const Sample& s,
                                  bool pca_on_correlation) {
    int n = s.dim();
    if (spec == "e") {
        return canonical_diagonal(n);
    }
    if (spec == "-e") {
        return DirectionVector(-canonical_diagonal(n).components());
    }
    if (spec == "pca") {
        return first_pca_direction(s, pca_on_correlation);
    }
    bool sign_pattern = !spec.empty();
    for (char c : spec) {
        if (c != '+' && c != '-') {
            sign_pattern = false;
            break;
        }
    }
    if (sign_pattern) {
        if (static_cast<int>(spec.size()) != n) {
            throw ConfigInvalidError("sign pattern '" + spec + "' has " +
                                     std::to_string(spec.size()) + " characters but the data has " +
                                     std::to_string(n) + " columns");
        }
        Eigen::VectorXd u = canonical_diagonal(n).components();
        for (int i = 0; i < n; ++i) {
            if (spec[static_cast<size_t>(i)] == '-') u(i) = -u(i);
        }
        return DirectionVector(u);
    }
    // Fall back to an explicit comma-separated vector.
    std::vector<double> comps;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const char* begin = tok.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
        if (end == begin || (end && *end != '\0')) {
            throw ConfigInvalidError("cannot parse direction component '" + tok + "'");
        }
        comps.push_back(v);
    }
    if (static_cast<int>(comps.size()) != n) {
        throw ConfigInvalidError("direction has " + std::to_string(comps.size()) +
                                 " components but the data has " + std::to_string(n) +
                                 " columns");
    }
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = comps[static_cast<size_t>(i)];
    return DirectionVector::normalized(u);
}

}  // namespace direx
