#include "toricflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace toricflow {

namespace {

// TOML subset: tables, arrays of tables, dotted keys, strings, integers, floats,
// booleans, multi-line arrays and inline tables.
class TomlReader {
public:
    TomlReader(std::string_view text, std::string source, std::map<std::string, int>* lines)
        : text_(text), source_(std::move(source)), lines_(lines) {}

    Json parse() {
        Json root = Json::object();
        std::string prefix;
        while (true) {
            skip_blank_lines();
            if (pos_ >= text_.size()) break;
            if (peek() == '[') {
                const bool array = text_.substr(pos_, 2) == "[[";
                pos_ += array ? 2 : 1;
                std::vector<std::string> path = key_path();
                expect(array ? "]]" : "]");
                end_of_line();
                Json* node = &root;
                prefix.clear();
                for (std::size_t i = 0; i < path.size(); ++i) {
                    const bool last = i + 1 == path.size();
                    Json& child = (*node)[path[i]];
                    prefix += (prefix.empty() ? "" : ".") + path[i];
                    if (last && array) {
                        if (child.is_null()) child = Json::array();
                        if (!child.is_array()) fail("'" + prefix + "' is not an array of tables");
                        child.push_back(Json::object());
                        prefix += "[" + std::to_string(child.size() - 1) + "]";
                        node = &child.back();
                    } else {
                        if (child.is_null()) child = Json::object();
                        if (child.is_array() && !child.empty()) {
                            prefix += "[" + std::to_string(child.size() - 1) + "]";
                            node = &child.back();
                        } else if (child.is_object()) {
                            node = &child;
                        } else {
                            fail("'" + prefix + "' is not a table");
                        }
                    }
                }
                if (lines_) (*lines_)[prefix] = line_;
                current_ = node;
                prefix_ = prefix;
                continue;
            }
            Json* target = current_ ? current_ : &root;
            key_value(*target, prefix_);
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source_ + ": line " + std::to_string(line_) + ": " + what); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void advance() {
        if (peek() == '\n') ++line_;
        ++pos_;
    }

    void skip_space() {
        while (peek() == ' ' || peek() == '\t') advance();
    }

    void skip_comment() {
        if (peek() == '#')
            while (pos_ < text_.size() && peek() != '\n') advance();
    }

    void skip_blank_lines() {
        while (pos_ < text_.size()) {
            skip_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') advance();
            else break;
        }
    }

    // whitespace, comments and newlines inside arrays and inline tables
    void skip_all() {
        while (pos_ < text_.size()) {
            skip_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') advance();
            else break;
        }
    }

    void end_of_line() {
        skip_space();
        skip_comment();
        if (peek() == '\r') advance();
        if (pos_ < text_.size() && peek() != '\n') fail("unexpected '" + std::string(1, peek()) + "' after value");
        if (pos_ < text_.size()) advance();
    }

    void expect(std::string_view s) {
        skip_space();
        if (text_.substr(pos_, s.size()) != s) fail("expected '" + std::string(s) + "'");
        pos_ += s.size();
    }

    std::string key() {
        skip_space();
        if (peek() == '"') return basic_string();
        const std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') advance();
        if (start == pos_) fail("expected a key");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::vector<std::string> key_path() {
        std::vector<std::string> path{key()};
        skip_space();
        while (peek() == '.') {
            advance();
            path.push_back(key());
            skip_space();
        }
        return path;
    }

    void key_value(Json& target, const std::string& prefix) {
        const int line = line_;
        std::vector<std::string> path = key_path();
        expect("=");
        Json* node = &target;
        std::string full = prefix;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            Json& child = (*node)[path[i]];
            if (child.is_null()) child = Json::object();
            if (!child.is_object()) fail("'" + path[i] + "' is not a table");
            node = &child;
            full += (full.empty() ? "" : ".") + path[i];
        }
        full += (full.empty() ? "" : ".") + path.back();
        if (node->contains(path.back())) fail("duplicate key '" + full + "'");
        (*node)[path.back()] = value(full);
        if (lines_) (*lines_)[full] = line;
    }

    Json value(const std::string& path) {
        skip_space();
        const int line = line_;
        if (lines_) (*lines_)[path] = line;
        const char c = peek();
        if (c == '"') return basic_string();
        if (c == '\'') return literal_string();
        if (c == '[') {
            advance();
            Json arr = Json::array();
            while (true) {
                skip_all();
                if (peek() == ']') {
                    advance();
                    return arr;
                }
                arr.push_back(value(path + "[" + std::to_string(arr.size()) + "]"));
                skip_all();
                if (peek() == ',') advance();
                else if (peek() != ']') fail("expected ',' or ']' in array");
            }
        }
        if (c == '{') {
            advance();
            Json obj = Json::object();
            skip_space();
            if (peek() == '}') {
                advance();
                return obj;
            }
            while (true) {
                key_value(obj, path);
                skip_space();
                if (peek() == ',') advance();
                else if (peek() == '}') {
                    advance();
                    return obj;
                } else fail("expected ',' or '}' in inline table");
            }
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::string_view(" \t\r\n,]}#").find(peek()) == std::string_view::npos) advance();
        std::string word(text_.substr(start, pos_ - start));
        if (word == "true") return true;
        if (word == "false") return false;
        std::string digits;
        for (char d : word)
            if (d != '_') digits += d;
        if (digits.empty()) fail("expected a value");
        const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
        try {
            std::size_t used = 0;
            if (is_float) {
                const double v = std::stod(digits, &used);
                if (used == digits.size()) return v;
            } else {
                const long long v = std::stoll(digits, &used, 10);
                if (used == digits.size()) return v;
            }
        } catch (const std::exception&) {
        }
        fail("malformed value '" + word + "'");
    }

    std::string basic_string() {
        advance();
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
            char c = peek();
            advance();
            if (c == '"') return out;
            if (c == '\\') {
                const char e = peek();
                advance();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
    }

    std::string literal_string() {
        advance();
        const std::size_t start = pos_;
        while (peek() != '\'') {
            if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
            advance();
        }
        std::string out(text_.substr(start, pos_ - start));
        advance();
        return out;
    }

    std::string_view text_;
    std::string source_;
    std::map<std::string, int>* lines_;
    std::size_t pos_ = 0;
    int line_ = 1;
    Json* current_ = nullptr;
    std::string prefix_;
};

class Validator {
public:
    Validator(std::string source, const std::map<std::string, int>* lines) : source_(std::move(source)), lines_(lines) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        std::string where = path.empty() ? "" : path + ": ";
        if (lines_) {
            std::string p = path;
            while (!p.empty()) {
                auto it = lines_->find(p);
                if (it != lines_->end()) {
                    where = "line " + std::to_string(it->second) + ": " + where;
                    break;
                }
                const auto cut = p.find_last_of(".[");
                p = cut == std::string::npos ? "" : p.substr(0, cut);
            }
        }
        throw ConfigError(source_ + ": " + where + what);
    }

    const Json& field(const Json& obj, const std::string& path, const std::string& key) const {
        if (!obj.contains(key)) fail(path, "missing field '" + key + "'");
        return obj.at(key);
    }

    void allowed(const Json& obj, const std::string& path, const std::set<std::string>& keys) const {
        for (const auto& [k, v] : obj.items())
            if (!keys.count(k)) fail(join(path, k), "unknown field");
    }

    static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
    static std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

    long integer(const Json& v, const std::string& path) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        return v.get<long>();
    }

    Rational rational(const Json& v, const std::string& path) const {
        if (v.is_number_integer()) return Rational(v.get<long>());
        if (v.is_number_float()) fail(path, "floating-point value in an exact field; write it as a string such as \"3/10\"");
        if (!v.is_string()) fail(path, "expected a rational string \"p/q\"");
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ParseError& e) {
            fail(path, e.what());
        }
    }

    double real(const Json& v, const std::string& path) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return to_double(rational(v, path));
        fail(path, "expected a number");
    }

    const Json& array(const Json& v, const std::string& path) const {
        if (!v.is_array()) fail(path, "expected an array");
        return v;
    }

    ProblemConfig build(const Json& root) const {
        if (!root.is_object()) fail("", "expected a table at the top level");
        allowed(root, "", {"m", "facets", "removed_faces", "zeta", "c", "potential", "options"});
        ProblemConfig cfg;
        cfg.source = source_;
        const long m = integer(field(root, "", "m"), "m");
        if (m < 1 || m > 20) fail("m", "dimension must be between 1 and 20");
        cfg.m = m;

        const Json& facets = array(field(root, "", "facets"), "facets");
        if (facets.empty()) fail("facets", "at least one facet is required");
        for (std::size_t i = 0; i < facets.size(); ++i) {
            const std::string p = at("facets", i);
            if (!facets[i].is_object()) fail(p, "expected a table with 'lambda' and 'kappa'");
            allowed(facets[i], p, {"lambda", "kappa"});
            const Json& lam = array(field(facets[i], p, "lambda"), join(p, "lambda"));
            if (static_cast<long>(lam.size()) != m) fail(join(p, "lambda"), "expected " + std::to_string(m) + " entries");
            IntVector normal(m);
            for (std::size_t k = 0; k < lam.size(); ++k) normal(static_cast<Eigen::Index>(k)) = integer(lam[k], at(join(p, "lambda"), k));
            if (normal.isZero()) fail(join(p, "lambda"), "normal vector is zero");
            cfg.facets.push_back({normal, rational(field(facets[i], p, "kappa"), join(p, "kappa"))});
        }

        if (root.contains("removed_faces")) {
            const Json& rem = array(root.at("removed_faces"), "removed_faces");
            for (std::size_t i = 0; i < rem.size(); ++i) {
                const Json& face = array(rem[i], at("removed_faces", i));
                std::set<std::size_t> s;
                for (std::size_t k = 0; k < face.size(); ++k) {
                    const long idx = integer(face[k], at(at("removed_faces", i), k));
                    if (idx < 1 || idx > static_cast<long>(cfg.facets.size()))
                        fail(at(at("removed_faces", i), k), "facet index out of range 1.." + std::to_string(cfg.facets.size()));
                    s.insert(static_cast<std::size_t>(idx - 1));
                }
                cfg.removed_faces.emplace_back(s.begin(), s.end());
            }
        }

        const Json empty = Json::array();
        const Json& zeta = root.contains("zeta") ? array(root.at("zeta"), "zeta") : empty;
        cfg.zeta = RatMatrix(static_cast<Eigen::Index>(zeta.size()), m);
        for (std::size_t r = 0; r < zeta.size(); ++r) {
            const Json& row = array(zeta[r], at("zeta", r));
            if (static_cast<long>(row.size()) != m) fail(at("zeta", r), "expected " + std::to_string(m) + " entries");
            for (std::size_t k = 0; k < row.size(); ++k)
                cfg.zeta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rational(row[k], at(at("zeta", r), k));
        }
        const Json& c = root.contains("c") ? array(root.at("c"), "c") : empty;
        if (c.size() != zeta.size()) fail("c", "expected one level per zeta row (" + std::to_string(zeta.size()) + ")");
        cfg.c = RatVector(static_cast<Eigen::Index>(c.size()));
        for (std::size_t r = 0; r < c.size(); ++r) cfg.c(static_cast<Eigen::Index>(r)) = rational(c[r], at("c", r));

        if (root.contains("potential")) {
            if (!root.at("potential").is_string()) fail("potential", "expected a string");
            cfg.potential = root.at("potential").get<std::string>();
            try {
                make_potential(cfg.potential, m);
            } catch (const ParseError& e) {
                fail("potential", e.what());
            }
        }

        if (root.contains("options")) {
            const Json& o = root.at("options");
            if (!o.is_object()) fail("options", "expected a table");
            allowed(o, "options", {"seed", "samples", "tol", "tau", "box", "negative_control"});
            if (o.contains("seed")) {
                const long s = integer(o.at("seed"), "options.seed");
                if (s < 0) fail("options.seed", "must be non-negative");
                cfg.options.seed = static_cast<std::uint64_t>(s);
            }
            if (o.contains("samples")) {
                const long s = integer(o.at("samples"), "options.samples");
                if (s < 1) fail("options.samples", "must be positive");
                cfg.options.samples = static_cast<int>(s);
            }
            if (o.contains("tol")) {
                const double t = real(o.at("tol"), "options.tol");
                if (!(t > 0)) fail("options.tol", "must be positive");
                cfg.options.tol = t;
            }
            if (o.contains("tau")) cfg.options.tau = rational(o.at("tau"), "options.tau");
            if (o.contains("box")) {
                const Json& b = array(o.at("box"), "options.box");
                if (b.size() != 2) fail("options.box", "expected [lo, hi]");
                cfg.options.box_lo = real(b[0], "options.box[0]");
                cfg.options.box_hi = real(b[1], "options.box[1]");
                if (!(*cfg.options.box_lo < *cfg.options.box_hi)) fail("options.box", "lo must be below hi");
            }
            if (o.contains("negative_control")) {
                if (!o.at("negative_control").is_boolean()) fail("options.negative_control", "expected a boolean");
                cfg.options.negative_control = o.at("negative_control").get<bool>();
            }
        }
        return cfg;
    }

private:
    std::string source_;
    const std::map<std::string, int>* lines_;
};

}  // namespace

Polytope ProblemConfig::polytope() const { return Polytope(facets, removed_faces); }

Json parse_toml(std::string_view text, const std::string& source, std::map<std::string, int>* lines) {
    return TomlReader(text, source, lines).parse();
}

ProblemConfig parse_config(std::string_view text, ConfigFormat format, const std::string& source) {
    if (format == ConfigFormat::Toml) {
        std::map<std::string, int> lines;
        const Json root = parse_toml(text, source, &lines);
        return Validator(source, &lines).build(root);
    }
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset to line
        const std::size_t at = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at ? at - 1 : 0), '\n');
        throw ConfigError(source + ": line " + std::to_string(line) + ": malformed JSON");
    }
    return Validator(source, nullptr).build(root);
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".json") return parse_config(buf.str(), ConfigFormat::Json, path);
    if (ext == ".toml") return parse_config(buf.str(), ConfigFormat::Toml, path);
    throw ConfigError(path + ": unknown config format (expected .json or .toml)");
}

}  // namespace toricflow
