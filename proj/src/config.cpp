#include "dualflow/config.hpp"

#include "dualflow/errors.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace dualflow {

namespace {

using Value = std::variant<std::string, double, std::vector<double>>;

struct Entry {
    Value value;
    bool quoted = false;
    std::string raw;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    std::map<std::string, Entry> parse() {
        std::map<std::string, Entry> out;
        while (true) {
            skip_space();
            if (pos_ >= s_.size()) break;
            const std::string key = read_key();
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '=' after key '" + key + "'");
            ++pos_;
            skip_space();
            Entry e = read_value(key);
            if (out.count(key)) fail("duplicate key '" + key + "'");
            out.emplace(key, std::move(e));
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("config: " + what + " (at offset " + std::to_string(pos_) + ")");
    }

    void skip_space() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string read_key() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    double number(std::string_view tok, const std::string& key) const {
        double x = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw ParseError("config: key '" + key + "' has malformed number '" + std::string(tok) + "'");
        return x;
    }

    Entry read_value(const std::string& key) {
        Entry e;
        if (pos_ >= s_.size()) fail("missing value for key '" + key + "'");
        if (s_[pos_] == '"') {
            const std::size_t end = s_.find('"', pos_ + 1);
            if (end == std::string_view::npos) fail("unterminated string for key '" + key + "'");
            e.value = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
            e.quoted = true;
            pos_ = end + 1;
            return e;
        }
        if (s_[pos_] == '[') {
            const std::size_t end = s_.find(']', pos_);
            if (end == std::string_view::npos) fail("unterminated array for key '" + key + "'");
            std::vector<double> xs;
            std::string body(s_.substr(pos_ + 1, end - pos_ - 1));
            for (char& c : body)
                if (c == ',') c = ' ';
            std::istringstream is(body);
            std::string tok;
            while (is >> tok) xs.push_back(number(tok, key));
            e.value = std::move(xs);
            pos_ = end + 1;
            return e;
        }
        const std::size_t start = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '#') ++pos_;
        e.raw = std::string(s_.substr(start, pos_ - start));
        e.value = number(e.raw, key);
        return e;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{"F",     "n",    "m",   "initial", "initial.params", "cfl",  "u_stop",
                                            "mode",  "record_every", "sigma", "out", "seed", "dt_min"};
    return keys;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Primal: return "primal";
        case RunMode::Dual: return "dual";
        case RunMode::Both: return "both";
        case RunMode::Verify: return "verify";
    }
    return "?";
}

bool operator==(const RunManifest& a, const RunManifest& b) {
    const auto& x = a.config;
    const auto& y = b.config;
    return x.F.family == y.F.family && x.F.n == y.F.n && x.m == y.m && x.cfl == y.cfl && x.u_stop == y.u_stop &&
           x.dt_min == y.dt_min && x.record_every == y.record_every && x.initial.name == y.initial.name &&
           x.initial.params == y.initial.params && x.initial.seed == y.initial.seed && a.mode == b.mode &&
           a.sigma == b.sigma && a.out == b.out && a.seed == b.seed;
}

RunManifest parse_config(std::string_view text) {
    auto entries = Lexer(text).parse();
    for (const auto& [k, e] : entries)
        if (!known_keys().count(k)) throw ParseError("config: unknown key '" + k + "'");
    for (const char* req : {"F", "n", "initial"})
        if (!entries.count(req)) throw ParseError(std::string("config: missing required key '") + req + "'");

    auto str = [&](const std::string& k) -> std::string {
        const auto& v = entries.at(k).value;
        if (auto* s = std::get_if<std::string>(&v)) return *s;
        throw ParseError("config: key '" + k + "' expects a quoted string");
    };
    auto num = [&](const std::string& k) -> double {
        const auto& v = entries.at(k).value;
        if (auto* d = std::get_if<double>(&v)) return *d;
        throw ParseError("config: key '" + k + "' expects a number");
    };
    auto integer = [&](const std::string& k) -> long long {
        const double d = num(k);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ParseError("config: key '" + k + "' expects an integer");
        return static_cast<long long>(d);
    };

    RunManifest man;
    auto& c = man.config;
    c.F.family = parse_family(str("F"));
    c.F.n = static_cast<int>(integer("n"));
    if (entries.count("m")) c.m = static_cast<int>(integer("m"));
    c.initial.name = str("initial");
    if (entries.count("initial.params")) {
        const auto& v = entries.at("initial.params").value;
        auto* xs = std::get_if<std::vector<double>>(&v);
        if (!xs) throw ParseError("config: key 'initial.params' expects an array of numbers");
        c.initial.params = *xs;
    } else {
        c.initial.params.clear();
    }
    if (entries.count("cfl")) c.cfl = num("cfl");
    if (entries.count("u_stop")) c.u_stop = num("u_stop");
    if (entries.count("dt_min")) c.dt_min = num("dt_min");
    if (entries.count("record_every")) c.record_every = static_cast<int>(integer("record_every"));
    if (entries.count("sigma")) man.sigma = num("sigma");
    if (entries.count("out")) man.out = str("out");
    if (entries.count("seed")) {
        const long long s = integer("seed");
        if (s < 0) throw ParseError("config: parameter out of range: seed must be non-negative");
        man.seed = static_cast<std::uint64_t>(s);
    }
    c.initial.seed = man.seed;
    if (entries.count("mode")) {
        const auto m = str("mode");
        if (m == "primal") man.mode = RunMode::Primal;
        else if (m == "dual") man.mode = RunMode::Dual;
        else if (m == "both") man.mode = RunMode::Both;
        else if (m == "verify") man.mode = RunMode::Verify;
        else throw ParseError("config: key 'mode' must be primal, dual, both or verify, got '" + m + "'");
    }

    try {
        c.validate();
        CurvatureFunction check(c.F);
        (void)c.grid();
        (void)initial_graph(c.initial, c.grid());
    } catch (const ConstructionError& e) {
        throw ParseError(std::string("config: parameter out of range: ") + e.what());
    } catch (const DomainError& e) {
        throw ParseError(std::string("config: parameter out of range: ") + e.what());
    }
    if (!(man.sigma > 0.0 && man.sigma < 1.0)) throw ParseError("config: parameter out of range: sigma must lie in (0, 1)");
    return man;
}

RunManifest load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const RunManifest& man) {
    const auto& c = man.config;
    std::ostringstream os;
    os << "F = \"" << family_name(c.F.family) << "\"\n";
    os << "n = " << c.F.n << "\n";
    os << "m = " << c.m << "\n";
    os << "initial = \"" << c.initial.name << "\"\n";
    os << "initial.params = [";
    for (std::size_t i = 0; i < c.initial.params.size(); ++i) os << (i ? ", " : "") << fmt17(c.initial.params[i]);
    os << "]\n";
    os << "cfl = " << fmt17(c.cfl) << "\n";
    os << "u_stop = " << fmt17(c.u_stop) << "\n";
    os << "dt_min = " << fmt17(c.dt_min) << "\n";
    os << "record_every = " << c.record_every << "\n";
    os << "mode = \"" << to_string(man.mode) << "\"\n";
    os << "sigma = " << fmt17(man.sigma) << "\n";
    os << "out = \"" << man.out << "\"\n";
    os << "seed = " << man.seed << "\n";
    return os.str();
}

}  // namespace dualflow
