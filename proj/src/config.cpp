#include "lakevort/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "lakevort/io.hpp"

namespace lakevort {

const char* experiment_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::steady: return "steady";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::greens_check: return "greens-check";
    case ExperimentKind::profile_check: return "profile-check";
    case ExperimentKind::stability: return "stability";
    }
    return "?";
}

VorticityFunction make_profile(const ProfileSpec& spec) {
    switch (spec.kind) {
    case ProfileKind::power: return VorticityFunction::make_power(spec.exponent);
    case ProfileKind::shifted_power:
        return VorticityFunction::make_shifted_power(spec.exponent, spec.shift);
    case ProfileKind::tabulated: return VorticityFunction::load_tabulated_csv(spec.table_path);
    }
    throw std::invalid_argument("unhandled profile kind");
}

namespace {

struct RawValue {
    enum Kind { number, boolean, text, array } kind = number;
    double num = 0.0;
    bool b = false;
    std::string str;
    std::vector<double> arr;
    std::string token; // raw numeric token, kept for exact integer parsing
    int line = 0;
};

struct Entry {
    std::string section;
    std::string key;
    RawValue value;
};

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
    throw ConfigError(src + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

double parse_number(const std::string& src, int line, const std::string& tok) {
    if (tok.empty()) fail(src, line, "expected a number");
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        fail(src, line, "expected a number, got '" + tok + "'");
    return v;
}

// Levenshtein distance for the nearest-key hints.
std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"experiment", {"kind"}},
        {"domain", {"shape", "center", "radius", "lo", "hi", "semi", "nx", "depth_floor"}},
        {"depth", {"kind", "value", "base", "slope", "peak", "coeff", "center", "scale", "power"}},
        {"profile", {"kind", "exponent", "shift", "table"}},
        {"solver",
         {"eps", "eps_schedule", "kappa", "lambda", "tol_fix", "tol_circ", "tol_pcg", "max_iter",
          "damping", "regime"}},
        {"output", {"dir", "seed"}},
        {"stability",
         {"perturbation", "shift", "delta", "noise_level", "turnovers", "cfl", "record_every",
          "p_list"}},
    };
    return s;
}

// Best near-miss suggestion for an unknown key: same-section keys first, then
// section names, then keys of other sections.
std::string hint_for_key(const std::string& section, const std::string& key) {
    const std::size_t cutoff = 2;
    std::size_t best = cutoff + 1;
    std::string hint;
    auto consider = [&](const std::string& cand, const std::string& text) {
        std::size_t d = edit_distance(key, cand);
        if (d < best) {
            best = d;
            hint = text;
        }
    };
    auto it = schema().find(section);
    if (it != schema().end())
        for (const auto& k : it->second) consider(k, "did you mean '" + k + "'?");
    if (best > 0)
        for (const auto& [name, keys] : schema())
            consider(name, "did you mean the '[" + name + "]' section?");
    if (best > 0)
        for (const auto& [name, keys] : schema()) {
            if (name == section) continue;
            for (const auto& k : keys)
                consider(k, "did you mean '" + k + "' in [" + name + "]?");
        }
    return best <= cutoff ? hint : std::string();
}

std::string hint_for_section(const std::string& name) {
    const std::size_t cutoff = 2;
    std::size_t best = cutoff + 1;
    std::string hint;
    for (const auto& [cand, keys] : schema()) {
        std::size_t d = edit_distance(name, cand);
        if (d < best) {
            best = d;
            hint = "did you mean '[" + cand + "]'?";
        }
    }
    return best <= cutoff ? hint : std::string();
}

RawValue parse_value(const std::string& src, int line, const std::string& text) {
    RawValue v;
    v.line = line;
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            fail(src, line, "unterminated string");
        v.kind = RawValue::text;
        v.str = text.substr(1, text.size() - 2);
        if (v.str.find('"') != std::string::npos)
            fail(src, line, "embedded quotes are not supported");
        return v;
    }
    if (text == "true" || text == "false") {
        v.kind = RawValue::boolean;
        v.b = text == "true";
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']') fail(src, line, "unterminated array");
        v.kind = RawValue::array;
        std::string inner = trim(text.substr(1, text.size() - 2));
        if (!inner.empty()) {
            std::size_t pos = 0;
            while (true) {
                std::size_t comma = inner.find(',', pos);
                std::string tok = trim(comma == std::string::npos ? inner.substr(pos)
                                                                  : inner.substr(pos, comma - pos));
                if (tok.empty()) fail(src, line, "empty array element");
                v.arr.push_back(parse_number(src, line, tok));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        return v;
    }
    v.kind = RawValue::number;
    v.token = text;
    v.num = parse_number(src, line, text);
    return v;
}

// Accessors that enforce the expected value type with a line diagnostic.
class Ctx {
public:
    Ctx(std::string src, std::vector<Entry> entries) : src_(std::move(src)) {
        for (auto& e : entries) {
            auto key = e.section + "." + e.key;
            if (!map_.emplace(key, e.value).second)
                fail(src_, e.value.line, "duplicate key '" + e.key + "' in [" + e.section + "]");
        }
    }

    const std::string& src() const { return src_; }

    const RawValue* find(const std::string& section, const std::string& key) const {
        auto it = map_.find(section + "." + key);
        return it == map_.end() ? nullptr : &it->second;
    }

    bool has(const std::string& section, const std::string& key) const {
        return find(section, key) != nullptr;
    }

    double number(const std::string& sec, const std::string& key, double dflt) const {
        const RawValue* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != RawValue::number)
            fail(src_, v->line, "key '" + key + "' expects a number");
        return v->num;
    }

    int integer(const std::string& sec, const std::string& key, int dflt) const {
        const RawValue* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != RawValue::number || v->num != std::floor(v->num) ||
            std::fabs(v->num) > 2147483647.0)
            fail(src_, v->line, "key '" + key + "' expects an integer");
        return static_cast<int>(v->num);
    }

    std::string text(const std::string& sec, const std::string& key,
                     const std::string& dflt) const {
        const RawValue* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != RawValue::text)
            fail(src_, v->line, "key '" + key + "' expects a quoted string");
        return v->str;
    }

    Vec2 vec2(const std::string& sec, const std::string& key, Vec2 dflt) const {
        const RawValue* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != RawValue::array || v->arr.size() != 2)
            fail(src_, v->line, "key '" + key + "' expects an array of two numbers");
        return {v->arr[0], v->arr[1]};
    }

    std::vector<double> array(const std::string& sec, const std::string& key,
                              std::vector<double> dflt) const {
        const RawValue* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != RawValue::array)
            fail(src_, v->line, "key '" + key + "' expects an array of numbers");
        return v->arr;
    }

    int line_of(const std::string& sec, const std::string& key) const {
        const RawValue* v = find(sec, key);
        return v ? v->line : 0;
    }

    // Keys present in a section but absent from the allowed list for the
    // selected kind; used after dispatching on shape/depth/profile kind.
    void reject_irrelevant(const std::string& sec, const std::string& kind_label,
                           const std::set<std::string>& allowed) const {
        for (const auto& [path, v] : map_) {
            auto dot = path.find('.');
            if (path.substr(0, dot) != sec) continue;
            std::string key = path.substr(dot + 1);
            if (!allowed.count(key))
                fail(src_, v.line,
                     "key '" + key + "' does not apply to " + kind_label + " in [" + sec + "]");
        }
    }

private:
    std::string src_;
    std::map<std::string, RawValue> map_;
};

[[noreturn]] void invalid(const Ctx& ctx, const std::string& sec, const std::string& key,
                          const std::string& msg) {
    int line = ctx.line_of(sec, key);
    if (line > 0) fail(ctx.src(), line, "key '" + key + "': " + msg);
    throw ConfigError(ctx.src() + ": key '" + sec + "." + key + "': " + msg);
}

void require_positive(const Ctx& ctx, const std::string& sec, const std::string& key, double v) {
    if (!(v > 0.0)) invalid(ctx, sec, key, "must be positive");
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
    const std::string& src = source_name;
    std::vector<Entry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                                    : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // Strip comments, respecting quoted strings.
        bool in_quotes = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') in_quotes = !in_quotes;
            else if (line[k] == '#' && !in_quotes) {
                line.erase(k);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(src, line_no, "unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (!is_identifier(name)) fail(src, line_no, "malformed section name '" + name + "'");
            if (!schema().count(name)) {
                std::string hint = hint_for_section(name);
                fail(src, line_no,
                     "unknown section '" + name + "'" + (hint.empty() ? "" : "; " + hint));
            }
            section = name;
            continue;
        }

        std::size_t eq = std::string::npos;
        bool q = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') q = !q;
            else if (line[k] == '=' && !q) {
                eq = k;
                break;
            }
        }
        if (eq == std::string::npos) fail(src, line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!is_identifier(key)) fail(src, line_no, "malformed key '" + key + "'");
        if (value.empty()) fail(src, line_no, "missing value for key '" + key + "'");
        if (section.empty())
            fail(src, line_no, "key '" + key + "' appears before any [section] header");
        const auto& known = schema().at(section);
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            std::string hint = hint_for_key(section, key);
            fail(src, line_no,
                 "unknown key '" + key + "' in [" + section + "]" +
                     (hint.empty() ? "" : "; " + hint));
        }
        entries.push_back({section, key, parse_value(src, line_no, value)});
    }

    Ctx ctx(src, std::move(entries));
    RunConfig c;

    // [experiment]
    if (ctx.has("experiment", "kind")) {
        std::string kind = ctx.text("experiment", "kind", "");
        c.experiment_declared = true;
        if (kind == "steady") c.experiment = ExperimentKind::steady;
        else if (kind == "sweep") c.experiment = ExperimentKind::sweep;
        else if (kind == "greens-check") c.experiment = ExperimentKind::greens_check;
        else if (kind == "profile-check") c.experiment = ExperimentKind::profile_check;
        else if (kind == "stability") c.experiment = ExperimentKind::stability;
        else
            invalid(ctx, "experiment", "kind",
                    "expected one of steady, sweep, greens-check, profile-check, stability");
    }

    // [domain]
    {
        std::string shape = ctx.text("domain", "shape", "disc");
        std::set<std::string> allowed = {"shape", "nx", "depth_floor"};
        if (shape == "disc") {
            allowed.insert({"center", "radius"});
            Vec2 cc = ctx.vec2("domain", "center", {0.0, 0.0});
            double r = ctx.number("domain", "radius", 1.0);
            require_positive(ctx, "domain", "radius", r);
            c.shape = Shape::make_disc(cc, r);
        } else if (shape == "rectangle") {
            allowed.insert({"lo", "hi"});
            Vec2 lo = ctx.vec2("domain", "lo", {-1.0, -1.0});
            Vec2 hi = ctx.vec2("domain", "hi", {1.0, 1.0});
            if (!(lo.x < hi.x && lo.y < hi.y))
                invalid(ctx, "domain", "lo", "rectangle corners must satisfy lo < hi");
            c.shape = Shape::make_rectangle(lo, hi);
        } else if (shape == "ellipse") {
            allowed.insert({"center", "semi"});
            Vec2 cc = ctx.vec2("domain", "center", {0.0, 0.0});
            Vec2 s = ctx.vec2("domain", "semi", {1.0, 1.0});
            if (!(s.x > 0.0 && s.y > 0.0))
                invalid(ctx, "domain", "semi", "semi-axes must be positive");
            c.shape = Shape::make_ellipse(cc, s.x, s.y);
        } else {
            invalid(ctx, "domain", "shape", "expected one of disc, rectangle, ellipse");
        }
        ctx.reject_irrelevant("domain", "shape '" + shape + "'", allowed);
        c.nx = ctx.integer("domain", "nx", 256);
        if (c.nx < 16) invalid(ctx, "domain", "nx", "must be at least 16");
        c.depth_floor = ctx.number("domain", "depth_floor", -1.0);
    }

    // [depth]
    {
        std::string kind = ctx.text("depth", "kind", "constant");
        std::set<std::string> allowed = {"kind"};
        if (kind == "constant") {
            allowed.insert("value");
            double v = ctx.number("depth", "value", 1.0);
            require_positive(ctx, "depth", "value", v);
            c.depth = DepthSpec::constant(v);
        } else if (kind == "affine") {
            allowed.insert({"base", "slope"});
            double base = ctx.number("depth", "base", 1.0);
            require_positive(ctx, "depth", "base", base);
            Vec2 g = ctx.vec2("depth", "slope", {0.0, 0.0});
            c.depth = DepthSpec::affine(base, g.x, g.y);
        } else if (kind == "radial_bump") {
            allowed.insert({"peak", "coeff", "center"});
            double peak = ctx.number("depth", "peak", 2.0);
            double coeff = ctx.number("depth", "coeff", 1.0);
            require_positive(ctx, "depth", "peak", peak);
            if (coeff < 0.0) invalid(ctx, "depth", "coeff", "must be nonnegative");
            c.depth = DepthSpec::radial_bump(peak, coeff, ctx.vec2("depth", "center", {0.0, 0.0}));
        } else if (kind == "product_distance") {
            allowed.insert({"scale", "power"});
            double scale = ctx.number("depth", "scale", 1.0);
            double power = ctx.number("depth", "power", 1.0);
            require_positive(ctx, "depth", "scale", scale);
            require_positive(ctx, "depth", "power", power);
            c.depth = DepthSpec::product_distance(scale, power);
        } else {
            invalid(ctx, "depth", "kind",
                    "expected one of constant, affine, radial_bump, product_distance");
        }
        ctx.reject_irrelevant("depth", "depth kind '" + kind + "'", allowed);
    }

    // [profile]
    {
        std::string kind = ctx.text("profile", "kind", "power");
        std::set<std::string> allowed = {"kind"};
        if (kind == "splus") {
            c.profile.kind = ProfileKind::power;
            c.profile.exponent = 1.0;
        } else if (kind == "power") {
            allowed.insert("exponent");
            c.profile.kind = ProfileKind::power;
            c.profile.exponent = ctx.number("profile", "exponent", 1.0);
            require_positive(ctx, "profile", "exponent", c.profile.exponent);
        } else if (kind == "shifted_power") {
            allowed.insert({"exponent", "shift"});
            c.profile.kind = ProfileKind::shifted_power;
            c.profile.exponent = ctx.number("profile", "exponent", 1.0);
            c.profile.shift = ctx.number("profile", "shift", 0.0);
            require_positive(ctx, "profile", "exponent", c.profile.exponent);
            if (c.profile.shift < 0.0) invalid(ctx, "profile", "shift", "must be nonnegative");
        } else if (kind == "tabulated") {
            allowed.insert("table");
            c.profile.kind = ProfileKind::tabulated;
            c.profile.table_path = ctx.text("profile", "table", "");
            if (c.profile.table_path.empty())
                invalid(ctx, "profile", "table", "tabulated profiles need a table path");
        } else {
            invalid(ctx, "profile", "kind",
                    "expected one of splus, power, shifted_power, tabulated");
        }
        ctx.reject_irrelevant("profile", "profile kind '" + kind + "'", allowed);
    }

    // [solver]
    {
        if (ctx.has("solver", "eps") && ctx.has("solver", "eps_schedule"))
            invalid(ctx, "solver", "eps_schedule",
                    "solver.eps and solver.eps_schedule are mutually exclusive");
        if (ctx.has("solver", "eps_schedule")) {
            c.eps_schedule = ctx.array("solver", "eps_schedule", {});
        } else {
            c.eps_schedule = {ctx.number("solver", "eps", 0.1)};
        }
        const std::string eps_key = ctx.has("solver", "eps_schedule") ? "eps_schedule" : "eps";
        if (c.eps_schedule.empty()) invalid(ctx, "solver", eps_key, "must not be empty");
        for (double e : c.eps_schedule)
            if (!(e > 0.0)) invalid(ctx, "solver", eps_key, "entries must be positive");
        for (std::size_t k = 1; k < c.eps_schedule.size(); ++k)
            if (!(c.eps_schedule[k] < c.eps_schedule[k - 1]))
                invalid(ctx, "solver", eps_key, "must be strictly decreasing");

        c.kappa = ctx.number("solver", "kappa", 1.0);
        require_positive(ctx, "solver", "kappa", c.kappa);

        if (const RawValue* v = ctx.find("solver", "lambda")) {
            if (v->kind == RawValue::text) {
                if (v->str != "auto")
                    invalid(ctx, "solver", "lambda", "expected \"auto\" or a positive number");
                c.lambda = 0.0;
            } else if (v->kind == RawValue::number) {
                if (!(v->num > 0.0))
                    invalid(ctx, "solver", "lambda", "expected \"auto\" or a positive number");
                c.lambda = v->num;
            } else {
                invalid(ctx, "solver", "lambda", "expected \"auto\" or a positive number");
            }
        }

        c.tol_fix = ctx.number("solver", "tol_fix", c.tol_fix);
        c.tol_circ = ctx.number("solver", "tol_circ", c.tol_circ);
        c.tol_pcg = ctx.number("solver", "tol_pcg", c.tol_pcg);
        require_positive(ctx, "solver", "tol_fix", c.tol_fix);
        require_positive(ctx, "solver", "tol_circ", c.tol_circ);
        require_positive(ctx, "solver", "tol_pcg", c.tol_pcg);
        c.max_iter = ctx.integer("solver", "max_iter", c.max_iter);
        if (c.max_iter < 1) invalid(ctx, "solver", "max_iter", "must be at least 1");
        c.damping = ctx.number("solver", "damping", c.damping);
        if (!(c.damping > 0.0 && c.damping <= 1.0))
            invalid(ctx, "solver", "damping", "must lie in (0, 1]");

        std::string regime = ctx.text("solver", "regime", "interior");
        if (regime == "interior") c.regime = Regime::interior;
        else if (regime == "boundary") c.regime = Regime::boundary;
        else invalid(ctx, "solver", "regime", "expected interior or boundary");
    }

    // [output]
    {
        c.out_dir = ctx.text("output", "dir", c.out_dir);
        if (c.out_dir.empty()) invalid(ctx, "output", "dir", "must not be empty");
        if (const RawValue* v = ctx.find("output", "seed")) {
            if (v->kind != RawValue::number || v->token.empty() ||
                v->token.find_first_not_of("0123456789") != std::string::npos)
                fail(src, v->line, "key 'seed' expects a nonnegative integer literal");
            c.seed = std::strtoull(v->token.c_str(), nullptr, 10);
        }
    }

    // [stability]
    {
        std::string p = ctx.text("stability", "perturbation", "none");
        if (p == "none") c.stability.perturbation = PerturbationKind::none;
        else if (p == "shift") c.stability.perturbation = PerturbationKind::shift;
        else if (p == "amplitude") c.stability.perturbation = PerturbationKind::amplitude;
        else if (p == "noise") c.stability.perturbation = PerturbationKind::noise;
        else
            invalid(ctx, "stability", "perturbation",
                    "expected one of none, shift, amplitude, noise");
        Vec2 sh = ctx.vec2("stability", "shift", {0.0, 0.0});
        if (sh.x != std::floor(sh.x) || sh.y != std::floor(sh.y))
            invalid(ctx, "stability", "shift", "cell shifts must be integers");
        c.stability.shift_x = static_cast<int>(sh.x);
        c.stability.shift_y = static_cast<int>(sh.y);
        c.stability.delta = ctx.number("stability", "delta", c.stability.delta);
        c.stability.noise_level = ctx.number("stability", "noise_level", c.stability.noise_level);
        if (c.stability.noise_level < 0.0 || c.stability.noise_level >= 1.0)
            invalid(ctx, "stability", "noise_level", "must lie in [0, 1)");
        c.stability.turnovers = ctx.number("stability", "turnovers", c.stability.turnovers);
        require_positive(ctx, "stability", "turnovers", c.stability.turnovers);
        c.stability.cfl = ctx.number("stability", "cfl", c.stability.cfl);
        if (!(c.stability.cfl > 0.0 && c.stability.cfl <= 0.9))
            invalid(ctx, "stability", "cfl", "must lie in (0, 0.9]");
        c.stability.record_every = ctx.integer("stability", "record_every", c.stability.record_every);
        if (c.stability.record_every < 1)
            invalid(ctx, "stability", "record_every", "must be at least 1");
        c.stability.p_list = ctx.array("stability", "p_list", c.stability.p_list);
        if (c.stability.p_list.empty()) invalid(ctx, "stability", "p_list", "must not be empty");
        for (double pexp : c.stability.p_list)
            if (!(pexp >= 1.0)) invalid(ctx, "stability", "p_list", "exponents must be >= 1");
    }

    return c;
}

RunConfig parse_config(const std::string& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config_text(text, path);
}

namespace {

std::string arr2(double x, double y) {
    return "[" + format_g17(x) + ", " + format_g17(y) + "]";
}

std::string arr_n(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += format_g17(v[k]);
    }
    return s + "]";
}

} // namespace

std::string config_echo(const RunConfig& c) {
    std::string s;
    s += "[experiment]\n";
    s += "kind = \"" + std::string(experiment_name(c.experiment)) + "\"\n\n";

    s += "[domain]\n";
    switch (c.shape.kind) {
    case ShapeKind::disc:
        s += "shape = \"disc\"\n";
        s += "center = " + arr2(c.shape.center.x, c.shape.center.y) + "\n";
        s += "radius = " + format_g17(c.shape.radius) + "\n";
        break;
    case ShapeKind::rectangle:
        s += "shape = \"rectangle\"\n";
        s += "lo = " + arr2(c.shape.lo.x, c.shape.lo.y) + "\n";
        s += "hi = " + arr2(c.shape.hi.x, c.shape.hi.y) + "\n";
        break;
    case ShapeKind::ellipse:
        s += "shape = \"ellipse\"\n";
        s += "center = " + arr2(c.shape.center.x, c.shape.center.y) + "\n";
        s += "semi = " + arr2(c.shape.semi_x, c.shape.semi_y) + "\n";
        break;
    case ShapeKind::polygon:
        throw std::invalid_argument("polygon domains cannot be expressed in config files");
    }
    s += "nx = " + std::to_string(c.nx) + "\n";
    s += "depth_floor = " + format_g17(c.depth_floor) + "\n\n";

    s += "[depth]\n";
    switch (c.depth.kind) {
    case DepthKind::constant:
        s += "kind = \"constant\"\n";
        s += "value = " + format_g17(c.depth.a) + "\n";
        break;
    case DepthKind::affine:
        s += "kind = \"affine\"\n";
        s += "base = " + format_g17(c.depth.a) + "\n";
        s += "slope = " + arr2(c.depth.gx, c.depth.gy) + "\n";
        break;
    case DepthKind::radial_bump:
        s += "kind = \"radial_bump\"\n";
        s += "peak = " + format_g17(c.depth.a) + "\n";
        s += "coeff = " + format_g17(c.depth.c) + "\n";
        s += "center = " + arr2(c.depth.center.x, c.depth.center.y) + "\n";
        break;
    case DepthKind::product_distance:
        s += "kind = \"product_distance\"\n";
        s += "scale = " + format_g17(c.depth.c) + "\n";
        s += "power = " + format_g17(c.depth.q) + "\n";
        break;
    }
    s += "\n[profile]\n";
    switch (c.profile.kind) {
    case ProfileKind::power:
        s += "kind = \"power\"\n";
        s += "exponent = " + format_g17(c.profile.exponent) + "\n";
        break;
    case ProfileKind::shifted_power:
        s += "kind = \"shifted_power\"\n";
        s += "exponent = " + format_g17(c.profile.exponent) + "\n";
        s += "shift = " + format_g17(c.profile.shift) + "\n";
        break;
    case ProfileKind::tabulated:
        s += "kind = \"tabulated\"\n";
        s += "table = \"" + c.profile.table_path + "\"\n";
        break;
    }

    s += "\n[solver]\n";
    s += "eps_schedule = " + arr_n(c.eps_schedule) + "\n";
    s += "kappa = " + format_g17(c.kappa) + "\n";
    s += c.lambda > 0.0 ? "lambda = " + format_g17(c.lambda) + "\n"
                        : std::string("lambda = \"auto\"\n");
    s += "tol_fix = " + format_g17(c.tol_fix) + "\n";
    s += "tol_circ = " + format_g17(c.tol_circ) + "\n";
    s += "tol_pcg = " + format_g17(c.tol_pcg) + "\n";
    s += "max_iter = " + std::to_string(c.max_iter) + "\n";
    s += "damping = " + format_g17(c.damping) + "\n";
    s += std::string("regime = \"") + (c.regime == Regime::interior ? "interior" : "boundary") +
         "\"\n";

    s += "\n[output]\n";
    s += "dir = \"" + c.out_dir + "\"\n";
    s += "seed = " + std::to_string(c.seed) + "\n";

    s += "\n[stability]\n";
    const char* pname = "none";
    switch (c.stability.perturbation) {
    case PerturbationKind::none: pname = "none"; break;
    case PerturbationKind::shift: pname = "shift"; break;
    case PerturbationKind::amplitude: pname = "amplitude"; break;
    case PerturbationKind::noise: pname = "noise"; break;
    }
    s += std::string("perturbation = \"") + pname + "\"\n";
    s += "shift = " + arr2(c.stability.shift_x, c.stability.shift_y) + "\n";
    s += "delta = " + format_g17(c.stability.delta) + "\n";
    s += "noise_level = " + format_g17(c.stability.noise_level) + "\n";
    s += "turnovers = " + format_g17(c.stability.turnovers) + "\n";
    s += "cfl = " + format_g17(c.stability.cfl) + "\n";
    s += "record_every = " + std::to_string(c.stability.record_every) + "\n";
    s += "p_list = " + arr_n(c.stability.p_list) + "\n";
    return s;
}

namespace {

bool vec2_eq(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

bool shape_eq(const Shape& a, const Shape& b) {
    if (a.kind != b.kind) return false;
    if (!vec2_eq(a.center, b.center) || a.radius != b.radius) return false;
    if (!vec2_eq(a.lo, b.lo) || !vec2_eq(a.hi, b.hi)) return false;
    if (a.semi_x != b.semi_x || a.semi_y != b.semi_y) return false;
    if (a.vertices.size() != b.vertices.size()) return false;
    for (std::size_t k = 0; k < a.vertices.size(); ++k)
        if (!vec2_eq(a.vertices[k], b.vertices[k])) return false;
    return true;
}

bool depth_eq(const DepthSpec& a, const DepthSpec& b) {
    return a.kind == b.kind && a.a == b.a && a.c == b.c && a.gx == b.gx && a.gy == b.gy &&
           a.q == b.q && vec2_eq(a.center, b.center);
}

} // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.experiment == b.experiment && shape_eq(a.shape, b.shape) &&
           depth_eq(a.depth, b.depth) && a.nx == b.nx && a.depth_floor == b.depth_floor &&
           a.profile == b.profile && a.eps_schedule == b.eps_schedule && a.kappa == b.kappa &&
           a.lambda == b.lambda && a.tol_fix == b.tol_fix && a.tol_circ == b.tol_circ &&
           a.tol_pcg == b.tol_pcg && a.max_iter == b.max_iter && a.damping == b.damping &&
           a.regime == b.regime && a.out_dir == b.out_dir && a.seed == b.seed &&
           a.stability == b.stability;
}

std::string extract_config_echo(const std::string& manifest_text) {
    const std::string begin = "--- config ---\n";
    const std::string end = "--- end config ---";
    std::size_t a = manifest_text.find(begin);
    std::size_t b = manifest_text.find(end);
    if (a == std::string::npos || b == std::string::npos || b < a)
        throw std::runtime_error("manifest carries no config block");
    a += begin.size();
    return manifest_text.substr(a, b - a);
}

} // namespace lakevort
