#include "gaborfio/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace gaborfio {

using nlohmann::json;

namespace {

std::string issues_text(const std::vector<ConfigIssue>& issues)
{
    std::ostringstream out;
    out << "invalid configuration:";
    for (const auto& i : issues)
        out << "\n  " << i.field << ": " << i.message;
    return out.str();
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(ErrorKind::config, issues_text(issues)), issues_(std::move(issues))
{
}

json ConfigError::to_json() const
{
    json list = json::array();
    for (const auto& i : issues_)
        list.push_back({{"field", i.field}, {"message", i.message}});
    return {{"error", "config"}, {"issues", list}};
}

namespace {

// Reads optional typed fields out of a JSON object, collecting problems.
class Reader {
public:
    explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

    void fail(const std::string& field, const std::string& message) { issues_.push_back({field, message}); }

    const json* object(const json& doc, const std::string& key, const std::string& path)
    {
        if (!doc.contains(key))
            return nullptr;
        const json& v = doc.at(key);
        if (!v.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    template <class T>
    void number(const json& doc, const std::string& key, const std::string& path, T& out)
    {
        if (!doc.contains(key))
            return;
        const json& v = doc.at(key);
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                fail(path, "expected an integer");
                return;
            }
            out = v.get<T>();
        } else {
            if (!v.is_number()) {
                fail(path, "expected a number");
                return;
            }
            out = v.get<T>();
        }
    }

    template <class T>
    void number(const json& doc, const std::string& key, const std::string& path, std::optional<T>& out)
    {
        if (!doc.contains(key) || doc.at(key).is_null())
            return;
        T value{};
        const std::size_t before = issues_.size();
        number(doc, key, path, value);
        if (issues_.size() == before)
            out = value;
    }

    void string(const json& doc, const std::string& key, const std::string& path, std::string& out,
                std::initializer_list<const char*> allowed)
    {
        if (!doc.contains(key))
            return;
        const json& v = doc.at(key);
        if (!v.is_string()) {
            fail(path, "expected a string");
            return;
        }
        const std::string s = v.get<std::string>();
        for (const char* a : allowed)
            if (s == a) {
                out = s;
                return;
            }
        std::string list;
        for (const char* a : allowed)
            list += (list.empty() ? "" : ", ") + std::string(a);
        fail(path, "unknown value \"" + s + "\" (expected one of: " + list + ")");
    }

    void boolean(const json& doc, const std::string& key, const std::string& path, bool& out)
    {
        if (!doc.contains(key))
            return;
        if (!doc.at(key).is_boolean()) {
            fail(path, "expected true or false");
            return;
        }
        out = doc.at(key).get<bool>();
    }

    std::optional<Eigen::MatrixXd> matrix(const json& v, const std::string& path, int size)
    {
        if (!v.is_array() || static_cast<int>(v.size()) != size) {
            fail(path, "expected a " + std::to_string(size) + "x" + std::to_string(size) + " array of numbers");
            return std::nullopt;
        }
        Eigen::MatrixXd m(size, size);
        for (int r = 0; r < size; ++r) {
            const json& row = v[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != size) {
                fail(path, "row " + std::to_string(r) + " must have " + std::to_string(size) + " entries");
                return std::nullopt;
            }
            for (int c = 0; c < size; ++c) {
                if (!row[static_cast<std::size_t>(c)].is_number()) {
                    fail(path, "entries must be numbers");
                    return std::nullopt;
                }
                m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
            }
        }
        return m;
    }

private:
    std::vector<ConfigIssue>& issues_;
};

void read_symbol(Reader& rd, const json& doc, const std::string& path, SymbolConfig& out)
{
    rd.string(doc, "kind", path + ".kind", out.kind, {"constant", "bandlimited", "weighted"});
    rd.number(doc, "N", path + ".N", out.N);
    rd.number(doc, "s", path + ".s", out.s);
    rd.number(doc, "value", path + ".value", out.value);
    if (out.kind == "bandlimited" && out.N < 1)
        rd.fail(path + ".N", "band-limit order must be >= 1");
    if (out.kind == "weighted" && !(out.s >= 0.0))
        rd.fail(path + ".s", "weight exponent must be >= 0");
}

json symbol_json(const SymbolConfig& s)
{
    json j{{"kind", s.kind}};
    if (s.kind == "bandlimited")
        j["N"] = s.N;
    else if (s.kind == "weighted")
        j["s"] = s.s;
    else
        j["value"] = s.value;
    return j;
}

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

bool needs_fio(const std::string& command)
{
    return command == "decay-scan" || command == "approximate" || command == "dilation-demo";
}

} // namespace

RunConfig parse_config(const json& doc, const std::string& command)
{
    static const std::set<std::string> commands{"frame-check", "decay-scan", "approximate", "dilation-demo",
                                                "warp-frame"};
    std::vector<ConfigIssue> issues;
    Reader rd(issues);
    RunConfig cfg;

    if (!commands.count(command))
        throw ConfigError(std::vector<ConfigIssue>{{"command", "unknown subcommand \"" + command + "\""}});
    if (!doc.is_object())
        throw ConfigError(std::vector<ConfigIssue>{{"", "configuration must be a JSON object"}});

    static const std::set<std::string> known{"grid",    "window",    "tighten", "lattice",   "phase",
                                             "symbol",  "compare_symbol",       "L_list",    "nu_radius",
                                             "s_claim", "tolerance", "p",       "weight_s",  "seed",
                                             "alpha",   "beta",      "mu_radius", "sweep",   "demo_nu_radius"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key))
            rd.fail(key, "unknown field");

    // grid
    int n = 64, d = 1;
    if (const json* g = rd.object(doc, "grid", "grid")) {
        rd.number(*g, "n", "grid.n", n);
        rd.number(*g, "d", "grid.d", d);
    }
    bool grid_ok = true;
    try {
        cfg.grid = Grid(n, d);
    } catch (const Error& e) {
        rd.fail("grid", e.what());
        grid_ok = false;
    }
    if (grid_ok && d != 1 && command != "frame-check")
        rd.fail("grid.d", command + " supports d = 1 only");

    // window
    if (const json* w = rd.object(doc, "window", "window")) {
        rd.string(*w, "kind", "window.kind", cfg.window.kind, {"gaussian", "box", "bspline"});
        rd.number(*w, "width", "window.width", cfg.window.width);
        rd.number(*w, "half_support", "window.half_support", cfg.window.half_support);
        rd.number(*w, "order", "window.order", cfg.window.order);
    }
    if (!(cfg.window.width > 0.0))
        rd.fail("window.width", "must be positive");
    if (!(cfg.window.half_support > 0.0))
        rd.fail("window.half_support", "must be positive");
    if (cfg.window.order < 1)
        rd.fail("window.order", "must be >= 1");
    rd.boolean(doc, "tighten", "tighten", cfg.tighten);

    // lattice
    const int size = 2 * (grid_ok ? cfg.grid.d : 1);
    cfg.generator = Eigen::MatrixXd::Identity(size, size) * 4.0;
    std::string units = "grid";
    if (const json* l = rd.object(doc, "lattice", "lattice")) {
        rd.string(*l, "units", "lattice.units", units, {"grid", "continuum"});
        if (l->contains("generator"))
            if (auto m = rd.matrix(l->at("generator"), "lattice.generator", size))
                cfg.generator = *m;
    }
    if (units == "continuum" && grid_ok)
        cfg.generator /= cfg.grid.h();
    if (grid_ok) {
        try {
            (void)enumerate_lattice(cfg.generator, cfg.grid);
        } catch (const Error& e) {
            if (command != "dilation-demo")
                rd.fail("lattice.generator", e.what());
        }
    }

    // phase
    if (command == "warp-frame")
        cfg.phase.kind = "dilation";
    if (const json* p = rd.object(doc, "phase", "phase")) {
        rd.string(*p, "kind", "phase.kind", cfg.phase.kind, {"linear", "dilation", "chirp", "perturbed"});
        rd.number(*p, "s", "phase.s", cfg.phase.s);
        rd.number(*p, "c", "phase.c", cfg.phase.c);
        rd.number(*p, "eps", "phase.eps", cfg.phase.eps);
    }
    if (cfg.phase.kind == "dilation" && !(cfg.phase.s > 0.0))
        rd.fail("phase.s", "dilation factor must be positive");
    if (cfg.phase.kind == "perturbed" && !(std::abs(cfg.phase.eps) < 1.0))
        rd.fail("phase.eps", "perturbation must satisfy |eps| < 1 to keep the phase tame");

    // symbol
    if (const json* s = rd.object(doc, "symbol", "symbol"))
        read_symbol(rd, *s, "symbol", cfg.symbol);
    if (const json* s = rd.object(doc, "compare_symbol", "compare_symbol")) {
        SymbolConfig other;
        read_symbol(rd, *s, "compare_symbol", other);
        cfg.compare_symbol = other;
    }

    // experiment fields
    if (doc.contains("L_list")) {
        const json& v = doc.at("L_list");
        if (!v.is_array()) {
            rd.fail("L_list", "expected an array of numbers");
        } else {
            cfg.L_list.clear();
            for (const json& e : v) {
                if (!e.is_number()) {
                    rd.fail("L_list", "entries must be numbers");
                    break;
                }
                cfg.L_list.push_back(e.get<double>());
            }
        }
    }
    if (command == "approximate") {
        if (cfg.L_list.size() < 3)
            rd.fail("L_list", "needs at least 3 radii");
        for (double L : cfg.L_list)
            if (!(L >= 0.0)) {
                rd.fail("L_list", "radii must be >= 0");
                break;
            }
    }
    rd.number(doc, "nu_radius", "nu_radius", cfg.nu_radius);
    if (cfg.nu_radius && !(*cfg.nu_radius >= 0.0))
        rd.fail("nu_radius", "must be >= 0");
    rd.number(doc, "s_claim", "s_claim", cfg.s_claim);
    rd.number(doc, "tolerance", "tolerance", cfg.tolerance);
    if (doc.contains("p")) {
        const json& v = doc.at("p");
        if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
            cfg.p = std::numeric_limits<double>::infinity();
        else
            rd.number(doc, "p", "p", cfg.p);
    }
    if (!(cfg.p >= 1.0))
        rd.fail("p", "must lie in [1, inf]");
    rd.number(doc, "weight_s", "weight_s", cfg.weight_s);
    rd.number(doc, "seed", "seed", cfg.seed);
    rd.number(doc, "alpha", "alpha", cfg.alpha);
    rd.number(doc, "beta", "beta", cfg.beta);
    rd.number(doc, "mu_radius", "mu_radius", cfg.mu_radius);
    rd.number(doc, "demo_nu_radius", "demo_nu_radius", cfg.demo_nu_radius);

    if (doc.contains("sweep")) {
        const json& v = doc.at("sweep");
        if (!v.is_array()) {
            rd.fail("sweep", "expected an array of generator matrices");
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string path = "sweep[" + std::to_string(i) + "]";
                if (auto m = rd.matrix(v[i], path, size)) {
                    Eigen::MatrixXd gen = units == "continuum" && grid_ok ? Eigen::MatrixXd(*m / cfg.grid.h()) : *m;
                    if (grid_ok) {
                        try {
                            (void)enumerate_lattice(gen, cfg.grid);
                        } catch (const Error& e) {
                            rd.fail(path, e.what());
                        }
                    }
                    cfg.sweep.push_back(gen);
                }
            }
        }
    }

    // cross-field checks
    if (grid_ok && (needs_fio(command) || command == "warp-frame") && issues.empty()) {
        const TamePhase phase = build_phase(cfg.phase);
        const TamenessReport t = tameness_audit(phase, torus_box(cfg.grid), 17);
        if (!t.pass()) {
            std::ostringstream msg;
            msg << "phase is not tame on the grid box (min |det| " << t.min_abs_det << ", max 2nd derivative "
                << t.max_second_derivative << ", gradient error " << t.max_gradient_error << ")";
            rd.fail("phase", msg.str());
        }
    }
    if (command == "dilation-demo") {
        if (cfg.window.kind != "gaussian")
            rd.fail("window.kind", "dilation-demo needs a gaussian window");
        if (cfg.phase.kind != "dilation")
            rd.fail("phase.kind", "dilation-demo needs the dilation phase");
        if (grid_ok) {
            for (const auto& [name, step] : {std::pair{"alpha", cfg.alpha}, std::pair{"beta", cfg.beta}}) {
                const double units_step = step / cfg.grid.h();
                const long r = std::lround(units_step);
                if (!(step > 0.0) || std::abs(units_step - r) > 1e-9 || r == 0 || cfg.grid.n % r != 0)
                    rd.fail(name, "must be a positive multiple of h that divides the grid period (h = "
                                      + std::to_string(cfg.grid.h()) + ")");
            }
        }
        if (!(cfg.mu_radius >= 0.0))
            rd.fail("mu_radius", "must be >= 0");
        if (!(cfg.demo_nu_radius >= 0.0))
            rd.fail("demo_nu_radius", "must be >= 0");
    }

    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return cfg;
}

json to_json(const RunConfig& cfg)
{
    json j;
    j["grid"] = {{"n", cfg.grid.n}, {"d", cfg.grid.d}};
    j["window"] = {{"kind", cfg.window.kind}};
    if (cfg.window.kind == "box")
        j["window"]["half_support"] = cfg.window.half_support;
    else
        j["window"]["width"] = cfg.window.width;
    if (cfg.window.kind == "bspline")
        j["window"]["order"] = cfg.window.order;
    j["tighten"] = cfg.tighten;
    j["lattice"] = {{"units", "grid"}, {"generator", matrix_json(cfg.generator)}};
    j["phase"] = {{"kind", cfg.phase.kind}};
    if (cfg.phase.kind == "dilation")
        j["phase"]["s"] = cfg.phase.s;
    if (cfg.phase.kind == "chirp")
        j["phase"]["c"] = cfg.phase.c;
    if (cfg.phase.kind == "perturbed")
        j["phase"]["eps"] = cfg.phase.eps;
    j["symbol"] = symbol_json(cfg.symbol);
    if (cfg.compare_symbol)
        j["compare_symbol"] = symbol_json(*cfg.compare_symbol);
    j["L_list"] = cfg.L_list;
    j["nu_radius"] = cfg.nu_radius ? json(*cfg.nu_radius) : json(nullptr);
    j["s_claim"] = cfg.s_claim ? json(*cfg.s_claim) : json(nullptr);
    j["tolerance"] = cfg.tolerance ? json(*cfg.tolerance) : json(nullptr);
    j["p"] = std::isinf(cfg.p) ? json("inf") : json(cfg.p);
    j["weight_s"] = cfg.weight_s;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["mu_radius"] = cfg.mu_radius;
    j["demo_nu_radius"] = cfg.demo_nu_radius;
    json sweep = json::array();
    for (const auto& m : cfg.sweep)
        sweep.push_back(matrix_json(m));
    j["sweep"] = sweep;
    return j;
}

Signal build_window(const RunConfig& cfg)
{
    if (cfg.window.kind == "box")
        return box_window(cfg.grid, cfg.window.half_support);
    if (cfg.window.kind == "bspline")
        return bspline_window(cfg.grid, cfg.window.order, cfg.window.width);
    return gaussian_window(cfg.grid, cfg.window.width);
}

Lattice build_lattice(const RunConfig& cfg) { return enumerate_lattice(cfg.generator, cfg.grid); }

Lattice build_lattice(const RunConfig& cfg, const Eigen::MatrixXd& generator)
{
    return enumerate_lattice(generator, cfg.grid);
}

TamePhase build_phase(const PhaseConfig& cfg)
{
    if (cfg.kind == "dilation")
        return dilation_phase(cfg.s);
    if (cfg.kind == "chirp")
        return chirp_phase(cfg.c);
    if (cfg.kind == "perturbed")
        return perturbed_phase(cfg.eps);
    return linear_phase();
}

SymbolTable build_symbol(const SymbolConfig& cfg, const Grid& grid, std::uint64_t seed)
{
    if (cfg.kind == "bandlimited")
        return bandlimited_symbol(grid, cfg.N, seed);
    if (cfg.kind == "weighted")
        return weighted_symbol(grid, cfg.s, seed);
    return constant_symbol(grid, cfg.value);
}

} // namespace gaborfio
