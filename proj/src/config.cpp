#include "icesim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icesim {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(path + "/" + k, "unknown key");
    }
}

Polynomial parse_polynomial(const json& j, const std::string& path) {
    if (j.is_number()) return Polynomial({get_number(j, path)});
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a coefficient list [a0, a1, ...]");
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < j.size(); ++i) coeffs.push_back(get_number(j[i], path + "/" + std::to_string(i)));
    return Polynomial(std::move(coeffs));
}

PiecewisePolynomial parse_piecewise(const json& j, const std::string& path) {
    if (j.is_number() || j.is_array()) return PiecewisePolynomial({0.0}, {parse_polynomial(j, path)});
    reject_unknown(j, path, {"breaks", "pieces"});
    const json* breaks = find(j, "breaks");
    const json* pieces = find(j, "pieces");
    if (!breaks || !pieces || !breaks->is_array() || !pieces->is_array()) {
        throw ConfigError(path, "piecewise polynomial needs 'breaks' and 'pieces' arrays");
    }
    if (breaks->size() != pieces->size()) throw ConfigError(path, "'breaks' and 'pieces' must have equal length");
    std::vector<double> b;
    std::vector<Polynomial> p;
    for (std::size_t i = 0; i < breaks->size(); ++i) {
        b.push_back(get_number((*breaks)[i], path + "/breaks/" + std::to_string(i)));
        p.push_back(parse_polynomial((*pieces)[i], path + "/pieces/" + std::to_string(i)));
    }
    try {
        return PiecewisePolynomial(std::move(b), std::move(p));
    } catch (const InputError& e) {
        throw ConfigError(path, e.what());
    }
}

TimeSeries parse_series(const json& j, const std::string& path) {
    if (j.is_number()) return TimeSeries::constant(get_number(j, path));
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a number or a table [[t, value], ...]");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != 2) throw ConfigError(p, "expected [t, value]");
        pts.emplace_back(get_number(j[i][0], p + "/0"), get_number(j[i][1], p + "/1"));
    }
    try {
        return TimeSeries(std::move(pts));
    } catch (const InputError& e) {
        throw ConfigError(path, e.what());
    }
}

FieldSpec parse_field(const json& j, const std::string& path) {
    FieldSpec f;
    if (j.is_number()) {
        f.value = get_number(j, path);
        return f;
    }
    reject_unknown(j, path, {"type", "value", "bottom", "top", "values", "path"});
    const json* type = find(j, "type");
    f.kind = type ? get_string(*type, path + "/type") : "constant";
    if (f.kind == "constant") {
        const json* v = find(j, "value");
        if (!v) throw ConfigError(path + "/value", "missing");
        f.value = get_number(*v, path + "/value");
    } else if (f.kind == "ramp") {
        const json* b = find(j, "bottom");
        const json* t = find(j, "top");
        if (!b || !t) throw ConfigError(path, "ramp needs 'bottom' and 'top'");
        f.bottom = get_number(*b, path + "/bottom");
        f.top = get_number(*t, path + "/top");
    } else if (f.kind == "values") {
        const json* v = find(j, "values");
        if (!v || !v->is_array()) throw ConfigError(path + "/values", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            f.values.push_back(get_number((*v)[i], path + "/values/" + std::to_string(i)));
        }
    } else if (f.kind == "file") {
        const json* p = find(j, "path");
        if (!p) throw ConfigError(path + "/path", "missing");
        f.path = get_string(*p, path + "/path");
    } else {
        throw ConfigError(path + "/type", "unknown field type '" + f.kind + "' (constant, ramp, values, file)");
    }
    return f;
}

json series_to_json(const TimeSeries& ts, bool constant) {
    if (constant) return ts.points().front().second;
    json out = json::array();
    for (const auto& [t, v] : ts.points()) out.push_back({t, v});
    return out;
}

bool is_constant_series(const TimeSeries& ts) { return ts.covers(-1e300, 1e300); }

json field_to_json(const FieldSpec& f) {
    if (f.kind == "constant") return {{"type", "constant"}, {"value", f.value}};
    if (f.kind == "ramp") return {{"type", "ramp"}, {"bottom", f.bottom}, {"top", f.top}};
    if (f.kind == "values") return {{"type", "values"}, {"values", f.values}};
    return {{"type", "file"}, {"path", f.path}};
}

json piecewise_to_json(const PiecewisePolynomial& p) {
    json pieces = json::array();
    for (const auto& piece : p.pieces()) pieces.push_back(piece.coeffs());
    return {{"breaks", std::vector<double>(p.breaks().begin(), p.breaks().end())}, {"pieces", pieces}};
}

std::vector<std::string> sides_for(int dimension) {
    if (dimension == 1) return {"bottom", "top"};
    return {"bottom", "top", "left", "right"};
}

template <class T>
const T& side_value(const std::map<std::string, T>& table, const std::string& side, const std::string& path) {
    if (auto it = table.find(side); it != table.end()) return it->second;
    if (auto it = table.find("all"); it != table.end()) return it->second;
    throw ConfigError(path, "no value for boundary side '" + side + "' (give it or 'all')");
}

}  // namespace

int SimConfig::steps() const { return static_cast<int>(std::llround(T / tau)); }

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open configuration file");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
    }
    return parse_config_json(j, path.parent_path());
}

SimConfig parse_config_json(const json& j, const std::filesystem::path& base_dir) {
    SimConfig cfg;
    cfg.base_dir = base_dir;
    reject_unknown(j, "", {"grid", "material", "constants", "elasticity", "time", "truncation", "initial", "boundary",
                           "solver", "output", "diagnostics", "seed"});
    if (const json* g = find(j, "grid")) {
        reject_unknown(*g, "/grid", {"dimension", "cells", "nx", "nz", "width", "height"});
        if (const json* v = find(*g, "dimension")) cfg.dimension = get_int(*v, "/grid/dimension");
        if (cfg.dimension != 1 && cfg.dimension != 2) throw ConfigError("/grid/dimension", "must be 1 or 2");
        if (const json* v = find(*g, "cells")) cfg.nz = get_int(*v, "/grid/cells");
        if (const json* v = find(*g, "nz")) cfg.nz = get_int(*v, "/grid/nz");
        if (const json* v = find(*g, "nx")) cfg.nx = get_int(*v, "/grid/nx");
        if (const json* v = find(*g, "width")) cfg.width = get_number(*v, "/grid/width");
        if (const json* v = find(*g, "height")) cfg.height = get_number(*v, "/grid/height");
        if (cfg.dimension == 1) cfg.nx = 1;
    }
    if (const json* m = find(j, "material")) {
        if (m->is_string()) {
            cfg.material = m->get<std::string>();
        } else {
            reject_unknown(*m, "/material", {"name", "overrides", "caloric"});
            if (const json* v = find(*m, "name")) cfg.material = get_string(*v, "/material/name");
            if (const json* v = find(*m, "caloric")) {
                const auto mode = get_string(*v, "/material/caloric");
                if (mode == "closed_form") cfg.caloric = CaloricMode::ClosedForm;
                else if (mode == "quadrature") cfg.caloric = CaloricMode::Quadrature;
                else throw ConfigError("/material/caloric", "expected 'closed_form' or 'quadrature'");
            }
            if (const json* o = find(*m, "overrides")) {
                reject_unknown(*o, "/material/overrides", {"c", "lambda", "kappa", "c1", "gamma"});
                if (const json* v = find(*o, "c")) cfg.overrides.c = parse_polynomial(*v, "/material/overrides/c");
                if (const json* v = find(*o, "lambda")) {
                    cfg.overrides.lambda = parse_polynomial(*v, "/material/overrides/lambda");
                }
                if (const json* v = find(*o, "kappa")) {
                    cfg.overrides.kappa = parse_polynomial(*v, "/material/overrides/kappa");
                }
                if (const json* v = find(*o, "c1")) cfg.overrides.c1 = parse_piecewise(*v, "/material/overrides/c1");
                if (const json* v = find(*o, "gamma")) {
                    cfg.overrides.gamma = parse_piecewise(*v, "/material/overrides/gamma");
                }
            }
        }
        if (cfg.material != "reference" && cfg.material != "convex-blend") {
            throw ConfigError("/material/name", "unknown material '" + cfg.material + "'");
        }
    }
    if (const json* c = find(j, "constants")) {
        reject_unknown(*c, "/constants", {"g", "zeta_gamma", "k_gamma", "theta_lower", "theta_upper", "latent_heat",
                                          "theta_c", "alpha", "beta", "nu", "rho0"});
        auto& k = cfg.constants;
        const std::pair<const char*, double*> fields[] = {
            {"g", &k.g}, {"zeta_gamma", &k.zeta_gamma}, {"k_gamma", &k.k_gamma}, {"theta_lower", &k.theta_lower},
            {"theta_upper", &k.theta_upper}, {"latent_heat", &k.latent_heat}, {"theta_c", &k.theta_c},
            {"alpha", &k.alpha}, {"beta", &k.beta}, {"nu", &k.nu}, {"rho0", &k.rho0}};
        for (const auto& [name, ptr] : fields) {
            if (const json* v = find(*c, name)) *ptr = get_number(*v, std::string("/constants/") + name);
        }
    }
    if (const json* e = find(j, "elasticity")) {
        reject_unknown(*e, "/elasticity", {"compliance"});
        const json* c = find(*e, "compliance");
        if (!c || !c->is_object()) throw ConfigError("/elasticity/compliance", "expected an object side -> value");
        for (const auto& [side, v] : c->items()) {
            cfg.compliance[side] = get_number(v, "/elasticity/compliance/" + side);
        }
    }
    if (const json* t = find(j, "time")) {
        reject_unknown(*t, "/time", {"tau", "T"});
        if (const json* v = find(*t, "tau")) cfg.tau = get_number(*v, "/time/tau");
        if (const json* v = find(*t, "T")) cfg.T = get_number(*v, "/time/T");
    }
    if (const json* r = find(j, "truncation")) {
        reject_unknown(*r, "/truncation", {"R", "c_R"});
        if (const json* v = find(*r, "R")) cfg.R = get_number(*v, "/truncation/R");
        if (const json* v = find(*r, "c_R"); v && !v->is_null()) cfg.c_R = get_number(*v, "/truncation/c_R");
    }
    if (const json* i = find(j, "initial")) {
        reject_unknown(*i, "/initial", {"theta", "U", "chi"});
        if (const json* v = find(*i, "theta")) cfg.theta0 = parse_field(*v, "/initial/theta");
        if (const json* v = find(*i, "U")) cfg.U0 = parse_field(*v, "/initial/U");
        if (const json* v = find(*i, "chi")) cfg.chi0 = parse_field(*v, "/initial/chi");
    }
    if (const json* b = find(j, "boundary")) {
        reject_unknown(*b, "/boundary", {"h", "theta_gamma", "P0"});
        if (const json* h = find(*b, "h")) {
            cfg.heat_transfer.clear();
            if (h->is_number()) {
                cfg.heat_transfer["all"] = get_number(*h, "/boundary/h");
            } else {
                if (!h->is_object()) throw ConfigError("/boundary/h", "expected a number or side -> number");
                for (const auto& [side, v] : h->items()) cfg.heat_transfer[side] = get_number(v, "/boundary/h/" + side);
            }
        }
        if (const json* tg = find(*b, "theta_gamma")) {
            cfg.theta_gamma.clear();
            if (tg->is_object()) {
                for (const auto& [side, v] : tg->items()) {
                    cfg.theta_gamma[side] = parse_series(v, "/boundary/theta_gamma/" + side);
                }
            } else {
                cfg.theta_gamma["all"] = parse_series(*tg, "/boundary/theta_gamma");
            }
        }
        if (const json* p = find(*b, "P0")) cfg.p0 = parse_series(*p, "/boundary/P0");
    }
    if (const json* s = find(j, "solver")) {
        reject_unknown(*s, "/solver", {"newton_tol", "max_newton", "implicit_volume"});
        if (const json* v = find(*s, "newton_tol")) cfg.newton_tol = get_number(*v, "/solver/newton_tol");
        if (const json* v = find(*s, "max_newton")) cfg.max_newton = get_int(*v, "/solver/max_newton");
        if (const json* v = find(*s, "implicit_volume")) cfg.implicit_volume = get_bool(*v, "/solver/implicit_volume");
    }
    if (const json* o = find(j, "output")) {
        reject_unknown(*o, "/output", {"directory", "snapshots", "plots"});
        if (const json* v = find(*o, "directory")) cfg.output_dir = get_string(*v, "/output/directory");
        if (const json* v = find(*o, "snapshots")) cfg.snapshots = get_int(*v, "/output/snapshots");
        if (const json* v = find(*o, "plots")) cfg.plots = get_bool(*v, "/output/plots");
    }
    if (const json* d = find(j, "diagnostics")) {
        reject_unknown(*d, "/diagnostics", {"energy", "entropy", "bounds"});
        if (const json* v = find(*d, "energy")) cfg.energy_ledger = get_bool(*v, "/diagnostics/energy");
        if (const json* v = find(*d, "entropy")) cfg.entropy_ledger = get_bool(*v, "/diagnostics/entropy");
        if (const json* v = find(*d, "bounds")) cfg.bounds_monitor = get_bool(*v, "/diagnostics/bounds");
    }
    if (const json* s = find(j, "seed")) {
        if (!s->is_number_unsigned()) throw ConfigError("/seed", "expected a non-negative integer");
        cfg.seed = s->get<std::uint64_t>();
    }
    validate_config(cfg);
    return cfg;
}

json to_json(const SimConfig& cfg) {
    json j;
    j["grid"] = {{"dimension", cfg.dimension}, {"nx", cfg.nx}, {"nz", cfg.nz}, {"width", cfg.width},
                 {"height", cfg.height}};
    json overrides = json::object();
    if (cfg.overrides.c) overrides["c"] = cfg.overrides.c->coeffs();
    if (cfg.overrides.lambda) overrides["lambda"] = cfg.overrides.lambda->coeffs();
    if (cfg.overrides.kappa) overrides["kappa"] = cfg.overrides.kappa->coeffs();
    if (cfg.overrides.c1) overrides["c1"] = piecewise_to_json(*cfg.overrides.c1);
    if (cfg.overrides.gamma) overrides["gamma"] = piecewise_to_json(*cfg.overrides.gamma);
    j["material"] = {{"name", cfg.material},
                     {"caloric", cfg.caloric == CaloricMode::ClosedForm ? "closed_form" : "quadrature"},
                     {"overrides", overrides}};
    const auto& k = cfg.constants;
    j["constants"] = {{"g", k.g},
                      {"zeta_gamma", k.zeta_gamma},
                      {"k_gamma", k.k_gamma},
                      {"theta_lower", k.theta_lower},
                      {"theta_upper", k.theta_upper}};
    if (!cfg.compliance.empty()) j["elasticity"] = {{"compliance", cfg.compliance}};
    j["time"] = {{"tau", cfg.tau}, {"T", cfg.T}};
    j["truncation"] = {{"R", cfg.R}, {"c_R", cfg.c_R ? json(*cfg.c_R) : json(nullptr)}};
    j["initial"] = {{"theta", field_to_json(cfg.theta0)}, {"U", field_to_json(cfg.U0)}, {"chi", field_to_json(cfg.chi0)}};
    json tg = json::object();
    for (const auto& [side, ts] : cfg.theta_gamma) tg[side] = series_to_json(ts, is_constant_series(ts));
    j["boundary"] = {{"h", cfg.heat_transfer}, {"theta_gamma", tg}, {"P0", series_to_json(cfg.p0, is_constant_series(cfg.p0))}};
    j["solver"] = {{"newton_tol", cfg.newton_tol}, {"max_newton", cfg.max_newton}, {"implicit_volume", cfg.implicit_volume}};
    j["output"] = {{"directory", cfg.output_dir}, {"snapshots", cfg.snapshots}, {"plots", cfg.plots}};
    j["diagnostics"] = {{"energy", cfg.energy_ledger}, {"entropy", cfg.entropy_ledger}, {"bounds", cfg.bounds_monitor}};
    j["seed"] = cfg.seed;
    return j;
}

json material_to_json(const MaterialModel& model) {
    const auto& k = model.constants();
    return {{"name", model.name()},
            {"c", model.c_poly().coeffs()},
            {"lambda", model.lambda_poly().coeffs()},
            {"kappa", model.kappa_poly().coeffs()},
            {"c1", piecewise_to_json(model.c1_pieces())},
            {"gamma", piecewise_to_json(model.gamma_pieces())},
            {"caloric", model.caloric_mode() == CaloricMode::ClosedForm ? "closed_form" : "quadrature"},
            {"constants",
             {{"g", k.g}, {"zeta_gamma", k.zeta_gamma}, {"k_gamma", k.k_gamma}, {"theta_lower", k.theta_lower},
              {"theta_upper", k.theta_upper}}}};
}

Grid build_grid(const SimConfig& cfg) {
    if (cfg.dimension == 1) return Grid::slab(cfg.nz, cfg.height);
    return Grid::rectangle(cfg.nx, cfg.nz, cfg.width, cfg.height);
}

MaterialModel build_material(const SimConfig& cfg) {
    ModelConstants k = cfg.constants;
    if (!cfg.compliance.empty()) {
        const Grid grid = build_grid(cfg);
        std::vector<ElasticSample> samples;
        for (const auto& b : grid.boundary()) {
            const double a = side_value(cfg.compliance, side_name(b.side), "/elasticity/compliance");
            samples.push_back({a, b.x3, b.measure});
        }
        try {
            const auto el = kgamma_from_elasticity(samples);
            k.k_gamma = el.k_gamma;
            k.zeta_gamma = el.zeta_gamma;
        } catch (const InputError& e) {
            throw ConfigError("/elasticity/compliance", e.what());
        }
    }
    const MaterialModel base = MaterialModel::builtin(cfg.material, k);
    const auto& o = cfg.overrides;
    return MaterialModel(cfg.material, o.c.value_or(base.c_poly()), o.c1.value_or(base.c1_pieces()),
                         o.lambda.value_or(base.lambda_poly()), o.kappa.value_or(base.kappa_poly()),
                         o.gamma.value_or(base.gamma_pieces()), k, cfg.caloric);
}

BoundaryData build_boundary(const SimConfig& cfg, const Grid& grid) {
    BoundaryData data;
    for (const auto& b : grid.boundary()) {
        const std::string side = side_name(b.side);
        data.heat_transfer.push_back(side_value(cfg.heat_transfer, side, "/boundary/h"));
        data.theta_gamma.push_back(side_value(cfg.theta_gamma, side, "/boundary/theta_gamma"));
    }
    data.p0 = cfg.p0;
    return data;
}

StepperConfig build_stepper_config(const SimConfig& cfg) {
    StepperConfig sc;
    sc.tau = cfg.tau;
    sc.R = cfg.R;
    sc.c_R_override = cfg.c_R;
    sc.newton_tol = cfg.newton_tol;
    sc.max_newton = cfg.max_newton;
    sc.implicit_volume = cfg.implicit_volume;
    return sc;
}

Field build_field(const FieldSpec& spec, const Grid& grid, const std::filesystem::path& base_dir,
                  const std::string& where) {
    const auto n = static_cast<std::size_t>(grid.cell_count());
    Field out(n);
    if (spec.kind == "constant") {
        out.assign(n, spec.value);
    } else if (spec.kind == "ramp") {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = spec.bottom + (spec.top - spec.bottom) * grid.x3()[i] / grid.height();
        }
    } else if (spec.kind == "values") {
        if (spec.values.size() != n) throw ConfigError(where + "/values", "needs one value per cell");
        out = spec.values;
    } else {
        const auto path = base_dir / spec.path;
        std::ifstream in(path);
        if (!in) throw ConfigError(where + "/path", "cannot open '" + path.string() + "'");
        out.clear();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto comma = line.find_last_of(',');
            const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                if (out.empty()) continue;  // header row
                throw ConfigError(where + "/path", "unreadable value '" + cell + "'");
            }
        }
        if (out.size() != n) throw ConfigError(where + "/path", "file must hold one value per cell");
    }
    return out;
}

double minimal_truncation_level(const MaterialModel& model) {
    const auto& b = model.bounds();
    return std::max({b.c_low, b.c1_low, b.cprime_low, b.cprime_high, b.lambda_low, b.lambda_high,
                     b.lambda_prime_max, b.kappa_low, b.gamma_low});
}

void validate_config(const SimConfig& cfg) {
    if (cfg.nz < 1 || cfg.nx < 1) throw ConfigError("/grid", "cell counts must be >= 1");
    if (!(cfg.height > 0.0) || !(cfg.width > 0.0)) throw ConfigError("/grid", "extents must be positive");
    if (!(cfg.tau > 0.0)) throw ConfigError("/time/tau", "tau > 0 required");
    if (!(cfg.T >= cfg.tau)) throw ConfigError("/time/T", "T >= tau required");
    if (std::abs(cfg.T / cfg.tau - std::round(cfg.T / cfg.tau)) > 1e-9 * (cfg.T / cfg.tau)) {
        throw ConfigError("/time/T", "T must be an integer multiple of tau");
    }
    if (!cfg.constants.normalized()) {
        throw ConfigError("/constants", "the normalized constants (latent_heat=2, theta_c=alpha=beta=nu=rho0=1) are fixed");
    }
    const auto& k = cfg.constants;
    if (!(k.theta_lower > 0.0)) throw ConfigError("/constants/theta_lower", "0 < theta_* required");
    if (!(k.theta_upper >= k.theta_lower)) throw ConfigError("/constants/theta_upper", "theta_* <= theta^* required");
    if (k.k_gamma < 0.0) throw ConfigError("/constants/k_gamma", "K_Gamma >= 0 required");
    if (cfg.snapshots < 1) throw ConfigError("/output/snapshots", "at least one snapshot required");
    if (!(cfg.newton_tol > 0.0)) throw ConfigError("/solver/newton_tol", "must be positive");
    if (cfg.max_newton < 1) throw ConfigError("/solver/max_newton", "must be >= 1");

    MaterialModel model = [&] {
        try {
            return build_material(cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const InputError& e) {
            throw ConfigError("/material", e.what());
        }
    }();
    const double r0 = minimal_truncation_level(model);
    if (!(cfg.R > r0)) {
        std::ostringstream os;
        os << "R > R0 = " << r0 << " required (R must exceed every structural constant of the material)";
        throw ConfigError("/truncation/R", os.str());
    }
    if (cfg.c_R && *cfg.c_R < 0.0) throw ConfigError("/truncation/c_R", "c_R >= 0 required");

    const Grid grid = build_grid(cfg);
    const auto theta0 = build_field(cfg.theta0, grid, cfg.base_dir, "/initial/theta");
    const auto U0 = build_field(cfg.U0, grid, cfg.base_dir, "/initial/U");
    const auto chi0 = build_field(cfg.chi0, grid, cfg.base_dir, "/initial/chi");
    constexpr double slack = 1e-12;
    for (double t : theta0) {
        if (!(t >= k.theta_lower - slack && t <= k.theta_upper + slack)) {
            std::ostringstream os;
            os << "theta_* <= theta0 <= theta^* violated (value " << t << ", bounds [" << k.theta_lower << ", "
               << k.theta_upper << "])";
            throw ConfigError("/initial/theta", os.str());
        }
    }
    for (double u : U0) {
        if (!std::isfinite(u)) throw ConfigError("/initial/U", "U0 must be finite");
    }
    for (double c : chi0) {
        if (!(c >= 0.0 && c <= 1.0)) {
            std::ostringstream os;
            os << "0 ≤ χ⁰ ≤ 1 violated (value " << c << ")";
            throw ConfigError("/initial/chi", os.str());
        }
    }
    for (const auto& side : sides_for(cfg.dimension)) {
        const auto& ts = side_value(cfg.theta_gamma, side, "/boundary/theta_gamma");
        const std::string where = "/boundary/theta_gamma/" + (cfg.theta_gamma.count(side) ? side : std::string("all"));
        if (!ts.covers(0.0, cfg.T)) throw ConfigError(where, "table must cover [0, T]");
        if (ts.min_value() < k.theta_lower - slack || ts.max_value() > k.theta_upper + slack) {
            throw ConfigError(where, "theta_* <= theta_Gamma <= theta^* violated");
        }
        const double h = side_value(cfg.heat_transfer, side, "/boundary/h");
        if (!(h >= 0.0)) throw ConfigError("/boundary/h/" + side, "h >= 0 required");
    }
    if (!cfg.p0.covers(0.0, cfg.T)) throw ConfigError("/boundary/P0", "table must cover [0, T]");
    for (const auto& [side, v] : cfg.compliance) {
        if (side != "all") {
            try {
                side_from_name(side);
            } catch (const InputError&) {
                throw ConfigError("/elasticity/compliance/" + side, "unknown side");
            }
        }
        if (!(v > 0.0)) throw ConfigError("/elasticity/compliance/" + side, "compliance must be positive");
    }
}

std::string fingerprint(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace icesim
