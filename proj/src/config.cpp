#include "landau/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "landau/snapshot_io.hpp"

namespace landau {

PhaseGrid RunConfig::grid() const {
    return {SpatialGrid(dim_x, n_x, l_x), VelocityGrid(n_v, l_v)};
}

DistributionField RunConfig::initial_data() const {
    if (init == InitialDataKind::file) return read_snapshot(init_file);
    PhaseGrid g = grid();
    if (init == InitialDataKind::maxwellian) return make_maxwellian(g, maxwell_c1, maxwell_c2);

    // bump_sum: isotropic Gaussian bumps spread on a circle in the v1-v2
    // plane, x-uniform up to an optional cosine modulation along x_1
    DistributionField f(g);
    const auto& vg = g.velocity;
    std::vector<double> slice(vg.size(), 0.0);
    for (int b = 0; b < bump_count; ++b) {
        double angle = 2.0 * M_PI * b / bump_count;
        Vec3 center{bump_radius * std::cos(angle), bump_radius * std::sin(angle), 0.0};
        for (std::size_t iv = 0; iv < vg.size(); ++iv) {
            Vec3 d = vg.velocity(iv) - center;
            slice[iv] += bump_amp * std::exp(-norm2(d) / (bump_width * bump_width));
        }
    }
    for (std::size_t ix = 0; ix < g.space.cells(); ++ix) {
        double mod = 1.0;
        if (dim_x >= 1 && bump_x_mod != 0.0) {
            Vec3 x = g.space.position(ix);
            mod = 1.0 + bump_x_mod * std::cos(2.0 * M_PI * x.x / l_x);
        }
        auto dst = f.slice(ix);
        for (std::size_t iv = 0; iv < vg.size(); ++iv) dst[iv] = mod * slice[iv];
    }
    return f;
}

namespace {

struct Parser {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    template <typename T>
    void number(const std::string& key, T& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            std::size_t pos = 0;
            double v = it->second == "inf" ? std::numeric_limits<double>::infinity()
                                           : std::stod(it->second, &pos);
            if (it->second != "inf" && pos != it->second.size()) throw std::invalid_argument("");
            dst = static_cast<T>(v);
        } catch (...) {
            errors.push_back(key + ": not a number ('" + it->second + "')");
        }
    }

    void boolean(const std::string& key, bool& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        if (it->second == "true" || it->second == "1")
            dst = true;
        else if (it->second == "false" || it->second == "0")
            dst = false;
        else
            errors.push_back(key + ": expected true/false");
    }

    void choice(const std::string& key, const std::map<std::string, int>& options, int& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        auto opt = options.find(it->second);
        if (opt == options.end()) {
            std::string valid;
            for (const auto& [name, _] : options) valid += (valid.empty() ? "" : "|") + name;
            errors.push_back(key + ": expected one of " + valid);
        } else {
            dst = opt->second;
        }
    }
};

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "gamma", "t_end", "dt", "splitting", "collision_form", "collision_integrator",
        "k_decay", "psi_threshold", "psi_p", "psi_tilde_ell", "mollify_eps", "positivity",
        "diag_every", "auto_halve_dt", "diag_ellipticity", "diag_holder", "holder_alpha",
        "holder_m", "holder_pairs", "seed", "dim_x", "n_x", "l_x", "n_v", "l_v", "init",
        "maxwell_c1", "maxwell_c2", "bump_count", "bump_amp", "bump_width", "bump_radius",
        "bump_x_mod", "out_dir"};
    return keys;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    Parser p;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            p.errors.push_back("unknown key '" + key + "'");
            continue;
        }
        if (p.kv.count(key)) p.errors.push_back("duplicate key '" + key + "'");
        p.kv[key] = value;
    }

    RunConfig cfg;
    if (!p.has("gamma")) p.errors.push_back("gamma is required");
    if (!p.has("t_end")) p.errors.push_back("t_end is required");
    p.number("gamma", cfg.solver.gamma);
    p.number("t_end", cfg.solver.t_end);
    p.number("dt", cfg.solver.dt);
    p.number("k_decay", cfg.solver.k_decay);
    p.number("psi_threshold", cfg.solver.psi_threshold);
    p.number("psi_p", cfg.solver.psi_p);
    p.number("psi_tilde_ell", cfg.solver.psi_tilde_ell);
    p.number("mollify_eps", cfg.solver.mollify_eps);
    p.number("diag_every", cfg.solver.diag_every);
    p.number("holder_alpha", cfg.solver.holder_alpha);
    p.number("holder_m", cfg.solver.holder_m);
    p.number("holder_pairs", cfg.solver.holder_pairs);
    p.number("seed", cfg.solver.seed);
    p.boolean("auto_halve_dt", cfg.solver.auto_halve_dt);
    p.boolean("diag_ellipticity", cfg.solver.diag_ellipticity);
    p.boolean("diag_holder", cfg.solver.diag_holder);

    int splitting = static_cast<int>(cfg.solver.splitting);
    p.choice("splitting", {{"lie", 0}, {"strang", 1}}, splitting);
    cfg.solver.splitting = splitting == 0 ? SplittingScheme::lie : SplittingScheme::strang;
    int form = static_cast<int>(cfg.solver.collision_form);
    p.choice("collision_form", {{"divergence", 0}, {"nondivergence", 1}}, form);
    cfg.solver.collision_form = form == 0 ? CollisionForm::divergence : CollisionForm::nondivergence;
    int integ = static_cast<int>(cfg.solver.collision_integrator);
    p.choice("collision_integrator",
             {{"explicit-euler", 0}, {"semi-implicit-diffusion", 1}, {"heun", 2}}, integ);
    cfg.solver.collision_integrator = static_cast<CollisionIntegrator>(integ);
    int positivity = static_cast<int>(cfg.solver.positivity);
    p.choice("positivity", {{"clamp", 0}, {"off", 1}}, positivity);
    cfg.solver.positivity = positivity == 0 ? PositivityMode::clamp : PositivityMode::off;

    p.number("dim_x", cfg.dim_x);
    p.number("n_x", cfg.n_x);
    p.number("l_x", cfg.l_x);
    p.number("n_v", cfg.n_v);
    p.number("l_v", cfg.l_v);
    p.number("maxwell_c1", cfg.maxwell_c1);
    p.number("maxwell_c2", cfg.maxwell_c2);
    p.number("bump_count", cfg.bump_count);
    p.number("bump_amp", cfg.bump_amp);
    p.number("bump_width", cfg.bump_width);
    p.number("bump_radius", cfg.bump_radius);
    p.number("bump_x_mod", cfg.bump_x_mod);
    if (p.has("out_dir")) cfg.out_dir = p.kv["out_dir"];
    if (p.has("init")) {
        std::string v = p.kv["init"];
        if (v == "maxwellian") {
            cfg.init = InitialDataKind::maxwellian;
        } else if (v == "bump_sum") {
            cfg.init = InitialDataKind::bump_sum;
        } else if (v.rfind("file:", 0) == 0) {
            cfg.init = InitialDataKind::file;
            cfg.init_file = v.substr(5);
            if (cfg.init_file.empty()) p.errors.push_back("init: empty file path");
        } else {
            p.errors.push_back("init: expected maxwellian | bump_sum | file:PATH");
        }
    }

    // environment override
    if (const char* env_seed = std::getenv("LANDAU_SEED")) {
        char* end = nullptr;
        unsigned long long s = std::strtoull(env_seed, &end, 10);
        if (end && *end == '\0') cfg.solver.seed = s;
    }

    // structural validation (after parsing so every violation is collected)
    if (p.errors.empty() || (p.has("gamma") && p.has("t_end"))) {
        for (const auto& err : cfg.solver.validate()) p.errors.push_back(err);
        if (cfg.dim_x != 0 && cfg.dim_x != 1 && cfg.dim_x != 3)
            p.errors.push_back("dim_x must be 0, 1 or 3");
        if (cfg.n_v < 4) p.errors.push_back("n_v must be >= 4");
        if (!(cfg.l_v > 0)) p.errors.push_back("l_v must be > 0");
        if (cfg.dim_x > 0 && cfg.n_x < 4) p.errors.push_back("n_x must be >= 4 when dim_x > 0");
        if (!(cfg.l_x > 0)) p.errors.push_back("l_x must be > 0");
        if (cfg.init == InitialDataKind::maxwellian && !(cfg.maxwell_c1 > 0 && cfg.maxwell_c2 > 0))
            p.errors.push_back("maxwellian initial data needs maxwell_c1, maxwell_c2 > 0");
        if (cfg.init == InitialDataKind::bump_sum && cfg.bump_count < 1)
            p.errors.push_back("bump_count must be >= 1");
    }

    result.errors = p.errors;
    result.ok = p.errors.empty();
    result.config = cfg;
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        ParseResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

}  // namespace landau
