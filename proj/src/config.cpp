#include "mfg/config.hpp"

#include "mfg/error.hpp"
#include "mfg/io.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mfg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::vector<std::string> kKeys = {
    "run.label",        "run.out",
    "grid.x_max",       "grid.nx",          "grid.T",          "grid.nt",        "grid.tail_tol",
    "levy.kind",        "levy.family",      "levy.intensity",  "levy.lo",        "levy.hi",
    "levy.mean",        "levy.std",         "levy.rate",       "levy.c",         "levy.alpha",
    "levy.theta",       "levy.cutoff",
    "demand.model",     "demand.rho",       "demand.eps0",     "demand.eps_shape", "demand.t_knee",
    "demand.constant_h",
    "hjb.sigma",        "hjb.r",            "hjb.uT",          "hjb.uT_scale",   "hjb.uT_length",
    "hjb.compat_tol",   "hjb.inner_loop",
    "fp.m0",            "fp.m0_mean",       "fp.m0_std",       "fp.m0_a",        "fp.m0_b",
    "fp.m0_file",       "fp.drift_sign",
    "coupler.damping",  "coupler.tol",      "coupler.max_iter", "coupler.scheme", "coupler.lambda_ladder",
    "coupler.init",
    "particle.n",       "particle.substeps", "particle.seed",  "particle.bridge", "particle.threads",
    "verify.C",
};

EpsShape parse_shape(const std::string& s) {
    if (s == "linear_to_zero") return EpsShape::linear_to_zero;
    if (s == "constant_then_ramp") return EpsShape::constant_then_ramp;
    if (s == "constant") return EpsShape::constant;
    throw Error(ErrorKind::parameter, "unknown eps shape '" + s + "'");
}

Profile normalised(const Grid& grid, Profile m) {
    m.front() = 0.0;
    m.back() = 0.0;
    const double mass = integrate(grid, m);
    if (!(mass > 0.0)) throw Error(ErrorKind::parameter, "initial density has no mass on the grid");
    for (double& v : m) v /= mass;
    return m;
}

} // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& origin) {
    ConfigDocument doc;
    doc.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        auto bad = [&](const std::string& msg) {
            throw Error(ErrorKind::config, origin + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (eq == std::string::npos) bad("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad("missing key");
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) bad("unknown key '" + key + "'");
        if (doc.entries_.count(key)) {
            bad("duplicate key '" + key + "' (first set on line " + std::to_string(doc.entries_[key].line) + ")");
        }
        doc.entries_[key] = {value, lineno};
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, path.string() + ": cannot open config");
    std::stringstream ss;
    ss << in.rdbuf();
    ConfigDocument doc = parse(ss.str(), path.string());
    doc.dir_ = path.parent_path();
    return doc;
}

void ConfigDocument::fail(const std::string& key, const std::string& msg) const {
    const std::size_t l = line(key);
    if (l == 0) throw Error(ErrorKind::config, origin_ + ": " + key + ": " + msg);
    throw Error(ErrorKind::config, origin_ + ":" + std::to_string(l) + ": " + key + ": " + msg);
}

std::string ConfigDocument::get(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double ConfigDocument::number(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        fail(key, "expected a number, got '" + v + "'");
    }
    if (used != v.size()) fail(key, "expected a number, got '" + v + "'");
    return out;
}

std::size_t ConfigDocument::count(const std::string& key, std::size_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); })) {
        fail(key, "expected a non-negative integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(std::stoull(v));
}

bool ConfigDocument::flag(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    fail(key, "expected true or false, got '" + v + "'");
}

std::vector<double> ConfigDocument::list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) fail(key, "bad list entry '" + item + "'");
    }
    if (out.empty()) fail(key, "empty list");
    return out;
}

std::size_t ConfigDocument::line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
        throw Error(ErrorKind::config, origin_ + ": unknown key '" + key + "'");
    }
    auto& e = entries_[key];
    e.value = value;
}

std::string ConfigDocument::text() const {
    std::ostringstream os;
    for (const auto& [k, e] : entries_) os << k << " = " << e.value << '\n';
    return os.str();
}

std::vector<std::string> ConfigDocument::keys() const {
    std::vector<std::string> out;
    for (const auto& kv : entries_) out.push_back(kv.first);
    return out;
}

const std::vector<std::string>& known_keys() { return kKeys; }

std::string resolve_key(const std::string& name) {
    if (std::find(kKeys.begin(), kKeys.end(), name) != kKeys.end()) return name;
    std::string found;
    for (const std::string& k : kKeys) {
        if (k.size() > name.size() && k.compare(k.size() - name.size(), name.size(), name) == 0 &&
            k[k.size() - name.size() - 1] == '.') {
            if (!found.empty()) throw Error(ErrorKind::config, "ambiguous parameter '" + name + "'");
            found = k;
        }
    }
    if (found.empty()) throw Error(ErrorKind::config, "unknown parameter '" + name + "'");
    return found;
}

RunConfig build_run_config(const ConfigDocument& doc) {
    RunConfig rc;
    rc.document = doc;
    rc.label = doc.get("run.label", "run");
    rc.out = doc.get("run.out", "out/" + rc.label);

    // Re-anchor library errors on the key that produced them.
    auto guarded = [&](const std::string& key, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::config) throw;
            doc.fail(key, e.what());
        }
    };

    Grid grid = guarded("grid.nx", [&] {
        return Grid(doc.number("grid.x_max", 6.0), doc.count("grid.nx", 199), doc.number("grid.T", 1.0),
                    doc.count("grid.nt", 100));
    });
    rc.problem.grid = grid;

    // jumps
    const std::string kind = doc.get("levy.kind", "none");
    LevyMeasureSpec levy;
    if (kind == "none") {
        levy = LevyMeasureSpec::none();
    } else if (kind == "compound_poisson") {
        const std::string family = doc.get("levy.family", "uniform");
        const double intensity = doc.number("levy.intensity", 0.0);
        const double lo = doc.number("levy.lo", -1.0);
        const double hi = doc.number("levy.hi", 1.0);
        if (family == "uniform") {
            levy = LevyMeasureSpec::uniform(intensity, lo, hi);
        } else if (family == "truncated_normal") {
            levy = LevyMeasureSpec::truncated_normal(intensity, doc.number("levy.mean", 0.0),
                                                     doc.number("levy.std", 1.0), lo, hi);
        } else if (family == "two_sided_exponential") {
            levy = LevyMeasureSpec::two_sided_exponential(intensity, doc.number("levy.rate", 1.0), lo, hi);
        } else {
            doc.fail("levy.family", "unknown jump family '" + family + "'");
        }
    } else if (kind == "singular") {
        levy = LevyMeasureSpec::tempered_stable(doc.number("levy.c", 0.0), doc.number("levy.alpha", 0.5),
                                                doc.number("levy.theta", 1.0));
    } else {
        doc.fail("levy.kind", "unknown jump kind '" + kind + "'");
    }
    if (doc.has("levy.cutoff")) levy.cutoff = doc.number("levy.cutoff", 0.5);
    rc.levy = levy;
    rc.problem.jumps = guarded(doc.has("levy.kind") ? "levy.kind" : "levy.cutoff",
                               [&] { return build_operator(grid, levy); });
    guarded("grid.nt", [&] {
        check_jump_cfl(grid, rc.problem.jumps);
        return 0;
    });

    // demand
    EpsSchedule eps;
    eps.eps0 = doc.number("demand.eps0", 0.0);
    eps.horizon = grid.horizon;
    eps.t_knee = doc.number("demand.t_knee", 0.5 * grid.horizon);
    const std::string model = doc.get("demand.model", "bertrand_exp");
    eps.shape = guarded("demand.eps_shape", [&] {
        return parse_shape(doc.get("demand.eps_shape", model == "linear_quadratic" ? "constant" : "linear_to_zero"));
    });
    rc.problem.model = guarded("demand.model", [&] {
        switch (parse_variant(model)) {
            case Variant::bertrand_exp: return DemandModel::bertrand_exp(eps);
            case Variant::bertrand_power: return DemandModel::bertrand_power(doc.number("demand.rho", 2.0), eps);
            case Variant::cournot_power: return DemandModel::cournot_power(doc.number("demand.rho", 1.0), eps);
            case Variant::cournot_log: return DemandModel::cournot_log(eps);
            case Variant::linear_quadratic: return DemandModel::linear_quadratic(eps);
            case Variant::constant: return DemandModel::constant(doc.number("demand.constant_h", 0.0), grid.horizon);
        }
        throw Error(ErrorKind::internal, "unreachable");
    });

    // value function
    HjbConfig& hjb = rc.problem.hjb;
    hjb.sigma = doc.number("hjb.sigma", 0.5);
    if (!(hjb.sigma > 0.0)) doc.fail("hjb.sigma", "must be positive");
    hjb.r = doc.number("hjb.r", 0.05);
    hjb.compat_tol = doc.number("hjb.compat_tol", 1e-1);
    hjb.inner_loop = doc.flag("hjb.inner_loop", false);
    {
        const std::string shape = doc.get("hjb.uT", "saturating");
        const double kappa = doc.number("hjb.uT_scale", 1.0);
        const double ell = doc.number("hjb.uT_length", 1.0);
        if (!(ell > 0.0)) doc.fail("hjb.uT_length", "must be positive");
        hjb.terminal.assign(grid.nodes(), 0.0);
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double x = grid.x(i);
            if (shape == "zero") hjb.terminal[i] = 0.0;
            else if (shape == "saturating") hjb.terminal[i] = kappa * (1.0 - std::exp(-x / ell));
            else if (shape == "linear") hjb.terminal[i] = kappa * x;
            else doc.fail("hjb.uT", "unknown terminal shape '" + shape + "'");
        }
        guarded("hjb.uT", [&] {
            hjb.validate(grid);
            return 0;
        });
    }

    // initial density
    FpConfig& fp = rc.problem.fp;
    fp.sigma = hjb.sigma;
    {
        const std::string sign = doc.get("fp.drift_sign", "sde");
        if (sign == "sde") fp.sign = DriftSign::sde;
        else if (sign == "verbatim") fp.sign = DriftSign::verbatim;
        else doc.fail("fp.drift_sign", "expected sde or verbatim");

        const std::string family = doc.get("fp.m0", "truncated_normal");
        const std::string key = doc.has("fp.m0") ? "fp.m0" : "fp.m0_mean";
        if (family == "truncated_normal") {
            const double mu = doc.number("fp.m0_mean", 2.5);
            const double sd = doc.number("fp.m0_std", 0.5);
            if (!(sd > 0.0)) doc.fail("fp.m0_std", "must be positive");
            Profile m(grid.nodes());
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double z = (grid.x(i) - mu) / sd;
                m[i] = std::exp(-0.5 * z * z);
            }
            // mass of the untruncated normal on (0, inf) that falls past x_max
            const boost::math::normal_distribution<double> nd(mu, sd);
            const double inside = boost::math::cdf(nd, grid.x_max) - boost::math::cdf(nd, 0.0);
            const double tail = boost::math::cdf(boost::math::complement(nd, grid.x_max)) /
                                (inside + boost::math::cdf(boost::math::complement(nd, grid.x_max)));
            const double tail_tol = doc.number("grid.tail_tol", 1e-6);
            if (tail > tail_tol) {
                doc.fail("grid.x_max", "initial density puts mass " + std::to_string(tail) +
                                           " beyond x_max (grid.tail_tol = " + std::to_string(tail_tol) + ")");
            }
            fp.m0 = guarded(key, [&] { return normalised(grid, m); });
        } else if (family == "beta") {
            const double a = doc.number("fp.m0_a", 2.0);
            const double b = doc.number("fp.m0_b", 2.0);
            if (!(a > 1.0 && b > 1.0)) doc.fail("fp.m0_a", "beta shape parameters must exceed 1");
            Profile m(grid.nodes());
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double y = grid.x(i) / grid.x_max;
                m[i] = std::pow(y, a - 1.0) * std::pow(1.0 - y, b - 1.0);
            }
            fp.m0 = guarded(key, [&] { return normalised(grid, m); });
        } else if (family == "table") {
            if (!doc.has("fp.m0_file")) doc.fail("fp.m0", "table density needs fp.m0_file");
            std::filesystem::path file = doc.get("fp.m0_file", "");
            if (file.is_relative()) file = doc.directory() / file;
            fp.m0 = guarded("fp.m0_file", [&] { return read_profile_csv(file, grid); });
        } else {
            doc.fail("fp.m0", "unknown initial density '" + family + "'");
        }
        guarded(family == "table" ? "fp.m0_file" : key, [&] {
            fp.validate(grid);
            return 0;
        });
    }

    // outer loop
    CouplerConfig& cc = rc.coupler;
    cc.damping = doc.number("coupler.damping", 0.5);
    cc.tol = doc.number("coupler.tol", 1e-7);
    cc.max_iter = doc.count("coupler.max_iter", 500);
    cc.lambda_ladder = doc.list("coupler.lambda_ladder", {1.0});
    cc.scheme = guarded("coupler.scheme", [&] { return parse_scheme(doc.get("coupler.scheme", "picard")); });
    cc.init = guarded("coupler.init", [&] { return parse_init(doc.get("coupler.init", "propagated")); });
    guarded(doc.has("coupler.lambda_ladder") ? "coupler.lambda_ladder" : "coupler.damping", [&] {
        cc.validate();
        return 0;
    });

    ParticleConfig& pc = rc.particle;
    pc.n = doc.count("particle.n", 100000);
    pc.substeps = doc.count("particle.substeps", 4);
    pc.seed = doc.count("particle.seed", 1);
    pc.bridge = doc.flag("particle.bridge", true);
    pc.threads = doc.count("particle.threads", 0);
    guarded("particle.n", [&] {
        pc.validate();
        return 0;
    });

    rc.verify_C = doc.number("verify.C", 10.0);
    if (!(rc.verify_C > 0.0)) doc.fail("verify.C", "must be positive");

    rc.compat_residual = check_compatibility(grid, hjb, rc.problem.jumps, rc.problem.model);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return build_run_config(ConfigDocument::load(path));
}

} // namespace mfg
