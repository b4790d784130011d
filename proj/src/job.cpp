#include "tate/job.hpp"

#include <map>
#include <numeric>
#include <sstream>

namespace tate {

namespace {

constexpr const char* kMod = "cli";

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::ConfigError, kMod, msg); }

enum class ParamType { Int, String, IntPair, Strings, Pairs };

const std::map<std::string, ParamType>& param_schema() {
    static const std::map<std::string, ParamType> s{
        {"kind", ParamType::String},    {"ell", ParamType::Int},       {"k", ParamType::Int},
        {"nu", ParamType::Int},         {"n", ParamType::Int},         {"c", ParamType::Int},
        {"f", ParamType::Int},          {"type", ParamType::String},   {"vector", ParamType::String},
        {"point", ParamType::IntPair},  {"torsion", ParamType::IntPair}, {"p_level", ParamType::Int},
        {"checks", ParamType::Strings}, {"bases", ParamType::Pairs},   {"multiple", ParamType::Int},
    };
    return s;
}

bool is_int_pair(const Json& v) { return v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer(); }

void validate_task(const Json& t, std::size_t i) {
    const std::string where = "task " + std::to_string(i);
    if (!t.is_object()) config_error(where + " must be an object");
    if (!t.contains("kind") || !t["kind"].is_string()) config_error(where + " needs a string 'kind'");
    const auto& kinds = task_kinds();
    if (std::find(kinds.begin(), kinds.end(), t["kind"].get<std::string>()) == kinds.end())
        config_error(where + ": unknown kind '" + t["kind"].get<std::string>() + "'");
    for (const auto& [key, v] : t.items()) {
        auto it = param_schema().find(key);
        if (it == param_schema().end()) config_error(where + ": unknown parameter '" + key + "'");
        bool ok = false;
        switch (it->second) {
            case ParamType::Int: ok = v.is_number_integer(); break;
            case ParamType::String: ok = v.is_string(); break;
            case ParamType::IntPair: ok = is_int_pair(v); break;
            case ParamType::Strings:
                ok = v.is_array();
                for (const auto& s : v) {
                    const auto& names = check_names();
                    ok = ok && s.is_string() && std::find(names.begin(), names.end(), s.get<std::string>()) != names.end();
                }
                break;
            case ParamType::Pairs:
                ok = v.is_array();
                for (const auto& s : v) ok = ok && is_int_pair(s);
                break;
        }
        if (!ok) config_error(where + ": bad value for '" + key + "'");
    }
    if (t.contains("vector")) {
        const auto s = t["vector"].get<std::string>();
        if (s != "etale" && s != "formal") config_error(where + ": vector must be etale or formal");
    }
    if (t.contains("type")) {
        const auto s = t["type"].get<std::string>();
        if (s != "base" && s != "unramified") config_error(where + ": type must be base or unramified");
    }
}

i64 int_param(const Json& t, const char* key, i64 def) { return t.contains(key) ? t[key].get<i64>() : def; }

// ---------------------------------------------------------------- shared torsion data

struct Context {
    const JobConfig& cfg;
    TorsionProvider tp;
    std::vector<std::pair<u64, int>> bases;

    explicit Context(const JobConfig& c) : cfg(c), tp(c.curve, std::max(c.precision, 3)) {
        ResidueCurve Ek = ResidueCurve::over(c.curve.p, 1, c.curve.a, c.curve.b);
        u64 exponent = 1;
        for (const auto& P : Ek.enumerate_points()) exponent = std::lcm(exponent, Ek.point_order(P));
        for (const auto& pp : factorize(exponent))
            if (pp.prime != c.curve.p) bases.emplace_back(pp.prime, pp.exponent);
    }

    CurvePtr base_curve() const { return tp.curve(tp.max_precision()); }

    std::vector<std::pair<u64, int>> bases_for(const Json& t) const {
        if (t.contains("ell")) return {{t["ell"].get<u64>(), static_cast<int>(t.value("k", 1))}};
        if (!t.contains("bases")) return bases;
        std::vector<std::pair<u64, int>> out;
        for (const auto& b : t["bases"]) out.emplace_back(b[0].get<u64>(), b[1].get<int>());
        return out;
    }

    // All ell-adic vectors moved onto one curve over the common unramified ring.
    std::vector<TateVector> ell_vectors(const std::vector<std::pair<u64, int>>& bs) const {
        std::vector<TateVector> out;
        for (auto [ell, k] : bs)
            for (auto v : tp.ell_vectors(ell, k)) {
                if (!out.empty()) v.point = base_change(v.point, out.front().point.curve());
                out.push_back(v);
            }
        return out;
    }
};

Json strings_of(const Character& chi) {
    Json a = Json::array();
    for (const auto& u : chi.images) a.push_back(to_json(u));
    return a;
}

VerificationReport make_report(const std::string& name, const Context& cx, int n) {
    VerificationReport r;
    r.check_name = name;
    r.curve_id = cx.cfg.curve.id;
    r.precision = n;
    r.pass = true;
    return r;
}

void note(VerificationReport& r, bool ok, const std::string& expected, const std::string& got) {
    if (r.pass && (!ok || r.expected.empty())) {
        r.expected = expected;
        r.got = got;
    }
    r.pass = r.pass && ok;
}

std::string images_str(const Character& chi) { return strings_of(chi).dump(); }

// ---------------------------------------------------------------- verification checks

VerificationReport check_pairing(Context& cx, Rng& rng) {
    auto r = make_report("pairing", cx, cx.tp.max_precision());
    Json levels = Json::array();
    for (auto [ell, k] : cx.bases) {
        const TorsionBasis& B = cx.tp.ell_basis(ell, k);
        const u64 N = B.first.level;
        levels.push_back(N);
        ResidueCurve Ek = B.curve->residue_curve();
        for (int t = 0; t < 4; ++t) {
            LocalPoint S = scalar_mul(rng.range(0, static_cast<i64>(N) - 1), B.first.point) + B.second.point;
            LocalPoint T = t == 0 ? B.first.point : scalar_mul(rng.range(0, static_cast<i64>(N) - 1), B.second.point) + B.first.point;
            Elem got = cartier_pairing_local(S, T, N, rng);
            Elem want = teichmuller(B.ring->from_residue(Ek.weil_pairing(S.residue(), T.residue(), N, rng)));
            note(r, got == want && got.pow(N).is_one(), want.str(), got.str());
        }
    }
    r.inputs["levels"] = levels;
    return r;
}

VerificationReport check_alpha_tors(Context& cx, Rng& rng) {
    const int n_max = cx.cfg.precision;
    auto r = make_report("alpha_tors", cx, n_max);
    auto [ell, k] = cx.bases.front();
    auto basis = cx.tp.ell_vectors(ell, k);
    const u64 N = basis[0].level;
    ResidueCurve Ek = basis[0].point.curve()->residue_curve();
    for (int t = 0; t < 6; ++t) {
        LocalPoint a = scalar_mul(rng.range(0, static_cast<i64>(N) - 1), basis[0].point) +
                       scalar_mul(rng.range(0, static_cast<i64>(N) - 1), basis[1].point);
        for (int n = 1; n <= n_max; ++n) {
            Character chi = alpha_n(a, n, basis, rng).character;
            RingPtr Rn = basis[0].point.ring()->at_precision(n);
            for (std::size_t g = 0; g < basis.size(); ++g) {
                Elem want = teichmuller(Rn->from_residue(Ek.weil_pairing(a.residue(), basis[g].point.residue(), N, rng)));
                note(r, chi.images[g] == want, want.str(), chi.images[g].str());
            }
        }
    }
    r.inputs["level"] = N;
    r.inputs["samples"] = 6;
    return r;
}

std::vector<TateVector> mixed_basis(Context& cx, int n, bool& with_p) {
    auto basis = cx.ell_vectors(cx.bases);
    with_p = n - 1 <= 2;
    if (with_p) {
        try {
            const auto& L = cx.tp.p_level(std::max(1, n - 1));
            basis.push_back(L.etale);
            basis.push_back(L.formal);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CapExceeded) throw;
            with_p = false;
        }
    }
    return basis;
}

VerificationReport check_homomorphy(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("homomorphy", cx, n);
    bool with_p = false;
    auto basis = mixed_basis(cx, n, with_p);
    for (int t = 0; t < 4; ++t) {
        LocalPoint a = random_affine_point(cx.base_curve(), rng), b = random_affine_point(cx.base_curve(), rng);
        Character lhs = alpha_n(a + b, n, basis, rng).character;
        Character rhs = char_mul(alpha_n(a, n, basis, rng).character, alpha_n(b, n, basis, rng).character);
        note(r, lhs == rhs, images_str(rhs), images_str(lhs));
    }
    r.inputs["pairs"] = 4;
    r.inputs["p_part"] = with_p;
    return r;
}

VerificationReport check_tower(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("tower", cx, n);
    bool with_p = false;
    auto basis = mixed_basis(cx, n, with_p);
    for (int t = 0; t < 3; ++t) {
        LocalPoint a = random_affine_point(cx.base_curve(), rng);
        auto tower = alpha_tower(a, n, basis, rng);
        for (int k = 1; k < n; ++k) {
            Character red = char_reduce(tower[k].character, k);
            note(r, red == tower[k - 1].character, images_str(tower[k - 1].character), images_str(red));
        }
    }
    r.inputs["points"] = 3;
    r.inputs["p_part"] = with_p;
    return r;
}

VerificationReport check_isogeny(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("isogeny", cx, n);
    bool with_p = false;
    auto basis = mixed_basis(cx, n, with_p);
    for (i64 m : {2, 3, 5})
        for (int t = 0; t < 2; ++t) {
            VerificationReport one = isogeny_functoriality_check(random_affine_point(cx.base_curve(), rng), m, n, basis, rng);
            note(r, one.pass, one.expected, one.got);
        }
    r.inputs["m"] = Json::array({2, 3, 5});
    r.inputs["p_part"] = with_p;
    return r;
}

VerificationReport check_galois(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("galois", cx, n);
    auto basis = cx.ell_vectors(cx.bases);
    for (int power = 1; power <= 2; ++power) {
        GaloisAction sigma = frobenius_action(basis, power);
        for (int t = 0; t < 3; ++t) {
            LocalPoint a = basis[0].point.curve()->infinity();
            for (const auto& g : basis) a = a + scalar_mul(rng.range(0, static_cast<i64>(g.level) - 1), g.point);
            Character lhs = alpha_n(frobenius(a, power), n, basis, rng).character;
            Character rhs = conjugate(alpha_n(a, n, basis, rng).character, sigma);
            note(r, lhs == rhs, images_str(rhs), images_str(lhs));
        }
    }
    r.inputs["powers"] = Json::array({1, 2});
    return r;
}

VerificationReport check_smooth(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("smooth", cx, n);
    auto basis = cx.ell_vectors(cx.bases);
    GaloisAction frob = frobenius_action(basis, 1);
    CurvePtr E = basis[0].point.curve();
    for (int t = 0; t < 3; ++t) {
        Character chi = alpha_n(base_change(random_affine_point(cx.base_curve(), rng), E), n, basis, rng).character;
        SmoothnessCertificate cert = is_smooth_at_level(chi, {frob});
        note(r, cert.smooth && cert.level == 1, "smooth at level 1", cert.smooth ? "smooth" : "not smooth");
    }
    for (const auto& g : basis)
        if (frobenius(g.point, 1) != g.point) {
            Character chi = alpha_n(g.point, n, basis, rng).character;
            const bool smooth = is_smooth_at_level(chi, {frob}).smooth;
            note(r, !smooth, "not smooth at level 1", smooth ? "smooth" : "not smooth");
            r.inputs["moving_vector"] = g.tower_tag;
            break;
        }
    return r;
}

VerificationReport check_lie(Context& cx, Rng& rng) {
    auto r = make_report("lie", cx, 3);
    auto formal_point = [&]() {
        for (;;) {
            LocalPoint P = random_affine_point(cx.base_curve(), rng);
            FactoredOrder o = point_order_mod(P, 1);
            P = scalar_mul(static_cast<i64>(o.value()), P);
            if (!P.is_infinity() && !reduce_point(P, 2).is_infinity()) return P;
        }
    };
    const i64 c = pin_normalization(formal_point(), cx.tp.p_level(1).etale, 2, rng);
    r.inputs["normalization"] = c;
    note(r, c == kLieNormalization, std::to_string(kLieNormalization), std::to_string(c));
    Json levels = Json::array(), skipped = Json::array();
    for (int nu = 1; nu <= 2; ++nu) {
        const PTorsionLevel* L = nullptr;
        try {
            L = &cx.tp.p_level(nu);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CapExceeded) throw;
            skipped.push_back(nu);
            continue;
        }
        levels.push_back(nu);
        for (int t = 0; t < 2; ++t) {
            VerificationReport one = lie_alpha_check(formal_point(), L->etale, nu + 1, rng);
            r.loss = std::max(r.loss, one.loss);
            note(r, one.pass && one.loss <= 1, one.expected, one.got);
        }
    }
    r.inputs["levels"] = levels;
    r.inputs["skipped_levels"] = skipped;
    return r;
}

VerificationReport check_cm(Context& cx, Rng& rng) {
    const int n = cx.cfg.precision;
    auto r = make_report("cm", cx, n);
    auto basis = cx.ell_vectors(cx.bases);
    const TateVector& g = basis.front();
    const u64 ell = factorize(g.level).front().prime;
    LocalPoint a = g.project(ell).point;
    LocalPoint b = cm_conjugate_search(a, 1, basis, n, rng);
    Character target = alpha_n(a, n, basis, rng).character;
    for (auto& u : target.images) u = frobenius(u, 1);
    Character got = alpha_n(b, n, basis, rng).character;
    r.inputs["a_hat"] = to_json(a);
    r.inputs["cm"] = cx.cfg.curve.cm;
    r.inputs["match"] = to_json(b);
    note(r, got == target, images_str(target), images_str(got));
    return r;
}

using CheckFn = VerificationReport (*)(Context&, Rng&);

const std::map<std::string, CheckFn>& check_table() {
    static const std::map<std::string, CheckFn> t{
        {"pairing", check_pairing},   {"alpha_tors", check_alpha_tors}, {"homomorphy", check_homomorphy},
        {"tower", check_tower},       {"isogeny", check_isogeny},       {"galois", check_galois},
        {"smooth", check_smooth},     {"lie", check_lie},               {"cm", check_cm},
    };
    return t;
}

// ---------------------------------------------------------------- tasks

Json task_ring(Context& cx, const Json& t) {
    const int m = static_cast<int>(int_param(t, "n", cx.cfg.precision));
    const std::string type = t.value("type", "unramified");
    const int f = static_cast<int>(int_param(t, "f", 2));
    RingPtr R = type == "base" ? LocalRing::base(cx.cfg.curve.p, m) : LocalRing::unramified(cx.cfg.curve.p, f, m);
    Json j;
    j["ring"] = to_json(*R);
    j["residue_size"] = R->residue_size();
    j["teichmuller_of_gen"] = type == "base" ? to_json(teichmuller(R->from_int(2))) : to_json(teichmuller(R->gen()));
    return j;
}

Json task_curve(Context& cx, const Json&) {
    CurvePtr E = cx.tp.curve(cx.cfg.precision);
    ResidueCurve Ek = E->residue_curve();
    const i64 trace = frobenius_trace(cx.cfg.curve.p, cx.cfg.curve.a, cx.cfg.curve.b);
    Json j;
    j["curve"] = to_json(*E);
    j["discriminant"] = to_json(E->discriminant());
    j["residue_count"] = Ek.enumerate_points().size();
    j["trace"] = trace;
    j["ordinary"] = trace % static_cast<i64>(cx.cfg.curve.p) != 0;
    j["cm"] = cx.cfg.curve.cm;
    Json b = Json::array();
    for (auto [ell, k] : cx.bases) b.push_back(Json::array({ell, k}));
    j["rational_torsion_bases"] = b;
    return j;
}

Json task_torsion(Context& cx, const Json& t) {
    Json j;
    if (t.contains("nu")) {
        const auto& L = cx.tp.p_level(static_cast<int>(t["nu"].get<i64>()));
        j["etale"] = to_json(L.etale);
        j["formal"] = to_json(L.formal);
        return j;
    }
    const u64 ell = static_cast<u64>(int_param(t, "ell", static_cast<i64>(cx.bases.front().first)));
    const int k = static_cast<int>(int_param(t, "k", cx.bases.front().second));
    const TorsionBasis& B = cx.tp.ell_basis(ell, k);
    j["residue_degree"] = B.ring->f();
    j["first"] = to_json(B.first);
    j["second"] = to_json(B.second);
    return j;
}

Json task_pairing(Context& cx, const Json& t, Rng& rng) {
    const u64 ell = static_cast<u64>(int_param(t, "ell", static_cast<i64>(cx.bases.front().first)));
    const int k = static_cast<int>(int_param(t, "k", cx.bases.front().second));
    const TorsionBasis& B = cx.tp.ell_basis(ell, k);
    const u64 N = B.first.level;
    Elem e = cartier_pairing_local(B.first.point, B.second.point, N, rng);
    Elem oracle = teichmuller(B.ring->from_residue(B.curve->residue_curve().weil_pairing(B.first.point.residue(),
                                                                                          B.second.point.residue(), N, rng)));
    bool primitive = e.pow(N).is_one();
    for (const auto& q : factorize(N)) primitive = primitive && !e.pow(N / q.prime).is_one();
    Json j;
    j["level"] = N;
    j["value"] = to_json(e);
    j["oracle"] = to_json(oracle);
    j["primitive"] = primitive;
    j["pass"] = primitive && e == oracle;
    return j;
}

Json task_alpha(Context& cx, const Json& t, Rng& rng) {
    const int n = static_cast<int>(int_param(t, "n", cx.cfg.precision));
    auto basis = cx.ell_vectors(cx.bases_for(t));
    const int nu = static_cast<int>(int_param(t, "p_level", 0));
    if (nu > 0) {
        const auto& L = cx.tp.p_level(nu);
        basis.push_back(L.etale);
        basis.push_back(L.formal);
    }
    LocalPoint a;
    if (t.contains("torsion")) {
        a = scalar_mul(t["torsion"][0].get<i64>(), basis.at(0).point) + scalar_mul(t["torsion"][1].get<i64>(), basis.at(1).point);
    } else if (t.contains("point")) {
        CurvePtr E = cx.base_curve();
        a = E->affine(E->ring()->from_int(t["point"][0].get<i64>()), E->ring()->from_int(t["point"][1].get<i64>()));
    } else {
        a = random_affine_point(cx.base_curve(), rng);
    }
    AlphaResult res = alpha_n(a, n, basis, rng);
    Json j;
    j["a_hat"] = to_json(a);
    j["n"] = n;
    j["order"] = to_json(res.order);
    j["character"] = to_json(res.character);
    j["provenance"] = res.provenance;
    return j;
}

const TateVector& p_vector(Context& cx, const Json& t, int nu) {
    const auto& L = cx.tp.p_level(nu);
    return t.value("vector", "etale") == "formal" ? L.formal : L.etale;
}

Json task_theta(Context& cx, const Json& t, Rng& rng) {
    const int nu = static_cast<int>(int_param(t, "nu", 1));
    const int n = static_cast<int>(int_param(t, "n", std::min(cx.cfg.precision, nu)));
    const TateVector& g = p_vector(cx, t, nu);
    Json j;
    j["vector"] = g.tower_tag;
    j["theta"] = to_json(theta(g, n, rng));
    return j;
}

Json task_rho(Context& cx, const Json& t, Rng& rng) {
    const int nu = static_cast<int>(int_param(t, "nu", 2));
    const int n = static_cast<int>(int_param(t, "n", std::min(cx.cfg.precision, nu)));
    const TateVector& g0 = p_vector(cx, t, nu);
    TateVector g{g0.level, scalar_mul(int_param(t, "multiple", 1), g0.point), g0.tower_tag};
    RingPtr Rn = g.point.ring()->at_precision(n);
    UnipotentRep u = rho_unipotent(Rn->from_int(int_param(t, "c", 1)), g, n, rng);
    Json m = Json::array();
    for (const auto& e : u.matrix()) m.push_back(to_json(e));
    Json j;
    j["vector"] = g.tower_tag;
    j["n"] = n;
    j["beta"] = to_json(u.beta);
    j["matrix"] = m;
    return j;
}

Json task_verify(Context& cx, const Json& t, Rng& rng, bool& pass) {
    std::vector<std::string> names = check_names();
    if (t.contains("checks")) names = t["checks"].get<std::vector<std::string>>();
    Json checks = Json::array();
    for (const auto& name : names) {
        Rng sub = rng.fork();
        VerificationReport r = check_table().at(name)(cx, sub);
        pass = pass && r.pass;
        checks.push_back(to_json(r));
    }
    Json j;
    j["checks"] = checks;
    return j;
}

}  // namespace

const std::vector<std::string>& task_kinds() {
    static const std::vector<std::string> k{"ring", "curve", "torsion", "pairing", "alpha", "theta", "rho", "verify"};
    return k;
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> c{"pairing", "alpha_tors", "homomorphy", "tower", "isogeny",
                                            "galois",  "smooth",     "lie",        "cm"};
    return c;
}

JobConfig parse_config(const Json& j) {
    if (!j.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, v] : j.items())
        if (key != "curve" && key != "precision" && key != "seed" && key != "output" && key != "tasks")
            config_error("unknown config key '" + key + "'");
    JobConfig cfg;
    const Json curve = j.contains("curve") ? j["curve"] : Json("demo");
    if (curve.is_string()) {
        cfg.curve_name = curve.get<std::string>();
        try {
            cfg.curve = preset_curve(cfg.curve_name);
        } catch (const Error& e) {
            config_error(e.detail());
        }
    } else if (curve.is_object()) {
        try {
            cfg.curve.p = curve.at("p").get<u64>();
            cfg.curve.a = curve.at("a").get<i64>();
            cfg.curve.b = curve.at("b").get<i64>();
            cfg.curve.id = curve.value("id", "custom");
            cfg.curve.cm = curve.value("cm", false);
            cfg.curve.ell_degree = curve.value("ell_degree", 0);
        } catch (const nlohmann::json::exception& e) {
            config_error(std::string("bad curve: ") + e.what());
        }
    } else {
        config_error("curve must be a preset name or {p, a, b}");
    }
    if (j.contains("precision")) {
        if (!j["precision"].is_number_integer()) config_error("precision must be an integer");
        cfg.precision = j["precision"].get<int>();
    }
    if (cfg.precision < 1 || cfg.precision > 6) config_error("precision must lie in 1..6");
    if (j.contains("seed")) {
        const Json& sd = j["seed"];
        if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<i64>() < 0))
            config_error("seed must be a non-negative integer");
        cfg.seed = j["seed"].get<u64>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) config_error("output must be json or csv");
        cfg.output = j["output"].get<std::string>();
    }
    if (cfg.output != "json" && cfg.output != "csv") config_error("output must be json or csv");
    if (j.contains("tasks")) {
        if (!j["tasks"].is_array()) config_error("tasks must be an array");
        cfg.tasks = j["tasks"];
    }
    for (std::size_t i = 0; i < cfg.tasks.size(); ++i) validate_task(cfg.tasks[i], i);
    return cfg;
}

Json echo(const JobConfig& cfg) {
    Json j;
    if (!cfg.curve_name.empty()) {
        j["curve"] = cfg.curve_name;
    } else {
        j["curve"] = {{"id", cfg.curve.id}, {"p", cfg.curve.p},   {"a", cfg.curve.a},
                      {"b", cfg.curve.b},   {"cm", cfg.curve.cm}, {"ell_degree", cfg.curve.ell_degree}};
    }
    j["precision"] = cfg.precision;
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    j["tasks"] = cfg.tasks;
    return j;
}

JobOutcome run_job(const JobConfig& cfg) {
    JobOutcome out;
    out.document["version"] = kReportVersion;
    out.document["config_echo"] = echo(cfg);
    Json reports = Json::array();
    bool all_pass = true;
    try {
        Context cx(cfg);
        for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
            const Json& t = cfg.tasks[i];
            const std::string kind = t["kind"].get<std::string>();
            Rng rng(cfg.seed * 0x100000001b3ULL + i);
            Json r;
            r["task"] = kind;
            r["index"] = i;
            r["curve_id"] = cfg.curve.id;
            try {
                Json body;
                if (kind == "ring") body = task_ring(cx, t);
                else if (kind == "curve") body = task_curve(cx, t);
                else if (kind == "torsion") body = task_torsion(cx, t);
                else if (kind == "pairing") body = task_pairing(cx, t, rng);
                else if (kind == "alpha") body = task_alpha(cx, t, rng);
                else if (kind == "theta") body = task_theta(cx, t, rng);
                else if (kind == "rho") body = task_rho(cx, t, rng);
                else {
                    bool pass = true;
                    body = task_verify(cx, t, rng, pass);
                    body["pass"] = pass;
                }
                for (auto& [k, v] : body.items()) r[k] = v;
                if (r.contains("pass")) all_pass = all_pass && r["pass"].get<bool>();
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::ConfigError) throw;
                r["error"] = {{"module", e.module()}, {"kind", to_string(e.kind())}, {"message", e.detail()}};
                reports.push_back(r);
                out.document["reports"] = reports;
                out.exit_code = 3;
                return out;
            }
            reports.push_back(r);
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        Json r;
        r["task"] = "setup";
        r["error"] = {{"module", e.module()}, {"kind", to_string(e.kind())}, {"message", e.detail()}};
        reports.push_back(r);
        out.document["reports"] = reports;
        out.exit_code = 3;
        return out;
    }
    out.document["reports"] = reports;
    out.exit_code = all_pass ? 0 : 1;
    return out;
}

namespace {

std::string csv_field(const Json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

std::string render_csv(const Json& document) {
    std::ostringstream os;
    os << "task,index,check_name,curve_id,precision,loss,pass,expected,got,error\n";
    for (const auto& r : document.at("reports")) {
        const Json task = r.value("task", ""), index = r.value("index", Json(nullptr));
        const Json err = r.contains("error") ? Json(r["error"].value("kind", "") + ": " + r["error"].value("message", "")) : Json("");
        auto row = [&](const Json& name, const Json& curve, const Json& prec, const Json& loss, const Json& pass,
                       const Json& expected, const Json& got) {
            os << csv_field(task) << ',' << csv_field(index) << ',' << csv_field(name) << ',' << csv_field(curve) << ','
               << csv_field(prec) << ',' << csv_field(loss) << ',' << csv_field(pass) << ',' << csv_field(expected) << ','
               << csv_field(got) << ',' << csv_field(err) << '\n';
        };
        if (r.contains("checks")) {
            for (const auto& c : r["checks"])
                row(c["check_name"], c["curve_id"], c["precision"], c["loss"], c["pass"], c["expected"], c["got"]);
        } else {
            Json summary = r;
            for (const char* k : {"task", "index", "curve_id", "pass", "error"}) summary.erase(k);
            row(task, r.value("curve_id", ""), r.value("n", Json("")), Json(""), r.value("pass", Json("")), Json(""),
                summary.dump());
        }
    }
    return os.str();
}

}  // namespace tate
