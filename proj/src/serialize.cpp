#include "tate/serialize.hpp"

#include <string>

namespace tate {

namespace {

constexpr const char* kMod = "serialize";

Json strings(const std::vector<u64>& v) {
    Json a = Json::array();
    for (u64 c : v) a.push_back(std::to_string(c));
    return a;
}

u64 parse_u64(const Json& j) {
    if (!j.is_string()) fail(ErrorKind::InvalidArgument, kMod, "coefficients are decimal strings");
    const std::string& s = j.get_ref<const std::string&>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorKind::InvalidArgument, kMod, "bad decimal string '" + s + "'");
    return std::stoull(s);
}

std::vector<i64> parse_signed(const Json& a) {
    std::vector<i64> out;
    for (const auto& c : a) out.push_back(static_cast<i64>(parse_u64(c)));
    return out;
}

RingKind parse_kind(const std::string& s) {
    if (s == "base") return RingKind::Base;
    if (s == "unramified") return RingKind::Unramified;
    if (s == "eisenstein") return RingKind::Eisenstein;
    fail(ErrorKind::InvalidArgument, kMod, "unknown ring kind '" + s + "'");
}

ComponentKind parse_component(const std::string& s) {
    if (s == "ell") return ComponentKind::Ell;
    if (s == "p") return ComponentKind::P;
    if (s == "zhat") return ComponentKind::Zhat;
    fail(ErrorKind::InvalidArgument, kMod, "unknown component kind '" + s + "'");
}

}  // namespace

Json to_json(const LocalRing& R) {
    Json j;
    j["p"] = R.p();
    j["kind"] = to_string(R.kind());
    if (R.kind() == RingKind::Eisenstein) {
        j["modulus"] = strings(R.eisenstein_modulus_hi());
        j["base_modulus"] = strings(R.unramified_modulus_hi());
        j["modulus_precision"] = R.modulus_precision();
    } else {
        j["modulus"] = strings(R.unramified_modulus_hi());
    }
    j["m"] = R.m();
    return j;
}

RingPtr ring_from_json(const Json& j) {
    const u64 p = j.at("p").get<u64>();
    const RingKind kind = parse_kind(j.at("kind").get<std::string>());
    const int m = j.at("m").get<int>();
    if (kind != RingKind::Eisenstein) return LocalRing::make(p, kind, parse_signed(j.at("modulus")), m);
    const auto base_mod = parse_signed(j.at("base_modulus"));
    const int mp = j.at("modulus_precision").get<int>();
    RingPtr over = LocalRing::make(p, base_mod.size() == 2 && base_mod[0] == 0 ? RingKind::Base : RingKind::Unramified,
                                   base_mod, mp);
    const auto flat = j.at("modulus");
    const std::size_t f = static_cast<std::size_t>(over->f());
    if (flat.size() % f != 0) fail(ErrorKind::InvalidArgument, kMod, "Eisenstein modulus length");
    std::vector<Elem> coeffs;
    for (std::size_t k = 0; k < flat.size(); k += f) {
        std::vector<u64> c;
        for (std::size_t i = 0; i < f; ++i) c.push_back(parse_u64(flat[k + i]));
        coeffs.push_back(over->from_coeffs(std::move(c)));
    }
    return LocalRing::eisenstein(over, coeffs)->at_precision(m);
}

Json to_json(const Elem& a) { return strings(a.coeffs()); }

Elem elem_from_json(const RingPtr& R, const Json& j) {
    if (!j.is_array()) fail(ErrorKind::InvalidArgument, kMod, "element must be an array");
    std::vector<u64> c;
    for (const auto& v : j) {
        u64 x = parse_u64(v);
        if (x >= R->q()) fail(ErrorKind::InvalidArgument, kMod, "coefficient exceeds p^m");
        c.push_back(x);
    }
    return R->from_coeffs(std::move(c));
}

Json to_json(const LocalPoint& P) {
    if (P.is_infinity()) return "inf";
    Json j;
    if (P.chart() == Chart::Affine) {
        j["x"] = to_json(P.x());
        j["y"] = to_json(P.y());
    } else {
        j["z"] = to_json(P.z());
    }
    return j;
}

LocalPoint point_from_json(const CurvePtr& E, const Json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return E->infinity();
    if (j.contains("z")) return E->formal(elem_from_json(E->ring(), j.at("z")));
    return E->affine(elem_from_json(E->ring(), j.at("x")), elem_from_json(E->ring(), j.at("y")));
}

Json to_json(const LocalCurve& E) {
    Json j;
    j["id"] = E.id();
    j["ring"] = to_json(*E.ring());
    j["a"] = to_json(E.a());
    j["b"] = to_json(E.b());
    return j;
}

Json to_json(const TateVector& v) {
    Json j;
    j["level"] = v.level;
    j["tower_tag"] = v.tower_tag;
    j["ring"] = to_json(*v.point.ring());
    j["point"] = to_json(v.point);
    return j;
}

Json to_json(const ThetaValue& t) {
    Json j;
    j["level"] = t.level;
    j["value"] = to_json(t.value);
    j["guaranteed_precision"] = t.guaranteed_precision;
    return j;
}

Json to_json(const Character& chi) {
    Json j;
    Json dom = Json::array();
    for (const auto& c : chi.domain) {
        Json d;
        d["tag"] = c.tag;
        d["kind"] = to_string(c.kind);
        d["prime"] = c.prime;
        d["level"] = c.level;
        dom.push_back(d);
    }
    j["domain_spec"] = dom;
    Json im = Json::array();
    for (const auto& u : chi.images) im.push_back(to_json(u));
    j["images"] = im;
    j["precision"] = chi.precision;
    j["smooth_level"] = chi.smooth_level ? Json(*chi.smooth_level) : Json(nullptr);
    return j;
}

Character character_from_json(const Json& j, const std::vector<RingPtr>& rings) {
    std::vector<Component> dom;
    for (const auto& d : j.at("domain_spec"))
        dom.push_back({d.at("tag").get<std::string>(), parse_component(d.at("kind").get<std::string>()),
                       d.at("prime").get<u64>(), d.at("level").get<u64>()});
    const auto& im = j.at("images");
    if (im.size() != rings.size()) fail(ErrorKind::InvalidArgument, kMod, "one ring per image");
    std::vector<Elem> images;
    for (std::size_t i = 0; i < im.size(); ++i) images.push_back(elem_from_json(rings[i], im[i]));
    Character chi = char_from_images(std::move(dom), std::move(images), j.at("precision").get<int>());
    if (!j.at("smooth_level").is_null()) chi.smooth_level = j.at("smooth_level").get<int>();
    return chi;
}

Json to_json(const FactoredOrder& o) {
    Json j;
    j["value"] = o.value();
    j["prime_to_p"] = o.prime_to_p;
    j["p_exponent"] = o.p_exponent;
    return j;
}

}  // namespace tate
