#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "tate/job.hpp"

#ifndef TATECHAR_PATH
#define TATECHAR_PATH "tatechar"
#endif

using namespace tate;
using namespace tate::testing;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    std::string cmd = std::string(TATECHAR_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, k);
    int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string write_config(const std::string& name, const std::string& body) {
    auto dir = std::filesystem::temp_directory_path() / "tatechar_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream(path) << body;
    return path.string();
}

void check_ring_round_trip(const RingPtr& R, Rng& rng) {
    Json j = to_json(*R);
    RingPtr back = ring_from_json(Json::parse(j.dump()));
    CHECK(back->same(*R));
    CHECK(to_json(*back).dump() == j.dump());
    for (int t = 0; t < 10; ++t) {
        Elem a = R->random(rng);
        Elem b = elem_from_json(back, Json::parse(to_json(a).dump()));
        CHECK(b.coeffs() == a.coeffs());
    }
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ring and element serialization round trips") {
    Rng rng(81);
    check_ring_round_trip(LocalRing::base(5, 3), rng);
    check_ring_round_trip(LocalRing::unramified(5, 6, 3), rng);
    check_ring_round_trip(LocalRing::make(5, RingKind::Eisenstein, {5, 0, 0, 0, 1}, 3), rng);
    check_ring_round_trip(demo().p_level(1).etale_ring, rng);
    check_ring_round_trip(demo().p_level(2).formal_ring, rng);
}

TEST_CASE("point serialization round trips in every chart") {
    Rng rng(82);
    CurvePtr E = demo().curve(3);
    Json inf = to_json(E->infinity());
    CHECK(inf == "inf");
    CHECK(point_from_json(E, inf).is_infinity());
    for (int t = 0; t < 10; ++t) {
        LocalPoint P = random_affine_point(E, rng);
        CHECK(point_from_json(E, Json::parse(to_json(P).dump())) == P);
        LocalPoint F = random_formal_point(rng);
        Json jf = to_json(F);
        CHECK(jf.contains("z"));
        CHECK(point_from_json(E, jf) == F);
    }
    const LocalPoint& G = demo().p_level(1).formal.point;
    CHECK(point_from_json(G.curve(), to_json(G)) == G);
}

TEST_CASE("character serialization round trips") {
    Rng rng(83);
    auto basis = demo().ell_vectors(3, 2);
    const auto& L = demo().p_level(1);
    basis.push_back(L.etale);
    basis.push_back(L.formal);
    Character chi = alpha_n(random_affine_point(demo().curve(3), rng), 2, basis, rng).character;
    std::vector<RingPtr> rings;
    for (const auto& u : chi.images) rings.push_back(u.ring());
    Json j = to_json(chi);
    CHECK(j.contains("domain_spec"));
    CHECK(j.contains("smooth_level"));
    Character back = character_from_json(Json::parse(j.dump()), rings);
    CHECK(back == chi);
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("config validation") {
    auto bad = [](const Json& j) {
        try {
            parse_config(j);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::ConfigError;
        }
        return false;
    };
    CHECK(bad({{"curve", "nonexistent"}}));
    CHECK(bad({{"precision", 0}}));
    CHECK(bad({{"output", "xml"}}));
    CHECK(bad({{"tasks", {{{"kind", "nope"}}}}}));
    CHECK(bad({{"tasks", {{{"kind", "alpha"}, {"colour", 1}}}}}));
    CHECK(bad({{"tasks", {{{"kind", "verify"}, {"checks", {"everything"}}}}}}));
    JobConfig ok = parse_config({{"curve", {{"p", 7}, {"a", 2}, {"b", 3}}}, {"tasks", {{{"kind", "curve"}}}}});
    CHECK(ok.curve.p == 7);
    CHECK(ok.curve.a == 2);
}

TEST_CASE("alpha task equals the library call") {
    JobConfig cfg = parse_config({{"curve", "demo"},
                                  {"precision", 2},
                                  {"seed", 4},
                                  {"tasks", {{{"kind", "alpha"}, {"point", {0, 1}}, {"ell", 3}, {"k", 2}}}}});
    JobOutcome out = run_job(cfg);
    CHECK(out.exit_code == 0);
    const Json& rep = out.document["reports"][0];
    Rng rng(5);
    auto basis = demo().ell_vectors(3, 2);
    CurvePtr E = demo().curve(3);
    LocalPoint a = E->affine(E->ring()->zero(), E->ring()->one());
    Character chi = alpha_n(a, 2, basis, rng).character;
    CHECK(rep["character"]["images"] == to_json(chi)["images"]);
    CHECK(rep["order"]["prime_to_p"] == 9);
}

TEST_CASE("exit codes") {
    Run ok = run_cli("verify --curve demo --precision 2 --seed 3");
    CHECK(ok.status == 0);
    Json doc = Json::parse(ok.out);
    CHECK(doc["version"] == kReportVersion);
    CHECK(doc["config_echo"]["seed"] == 3);
    CHECK(doc["reports"][0]["checks"].size() == check_names().size());

    CHECK(run_cli("verify --config " + write_config("broken.json", "{\"tasks\": [")).status == 2);
    CHECK(run_cli("verify --config " + write_config("unknown.json", R"({"tasks": [{"kind": "fly"}]})")).status == 2);
    CHECK(run_cli("verify --config /nonexistent/job.json").status == 2);
    CHECK(run_cli("verify --output xml").status == 2);
    CHECK(run_cli("ring --precision 0").status == 2);

    Run err = run_cli("alpha --config " +
                      write_config("shallow.json", R"({"tasks": [{"kind": "alpha", "point": [0, 1], "ell": 3, "k": 1}]})"));
    CHECK(err.status == 3);
    Json edoc = Json::parse(err.out);
    CHECK(edoc["reports"][0]["error"]["kind"] == "InvalidArgument");
}

TEST_CASE("reports are reproducible") {
    const std::string cfg = write_config("repro.json", R"({"curve": "demo", "precision": 2, "tasks": [
        {"kind": "pairing"}, {"kind": "alpha"}, {"kind": "theta", "nu": 2}, {"kind": "verify", "checks": ["tower", "galois"]}]})");
    Run a = run_cli("verify --config " + cfg + " --seed 9"), b = run_cli("verify --config " + cfg + " --seed 9");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    Run c = run_cli("verify --config " + cfg + " --seed 9 --output csv");
    CHECK(c.out.rfind("task,index,check_name", 0) == 0);
}

}  // TEST_SUITE
