#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gae/scenario.hpp"
#include "support/fixtures.hpp"

#include <fstream>
#include <sstream>

using namespace gae;
using namespace gae::testing;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string golden(const std::string& name) {
    return read_file(std::string(GAE_GOLDEN_DIR) + "/" + name);
}

bool equivalent(const ScenarioFile& a, const ScenarioFile& b) {
    return a.instance == b.instance && a.protocol == b.protocol &&
           a.baseDuration == b.baseDuration && a.lockMode == b.lockMode && a.seed == b.seed &&
           a.profile.assignment == b.profile.assignment && a.nonAtomicGults == b.nonAtomicGults &&
           a.enumerateBound == b.enumerateBound;
}

}  // namespace

TEST_CASE("the mixed-exchange scenario parses to the fixture instance") {
    const ScenarioFile sc = parse_scenario(golden("complex_mix.scn"));
    CHECK(sc.instance == complex_mix_instance());
    CHECK(sc.protocol == ProtocolKind::Mphtlc);
    CHECK(sc.baseDuration == 8);
    CHECK(sc.warnings.empty());
}

TEST_CASE("a self-transfer line is a semantic error at its line") {
    const std::string text =
        "parties: X, Y\n"
        "protocol: MPHTLC\n"
        "L1: M: {X} -> {X}\n"
        "L2: N: {Y} -> {X}\n";
    try {
        parse_scenario(text);
        FAIL("expected a scenario error");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("FO equals IO") != std::string::npos);
    }
}

TEST_CASE("a missing protocol line defaults with a warning") {
    const ScenarioFile sc = parse_scenario(
        "parties: X, Y\n"
        "L1: M: {X} -> {Y}\n"
        "L2: N: {Y} -> {X}\n");
    CHECK(sc.protocol == ProtocolKind::Mphtlc);
    REQUIRE(sc.warnings.size() == 1);
    CHECK(sc.warnings.front().find("MPHTLC") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_line = [](const std::string& text, int line) {
        try {
            parse_scenario(text);
            FAIL("expected a scenario error for: ", text);
        } catch (const ScenarioError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("parties: X, Y\njunk without separator\n", 2);
    expect_line("parties: X, Y\nwhatsthis: 3\n", 2);
    expect_line("parties: X, Y\nL1: M: X -> {Y}\n", 2);
    expect_line("parties: X, Y\nprotocol: FOO\n", 2);
    expect_line("parties: X, Y\nL1: M: {X} -> {Y}\nL1: M: {X} -> {Y}\n", 3);
    expect_line("parties: X, Y\nL1: M: {X} -> {Y}\nL2: N: {Y} -> {X}\nstrategy: Q = honest\n", 4);
    expect_line("parties: X, Y\nprotocol: MPHTLC\nprotocol: MPHTLC\n", 3);
}

TEST_CASE("strategy and attack lines assemble the profile") {
    const ScenarioFile withStrategy = parse_scenario(
        "parties: W, X, Y\n"
        "protocol: MPHTLC\n"
        "L1: M: {X,W} -> {Y}\n"
        "L2: N: {Y} -> {X,W}\n"
        "strategy: W = mpc_delay(2)\n");
    CHECK(withStrategy.profile.of(P("W")).kind == Strategy::Kind::MpcDelay);
    CHECK(withStrategy.profile.of(P("W")).delayTicks == 2);
    CHECK_FALSE(withStrategy.profile.of(P("X")).deviates());

    const ScenarioFile withAttack = parse_scenario(golden("joint_sale_ms_attack.scn"));
    CHECK(withAttack.attackName == std::string("ms_collusion(W,Y)"));
    CHECK(withAttack.profile.of(P("W")).kind == Strategy::Kind::ColludeRelock);
    CHECK(withAttack.profile.of(P("W")).partners == PartySet{P("Y")});
    CHECK(withAttack.profile.of(P("Y")).kind == Strategy::Kind::ColludeRelock);

    // an attack that does not fit the shape is rejected
    CHECK_THROWS_AS(parse_scenario("parties: X, Y\n"
                                   "protocol: MPHTLC\n"
                                   "L1: M: {X} -> {Y}\n"
                                   "L2: N: {Y} -> {X}\n"
                                   "attack: ms_collusion(X,Y)\n"),
                    ScenarioError);
}

TEST_CASE("gult flags and enumerate bounds parse") {
    const ScenarioFile sc = parse_scenario(
        "parties: U, V, X, Y\n"
        "protocol: MPHTLC\n"
        "L1: M: {X} -> {Y}\n"
        "L2: N: {Y} -> {X}\n"
        "L2: G: {U} -> {V}\n"
        "atomic-gult: G = off\n"
        "enumerate: bound=2\n");
    CHECK(sc.nonAtomicGults == AssetSet{L2("G")});
    CHECK(sc.enumerateBound == 2);

    CHECK_THROWS_AS(parse_scenario("parties: X, Y\n"
                                   "protocol: MPHTLC\n"
                                   "L1: M: {X} -> {Y}\n"
                                   "L2: N: {Y} -> {X}\n"
                                   "atomic-gult: Nope = off\n"),
                    ScenarioError);
}

TEST_CASE("held assets parse as unexchanged") {
    const ScenarioFile sc = parse_scenario(
        "parties: X, Y\n"
        "protocol: MPHTLC\n"
        "L1: M: {X} -> {Y}\n"
        "L1: C: {X}\n"
        "L2: N: {Y} -> {X}\n");
    CHECK(sc.instance.assets1.count(L1("C")));
    CHECK_FALSE(sc.instance.exchangeSet1.count(L1("C")));
    CHECK(sc.instance.fo1.owners(L1("C")) == PartySet{P("X")});
}

TEST_CASE("round trip: parse(render(parse(text))) equals parse(text)") {
    for (const char* name :
         {"joint_sale.scn", "bundle_sale.scn", "complex_mix.scn", "basic_ult.scn",
          "basic_clr.scn", "basic_cls.scn", "classic_swap.scn", "joint_sale_ms_attack.scn",
          "joint_sale_mk_attack.scn", "joint_sale_ms_attack_mphtlc.scn",
          "joint_sale_mk_attack_mphtlc.scn"}) {
        CAPTURE(name);
        const ScenarioFile once = parse_scenario(golden(name));
        const ScenarioFile twice = parse_scenario(render_scenario(once));
        CHECK(equivalent(once, twice));
    }
}

TEST_CASE("same scenario and seed produce byte-identical reports") {
    const ScenarioFile sc = parse_scenario(golden("complex_mix.scn"));
    for (auto format : {ReportFormat::Text, ReportFormat::Lines}) {
        const std::string a = emit_report(run_scenario(sc), format);
        const std::string b = emit_report(run_scenario(sc), format);
        CHECK(a == b);
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("machine-format lines replay to the run's final states") {
    for (const char* name : {"joint_sale.scn", "bundle_sale.scn", "complex_mix.scn",
                             "joint_sale_mk_attack.scn", "classic_swap.scn"}) {
        CAPTURE(name);
        const ScenarioFile sc = parse_scenario(golden(name));
        const RunOutcome outcome =
            run_protocol(sc.instance, sc.protocol, sc.profile, sc.run_config());

        const std::string lines = emit_report(run_scenario(sc), ReportFormat::Lines);
        std::vector<Event> events;
        std::istringstream in(lines);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto bar = line.find('|');
            const std::string head = line.substr(0, bar);
            if (head == "classification" || head == "s12" || head == "s21" || head == "gkt" ||
                head == "schedule" || head == "verdict" || head == "profile")
                continue;
            events.push_back(parse_event_line(line));
        }
        const auto [r1, r2] = replay_events(sc.instance.io1, sc.instance.io2, events);
        CHECK(r1 == outcome.finalState1);
        CHECK(r2 == outcome.finalState2);
    }
}

TEST_CASE("classification-only reports stop after the partition block") {
    const ScenarioFile sc = parse_scenario(golden("complex_mix.scn"));
    const std::string text = emit_report(classify_scenario(sc), ReportFormat::Text);
    CHECK(text.find("classification: FULL_GCLS_MIX") != std::string::npos);
    CHECK(text.find("gkt: L1|Currency|G={X}|K={Y}|T={W,Z}") != std::string::npos);
    CHECK(text.find("events:") == std::string::npos);
    CHECK(text.find("schedule") == std::string::npos);
}

TEST_CASE("enumerate reports carry one verdict block per profile") {
    ScenarioFile sc = parse_scenario(golden("basic_cls.scn"));
    const Report report = enumerate_scenario(sc, 1);
    const auto profiles = enumerate_profiles(sc.instance, sc.protocol, 1);
    CHECK(report.results.size() == profiles.size());
    CHECK_FALSE(report.any_violated());

    const std::string lines = emit_report(report, ReportFormat::Lines);
    CHECK(lines.find("profile|0|") != std::string::npos);
}
