#include <doctest.h>

#include <random>

#include "qosim/context.hpp"
#include "qosim/errors.hpp"
#include "qosim/scenario.hpp"

using namespace qosim;

namespace {

// src(stA) --cn1--> mid(stB) --cn2--> sink(stB), one 2000 kbit/s link.
struct ChainFixture {
    Application app;
    UserProfile user;
    Configuration cfg;

    ChainFixture() {
        app.characteristics["rate"] = {"rate", CharKind::contextual, "kbit/s", ""};
        app.characteristics["lag"] = {"lag", CharKind::contextual, "ms", ""};
        app.stations["stA"] = {"stA", 10, 0};
        app.stations["stB"] = {"stB", 10, 0};
        app.links["ln"] = {"ln", "stA", "stB", 2000, 7};
        app.groups["g"] = {"g", {"sg"}};
        app.subgroups["sg"] = {"sg", "g", {"mid", "sink", "src"}, {"cn1", "cn2"}};

        const auto none = TransferRule::CpuScaling::none;
        const auto mult = TransferRule::CpuScaling::multiply;

        ProcessorSlot src{"src", "sg", {}, {"o"}, {}, {"stA"}};
        ComponentVariant feed{"feed", "src", {}, {{"o", "rate", 0, 4000, 0, 1e9, none},
                                                  {"o", "lag", 0, 0, 0, 1e9, none}}, 0.0, 1};
        src.variants["feed"] = feed;
        app.slots["src"] = src;

        ProcessorSlot mid{"mid", "sg", {"i"}, {"o"}, {}, {"stB"}};
        ComponentVariant half{"half", "mid", {}, {{"o", "rate", 0.5, 0, 0, 1e9, mult},
                                                  {"o", "lag", 1, 3, 0, 1e9, none}}, 2.0, 1};
        ComponentVariant full{"full", "mid", {}, {{"o", "rate", 1, 0, 0, 1e9, mult},
                                                  {"o", "lag", 1, 3, 0, 1e9, none}}, 2.0, 2};
        mid.variants = {{"half", half}, {"full", full}};
        app.slots["mid"] = mid;

        ProcessorSlot sink{"sink", "sg", {"i"}, {}, {}, {"stB"}};
        sink.variants["drain"] = {"drain", "sink", {}, {}, 0.0, 1};
        app.slots["sink"] = sink;

        app.conducts["cn1"] = {"cn1", "sg", "src", "o", "mid", "i", {"rate", "lag"}, false};
        app.conducts["cn2"] = {"cn2", "sg", "mid", "o", "sink", "i", {"rate", "lag"}, false};

        user.wishes["rate"] = {"rate", {{0, 0}, {4000, 1}}, 1.0};
        user.wishes["lag"] = {"lag", {{0, 1}, {100, 0}}, 1.0};

        cfg.placement = {{"src", {"feed", "stA"}}, {"mid", {"full", "stB"}},
                         {"sink", {"drain", "stB"}}};
        cfg.routes = {{"cn1", {"ln"}}, {"cn2", {}}};
    }
};

} // namespace

TEST_CASE("apply_context_event updates exactly the named quantity") {
    ChainFixture f;
    auto state = ContextState::initial(f.app);
    CHECK(state.link_state.at("ln").bandwidth_kbps == 2000);

    SUBCASE("bandwidth") {
        auto next = apply_context_event(
            state, {100, ContextEvent::Kind::set_bandwidth, "ln", 2000, ""}, f.app);
        CHECK(next.link_state.at("ln").bandwidth_kbps == 2000);
        CHECK(next.time_ms == 100);
        CHECK(state.time_ms == 0); // input state untouched
    }
    SUBCASE("station load reaching capacity saturates it") {
        auto next = apply_context_event(
            state, {50, ContextEvent::Kind::set_station_load, "stB", 10, ""}, f.app);
        CHECK(next.saturated(f.app, "stB"));
        CHECK_FALSE(next.saturated(f.app, "stA"));
    }
    SUBCASE("environment") {
        auto next = apply_context_event(
            state, {10, ContextEvent::Kind::set_environment, "language", 0, "fr"}, f.app);
        CHECK(next.environment.at("language") == "fr");
    }
    SUBCASE("unknown entity") {
        CHECK_THROWS_AS((void)apply_context_event(
                            state, {0, ContextEvent::Kind::set_bandwidth, "ghost", 1, ""}, f.app),
                        UnknownEntity);
    }
}

TEST_CASE("propagate_flows composes transfer rules along the chain") {
    ChainFixture f;
    auto state = ContextState::initial(f.app);

    SUBCASE("identity middle keeps the source value, bandwidth caps the crossing") {
        auto flows = propagate_flows(f.cfg, f.app, state);
        // 4000 emitted, link gives 2000.
        CHECK(flows.at("cn1").at("rate") == doctest::Approx(2000));
        CHECK(flows.at("cn2").at("rate") == doctest::Approx(2000));
        // Latency accumulates only across the link.
        CHECK(flows.at("cn1").at("lag") == doctest::Approx(7));
        CHECK(flows.at("cn2").at("lag") == doctest::Approx(10)); // +3 in the middle stage
    }
    SUBCASE("a declared 0.5 rate rule halves the downstream value") {
        f.cfg.placement["mid"].variant = "half";
        auto flows = propagate_flows(f.cfg, f.app, state);
        CHECK(flows.at("cn2").at("rate") == doctest::Approx(1000));
    }
    SUBCASE("co-located conducts are identity") {
        f.app.slots["mid"].admissible_stations = {};
        f.app.slots["sink"].admissible_stations = {};
        f.cfg.placement["mid"].station = "stA";
        f.cfg.placement["sink"].station = "stA";
        f.cfg.routes["cn1"] = {};
        auto flows = propagate_flows(f.cfg, f.app, state);
        CHECK(flows.at("cn1").at("rate") == doctest::Approx(4000));
        CHECK(flows.at("cn1").at("lag") == doctest::Approx(0));
    }
    SUBCASE("deterministic: identical inputs give identical flows") {
        auto a = propagate_flows(f.cfg, f.app, state);
        auto b = propagate_flows(f.cfg, f.app, state);
        CHECK(a == b);
    }
    SUBCASE("cycles are rejected") {
        f.app.slots["src"].input_ports = {"i"};
        f.app.conducts["back"] = {"back", "sg", "sink", "o", "src", "i", {"rate"}, false};
        f.app.slots["sink"].output_ports = {"o"};
        CHECK_THROWS_AS((void)propagate_flows(f.cfg, f.app, state), CyclicTopology);
        // ...unless marked loopback, which is excluded from the sweep.
        f.app.conducts["back"].loopback = true;
        CHECK_NOTHROW((void)propagate_flows(f.cfg, f.app, state));
    }
}

TEST_CASE("saturation scales cpu-bound outputs down") {
    ChainFixture f;
    auto state = ContextState::initial(f.app);
    auto saturated = apply_context_event(
        state, {0, ContextEvent::Kind::set_station_load, "stB", 10, ""}, f.app);

    CHECK(resource_factor(f.cfg, f.app, state, "mid") == doctest::Approx(1.0));
    const double factor = resource_factor(f.cfg, f.app, saturated, "mid");
    CHECK(factor < 1.0); // saturated host, positive demand
    CHECK(factor == doctest::Approx(10.0 / 12.0));
    // Zero-demand variants are immune.
    CHECK(resource_factor(f.cfg, f.app, saturated, "sink") == doctest::Approx(1.0));

    auto flows = propagate_flows(f.cfg, f.app, saturated);
    CHECK(flows.at("cn2").at("rate") == doctest::Approx(2000 * factor));
}

TEST_CASE("resource monotonicity under bandwidth and load changes") {
    ChainFixture f;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> bw(100, 4000), load(0, 12);
    auto base = ContextState::initial(f.app);
    for (int i = 0; i < 100; ++i) {
        auto s1 = base;
        s1.link_state["ln"].bandwidth_kbps = bw(rng);
        s1.station_loads["stB"] = load(rng);
        auto s2 = s1;
        s2.link_state["ln"].bandwidth_kbps = s1.link_state["ln"].bandwidth_kbps * 0.5;
        s2.station_loads["stB"] = s1.station_loads["stB"] + 3.0;

        auto f1 = propagate_flows(f.cfg, f.app, s1);
        auto f2 = propagate_flows(f.cfg, f.app, s2);
        for (const auto& [point, values] : f1) {
            // Worse context: throughput never rises, delay never falls.
            CHECK(f2.at(point).at("rate") <= values.at("rate") + 1e-12);
            CHECK(f2.at(point).at("lag") >= values.at("lag") - 1e-12);
        }
    }
}

TEST_CASE("evaluate_configuration produces a complete report") {
    ChainFixture f;
    auto state = ContextState::initial(f.app);
    auto report = evaluate_configuration(f.cfg, f.app, state, f.user, {});
    CHECK(report.overall >= 0.0);
    CHECK(report.overall <= 1.0);
    CHECK(report.overall ==
          std::min(report.application.intrinsic, report.application.contextual));
    // rate mark at cn2: 2000/4000; lag mark: 1 - 10/100
    CHECK(report.points.at("cn2").at("rate") == doctest::Approx(0.5));
    CHECK(report.points.at("cn2").at("lag") == doctest::Approx(0.9));
}

TEST_CASE("detect_reconfiguration_events fires on threshold crossings") {
    ChainFixture f;
    auto state = ContextState::initial(f.app);
    auto before = evaluate_configuration(f.cfg, f.app, state, f.user, {});

    SUBCASE("quiescence: a fixed context emits nothing") {
        auto again = evaluate_configuration(f.cfg, f.app, state, f.user, {});
        auto events =
            detect_reconfiguration_events(f.app, f.cfg, before, again, state, state, {}, 0.1, 1);
        CHECK(events.empty());
    }

    SUBCASE("a bandwidth fall degrades the conduct that crosses the link") {
        auto cut = apply_context_event(
            state, {100, ContextEvent::Kind::set_bandwidth, "ln", 800, ""}, f.app);
        auto after = evaluate_configuration(f.cfg, f.app, cut, f.user, {});
        auto events =
            detect_reconfiguration_events(f.app, f.cfg, before, after, state, cut, {}, 0.1, 1);
        REQUIRE(events.size() == 2); // cn1 and cn2 both carry the fallen rate
        for (const auto& ev : events) {
            CHECK(ev.kind == EventKind::degradation);
            CHECK(ev.mark_delta < -0.1);
            CHECK(ev.affected_characteristics.contains("rate"));
        }
        CHECK(events[0].culprit == "cn1");
        CHECK(events[0].culprit_is_conduct); // its route changed character
        CHECK(events[1].culprit == "mid");   // co-located conduct blames its producer

        SUBCASE("restoring the bandwidth emits improvements") {
            auto restored = apply_context_event(
                cut, {200, ContextEvent::Kind::set_bandwidth, "ln", 2000, ""}, f.app);
            auto back = evaluate_configuration(f.cfg, f.app, restored, f.user, {});
            auto ups = detect_reconfiguration_events(f.app, f.cfg, after, back, cut, restored, {},
                                                     0.1, 10);
            REQUIRE(ups.size() == 2);
            CHECK(ups[0].kind == EventKind::improvement);
            CHECK(ups[0].mark_delta > 0.1);
            CHECK(ups[0].id == 10);
            CHECK(ups[1].id == 11);
        }
    }

    SUBCASE("a saturation fall blames the producing slot, not the conduct") {
        auto loaded = apply_context_event(
            state, {100, ContextEvent::Kind::set_station_load, "stB", 30, ""}, f.app);
        auto after = evaluate_configuration(f.cfg, f.app, loaded, f.user, {});
        auto events =
            detect_reconfiguration_events(f.app, f.cfg, before, after, state, loaded, {}, 0.1, 1);
        REQUIRE(events.size() == 1); // only cn2 falls (mid is the cpu-scaled stage)
        CHECK(events[0].culprit == "mid");
        CHECK_FALSE(events[0].culprit_is_conduct);
    }

    SUBCASE("sub-threshold changes stay silent") {
        auto nudged = apply_context_event(
            state, {100, ContextEvent::Kind::set_bandwidth, "ln", 1900, ""}, f.app);
        auto after = evaluate_configuration(f.cfg, f.app, nudged, f.user, {});
        auto events =
            detect_reconfiguration_events(f.app, f.cfg, before, after, state, nudged, {}, 0.1, 1);
        CHECK(events.empty());
    }
}

TEST_CASE("spy agents observe the environment and report changes") {
    ChainFixture f;
    f.app.characteristics["lang_fit"] = {"lang_fit", CharKind::contextual, "mark", ""};
    f.user.wishes["lang_fit"] = {"lang_fit", {{0, 0}, {1, 1}}, 1.0};
    SpyAgent spy{"lang-spy", "language", "lang_fit", {{"en", 1.0}, {"fr", 0.2}}, 0.5};

    auto state = ContextState::initial(f.app);
    state.environment["language"] = "en";
    auto before = evaluate_configuration(f.cfg, f.app, state, f.user, {spy});
    CHECK(before.points.at("spy/lang-spy").at("lang_fit") == doctest::Approx(1.0));

    auto changed = apply_context_event(
        state, {100, ContextEvent::Kind::set_environment, "language", 0, "fr"}, f.app);
    auto after = evaluate_configuration(f.cfg, f.app, changed, f.user, {spy});
    CHECK(after.points.at("spy/lang-spy").at("lang_fit") == doctest::Approx(0.2));

    auto events = detect_reconfiguration_events(f.app, f.cfg, before, after, state, changed,
                                                {spy}, 0.1, 1);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::spy);
    CHECK(events[0].mark_delta == doctest::Approx(-0.8));
    CHECK(events[0].affected_characteristics.contains("lang_fit"));

    SUBCASE("unknown environment values read the declared default") {
        auto odd = apply_context_event(
            changed, {200, ContextEvent::Kind::set_environment, "language", 0, "eu"}, f.app);
        auto report = evaluate_configuration(f.cfg, f.app, odd, f.user, {spy});
        CHECK(report.points.at("spy/lang-spy").at("lang_fit") == doctest::Approx(0.5));
    }
}
