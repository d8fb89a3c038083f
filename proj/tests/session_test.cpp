#include "support/test_util.hpp"

#include <tessera/server/session.hpp>

#include <gtest/gtest.h>

using namespace tessera;
using namespace tessera::server;

namespace {

std::vector<WireMessage> send(Session& s, std::string_view text) { return s.handle_text(text); }

std::string error_code(const std::vector<WireMessage>& events) {
    if (events.size() != 1 || events[0].type != "error") return "no error";
    return events[0].body.at("code").get<std::string>();
}

std::vector<std::string> types(const std::vector<WireMessage>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) out.push_back(e.type);
    return out;
}

Session loaded_gol(int w = 8, int h = 8) {
    Session s;
    auto ev = s.handle({"load", Json{{"model", "game_of_life"},
                                     {"params", Json{{"width", w}, {"height", h}, {"topology", "torus"}}},
                                     {"seed", 42}}});
    EXPECT_EQ(ev.at(0).type, "loaded");
    return s;
}

}  // namespace

TEST(Session, CommandsBeforeLoadAreRejected) {
    Session s;
    for (auto cmd : {R"({"type":"step","count":1})", R"({"type":"pause"})", R"({"type":"rewind","tick":0})",
                     R"({"type":"subscribe","povs":[]})"}) {
        EXPECT_EQ(error_code(send(s, cmd)), "E_NOT_LOADED") << cmd;
    }
    EXPECT_EQ(error_code(send(s, R"({"type":"ack","of":"x"})")), "E_UNKNOWN_TYPE");
    EXPECT_EQ(error_code(send(s, R"({"type":"step")")), "E_MALFORMED");
}

TEST(Session, LoadReportsShapeAndNames) {
    Session s;
    const auto ev = send(s, R"({"type":"load","model":"pastoral","params":{"width":6,"height":4},"seed":3})");
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(ev[0].body.at("width"), 6);
    EXPECT_EQ(ev[0].body.at("height"), 4);
    EXPECT_EQ(ev[0].body.at("tick"), 0);
    EXPECT_EQ(ev[0].body.at("povs"), (Json{"grass", "humidity", "fresh_grass", "dry_grass"}));
    EXPECT_EQ(error_code(send(s, R"({"type":"load","model":"mars"})")), "E_UNKNOWN_MODEL");
    EXPECT_EQ(error_code(send(s, R"({"type":"load","model":"pastoral","params":{"colour":1}})")), "E_BAD_PARAM");
    EXPECT_EQ(error_code(send(s, R"({"type":"load","model":"pastoral","params":{"rain":3}})")), "E_BAD_PARAM");
    // Failed loads leave the previous simulation in place.
    EXPECT_EQ(s.state().grid.width, 6);
}

TEST(Session, PauseIsIdempotentAndStepZeroOnlyAcks) {
    auto s = loaded_gol();
    EXPECT_EQ(types(send(s, R"({"type":"pause"})")), (std::vector<std::string>{"ack"}));
    EXPECT_EQ(types(send(s, R"({"type":"pause"})")), (std::vector<std::string>{"ack"}));
    const auto ev = send(s, R"({"type":"step","count":0})");
    EXPECT_EQ(types(ev), (std::vector<std::string>{"ack"}));
    EXPECT_EQ(ev[0].body.at("of"), "step");
    EXPECT_EQ(s.state().tick, 0u);
}

TEST(Session, StepEmitsOneTickPerAdvanceThenTimeline) {
    auto s = loaded_gol();
    const auto ev = send(s, R"({"type":"step","count":3})");
    EXPECT_EQ(types(ev), (std::vector<std::string>{"tick", "tick", "tick", "timeline"}));
    EXPECT_EQ(ev[2].body.at("tick"), 3);
    EXPECT_EQ(ev[3].body.at("max"), 3);
    EXPECT_EQ(error_code(send(s, R"({"type":"step","count":-2})")), "E_RANGE");
}

TEST(Session, RewindReportsTimelineAndRendersTarget) {
    auto s = loaded_gol();
    send(s, R"({"type":"subscribe","povs":["life"],"probes":true})");
    send(s, R"({"type":"step","count":10})");
    const auto ev = send(s, R"({"type":"rewind","tick":5})");
    ASSERT_EQ(types(ev), (std::vector<std::string>{"timeline", "tick"}));
    EXPECT_EQ(ev[0].body.at("current"), 5);
    EXPECT_EQ(ev[0].body.at("max"), 10);
    EXPECT_EQ(ev[1].body.at("tick"), 5);
    const auto snap = s.timeline().state_at(5);
    EXPECT_EQ(ev[1].body.at("frames").at("life"), wire::to_json(render_pov(testutil::gol(), snap, "life")));
    EXPECT_EQ(error_code(send(s, R"({"type":"rewind","tick":11})")), "E_BAD_TICK");
}

TEST(Session, TickFramesMatchStoredSnapshots) {
    Session s;
    send(s, R"({"type":"load","model":"pastoral","params":{"width":5,"height":5},"seed":9})");
    send(s, R"({"type":"subscribe","povs":["grass","humidity"],"probes":true})");
    const auto ev = send(s, R"({"type":"step","count":6})");
    const auto& m = testutil::pastoral();
    for (int i = 0; i < 6; ++i) {
        const auto& tick = ev[i].body;
        const auto snap = s.timeline().state_at(tick.at("tick").get<std::uint64_t>());
        EXPECT_EQ(tick.at("frames").at("grass"), wire::to_json(render_pov(m, snap, "grass")));
        EXPECT_EQ(tick.at("frames").at("humidity"), wire::to_json(render_pov(m, snap, "humidity")));
        EXPECT_EQ(tick.at("probes"), wire::to_json(sample_probes(m, snap)));
    }
}

TEST(Session, EditPausesTruncatesAndRerenders) {
    auto s = loaded_gol();
    send(s, R"({"type":"step","count":10})");
    send(s, R"({"type":"rewind","tick":4})");
    send(s, R"({"type":"play","tps":5})");
    ASSERT_TRUE(s.playing());
    const bool was = std::get<bool>(s.state().patches[0]);
    const auto ev = send(s, std::string(R"({"type":"edit","entity":{"kind":"patch","index":0},"attr":"alive","value":)") +
                                (was ? "false" : "true") + "}");
    ASSERT_EQ(types(ev), (std::vector<std::string>{"timeline", "tick"}));
    EXPECT_FALSE(s.playing());
    EXPECT_EQ(ev[0].body.at("playing"), false);
    EXPECT_EQ(ev[0].body.at("max"), 4);
    EXPECT_EQ(ev[0].body.at("branch_count"), 1);
    EXPECT_EQ(std::get<bool>(s.state().patches[0]), !was);
}

TEST(Session, EditAndInspectErrors) {
    Session s;
    send(s, R"({"type":"load","model":"pastoral","params":{"width":4,"height":4},"seed":1})");
    EXPECT_EQ(error_code(send(s, R"({"type":"edit","entity":{"kind":"patch","index":0},"attr":"humidity","value":1.5})")),
              "E_RANGE");
    EXPECT_EQ(error_code(send(s, R"({"type":"edit","entity":{"kind":"patch","index":99},"attr":"humidity","value":0.5})")),
              "E_NO_ENTITY");
    EXPECT_EQ(error_code(send(s, R"({"type":"edit","entity":{"kind":"patch","index":0},"attr":"humidity","value":"wet"})")),
              "E_TYPE");
    EXPECT_EQ(error_code(send(s, R"({"type":"edit","entity":{"kind":"patch","index":0},"attr":"colour","value":1})")),
              "E_UNKNOWN_ATTR");
    EXPECT_EQ(error_code(send(s, R"({"type":"inspect","entity":{"kind":"cow","index":999}})")), "E_NO_ENTITY");
    EXPECT_EQ(error_code(send(s, R"({"type":"subscribe","povs":["x-ray"]})")), "E_UNKNOWN_POV");
    EXPECT_EQ(error_code(send(s, R"({"type":"play","tps":0})")), "E_RANGE");
    EXPECT_EQ(error_code(send(s, R"({"type":"edit","attr":"humidity","value":0.5})")), "E_MALFORMED");
}

TEST(Session, InspectReturnsAttributesAndLocation) {
    Session s;
    send(s, R"({"type":"load","model":"pastoral","params":{"width":4,"height":4},"seed":1})");
    const auto ev = send(s, R"({"type":"inspect","entity":{"kind":"cow","index":0}})");
    ASSERT_EQ(ev.at(0).type, "inspection");
    EXPECT_TRUE(ev[0].body.at("attrs").contains("energy"));
    EXPECT_EQ(ev[0].body.at("entity").at("kind"), "cow");
    EXPECT_EQ(ev[0].body.at("location").at("row"), s.state().agents[0].location.row);
}

TEST(Session, EqualSeedsGiveIdenticalStreams) {
    const std::vector<std::string> script{
        R"({"type":"load","model":"institutions","params":{"agents":5,"network":"random","reliability":0.5},"seed":11})",
        R"({"type":"subscribe","povs":["holdings"],"probes":true})",
        R"({"type":"step","count":8})",
        R"({"type":"rewind","tick":3})",
        R"({"type":"step","count":2})",
    };
    Session a("a"), b("b");
    for (const auto& cmd : script) {
        std::string ta, tb;
        for (const auto& e : a.handle_text(cmd)) ta += wire::encode(e);
        for (const auto& e : b.handle_text(cmd)) tb += wire::encode(e);
        EXPECT_EQ(ta, tb) << cmd;
    }
}

TEST(Session, SameRunAsBatchKernel) {
    Session s;
    send(s, R"({"type":"load","model":"pastoral","seed":5})");
    send(s, R"({"type":"step","count":20})");
    const auto& m = testutil::pastoral();
    EXPECT_EQ(state_hash(s.state()), state_hash(run(m, init_simulation(m, {}, 5), 20)));
}

TEST(Session, LogReplayReproducesState) {
    Session s;
    send(s, R"({"type":"load","model":"game_of_life","params":{"width":10,"height":10},"seed":2})");
    send(s, R"({"type":"play","tps":20})");
    s.play_tick();
    s.play_tick();
    send(s, R"({"type":"step","count":2})");
    s.play_tick();
    send(s, R"({"type":"edit","entity":{"kind":"patch","index":5},"attr":"alive","value":true})");
    s.play_tick();  // paused by the edit: no-op, not logged
    send(s, R"({"type":"rewind","tick":1})");
    send(s, R"({"type":"bogus"})");  // rejected, not logged

    Session replayed;
    replayed.replay(s.log());
    EXPECT_EQ(state_hash(replayed.state()), state_hash(s.state()));
    EXPECT_EQ(replayed.timeline().max_tick(), s.timeline().max_tick());
    EXPECT_EQ(replayed.timeline().branch_count(), s.timeline().branch_count());
    EXPECT_EQ(replayed.log(), s.log());
}
