#include <doctest.h>

#include <algorithm>
#include <map>

#include "socsim/core/agent.hpp"
#include "socsim/core/error.hpp"
#include "socsim/core/event_queue.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"
#include "socsim/core/table.hpp"

using namespace socsim;
using core::Errc;
using core::Event;
using core::EventQueue;
using core::Json;
using core::SimError;

namespace {

Event make_event(core::Tick t, std::int32_t prio, std::string kind = "k",
                 std::string agg = "") {
    Event e;
    e.time = t;
    e.priority = prio;
    e.kind = std::move(kind);
    e.agg_key = std::move(agg);
    e.initiators = {core::EntityRef::env()};
    e.targets = {core::EntityRef::of(0)};
    e.payload = Json{{"x", 1}};
    return e;
}

} // namespace

TEST_SUITE("hash") {
    TEST_CASE("sha256 NIST vectors") {
        CHECK(core::sha256_hex("") ==
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(core::sha256_hex("abc") ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(core::sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    }

    TEST_CASE("sha256 streaming equals one-shot across block boundaries") {
        std::string data(200000, 'x');
        for (std::size_t i = 0; i < data.size(); ++i) data[i] = char('a' + (i * 31) % 26);
        core::Sha256 h;
        std::size_t off = 0;
        std::size_t chunk = 1;
        while (off < data.size()) {
            const std::size_t len = std::min(chunk, data.size() - off);
            h.update(data.data() + off, len);
            off += len;
            chunk = chunk * 3 + 1;
        }
        CHECK(h.hex_digest() == core::sha256_hex(data));
    }

    TEST_CASE("fnv1a64 reference values") {
        CHECK(core::fnv1a64("") == 14695981039346656037ull);
        CHECK(core::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    }
}

TEST_SUITE("rng") {
    TEST_CASE("streams are order-independent") {
        core::RngStream a(7, "test", 3);
        core::RngStream b(7, "test", 3);
        std::vector<std::uint64_t> seq;
        for (int i = 0; i < 16; ++i) seq.push_back(a.next());
        for (int i = 15; i >= 0; --i) CHECK(b.at(std::uint64_t(i)) == seq[std::size_t(i)]);
    }

    TEST_CASE("distinct purposes decorrelate") {
        core::RngStream a(7, "alpha");
        core::RngStream b(7, "beta");
        int same = 0;
        for (int i = 0; i < 64; ++i) {
            if (a.next() == b.next()) ++same;
        }
        CHECK(same == 0);
    }

    TEST_CASE("next_below bounds and rough uniformity") {
        core::RngStream r(42, "uniform");
        std::array<int, 10> counts{};
        for (int i = 0; i < 20000; ++i) {
            const auto v = r.next_below(10);
            REQUIRE(v < 10);
            ++counts[std::size_t(v)];
        }
        for (int c : counts) {
            CHECK(c > 1700);
            CHECK(c < 2300);
        }
    }

    TEST_CASE("sample_without_replacement: distinct, sorted, in range") {
        core::RngStream r(1, "sample");
        const auto s = r.sample_without_replacement(1000, 50);
        REQUIRE(s.size() == 50);
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s[i - 1] < s[i]);
        }
        CHECK(s.back() < 1000);
        // dense path
        core::RngStream r2(1, "sample2");
        const auto d = r2.sample_without_replacement(10, 9);
        REQUIRE(d.size() == 9);
        for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i - 1] < d[i]);
    }
}

TEST_SUITE("event_queue") {
    TEST_CASE("pop order follows (time, priority, seq)") {
        EventQueue q;
        q.enqueue(make_event(1, 1));
        q.enqueue(make_event(2, 0));
        q.enqueue(make_event(1, 5));
        auto [t1, b1] = q.pop_tick_batch();
        CHECK(t1 == 1);
        REQUIRE(b1.size() == 2);
        CHECK(b1[0].priority == 1);
        CHECK(b1[1].priority == 5);
        auto [t2, b2] = q.pop_tick_batch();
        CHECK(t2 == 2);
        REQUIRE(b2.size() == 1);
        CHECK(b2[0].priority == 0);
    }

    TEST_CASE("equal (time, priority) ties break by seq") {
        EventQueue q;
        const auto s1 = q.enqueue(make_event(2, 5));
        const auto s2 = q.enqueue(make_event(2, 5));
        REQUIRE(s1 < s2);
        auto [t, batch] = q.pop_tick_batch();
        CHECK(t == 2);
        REQUIRE(batch.size() == 2);
        CHECK(batch[0].seq == s1);
        CHECK(batch[1].seq == s2);
    }

    TEST_CASE("past timestamps are rejected") {
        EventQueue q;
        q.enqueue(make_event(5, 0));
        auto popped = q.pop_tick_batch();
        CHECK(popped.first == 5);
        CHECK_THROWS_AS(q.enqueue(make_event(4, 0)), SimError);
        try {
            q.enqueue(make_event(4, 0));
        } catch (const SimError& e) {
            CHECK(e.code() == Errc::PastTimestamp);
        }
    }

    TEST_CASE("pop on empty queue raises EmptyQueue") {
        EventQueue q;
        CHECK_THROWS_AS(q.pop_tick_batch(), SimError);
    }

    TEST_CASE("single event pops alone and empties the queue") {
        EventQueue q;
        q.enqueue(make_event(3, 7));
        auto [t, batch] = q.pop_tick_batch();
        CHECK(t == 3);
        CHECK(batch.size() == 1);
        CHECK(q.empty());
    }

    TEST_CASE("property: popped (time,priority,seq) is lexicographically non-decreasing") {
        core::RngStream rng(99, "queue_prop");
        EventQueue q;
        std::vector<std::tuple<core::Tick, std::int32_t, std::uint64_t>> popped;
        for (int step = 0; step < 5000; ++step) {
            const bool push = q.empty() || rng.next_below(100) < 60;
            if (push) {
                const core::Tick t = q.min_schedulable_time() + rng.next_below(5);
                q.enqueue(make_event(t, std::int32_t(rng.next_below(4))));
            } else {
                auto [t, batch] = q.pop_tick_batch();
                (void)t;
                for (const auto& e : batch) {
                    popped.emplace_back(e.time, e.priority, e.seq);
                }
            }
        }
        while (!q.empty()) {
            auto [t, batch] = q.pop_tick_batch();
            for (const auto& e : batch) popped.emplace_back(e.time, e.priority, e.seq);
        }
        for (std::size_t i = 1; i < popped.size(); ++i) {
            CHECK(popped[i - 1] <= popped[i]);
        }
    }
}

TEST_SUITE("aggregate") {
    TEST_CASE("three same-key events merge into one") {
        std::vector<Event> batch;
        for (int i = 0; i < 3; ++i) {
            Event e = make_event(7, i, "opinion_update", "opinion_round_7");
            e.seq = std::uint64_t(i);
            e.payload = Json{{"i", i}};
            e.initiators = {core::EntityRef::of(core::AgentId(i))};
            e.targets = {core::EntityRef::of(core::AgentId(i + 10))};
            batch.push_back(e);
        }
        const auto out = core::aggregate(batch);
        REQUIRE(out.size() == 1);
        CHECK(core::is_merged_event(out[0]));
        CHECK(out[0].payload.size() == 3);
        CHECK(out[0].priority == 0);
        CHECK(out[0].seq == 0);
        CHECK(out[0].initiators.size() == 3);
        CHECK(out[0].targets.size() == 3);
        // member order is seq order
        CHECK(out[0].payload[0]["payload"]["i"] == 0);
        CHECK(out[0].payload[2]["payload"]["i"] == 2);
    }

    TEST_CASE("distinct keys pass through unchanged") {
        Event a = make_event(1, 0, "k", "key_a");
        a.seq = 0;
        Event b = make_event(1, 0, "k", "key_b");
        b.seq = 1;
        const auto out = core::aggregate(std::vector<Event>{a, b});
        REQUIRE(out.size() == 2);
        CHECK(out[0] == a);
        CHECK(out[1] == b);
    }

    TEST_CASE("mixed ticks raise MixedTick") {
        Event a = make_event(1, 0);
        Event b = make_event(2, 0);
        CHECK_THROWS_AS(core::aggregate(std::vector<Event>{a, b}), SimError);
    }

    TEST_CASE("mixed keys vs brute-force grouping oracle") {
        // {k, k, empty, j} -> 3 events, payload members conserve to 4.
        std::vector<Event> batch;
        const char* keys[4] = {"k", "k", "", "j"};
        for (int i = 0; i < 4; ++i) {
            Event e = make_event(3, 4 - i, "kind", keys[i]);
            e.seq = std::uint64_t(i);
            batch.push_back(e);
        }
        const auto out = core::aggregate(batch);
        CHECK(out.size() == 3);
        std::size_t members = 0;
        for (const auto& e : out) members += core::member_payload_count(e);
        CHECK(members == 4);

        // Brute-force oracle: group sizes by key.
        std::map<std::string, int> oracle;
        int singles = 0;
        for (const auto& e : batch) {
            if (e.agg_key.empty()) ++singles;
            else ++oracle[e.agg_key];
        }
        std::size_t expected_events = std::size_t(singles);
        for (const auto& [k, n] : oracle) {
            (void)k;
            (void)n;
            ++expected_events;
        }
        CHECK(out.size() == expected_events);
    }

    TEST_CASE("property: payload conservation + idempotence on random batches") {
        core::RngStream rng(5, "agg_prop");
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<Event> batch;
            const int n = 1 + int(rng.next_below(12));
            for (int i = 0; i < n; ++i) {
                const int which = int(rng.next_below(4));
                std::string key = which == 0 ? "" : "key" + std::to_string(which);
                Event e = make_event(9, std::int32_t(rng.next_below(3)), "kind", key);
                e.seq = std::uint64_t(i);
                e.payload = Json{{"v", i}};
                batch.push_back(e);
            }
            const auto once = core::aggregate(batch);
            std::size_t members = 0;
            for (const auto& e : once) members += core::member_payload_count(e);
            CHECK(members == std::size_t(n));
            const auto twice = core::aggregate(once);
            CHECK(once == twice);
            // output sorted by (priority, seq)
            for (std::size_t i = 1; i < once.size(); ++i) {
                const bool ordered =
                    once[i - 1].priority < once[i].priority ||
                    (once[i - 1].priority == once[i].priority && once[i - 1].seq < once[i].seq);
                CHECK(ordered);
            }
        }
    }
}

TEST_SUITE("event_serde") {
    TEST_CASE("property: decode(encode(e)) == e over generated payloads") {
        core::RngStream rng(11, "serde");
        for (int iter = 0; iter < 300; ++iter) {
            Event e;
            e.seq = rng.next();
            e.time = rng.next_below(1000);
            e.priority = std::int32_t(rng.next_below(7)) - 3;
            e.kind = "kind" + std::to_string(rng.next_below(5));
            e.agg_key = rng.next_below(2) ? "" : "agg" + std::to_string(rng.next_below(3));
            const int ni = int(rng.next_below(3));
            for (int i = 0; i < ni; ++i) {
                e.initiators.push_back(rng.next_below(5) == 0
                                           ? core::EntityRef::env()
                                           : core::EntityRef::of(rng.next_below(100)));
            }
            e.targets.push_back(core::EntityRef::of(rng.next_below(100)));
            Json payload = Json::object();
            payload["i"] = std::int64_t(rng.next()) >> 3;
            payload["s"] = "text " + std::to_string(rng.next_below(50));
            payload["b"] = rng.next_below(2) == 1;
            payload["list"] = Json::array({1, 2, Json{{"nested", true}}});
            if (rng.next_below(2)) payload["f"] = double(rng.next_below(1000)) / 7.0;
            e.payload = payload;
            const Event back = core::decode_event(core::encode_event(e));
            CHECK(back == e);
        }
    }
}

TEST_SUITE("table") {
    TEST_CASE("tsv round trip") {
        core::Table t("demo", {"a", "b"});
        t.add_row({"x", core::Table::fmt(1.5)});
        t.add_row({"y", core::Table::fmt(std::int64_t(-7))});
        const auto path = std::filesystem::temp_directory_path() / "socsim_table_test.tsv";
        t.write_tsv(path);
        const auto back = core::Table::read_tsv(path);
        CHECK(back.columns == t.columns);
        CHECK(back.rows == t.rows);
        CHECK(back.num(0, "b") == 1.5);
        std::filesystem::remove(path);
    }

    TEST_CASE("unknown column raises") {
        core::Table t("demo", {"a"});
        t.add_row({"x"});
        CHECK_THROWS_AS(t.col_index("nope"), SimError);
    }
}

TEST_SUITE("opinion_state") {
    TEST_CASE("canonical order and names") {
        CHECK(int(core::OpinionState::Agree) == 0);
        CHECK(int(core::OpinionState::Disagree) == 1);
        CHECK(int(core::OpinionState::Neutral) == 2);
        CHECK(core::opinion_from_string("agree") == core::OpinionState::Agree);
        CHECK_THROWS_AS(core::opinion_from_string("maybe"), SimError);
    }
}
