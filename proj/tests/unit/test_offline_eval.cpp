#include <doctest.h>

#include <random>

#include "starwm/offline_eval.hpp"
#include "support.hpp"

using namespace starwm;

namespace {

Entity unit(int id, const char* kind, Point p, int hp = 100) { return {id, kind, p, hp, std::nullopt, ""}; }

QueueEntry task(int owner, const char* t, int progress) {
    QueueEntry q;
    q.owner_id = owner;
    q.owner_kind = "Barracks";
    q.task = t;
    q.progress_pct = progress;
    return q;
}

double row(const EvalReport& r, const char* name) {
    const auto v = r.value(name);
    REQUIRE(v.has_value());
    return *v;
}

}  // namespace

TEST_SUITE("offline_eval") {
    TEST_CASE("smape hand values") {
        const double a[] = {100}, b[] = {50}, z[] = {0};
        CHECK(smape(a, a) == 0.0);
        CHECK(std::abs(smape(a, b) - 50.0 / 75.0) < 1e-9);
        CHECK(smape(z, z) == 0.0);
        const double two[] = {1, 2};
        CHECK_THROWS_AS(smape(a, two), LengthMismatch);
        CHECK_THROWS_AS(smape(std::span<const double>(), std::span<const double>()), EmptyInput);
    }

    TEST_CASE("smape bounds and symmetry on random series") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = test::uniform(rng, 1, 20);
            std::vector<double> x(n), y(n);
            for (int i = 0; i < n; ++i) {
                x[i] = test::uniform(rng, 0, 3) == 0 ? 0.0 : test::uniform_real(rng, -1000, 1000);
                y[i] = test::uniform(rng, 0, 3) == 0 ? 0.0 : test::uniform_real(rng, -1000, 1000);
            }
            const double s = smape(x, y);
            CHECK(s >= 0.0);
            CHECK(s <= 2.0);
            CHECK(s == doctest::Approx(smape(y, x)));
            CHECK(smape(x, x) == 0.0);
        }
    }

    TEST_CASE("active-frame set F1") {
        const auto vac = active_frame_f1({{}, {}}, {{}, {}});
        CHECK(vac.vacuous);
        CHECK(vac.f1 == 1.0);
        CHECK(active_frame_f1({{"Punishergrenades"}}, {{"Punishergrenades"}}).f1 == 1.0);
        CHECK(active_frame_f1({{"A"}}, {{"B"}}).f1 == 0.0);
        // Inactive frames do not dilute the score.
        CHECK(active_frame_f1({{}, {"A"}, {}}, {{}, {"A"}, {}}).f1 == 1.0);
        CHECK(active_frame_f1({{"A", "B"}}, {{"A"}}).f1 == doctest::Approx(2.0 / 3.0));
        CHECK_THROWS_AS(active_frame_f1({{}}, {}), LengthMismatch);
    }

    TEST_CASE("queue metrics") {
        const std::vector<QueueEntry> t{task(65, "Train Marine", 80)};
        const auto same = queue_metrics(t, t);
        CHECK(same.f1 == 1.0);
        CHECK(*same.progress_mae == 0.0);
        const auto off = queue_metrics(t, {task(65, "Train Marine", 70)});
        CHECK(off.f1 == 1.0);
        CHECK(*off.progress_mae == doctest::Approx(10.0));
        const auto other = queue_metrics(t, {task(90, "Train Marine", 80)});
        CHECK(other.f1 == 0.0);
        CHECK(!other.progress_mae);
        // Repeated keys pair in list order.
        const auto rep = queue_metrics({task(1, "Train Marine", 10), task(1, "Train Marine", 0)},
                                       {task(1, "Train Marine", 20)});
        CHECK(rep.counts.tp == 1);
        CHECK(rep.counts.fn == 1);
        CHECK(*rep.progress_mae == doctest::Approx(10.0));
    }

    TEST_CASE("hybrid matcher examples") {
        const auto via_id = match_entities({unit(5, "Marine", {1, 1}, 80)}, {unit(5, "Marine", {9, 9}, 70)}, 10.0);
        REQUIRE(via_id.pairs.size() == 1);
        CHECK(via_id.via[0] == MatchVia::Id);
        CHECK(via_id.hp_abs_errors == std::vector<double>{10.0});

        const auto spatial = match_entities({unit(1, "Marine", {0, 0})}, {unit(2, "Marine", {0, 3})}, 10.0);
        REQUIRE(spatial.pairs.size() == 1);
        CHECK(spatial.via[0] == MatchVia::Spatial);

        const auto kinds = match_entities({unit(1, "Marine", {0, 0})}, {unit(2, "Marauder", {0, 0})}, 10.0);
        CHECK(kinds.counts.tp == 0);
        CHECK(kinds.counts.fp == 1);
        CHECK(kinds.counts.fn == 1);

        const auto far = match_entities({unit(1, "Marine", {0, 0})}, {unit(2, "Marine", {0, 11})}, 10.0);
        CHECK(far.counts.tp == 0);

        // Id pass ignores kinds unless strict.
        const auto loose = match_entities({unit(3, "Marine", {0, 0})}, {unit(3, "Marauder", {50, 50})}, 10.0);
        CHECK(loose.counts.tp == 1);
        MatchOptions strict;
        strict.strict_id_kind = true;
        CHECK(match_entities({unit(3, "Marine", {0, 0})}, {unit(3, "Marauder", {50, 50})}, strict).counts.tp == 0);
    }

    TEST_CASE("greedy spatial pass can fall short of a maximum matching") {
        // Greedy takes the closest pair (g0,p1) and strands g1; optimal pairs g0-p0, g1-p1.
        const std::vector<Entity> g{unit(1, "Marine", {0, 0}), unit(2, "Marine", {8, 0})};
        const std::vector<Entity> p{unit(11, "Marine", {-9, 0}), unit(12, "Marine", {1, 0})};
        CHECK(match_entities(g, p, 9.0).counts.tp == 1);
        CHECK(optimal_match_count(g, p, 9.0) == 2);
        MatchOptions opt;
        opt.delta = 9.0;
        opt.spatial = SpatialMatching::Optimal;
        CHECK(match_entities(g, p, opt).counts.tp == 2);
    }

    TEST_CASE("evaluate_sample perfect prediction fixpoint") {
        std::mt19937_64 rng(1);
        EvalConfig cfg;
        for (int i = 0; i < 200; ++i) {
            const Observation o = test::random_observation(rng);
            const SampleEval s = evaluate_sample(o, o, cfg);
            for (const auto& [f, v] : s.smape_terms) CHECK(v == 0.0);
            CHECK(s.queue.f1 == 1.0);
            for (auto c : kAllCategories) {
                CHECK(s.category(c).awd == 0.0);
                CHECK(s.category(c).counts.fp == 0);
                CHECK(s.category(c).counts.fn == 0);
            }
        }
    }

    TEST_CASE("static copy scored on a window where only progress moved") {
        Observation before;
        before.map_name = "Flat64";
        before.map_size = map_size_for("Flat64");
        before.queue.push_back(task(65, "Train Marine", 30));
        Observation after = before;
        after.queue[0].progress_pct = 55;
        const auto s = evaluate_sample(before, after, EvalConfig{});
        CHECK(*s.queue.progress_mae == doctest::Approx(25.0));
        CHECK(s.queue.f1 == 1.0);
        for (const auto& [f, v] : s.smape_terms) CHECK(v == 0.0);
    }

    TEST_CASE("missing category costs lambda") {
        Observation truth;
        truth.map_name = "Flat64";
        truth.map_size = map_size_for("Flat64");
        truth.enemy_units.push_back(unit(4, "Zergling", {10, 10}));
        Observation pred = truth;
        pred.enemy_units.clear();
        EvalConfig cfg;
        CHECK(evaluate_sample(pred, truth, cfg).category(Category::EnemyUnit).awd == cfg.lambda);
    }

    TEST_CASE("a hallucination of a novel kind never lowers AWD or raises precision") {
        std::mt19937_64 rng(8);
        EvalConfig cfg;
        for (int i = 0; i < 200; ++i) {
            const Observation truth = test::random_observation(rng);
            Observation pred = test::random_observation(rng);
            pred.map_size = truth.map_size;
            const auto base = evaluate_sample(pred, truth, cfg);
            pred.my_army.push_back(unit(5000, "Thor", {test::uniform(rng, 0, 88), test::uniform(rng, 0, 96)}));
            const auto more = evaluate_sample(pred, truth, cfg);
            const auto& a = base.category(Category::SelfUnit);
            const auto& b = more.category(Category::SelfUnit);
            CHECK(b.awd >= a.awd - 1e-12);
            const auto pa = a.counts.precision(), pb = b.counts.precision();
            if (pa && pb) CHECK(*pb <= *pa + 1e-12);
        }
    }

    TEST_CASE("aggregate reproduces side-level means") {
        SampleEval s;
        s.category(Category::SelfUnit).awd = 5.96;
        s.category(Category::SelfStruct).awd = 0.96;
        s.category(Category::EnemyUnit).awd = 30.94;
        s.category(Category::EnemyStruct).awd = 15.17;
        s.category(Category::SnapshotEnemyStruct).awd = 8.16;
        const auto r = aggregate({s}, EvalConfig{});
        CHECK(std::abs(r.self_awd - 3.46) < 0.005);
        CHECK(std::abs(r.enemy_awd - 18.09) < 0.005);
        CHECK(row(r, "Self AWD") == r.self_awd);
        CHECK(row(r, "Self Unit AWD") == doctest::Approx(5.96));
        CHECK_THROWS_AS(aggregate({}, EvalConfig{}), EmptyInput);
    }

    TEST_CASE("aggregate pools counts and bins time") {
        std::mt19937_64 rng(4);
        std::vector<std::pair<Observation, Observation>> pairs;
        for (int i = 0; i < 40; ++i) {
            const Observation t = test::random_observation(rng);
            Observation p = t;
            if (i % 2) p.minerals += 10;
            pairs.emplace_back(p, t);
        }
        EvalConfig cfg;
        const auto serial = evaluate_corpus(pairs, cfg, 1);
        const auto parallel = evaluate_corpus(pairs, cfg, 4);
        const auto a = aggregate(serial, cfg), b = aggregate(parallel, cfg);
        CHECK(report_to_json(a) == report_to_json(b));
        CHECK(row(a, "Queue F1") == 1.0);
        CHECK(row(a, "Minerals SMAPE") > 0.0);
        for (const auto& bin : a.time_series) CHECK(bin.bin_start_s % 30 == 0);
        CHECK(!report_to_csv(a).empty());
        CHECK(time_series_to_csv(a).rfind("bin_start_s,category,mean_awd", 0) == 0);

        const auto single = aggregate({serial[1]}, cfg);
        double m = 0.0;
        for (const auto& [f, v] : serial[1].smape_terms) {
            if (f == ScalarField::Minerals) m = v;
        }
        CHECK(row(single, "Minerals SMAPE") == m);
    }
}
