#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "qap/brute_force.hpp"
#include "qap/harness.hpp"
#include "qap/rng.hpp"
#include "qap/tabu_search.hpp"
#include "test_util.hpp"

using namespace qap;
using doctest::Approx;

namespace {

RunRecord fixture_record(double total_seconds, std::vector<double> hit_qs,
                         std::vector<double> targets,
                         std::uint64_t iterations = 100) {
  RunRecord r;
  r.heuristic = Heuristic::kTabu;
  r.instance_name = "fixture";
  r.iterations = iterations;
  r.executed_iterations = iterations;
  r.total_time_ns = static_cast<std::int64_t>(total_seconds * 1e9);
  r.targets = std::move(targets);
  for (double q : hit_qs) r.first_hits.push_back({q, 1, 1});
  r.final_best_cost = 0;
  r.best_known = 100;
  return r;
}

RunSet fixture_set(std::uint64_t iterations, std::vector<RunRecord> records) {
  RunSet s;
  s.heuristic = Heuristic::kTabu;
  s.instance_name = "fixture";
  s.iterations = iterations;
  for (RunRecord& r : records) {
    r.iterations = iterations;
    r.executed_iterations = iterations;
    s.records.push_back(std::move(r));
  }
  return s;
}

QualityCurve fixture_curve(Heuristic h, const std::string& instance,
                           std::vector<std::pair<double, double>> qt) {
  QualityCurve c;
  c.heuristic = h;
  c.instance_name = instance;
  for (auto [q, t] : qt) c.points[q] = CurvePoint{t, 1000, 1, 1};
  return c;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("t_bar averages run time over successes") {
  // Both runs succeed: (2s + 4s) / 2.
  RunSet both = fixture_set(100, {fixture_record(2.0, {0.01}, {0.01}),
                                  fixture_record(4.0, {0.01}, {0.01})});
  CHECK(*t_bar_seconds(both, 0.01) == Approx(3.0));

  // One success: failures still pay into the numerator, (2s + 4s) / 1.
  RunSet one = fixture_set(100, {fixture_record(2.0, {0.01}, {0.01}),
                                 fixture_record(4.0, {}, {0.01})});
  CHECK(*t_bar_seconds(one, 0.01) == Approx(6.0));

  // No success: undefined, not zero or a sentinel.
  RunSet none = fixture_set(100, {fixture_record(2.0, {}, {0.01}),
                                  fixture_record(4.0, {}, {0.01})});
  CHECK(!t_bar_seconds(none, 0.01).has_value());

  // Unrecorded targets are contract violations.
  CHECK_THROWS_AS(t_bar_seconds(both, 0.5), ValidationError);
}

TEST_CASE("multi_start with one run reproduces a single run exactly") {
  Instance inst = testing::random_instance(61, 8);
  inst.best_known = brute_force(inst, 8).best.cost;
  MultiStartOptions opt;
  opt.runs = 1;
  opt.base_seed = 5150;
  const RunSet set = multi_start(Heuristic::kTabu, inst, 500, opt, {0.1, 0.0});
  REQUIRE(set.records.size() == 1);
  TabuConfig cfg;
  cfg.iterations = 500;
  cfg.seed = derive_seed(5150, 0);
  const RunRecord solo = run_tabu(inst, cfg, {0.1, 0.0});
  CHECK(set.records[0].seed == solo.seed);
  CHECK(set.records[0].final_best_cost == solo.final_best_cost);
  REQUIRE(set.records[0].first_hits.size() == solo.first_hits.size());
  for (std::size_t i = 0; i < solo.first_hits.size(); ++i)
    CHECK(set.records[0].first_hits[i].iteration ==
          solo.first_hits[i].iteration);
}

TEST_CASE("multi_start is deterministic modulo timing") {
  Instance inst = testing::random_instance(67, 9);
  inst.best_known = brute_force(inst, 9).best.cost;
  MultiStartOptions opt;
  opt.runs = 6;
  opt.base_seed = 31337;
  opt.workers = 3;
  const std::vector<double> targets{0.2, 0.05, 0.0};
  const RunSet a = multi_start(Heuristic::kAnnealing, inst, 20000, opt, targets);
  opt.workers = 1;  // scheduling must not matter
  const RunSet b = multi_start(Heuristic::kAnnealing, inst, 20000, opt, targets);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].seed == b.records[k].seed);
    CHECK(a.records[k].final_best_cost == b.records[k].final_best_cost);
    REQUIRE(a.records[k].first_hits.size() == b.records[k].first_hits.size());
    for (std::size_t i = 0; i < a.records[k].first_hits.size(); ++i)
      CHECK(a.records[k].first_hits[i].iteration ==
            b.records[k].first_hits[i].iteration);
  }
}

TEST_CASE("success counts are nonincreasing as q decreases") {
  Instance inst = testing::random_instance(71, 8);
  inst.best_known = brute_force(inst, 8).best.cost;
  MultiStartOptions opt;
  opt.runs = 20;
  opt.base_seed = 11;
  const std::vector<double> targets{0.1, 0.05, 0.02, 0.0};
  const RunSet set = multi_start(Heuristic::kTabu, inst, 300, opt, targets);
  std::uint64_t last = opt.runs + 1;
  for (double q : targets) {
    std::uint64_t successes = 0;
    for (const RunRecord& r : set.records)
      if (r.hit_for(q)) ++successes;
    CHECK(successes <= last);
    last = successes;
  }
}

TEST_CASE("t_bar is nonincreasing in q for a fixed budget") {
  Instance inst = testing::random_instance(73, 8);
  inst.best_known = brute_force(inst, 8).best.cost;
  MultiStartOptions opt;
  opt.runs = 12;
  opt.base_seed = 23;
  const std::vector<double> targets{0.2, 0.1, 0.05, 0.02, 0.0};
  const RunSet set = multi_start(Heuristic::kTabu, inst, 400, opt, targets);
  double last = -1;
  for (double q : targets) {  // descending q: t_bar must not decrease
    const auto t = t_bar_seconds(set, q);
    if (!t) break;  // once undefined, smaller q stays undefined
    if (last >= 0) CHECK(*t >= last);
    last = *t;
  }
}

TEST_CASE("surface and curve reproduce a hand-built minimum") {
  // T-bar over the grid {1000, 10000, 100000} is {5, 3, 7}.
  std::vector<RunSet> sets;
  sets.push_back(fixture_set(1000, {fixture_record(5.0, {0.01}, {0.01})}));
  sets.push_back(fixture_set(10000, {fixture_record(3.0, {0.01}, {0.01})}));
  sets.push_back(fixture_set(100000, {fixture_record(7.0, {0.01}, {0.01})}));
  const TbarSurface surface = surface_from_runsets(sets, {0.01});
  REQUIRE(surface.cells.size() == 1);
  REQUIRE(surface.cells[0].size() == 3);
  CHECK(*surface.cells[0][0].t_bar_seconds == Approx(5.0));
  CHECK(*surface.cells[0][1].t_bar_seconds == Approx(3.0));
  CHECK(*surface.cells[0][2].t_bar_seconds == Approx(7.0));
  const QualityCurve curve = curve_from_surface(surface);
  REQUIRE(curve.points.count(0.01));
  CHECK(curve.points.at(0.01).i_opt == 10000);
  CHECK(curve.points.at(0.01).t_bar_seconds == Approx(3.0));
}

TEST_CASE("single-element grids pick that element wherever defined") {
  std::vector<RunSet> sets;
  sets.push_back(
      fixture_set(5000, {fixture_record(2.0, {0.05}, {0.05, 0.01})}));
  const TbarSurface surface = surface_from_runsets(sets, {0.05, 0.01});
  const QualityCurve curve = curve_from_surface(surface);
  REQUIRE(curve.points.count(0.05));
  CHECK(curve.points.at(0.05).i_opt == 5000);
  CHECK(!curve.points.count(0.01));  // undefined everywhere: excluded
}

TEST_CASE("undefined cells are excluded from the minimization") {
  std::vector<RunSet> sets;
  sets.push_back(fixture_set(1000, {fixture_record(1.0, {}, {0.01})}));
  sets.push_back(fixture_set(2000, {fixture_record(9.0, {0.01}, {0.01})}));
  const QualityCurve curve =
      curve_from_surface(surface_from_runsets(sets, {0.01}));
  REQUIRE(curve.points.count(0.01));
  CHECK(curve.points.at(0.01).i_opt == 2000);  // the only defined cell
}

TEST_CASE("ties go to the smaller budget") {
  std::vector<RunSet> sets;
  sets.push_back(fixture_set(1000, {fixture_record(3.0, {0.01}, {0.01})}));
  sets.push_back(fixture_set(2000, {fixture_record(3.0, {0.01}, {0.01})}));
  const QualityCurve curve =
      curve_from_surface(surface_from_runsets(sets, {0.01}));
  CHECK(curve.points.at(0.01).i_opt == 1000);
}

TEST_CASE("run logs round-trip") {
  Instance inst = testing::random_instance(79, 7);
  inst.best_known = brute_force(inst, 7).best.cost;
  MultiStartOptions opt;
  opt.runs = 4;
  opt.base_seed = 3;
  const RunSet set =
      multi_start(Heuristic::kAnnealing, inst, 5000, opt, {0.1, 0.0});
  const std::string path = temp_path("qap_roundtrip.jsonl");
  persist_runs(set, path);
  const LoadResult loaded = load_runs(path);
  CHECK(loaded.skipped_lines == 0);
  REQUIRE(loaded.set.records.size() == set.records.size());
  CHECK(loaded.set.heuristic == set.heuristic);
  CHECK(loaded.set.iterations == set.iterations);
  for (std::size_t k = 0; k < set.records.size(); ++k) {
    CHECK(loaded.set.records[k].seed == set.records[k].seed);
    CHECK(loaded.set.records[k].total_time_ns == set.records[k].total_time_ns);
    CHECK(loaded.set.records[k].first_hits == set.records[k].first_hits);
    CHECK(loaded.set.records[k].targets == set.records[k].targets);
    CHECK(loaded.set.records[k].final_best_cost ==
          set.records[k].final_best_cost);
  }
  // T-bar from persisted records equals T-bar from in-memory records.
  CHECK(t_bar_seconds(loaded.set, 0.1) == t_bar_seconds(set, 0.1));
  CHECK(t_bar_seconds(loaded.set, 0.0) == t_bar_seconds(set, 0.0));
  std::remove(path.c_str());
}

TEST_CASE("appending runs equals concatenation") {
  RunSet first = fixture_set(100, {fixture_record(1.0, {0.01}, {0.01}),
                                   fixture_record(2.0, {}, {0.01})});
  RunSet second = fixture_set(100, {fixture_record(3.0, {0.01}, {0.01})});
  const std::string path = temp_path("qap_append.jsonl");
  persist_runs(first, path);
  persist_runs(second, path, /*append=*/true);
  const LoadResult loaded = load_runs(path);
  CHECK(loaded.set.records.size() == 3);
  CHECK(loaded.set.records[2].total_time_ns ==
        second.records[0].total_time_ns);
  // Appending a different shape is rejected.
  RunSet other = fixture_set(999, {fixture_record(1.0, {}, {0.01})});
  CHECK_THROWS_AS(persist_runs(other, path, true), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("corrupt and truncated lines are skipped with a count") {
  RunSet set = fixture_set(100, {fixture_record(1.0, {0.01}, {0.01}),
                                 fixture_record(2.0, {0.01}, {0.01}),
                                 fixture_record(3.0, {}, {0.01})});
  std::stringstream buf;
  persist_runs(set, buf);
  std::string text = buf.str();

  SUBCASE("mutated byte") {
    const auto pos = text.find("\"total_time_ns\":2");
    REQUIRE(pos != std::string::npos);
    text[pos] = '?';  // breaks the second record's JSON
    std::istringstream in(text);
    const LoadResult loaded = load_runs(in);
    CHECK(loaded.skipped_lines == 1);
    CHECK(loaded.set.records.size() == 2);
  }

  SUBCASE("truncated final line") {
    text.resize(text.size() - 30);
    std::istringstream in(text);
    const LoadResult loaded = load_runs(in);
    CHECK(loaded.skipped_lines == 1);
    CHECK(loaded.set.records.size() == 2);
  }
}

TEST_CASE("schema version mismatches are errors") {
  std::istringstream in(
      R"({"format":"qap-runs","version":99,"heuristic":"ts","instance":"x","iterations":10})");
  CHECK_THROWS_AS(load_runs(in), ParseError);
  std::istringstream not_a_log("just text\n");
  CHECK_THROWS_AS(load_runs(not_a_log), ParseError);
  std::istringstream incomplete_header(
      R"({"format":"qap-runs","version":1,"instance":"x"})");
  CHECK_THROWS_AS(load_runs(incomplete_header), ParseError);
}

TEST_CASE("seed derivation has no collisions over a million indices") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2000000);
  for (std::uint64_t k = 0; k < 1000000; ++k)
    CHECK(seen.insert(derive_seed(424242, k)).second);
}

TEST_CASE("crossover finds the hand-built bracket") {
  const auto sa = fixture_curve(Heuristic::kAnnealing, "fixture",
                                {{0.01, 1.0}, {0.02, 3.0}});
  const auto ts = fixture_curve(Heuristic::kTabu, "fixture",
                                {{0.01, 2.0}, {0.02, 2.0}});
  const CrossoverReport report = crossover(sa, ts);
  REQUIRE(report.brackets.size() == 1);
  CHECK(report.brackets[0].q_lo == 0.01);
  CHECK(report.brackets[0].q_hi == 0.02);
  CHECK(report.dominant_below == Heuristic::kAnnealing);
  CHECK(report.dominant_above == Heuristic::kTabu);
  CHECK(!report.non_monotone);
  // Interpolating log(T_sa) - log(T_ts) linearly in q:
  // f(0.01) = -ln 2, f(0.02) = ln(3/2); the root sits at
  // 0.01 + 0.01 * ln2 / (ln2 + ln 1.5).
  const double expected =
      0.01 + 0.01 * std::log(2.0) / (std::log(2.0) + std::log(1.5));
  REQUIRE(report.q_star.has_value());
  CHECK(*report.q_star == Approx(expected));
  CHECK(*report.q_star == Approx(0.0163093).epsilon(1e-4));
}

TEST_CASE("identical curves are degenerate with no estimate") {
  const auto sa = fixture_curve(Heuristic::kAnnealing, "fixture",
                                {{0.01, 2.0}, {0.02, 2.0}});
  const auto ts = fixture_curve(Heuristic::kTabu, "fixture",
                                {{0.01, 2.0}, {0.02, 2.0}});
  const CrossoverReport report = crossover(sa, ts);
  CHECK(report.degenerate);
  CHECK(!report.q_star.has_value());
  CHECK(report.brackets.empty());
}

TEST_CASE("no sign change reports the dominant heuristic") {
  const auto sa = fixture_curve(Heuristic::kAnnealing, "fixture",
                                {{0.01, 1.0}, {0.02, 1.5}});
  const auto ts = fixture_curve(Heuristic::kTabu, "fixture",
                                {{0.01, 2.0}, {0.02, 2.0}});
  const CrossoverReport report = crossover(sa, ts);
  CHECK(report.brackets.empty());
  CHECK(!report.q_star.has_value());
  CHECK(report.dominant_below == Heuristic::kAnnealing);
  CHECK(report.dominant_above == Heuristic::kAnnealing);
}

TEST_CASE("multiple sign changes are flagged non-monotone") {
  const auto sa =
      fixture_curve(Heuristic::kAnnealing, "fixture",
                    {{0.01, 1.0}, {0.02, 3.0}, {0.04, 1.0}});
  const auto ts = fixture_curve(
      Heuristic::kTabu, "fixture", {{0.01, 2.0}, {0.02, 2.0}, {0.04, 2.0}});
  const CrossoverReport report = crossover(sa, ts);
  CHECK(report.brackets.size() == 2);
  CHECK(report.non_monotone);
  CHECK(!report.q_star.has_value());
}

TEST_CASE("crossover validates its inputs") {
  const auto sa =
      fixture_curve(Heuristic::kAnnealing, "a", {{0.01, 1.0}, {0.02, 3.0}});
  const auto ts =
      fixture_curve(Heuristic::kTabu, "b", {{0.01, 2.0}, {0.02, 2.0}});
  CHECK_THROWS_AS(crossover(sa, ts), ValidationError);  // instances differ
  CHECK_THROWS_AS(crossover(ts, sa), ValidationError);  // roles swapped
  const auto sparse = fixture_curve(Heuristic::kTabu, "a", {{0.07, 2.0}});
  CHECK_THROWS_AS(crossover(sa, sparse), ValidationError);  // < 2 common
}

TEST_CASE("curve csv round-trips") {
  const auto curve = fixture_curve(Heuristic::kAnnealing, "fixture",
                                   {{0.01, 1.5}, {0.02, 0.25}});
  std::stringstream buf;
  write_curve_csv(curve, buf, {"seed=7"});
  const CurveFile back = read_curve_csv(buf);
  CHECK(back.curve.instance_name == "fixture");
  CHECK(back.curve.heuristic == Heuristic::kAnnealing);
  CHECK(back.meta.at("seed") == "7");
  REQUIRE(back.curve.points.size() == 2);
  CHECK(back.curve.points.at(0.01).t_bar_seconds == 1.5);
  CHECK(back.curve.points.at(0.02).t_bar_seconds == 0.25);
}

TEST_CASE("surface csv spells out undefined cells") {
  std::vector<RunSet> sets;
  sets.push_back(fixture_set(1000, {fixture_record(1.0, {}, {0.01})}));
  const TbarSurface surface = surface_from_runsets(sets, {0.01});
  std::stringstream buf;
  write_surface_csv(surface, buf);
  CHECK(buf.str().find("0.01,1000,undefined,0,1") != std::string::npos);
}

TEST_CASE("hardness table merges curves and passes single ones through") {
  CurveFile a{fixture_curve(Heuristic::kAnnealing, "x", {{0.01, 1.0}}), {}};
  CurveFile b{fixture_curve(Heuristic::kTabu, "y", {{0.02, 2.0}}), {}};
  std::stringstream merged;
  write_hardness_csv({a, b}, merged);
  CHECK(merged.str().find("x,sa,0.01,1") != std::string::npos);
  CHECK(merged.str().find("y,ts,0.02,2") != std::string::npos);
  std::stringstream solo;
  write_hardness_csv({a}, solo);
  CHECK(solo.str().find("x,sa,0.01,1") != std::string::npos);
  CHECK_THROWS_AS(write_hardness_csv({}, solo), ValidationError);
}

TEST_CASE("truncate-at-hit stops runs early without changing the metric") {
  Instance inst = testing::random_instance(97, 8);
  inst.best_known = brute_force(inst, 8).best.cost;
  MultiStartOptions opt;
  opt.runs = 6;
  opt.base_seed = 55;
  opt.truncate_at_hit = true;
  // A generous target every random start satisfies: runs stop immediately.
  const RunSet set = multi_start(Heuristic::kTabu, inst, 5000, opt, {100.0});
  for (const RunRecord& r : set.records) {
    CHECK(r.iterations == 5000);
    CHECK(r.executed_iterations == 0);  // start already met the target
    REQUIRE(r.first_hits.size() == 1);
    CHECK(r.first_hits[0].iteration == 0);
    CHECK(r.first_hits[0].time_ns <= r.total_time_ns);
  }
  CHECK(t_bar_seconds(set, 100.0).has_value());

  // A hard target (the optimum) truncates mid-run at the hit iteration.
  opt.base_seed = 56;
  const RunSet hard = multi_start(Heuristic::kTabu, inst, 5000, opt, {0.0});
  bool truncated = false;
  for (const RunRecord& r : hard.records) {
    if (const auto hit = r.hit_for(0.0)) {
      CHECK(r.executed_iterations == hit->iteration);
      truncated |= r.executed_iterations < r.iterations;
    } else {
      CHECK(r.executed_iterations == r.iterations);
    }
  }
  CHECK(truncated);
}

TEST_CASE("multi_start propagates per-run errors") {
  Instance inst = testing::random_instance(98, 6);
  inst.best_known.reset();  // targets become a contract violation
  MultiStartOptions opt;
  opt.runs = 4;
  CHECK_THROWS_AS(multi_start(Heuristic::kTabu, inst, 100, opt, {0.05}),
                  ValidationError);
  opt.runs = 0;
  CHECK_THROWS_AS(multi_start(Heuristic::kTabu, inst, 100, opt, {}),
                  ValidationError);
}

TEST_CASE("iteration_sweep rejects an empty grid") {
  Instance inst = testing::random_instance(83, 6);
  inst.best_known = brute_force(inst, 6).best.cost;
  MultiStartOptions opt;
  CHECK_THROWS_AS(iteration_sweep(Heuristic::kTabu, inst, {}, opt, {0.1}),
                  ValidationError);
}

TEST_CASE("iteration_sweep produces a surface over the full grid") {
  Instance inst = testing::random_instance(89, 7);
  inst.best_known = brute_force(inst, 7).best.cost;
  MultiStartOptions opt;
  opt.runs = 6;
  opt.base_seed = 99;
  const std::vector<std::uint64_t> grid{50, 200, 1000};
  const SweepResult sweep =
      iteration_sweep(Heuristic::kTabu, inst, grid, opt, {0.2, 0.0});
  CHECK(sweep.surface.grid == grid);
  CHECK(sweep.runsets.size() == 3);
  for (const RunSet& s : sweep.runsets) CHECK(s.records.size() == 6);
  // A cell's seeds depend only on the budget, not the rest of the grid.
  const SweepResult sub =
      iteration_sweep(Heuristic::kTabu, inst, {200}, opt, {0.2, 0.0});
  CHECK(sub.runsets[0].records[0].seed == sweep.runsets[1].records[0].seed);
}
