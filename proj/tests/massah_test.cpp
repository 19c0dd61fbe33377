// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "massah/massah.hpp"
#include "oracle.hpp"
#include "scripted_arm.hpp"
#include "test_util.hpp"

using namespace massah;
using test::scripted_arms;

namespace {

const std::string kData = MASSAH_DATA_DIR;

PolicyParams policy(PolicyKind kind, RewardKind reward = RewardKind::kNaive, std::uint64_t seed = 0) {
  PolicyParams p;
  p.policy = kind;
  p.reward = reward;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("budget arithmetic: q = floor(T/t) - N") {
  CHECK(Budget::evaluations(5, 150).iterations(5) == 25);
  CHECK(Budget::evaluations(5, 27).iterations(5) == 0);
  CHECK(Budget::seconds(30, 10800).iterations(5) == 355);
  CHECK_THROWS_AS(Budget::evaluations(5, 24).iterations(5), std::invalid_argument);
  CHECK_THROWS(Budget::evaluations(0, 10).iterations(1));
  CHECK_THROWS((Budget{BudgetMode::kEvaluations, 2.5, 10}.iterations(1)));
  CHECK_THROWS(Budget::evaluations(1, 10).iterations(0));
}

TEST_CASE("constant arms: the lower one wins for every policy") {
  for (auto kind : {PolicyKind::kEpsilonGreedy, PolicyKind::kUcb1, PolicyKind::kSoftmax}) {
    for (auto reward : {RewardKind::kNaive, RewardKind::kExpectation}) {
      auto arms = scripted_arms({{0.2}, {0.5}});
      const SearchResult r = run_massah(arms, policy(kind, reward, 3), Budget::evaluations(1, 6));
      CHECK(r.best_risk == 0.2);
      CHECK(r.best_arm == 0);
      CHECK(r.trace.size() == 6);
    }
  }
}

TEST_CASE("q = 0 returns the best of the init phase") {
  auto arms = scripted_arms({{0.6}, {0.3}, {0.4}});
  const SearchResult r = run_massah(arms, policy(PolicyKind::kUcb1), Budget::evaluations(2, 7));
  CHECK(r.trace.size() == 3);
  CHECK(r.best_arm == 1);
  CHECK(r.best_risk == 0.3);
  for (const auto& e : r.trace) CHECK(e.init);
}

TEST_CASE("a budget too small for the init phase fails before any evaluation") {
  auto arms = scripted_arms({{0.6}, {0.3}, {0.4}});
  CHECK_THROWS_AS(run_massah(arms, policy(PolicyKind::kUcb1), Budget::evaluations(2, 5)),
                  std::invalid_argument);
  for (const auto& a : arms) CHECK(static_cast<test::ScriptedArm&>(*a).evaluations() == 0);
}

TEST_CASE("trace equals an independent simulation of the algorithm") {
  Rng gen(31);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + gen.below(3);
    std::vector<std::vector<double>> scripts(n);
    for (auto& s : scripts) {
      s.resize(1 + gen.below(12));
      for (double& v : s) v = std::round(gen.uniform() * 100.0) / 100.0;
    }
    const std::size_t quantum = 1 + gen.below(3);
    const std::size_t q = gen.below(21);
    const Budget budget = Budget::evaluations(quantum, (n + q) * quantum);
    for (auto kind : {PolicyKind::kEpsilonGreedy, PolicyKind::kUcb1, PolicyKind::kSoftmax}) {
      for (auto reward : {RewardKind::kNaive, RewardKind::kExpectation}) {
        PolicyParams p = policy(kind, reward, gen());
        p.epsilon = gen.uniform();
        p.tau = 0.05 + gen.uniform();
        auto arms = scripted_arms(scripts);
        const SearchResult r = run_massah(arms, p, budget);
        const auto expected = test::simulate(scripts, p, quantum, q);
        REQUIRE(r.trace.size() == expected.size());
        for (std::size_t k = 0; k < expected.size(); ++k) {
          INFO("trial " << trial << " entry " << k);
          CHECK(r.trace[k].arm == expected[k].arm);
          CHECK(r.trace[k].risk == expected[k].risk);
          CHECK(r.trace[k].reward == expected[k].reward);
          CHECK(r.trace[k].best_risk == expected[k].best_risk);
        }
        ++compared;
      }
    }
  }
  CHECK(compared == 360);
}

TEST_CASE("property: running best is monotone and equals the trace minimum") {
  Rng gen(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen.below(4);
    std::vector<std::vector<double>> scripts(n);
    for (auto& s : scripts) {
      s.resize(1 + gen.below(8));
      for (double& v : s) v = gen.uniform();
    }
    const std::size_t q = gen.below(30);
    auto arms = scripted_arms(scripts);
    const auto kind = static_cast<PolicyKind>(gen.below(3));
    const SearchResult r = run_massah(arms, policy(kind, RewardKind::kNaive, gen()),
                                      Budget::evaluations(1, n + q));
    CHECK(r.trace.size() == n + q);
    double prev = INFINITY;
    double min_risk = INFINITY;
    for (const auto& e : r.trace) {
      CHECK(e.best_risk <= prev);
      prev = e.best_risk;
      min_risk = std::min(min_risk, e.risk);
      CHECK((e.reward >= 0.0 && e.reward <= 1.0));
    }
    CHECK(r.best_risk == min_risk);
    CHECK(r.best_config == arms[r.best_arm]->config());
    CHECK(r.total_evaluations == n + q);
  }
}

TEST_CASE("get_config returns the earliest minimum") {
  ProcessState s(0, HyperparameterSpace({ParamSpec::real("x", 0, 1)}), 0);
  CHECK_THROWS_AS(get_config(s), std::logic_error);
  s.record({Configuration{0, {0.1}}, 0.4, false});
  CHECK(get_config(s).values[0] == 0.1);
  s.record({Configuration{0, {0.2}}, 0.2, false});
  s.record({Configuration{0, {0.3}}, 0.3, false});
  s.record({Configuration{0, {0.4}}, 0.2, false});
  CHECK(get_config(s).values[0] == 0.2);
}

TEST_CASE("reward_for_iteration dispatch and Q_max ordering") {
  RewardContext ctx;
  ctx.q_max = 0.5;
  const PolicyParams naive = policy(PolicyKind::kUcb1);
  CHECK(reward_for_iteration(naive, ctx, 0.0, 0.4, 0.35) == doctest::Approx(0.05));
  const PolicyParams ex = policy(PolicyKind::kUcb1, RewardKind::kExpectation);
  CHECK(reward_for_iteration(ex, ctx, 0.25, 0.4, 0.3) == 0.5);
  // The new risk raises Q_max before the reward is computed.
  CHECK(reward_for_iteration(ex, ctx, 0.45, 0.4, 0.9) == doctest::Approx(0.5));
  CHECK(ctx.q_max == 0.9);
}

TEST_CASE("round-robin steps each arm equally after init") {
  auto arms = scripted_arms({{0.5}, {0.4}, {0.3}});
  const SearchResult r =
      run_massah(arms, policy(PolicyKind::kRoundRobin), Budget::evaluations(1, 9));
  std::vector<int> plays(3, 0);
  for (const auto& e : r.trace) {
    if (!e.init) ++plays[e.arm];
  }
  CHECK(plays == std::vector<int>{2, 2, 2});
}

TEST_CASE("single-arm portfolio equals the bare process with budget T") {
  const Dataset d = test::blobs(60, 3, 5);
  const auto& algo = algorithm(algorithm_id("knn"));
  const std::uint64_t seed = 77;
  auto arms = make_arms(d, {algo.id}, seed);
  const SearchResult r = run_massah(arms, policy(PolicyKind::kUcb1), Budget::evaluations(3, 15));

  SequentialOptimizer alone(algo.id, algo.space, Rng::derive(Rng::derive(seed, 100 + algo.id), 0));
  const std::uint64_t eval_seed = Rng::derive(Rng::derive(seed, 100 + algo.id), 1);
  alone.step(StepBudget::evaluations(15),
             [&](const Configuration& c) { return empirical_risk(c, d, eval_seed); });

  const auto& h = static_cast<OptimizerArm&>(*arms[0]).state().history;
  REQUIRE(h.size() == alone.state().history.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(h[i].config == alone.state().history[i].config);
    CHECK(h[i].risk == alone.state().history[i].risk);
  }
  CHECK(r.best_risk == alone.state().best().risk);
  CHECK(r.best_config == alone.state().best().config);
}

TEST_CASE("full run on Car is deterministic and beats the majority class") {
  const Dataset car = load_arff(kData + "/car/car-train.arff", kData + "/car/car-test.arff");
  const PolicyParams p = policy(PolicyKind::kUcb1, RewardKind::kExpectation);
  const SearchResult a = run_massah(car, p, Budget::evaluations(2, 20), 9);
  const SearchResult b = run_massah(car, p, Budget::evaluations(2, 20), 9);
  CHECK(a.trace == b.trace);
  CHECK(a.best_risk == b.best_risk);
  CHECK(a.total_evaluations == 20);
  CHECK(a.best_risk < majority_class_risk(car));
  CHECK(empirical_risk(a.best_config, car, 0) <= 1.0);

  std::ostringstream out;
  write_trace(out, a);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("config"));
    CHECK(j["arm"].get<std::size_t>() < 5);
    ++lines;
  }
  CHECK(lines == a.trace.size());
}

TEST_CASE("wall-clock mode stops once the global budget is spent") {
  auto arms = scripted_arms({{0.5}, {0.4}});
  const SearchResult r =
      run_massah(arms, policy(PolicyKind::kUcb1), Budget::seconds(1e-9, 1e-6));
  // Each play performs at least one evaluation; the loop ends early.
  CHECK(r.trace.size() >= 2);
  CHECK(r.trace.size() < 1002);
  for (const auto& e : r.trace) CHECK(e.risk <= 0.5);
}
