// Apache License, Version 2.0, refer to LICENSE.txt

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "massah/experiment.hpp"
#include "oracle.hpp"
#include "scripted_arm.hpp"

using namespace massah;

namespace {

const std::string kData = MASSAH_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit_s,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < time_limit_s;
  const bool ok = o.pass && in_time;
  failures += !ok;
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << " [" << id << "] " << title << " | " << o.detail << " | "
       << secs << " s (limit " << time_limit_s << " s)";
  if (o.pass && !in_time) line << " TIME LIMIT EXCEEDED";
  std::cout << line.str() << std::endl;
}

PolicyParams make_policy(PolicyKind kind, RewardKind reward, std::uint64_t seed) {
  PolicyParams p;
  p.policy = kind;
  p.reward = reward;
  p.seed = seed;
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  std::cout.precision(6);

  criterion(1, "Wilcoxon on Table 2 AutoWEKA vs UCB1: T = 1, n_effective = 10", 1.0, [] {
    const MinMatrix t2 = load_tsv(kData + "/reference/table2.tsv");
    const auto a = t2.column("AutoWEKA");
    const auto u = t2.column("UCB1");
    const WilcoxonResult r = wilcoxon_signed_rank(a, u);
    std::ostringstream d;
    d << "T = " << r.t << ", n_effective = " << r.n_effective;
    return Outcome{r.t == 1.0 && r.n_effective == 10, d.str()};
  });

  criterion(2, "allocation loop trace equals an independent simulation", 5.0, [] {
    Rng gen(2016);
    std::size_t runs = 0, entries = 0, mismatches = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 2 + gen.below(3);
      std::vector<std::vector<double>> scripts(n);
      for (auto& s : scripts) {
        s.resize(1 + gen.below(15));
        for (double& v : s) v = gen.uniform();
      }
      const std::size_t quantum = 1 + gen.below(3);
      const std::size_t q = gen.below(21);
      for (auto kind : {PolicyKind::kEpsilonGreedy, PolicyKind::kUcb1, PolicyKind::kSoftmax}) {
        for (auto reward : {RewardKind::kNaive, RewardKind::kExpectation}) {
          PolicyParams p = make_policy(kind, reward, gen());
          p.epsilon = 0.4;
          p.tau = 0.1;
          auto arms = test::scripted_arms(scripts);
          const SearchResult r = run_massah(arms, p, Budget::evaluations(quantum, (n + q) * quantum));
          const auto o = test::simulate(scripts, p, quantum, q);
          ++runs;
          if (o.size() != r.trace.size()) {
            ++mismatches;
            continue;
          }
          for (std::size_t k = 0; k < o.size(); ++k) {
            ++entries;
            const auto& e = r.trace[k];
            mismatches += e.arm != o[k].arm || e.risk != o[k].risk || e.reward != o[k].reward ||
                          e.best_risk != o[k].best_risk;
          }
        }
      }
    }
    std::ostringstream d;
    d << runs << " runs, " << entries << " trace entries, " << mismatches << " mismatches";
    return Outcome{mismatches == 0 && runs == 240, d.str()};
  });

  criterion(3, "bandit formulas: UCB1 instance, Softmax and 0.4-greedy frequencies", 5.0, [] {
    ArmStats ucb(2);
    for (int i = 0; i < 100; ++i) ucb.update(0, 1.0);
    ucb.update(1, 0.0);
    const double b0 = 1.0 + std::sqrt(2.0 * std::log(101.0) / 100.0);
    const double b1 = std::sqrt(2.0 * std::log(101.0));
    const bool ucb_ok = ucb.t() == 101 && select_ucb1(ucb) == 1 && std::abs(b0 - 1.304) < 1e-3 &&
                        std::abs(b1 - 3.039) < 1e-3;

    ArmStats two(2);
    two.update(0, 1.0);
    two.update(1, 0.0);
    Rng rng(3);
    int soft = 0;
    for (int i = 0; i < 10000; ++i) soft += select_softmax(two, 1.0, rng) == 0;
    const double soft_rate = soft / 10000.0;
    const double soft_expected = std::numbers::e / (std::numbers::e + 1.0);

    ArmStats eps(2);
    eps.update(0, 0.9);
    eps.update(1, 0.1);
    int greedy = 0;
    for (int i = 0; i < 10000; ++i) greedy += select_epsilon_greedy(eps, 0.4, rng) == 0;
    const double eps_rate = greedy / 10000.0;

    std::ostringstream d;
    d << "UCB1 arm " << select_ucb1(ucb) << " (bonus " << b0 << " vs " << b1 << "), softmax "
      << soft_rate << " vs " << soft_expected << ", 0.4-greedy " << eps_rate << " vs 0.8";
    return Outcome{ucb_ok && std::abs(soft_rate - soft_expected) <= 0.02 &&
                       std::abs(eps_rate - 0.8) <= 0.02,
                   d.str()};
  });

  criterion(4, "reward functions stay in [0, 1]; expectation reward closed forms", 5.0, [] {
    Rng rng(4);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const double n = reward_naive(rng.uniform(), rng.uniform());
      const double e = reward_expectation(rng.uniform(), rng.uniform());
      bad += !(n >= 0.0 && n <= 1.0) + !(e >= 0.0 && e <= 1.0);
    }
    const bool closed = std::abs(reward_expectation(0.5, 0.3) - 0.4) < 1e-15 &&
                        reward_expectation(0.5, 0.5) == 0.0 && reward_expectation(0.5, 0.0) == 1.0;
    std::ostringstream d;
    d << bad << " out-of-range values over 2x10000 draws; closed forms "
      << (closed ? "exact" : "wrong");
    return Outcome{bad == 0 && closed, d.str()};
  });

  criterion(5, "UCB1 on Bernoulli(0.9, 0.1) plays the best arm >= 80% of pulls 500-1000", 10.0, [] {
    double share = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(Rng::derive(seed, 5));
      const double p[] = {0.9, 0.1};
      ArmStats s(2);
      for (std::size_t i = 0; i < 2; ++i) s.update(i, rng.bernoulli(p[i]) ? 1.0 : 0.0);
      int best = 0;
      for (int pull = 3; pull <= 1000; ++pull) {
        const std::size_t a = select_ucb1(s);
        s.update(a, rng.bernoulli(p[a]) ? 1.0 : 0.0);
        best += pull >= 500 && a == 0;
      }
      share += best / 501.0;
    }
    share /= 20.0;
    std::ostringstream d;
    d << "mean best-arm share " << share;
    return Outcome{share >= 0.8, d.str()};
  });

  criterion(6, "UCB1_E(Q) <= round-robin when one arm dominates, >= 15 of 20 seeds", 30.0, [] {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Budget budget = Budget::evaluations(1, 60);
      const std::size_t best = seed % 4;
      auto a = test::dominated_portfolio(4, best, seed + 1000);
      auto b = test::dominated_portfolio(4, best, seed + 1000);
      const double m = run_massah(a, make_policy(PolicyKind::kUcb1, RewardKind::kExpectation, seed),
                                  budget).best_risk;
      const double rr =
          run_massah(b, make_policy(PolicyKind::kRoundRobin, RewardKind::kNaive, seed), budget)
              .best_risk;
      wins += m <= rr;
    }
    std::ostringstream d;
    d << wins << " of 20 seeds";
    return Outcome{wins >= 15, d.str()};
  });

  criterion(7, "Car, 150 evaluations, 3 seeds: every policy beats the best constant classifier; "
               "UCB1_E(Q) <= random search on one random learner", 300.0, [] {
    const Dataset car = load_arff(kData + "/car/car-train.arff", kData + "/car/car-test.arff");
    const Dataset test = car.test_part();
    std::vector<std::size_t> counts(car.n_classes(), 0);
    for (std::size_t i = 0; i < test.size(); ++i) ++counts[static_cast<std::size_t>(test.label(i))];
    const double constant = 1.0 - static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                                      static_cast<double>(test.size());

    const Budget budget = Budget::evaluations(5, 150);
    std::ostringstream d;
    d << "split " << car.split()->train.size() << "/" << car.split()->test.size()
      << ", constant risk " << constant << ";";
    bool all_below = car.split()->train.size() == 1210 && car.split()->test.size() == 518;
    double ucb_eq_min = INFINITY;
    for (const char* name : {"UCB1", "0.4-greedy", "0.6-greedy", "Softmax", "UCB1_E(Q)",
                             "Softmax_E(Q)"}) {
      const Method m = parse_method(name);
      double worst = 0.0, best = INFINITY;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const SearchResult r = run_method(car, m, budget, seed);
        worst = std::max(worst, r.best_risk);
        best = std::min(best, r.best_risk);
        all_below &= r.best_risk < constant && r.total_evaluations == 150;
      }
      if (std::string(name) == "UCB1_E(Q)") ucb_eq_min = best;
      d << ' ' << name << " max " << worst << ";";
    }
    double rs_min = INFINITY;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      rs_min = std::min(rs_min, run_method(car, parse_method("RandomSearch"), budget, seed).best_risk);
    }
    d << " UCB1_E(Q) min " << ucb_eq_min << " vs RandomSearch min " << rs_min;
    return Outcome{all_below && ucb_eq_min <= rs_min, d.str()};
  });

  criterion(8, "same config twice in evaluation mode gives byte-identical TSV reports", 120.0, [] {
    const auto dir = std::filesystem::temp_directory_path() / "massah_acceptance";
    std::filesystem::create_directories(dir);
    const std::string cfg = (dir / "config.json").string();
    std::ofstream(cfg) << R"json({
  "datasets": [{"name": "car", "path": ")json" << kData << R"json(/car/car-train.arff",
                "test": ")json" << kData << R"json(/car/car-test.arff"}],
  "methods": ["UCB1", "0.4-greedy", "Softmax_E(Q)"],
  "budget": {"mode": "evaluations", "quantum": 2, "total": 20},
  "repeats": 2, "seed": 11
})json";
    std::string reports[2];
    for (int i = 0; i < 2; ++i) {
      const std::string out = (dir / ("report" + std::to_string(i) + ".tsv")).string();
      const std::string cmd = std::string("\"") + MASSAH_CLI + "\" run --config \"" + cfg +
                              "\" --jobs " + std::to_string(1 + 2 * i) + " --out \"" + out +
                              "\" 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) return Outcome{false, "CLI run failed"};
      reports[i] = read_file(out);
    }
    std::filesystem::remove_all(dir);
    std::ostringstream d;
    d << reports[0].size() << " bytes, " << (reports[0] == reports[1] ? "identical" : "different");
    return Outcome{!reports[0].empty() && reports[0] == reports[1], d.str()};
  });

  criterion(9, "EI closed forms; constant-target surrogate predicts (target, 0)", 5.0, [] {
    const bool ei = expected_improvement(0.4, 0.0, 0.4) == 0.0 &&
                    std::abs(expected_improvement(0.3, 0.0, 0.4) - 0.1) < 1e-12 &&
                    std::abs(expected_improvement(0.4, 1.0, 0.4) -
                             1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-6;
    const HyperparameterSpace s({ParamSpec::real("x", 0, 1), ParamSpec::integer("k", 1, 9),
                                 ParamSpec::categorical("c", {"a", "b", "c"})});
    Rng rng(9);
    std::vector<Observation> h;
    for (int i = 0; i < 15; ++i) h.push_back({s.sample(0, rng), 0.4, false});
    const SurrogateModel m = SurrogateModel::fit(s, h, 9);
    int off = 0;
    for (int i = 0; i < 1000; ++i) {
      const Prediction p = m.predict(s.sample(0, rng));
      off += p.mean != 0.4 || p.variance != 0.0;
    }
    std::ostringstream d;
    d << "EI " << (ei ? "exact" : "wrong") << ", " << off << " of 1000 surrogate predictions off";
    return Outcome{ei && off == 0, d.str()};
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
