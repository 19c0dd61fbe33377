// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "massah/dataset.hpp"
#include "test_util.hpp"

using namespace massah;
using massah::test::TempFile;

namespace {
const std::string kData = MASSAH_DATA_DIR;
}

TEST_CASE("load_csv builds features and labels from a simple file") {
  TempFile f(".csv", "a,b,class\n1,x,yes\n2,y,no\n3,x,yes\n4,z,no\n");
  const Dataset d = load_csv(f.path());
  CHECK(d.n_features() == 2);
  CHECK(d.size() == 4);
  CHECK(d.features()[0].kind == FeatureKind::kNumerical);
  CHECK(d.features()[1].kind == FeatureKind::kCategorical);
  CHECK(d.features()[1].categories == std::vector<std::string>{"x", "y", "z"});
  CHECK(d.class_names() == std::vector<std::string>{"yes", "no"});
  CHECK(d.labels() == std::vector<int>{0, 1, 0, 1});
  CHECK(d.row(2)[0] == 3.0);
  CHECK_FALSE(d.split().has_value());
}

TEST_CASE("a column with one non-numeric token is categorical") {
  TempFile f(".csv", "v,class\n1.5,a\n2.0,b\nx,a\n");
  const Dataset d = load_csv(f.path());
  REQUIRE(d.features()[0].categorical());
  CHECK(d.features()[0].arity() == 3);
}

TEST_CASE("schema hints override inference and label may be given by index") {
  TempFile f(".csv", "y,code\n0,1\n1,2\n0,3\n");
  CsvOptions opt;
  opt.label_column = std::size_t{0};
  opt.schema_hints["code"] = FeatureKind::kCategorical;
  const Dataset d = load_csv(f.path(), opt);
  CHECK(d.features()[0].categorical());
  CHECK(d.class_names() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("quoted CSV fields keep commas and escaped quotes") {
  TempFile f(".csv", "name,class\r\n\"a,b\",p\r\n\"say \"\"hi\"\"\",q\r\n");
  const Dataset d = load_csv(f.path());
  CHECK(d.features()[0].categories == std::vector<std::string>{"a,b", "say \"hi\""});
}

TEST_CASE("CSV error paths") {
  SUBCASE("missing file") { CHECK_THROWS_AS(load_csv("/nonexistent/x.csv"), ParseError); }
  SUBCASE("ragged row") {
    TempFile f(".csv", "a,b,class\n1,2,x\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path()), doctest::Contains(":3: ragged row"), ParseError);
  }
  SUBCASE("label column missing") {
    TempFile f(".csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(f.path()), ParseError);
  }
  SUBCASE("non-finite numeric token names row and column") {
    TempFile f(".csv", "a,class\n1,x\ninf,y\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path()), doctest::Contains(":3: column 'a'"), ParseError);
  }
  SUBCASE("empty cell without missing permission") {
    TempFile f(".csv", "a,class\n1,x\n,y\n");
    CHECK_THROWS_AS(load_csv(f.path()), ParseError);
  }
}

TEST_CASE("empty CSV cells become the missing sentinel when allowed") {
  TempFile f(".csv", "a,b,class\n1,u,x\n,v,y\n3,,x\n");
  CsvOptions opt;
  opt.missing_allowed = {"*"};
  const Dataset d = load_csv(f.path(), opt);
  CHECK(d.features()[0].kind == FeatureKind::kNumerical);
  CHECK(is_missing(d.row(1)[0]));
  CHECK(is_missing(d.row(2)[1]));
}

TEST_CASE("ARFF nominal attribute maps to a categorical feature in declared order") {
  TempFile f(".arff",
             "% comment\n@RELATION colors\n@attribute color {red,blue}\n"
             "@Attribute 'size' NUMERIC\n@attribute class {p,n}\n@DATA\nblue,1.0,p\nred,?,n\n");
  const Dataset d = load_arff(f.path());
  CHECK(d.name() == "colors");
  REQUIRE(d.n_features() == 2);
  CHECK(d.features()[0].categories == std::vector<std::string>{"red", "blue"});
  CHECK(d.row(0)[0] == 1.0);
  CHECK(is_missing(d.row(1)[1]));
  CHECK(d.labels() == std::vector<int>{0, 1});
}

TEST_CASE("ARFF class attribute is the one named class, else the last") {
  TempFile named(".arff",
                 "@relation r\n@attribute class {a,b}\n@attribute x numeric\n@data\na,1\nb,2\n");
  const Dataset d = load_arff(named.path());
  CHECK(d.features()[0].name == "x");
  CHECK(d.class_names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("ARFF error paths") {
  SUBCASE("date attribute is unsupported") {
    TempFile f(".arff", "@relation r\n@attribute t date\n@attribute class {a}\n@data\n");
    CHECK_THROWS_AS(load_arff(f.path()), UnsupportedFeatureError);
  }
  SUBCASE("string attribute is unsupported") {
    TempFile f(".arff", "@relation r\n@attribute s string\n@attribute class {a}\n@data\n");
    CHECK_THROWS_AS(load_arff(f.path()), UnsupportedFeatureError);
  }
  SUBCASE("undeclared nominal value") {
    TempFile f(".arff", "@relation r\n@attribute c {x,y}\n@attribute class {a}\n@data\nz,a\n");
    CHECK_THROWS_WITH_AS(load_arff(f.path()), doctest::Contains("undeclared nominal value 'z'"),
                         ParseError);
  }
}

TEST_CASE("bundled Car split matches the published characteristics") {
  const Dataset d = load_arff(kData + "/car/car-train.arff", kData + "/car/car-test.arff");
  CHECK(d.n_categorical() == 6);
  CHECK(d.n_numerical() == 0);
  CHECK(d.n_classes() == 4);
  REQUIRE(d.split().has_value());
  CHECK(d.split()->train.size() == 1210);
  CHECK(d.split()->test.size() == 518);

  const Dataset csv = load_csv(kData + "/car/car-train.csv", kData + "/car/car-test.csv");
  CHECK(csv.n_categorical() == 6);
  CHECK(csv.n_numerical() == 0);
  CHECK(csv.n_classes() == 4);
  CHECK(csv.split()->train.size() == 1210);
  CHECK(csv.split()->test.size() == 518);
}

TEST_CASE("bundled German Credit matches the published characteristics") {
  const Dataset d = load_arff(kData + "/german_credit/german_credit.arff");
  CHECK(d.n_categorical() == 13);
  CHECK(d.n_numerical() == 7);
  CHECK(d.n_classes() == 2);
  CHECK(d.size() == 1000);
  const Dataset s = load_dataset(kData + "/german_credit/german_credit-train.arff",
                                 kData + "/german_credit/german_credit-test.arff");
  CHECK(s.split()->train.size() == 700);
  CHECK(s.split()->test.size() == 300);
}

TEST_CASE("loading the same file twice yields identical datasets") {
  const std::string p = kData + "/german_credit/german_credit.arff";
  CHECK(load_arff(p) == load_arff(p));
}

namespace {

Dataset toy(std::size_t n, std::size_t n_classes = 2) {
  std::vector<FeatureSpec> f{{"x", FeatureKind::kNumerical, {}, false}};
  std::vector<double> v;
  std::vector<int> y;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_classes; ++c) names.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(static_cast<double>(i));
    y.push_back(static_cast<int>(i % n_classes));
  }
  return Dataset("toy", f, v, y, names);
}

}  // namespace

TEST_CASE("split_train_test: 10 objects at 0.3 gives 7/3, identical on repeat") {
  const Dataset d = toy(10);
  const Dataset a = split_train_test(d, 0.3, 7, false);
  const Dataset b = split_train_test(d, 0.3, 7, false);
  CHECK(a.split()->train.size() == 7);
  CHECK(a.split()->test.size() == 3);
  CHECK(*a.split() == *b.split());
}

TEST_CASE("stratified split of 4/4 classes at 0.5 puts 2 of each class per side") {
  const Dataset d = toy(8);
  const Dataset s = split_train_test(d, 0.5, 3, true);
  for (const auto* side : {&s.split()->train, &s.split()->test}) {
    std::size_t c0 = 0;
    for (std::size_t i : *side) c0 += d.label(i) == 0;
    CHECK(side->size() == 4);
    CHECK(c0 == 2);
  }
}

TEST_CASE("test side size follows ceil(n * f), checked by exact enumeration") {
  // Oracle: fractions p/q evaluated in integer arithmetic.
  for (std::size_t n = 2; n <= 40; ++n) {
    for (std::size_t q : {10u, 20u, 100u}) {
      for (std::size_t p = 1; p < q; ++p) {
        const std::size_t expect = (n * p + q - 1) / q;
        const double f = static_cast<double>(p) / static_cast<double>(q);
        if (expect == 0 || expect >= n) {
          CHECK_THROWS_AS(test_size_for(n, f), std::invalid_argument);
        } else {
          CHECK(test_size_for(n, f) == expect);
        }
      }
    }
  }
  CHECK(test_size_for(10, 0.05) == 1);
}

TEST_CASE("split rejects fractions that empty a side and pre-split data") {
  const Dataset d = toy(10);
  CHECK_THROWS_AS(split_train_test(d, 0.95, 1, false), std::invalid_argument);
  CHECK_THROWS_AS(split_train_test(d, 0.0, 1, false), std::invalid_argument);
  const Dataset s = split_train_test(d, 0.3, 1, false);
  CHECK_THROWS_AS(split_train_test(s, 0.3, 1, false), std::invalid_argument);
  CHECK_NOTHROW(split_train_test(s, 0.3, 1, false, /*override_existing=*/true));
}

TEST_CASE("property: splits are disjoint and covering; stratified within one per class") {
  Rng gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen.below(60);
    const std::size_t k = 1 + gen.below(4);
    const Dataset d = toy(n, k);
    const double f = 0.05 + 0.9 * gen.uniform();
    std::size_t n_test;
    try {
      n_test = test_size_for(n, f);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const bool strat = gen.bernoulli(0.5);
    const Dataset s = split_train_test(d, f, gen(), strat);
    const auto& sp = *s.split();
    std::set<std::size_t> all(sp.train.begin(), sp.train.end());
    for (std::size_t i : sp.test) CHECK(all.insert(i).second);
    CHECK(all.size() == n);
    CHECK(sp.test.size() == n_test);
    if (strat) {
      const auto counts = d.class_counts();
      std::vector<double> realized(k, 0);
      for (std::size_t i : sp.test) realized[static_cast<std::size_t>(d.label(i))] += 1;
      for (std::size_t c = 0; c < k; ++c) {
        const double ideal = static_cast<double>(counts[c]) * static_cast<double>(n_test) /
                             static_cast<double>(n);
        CHECK(std::abs(realized[c] - ideal) <= 1.0);
      }
    }
  }
}

TEST_CASE("Dataset constructor enforces its invariants") {
  std::vector<FeatureSpec> f{{"c", FeatureKind::kCategorical, {"a", "b"}, false}};
  CHECK_THROWS_AS(Dataset("d", f, {2.0}, {0}, {"y"}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset("d", f, {0.0}, {1}, {"y"}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset("d", f, {kMissing}, {0}, {"y"}), std::invalid_argument);
  std::vector<FeatureSpec> dup{{"c", FeatureKind::kCategorical, {"a", "a"}, false}};
  CHECK_THROWS_AS(Dataset("d", dup, {0.0}, {0}, {"y"}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset("d", f, {0.0, 1.0}, {0, 0}, {"y"}, TrainTestSplit{{0}, {0}}),
                  std::invalid_argument);
}
