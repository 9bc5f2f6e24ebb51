#include <doctest.h>

#include <cmath>
#include <random>

#include "addivortes/error.hpp"
#include "addivortes/metrics.hpp"
#include "oracles.hpp"

using namespace addivortes;

namespace {

using Labels = std::vector<std::uint8_t>;
using Scores = std::vector<double>;

// Random instance with both classes and scores on a coarse grid to force ties.
std::pair<Labels, Scores> random_instance(std::mt19937_64& gen, std::size_t n, bool ties) {
  Labels y(n);
  Scores s(n);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> grid(0, 9);
  std::normal_distribution<double> normal;
  do {
    for (auto& v : y) v = static_cast<std::uint8_t>(coin(gen));
  } while (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0);
  for (std::size_t i = 0; i < n; ++i) s[i] = ties ? grid(gen) / 10.0 : normal(gen) + 0.5 * y[i];
  return {y, s};
}

}  // namespace

TEST_CASE("accuracy") {
  const Labels a{1, 0, 1, 1};
  const Labels complement{0, 1, 0, 0};
  CHECK(accuracy(a, a) == 100.0);
  CHECK(accuracy(a, complement) == 0.0);
  CHECK(accuracy(a, Labels{1, 1, 1, 0}) == 50.0);
  CHECK_THROWS_AS(accuracy(a, Labels{1}), StructuralError);
}

TEST_CASE("auc examples") {
  CHECK(roc_auc(Labels{0, 1}, Scores{0.2, 0.9}) == 1.0);
  CHECK(roc_auc(Labels{0, 0, 1, 1}, Scores{0.1, 0.6, 0.4, 0.8}) == 0.75);
  CHECK(roc_auc(Labels{0, 1, 0, 1}, Scores{0.3, 0.3, 0.3, 0.3}) == 0.5);
  CHECK_THROWS_AS(roc_auc(Labels{1, 1}, Scores{0.1, 0.2}), UndefinedMetricError);
}

TEST_CASE("auc equals the pairwise oracle and the trapezoid area") {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto [y, s] = random_instance(gen, 5 + rep * 2, rep % 2 == 0);
    const double auc = roc_auc(y, s);
    CHECK(auc == oracle::pairwise_auc(y, s));
    const auto curve = roc_curve(y, s);
    CHECK(std::abs(trapezoid_area(curve) - auc) < 1e-12);
  }
}

TEST_CASE("roc curve shape") {
  const auto perfect = roc_curve(Labels{0, 0, 1, 1}, Scores{0.1, 0.2, 0.8, 0.9});
  bool corner = false;
  for (const auto& p : perfect) corner |= (p.fpr == 0.0 && p.tpr == 1.0);
  CHECK(corner);
  const auto flat = roc_curve(Labels{0, 1, 1}, Scores{0.5, 0.5, 0.5});
  REQUIRE(flat.size() == 2);
  CHECK(flat.front().fpr == 0.0);
  CHECK(flat.front().tpr == 0.0);
  CHECK(flat.back().fpr == 1.0);
  CHECK(flat.back().tpr == 1.0);

  std::mt19937_64 gen(2);
  const auto [y, s] = random_instance(gen, 200, false);
  const auto curve = roc_curve(y, s);
  CHECK(curve.size() == 201);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].fpr >= curve[i - 1].fpr);
    CHECK(curve[i].tpr >= curve[i - 1].tpr);
  }
  CHECK(std::abs(trapezoid_area(curve) - oracle::pairwise_auc(y, s)) < 1e-12);
}

TEST_CASE("auc invariances") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto [y, s] = random_instance(gen, 60, false);
    Scores transformed(s.size()), negated(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      transformed[i] = std::exp(2.0 * s[i]) + 1.0;
      negated[i] = -s[i];
    }
    CHECK(roc_auc(y, transformed) == roc_auc(y, s));
    CHECK(roc_auc(y, s) + roc_auc(y, negated) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("evaluation report") {
  const Labels y{0, 0, 1, 1};
  const Scores p{0.1, 0.6, 0.4, 0.8};
  const auto r = evaluate(y, p, 0.5);
  CHECK(r.accuracy == 50.0);
  CHECK(r.auc == 0.75);
  CHECK(r.n_test == 4);
  CHECK(r.threshold == 0.5);
  const auto text = r.to_text();
  CHECK(text.find("accuracy=50") != std::string::npos);
  CHECK(text.find("auc=0.75") != std::string::npos);
  CHECK(evaluate(y, p, 0.3).accuracy == 75.0);
}
