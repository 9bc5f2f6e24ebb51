#include "addivortes/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "addivortes/error.hpp"

namespace addivortes {

namespace {

void check_binary(std::span<const std::uint8_t> y, std::size_t expected, const char* what) {
  if (y.size() != expected) throw StructuralError(std::string(what) + ": length mismatch");
  for (auto v : y)
    if (v > 1) throw StructuralError(std::string(what) + ": labels must be 0 or 1");
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const std::uint8_t> y) {
  std::size_t pos = 0;
  for (auto v : y) pos += v;
  if (pos == 0 || pos == y.size()) throw UndefinedMetricError("ROC/AUC needs both classes in y_true");
  return {pos, y.size() - pos};
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out.precision(10);
  out << "n_test=" << n_test << "\nthreshold=" << threshold << "\naccuracy=" << accuracy << "\nauc=" << auc
      << "\nroc_points=" << roc_points.size() << '\n';
  return out.str();
}

double accuracy(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred) {
  if (y_true.empty()) throw StructuralError("accuracy of an empty sample");
  check_binary(y_pred, y_true.size(), "accuracy");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) matches += (y_true[i] == y_pred[i]);
  return 100.0 * static_cast<double>(matches) / static_cast<double>(y_true.size());
}

double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> scores) {
  check_binary(y_true, scores.size(), "roc_auc");
  const auto [n1, n0] = class_counts(y_true);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks of the positives, in units of half-ranks, kept integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_midrank = static_cast<std::uint64_t>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t)
      if (y_true[order[t]] == 1) twice_rank_sum += twice_midrank;
    i = j + 1;
  }
  // U = R1 - n1 (n1 + 1) / 2, so 2U = 2 R1 - n1 (n1 + 1).
  const std::uint64_t twice_u = twice_rank_sum - static_cast<std::uint64_t>(n1) * (n1 + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n1) * static_cast<double>(n0));
}

std::vector<RocPoint> roc_curve(std::span<const std::uint8_t> y_true, std::span<const double> scores) {
  check_binary(y_true, scores.size(), "roc_curve");
  const auto [n1, n0] = class_counts(y_true);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> curve{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (y_true[order[j]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(n0), static_cast<double>(tp) / static_cast<double>(n1)});
    i = j;
  }
  return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  return area;
}

EvalReport evaluate(std::span<const std::uint8_t> y_true, std::span<const double> probabilities, double threshold) {
  if (y_true.size() != probabilities.size()) throw StructuralError("evaluate: length mismatch");
  EvalReport report;
  report.n_test = y_true.size();
  report.threshold = threshold;
  std::vector<std::uint8_t> predicted(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) predicted[i] = probabilities[i] > threshold ? 1 : 0;
  report.accuracy = accuracy(y_true, predicted);
  report.auc = roc_auc(y_true, probabilities);
  report.roc_points = roc_curve(y_true, probabilities);
  return report;
}

}  // namespace addivortes
