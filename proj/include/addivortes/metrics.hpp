#ifndef ADDIVORTES_METRICS_HPP
#define ADDIVORTES_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace addivortes {

struct RocPoint {
  double fpr;
  double tpr;
};

struct EvalReport {
  double accuracy = 0.0;  // percent
  double auc = 0.0;
  std::vector<RocPoint> roc_points;
  std::size_t n_test = 0;
  double threshold = 0.5;

  // key=value lines
  std::string to_text() const;
};

// Percentage of matching labels.
double accuracy(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

// Mann-Whitney form: (concordant + ties / 2) / (n1 n0), computed from midranks.
double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> scores);

// (0,0), one point per distinct score threshold (descending), ending at (1,1).
std::vector<RocPoint> roc_curve(std::span<const std::uint8_t> y_true, std::span<const double> scores);

double trapezoid_area(std::span<const RocPoint> curve);

EvalReport evaluate(std::span<const std::uint8_t> y_true, std::span<const double> probabilities,
                    double threshold = 0.5);

}  // namespace addivortes

#endif
