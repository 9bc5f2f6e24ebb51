#include "addivortes/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "addivortes/error.hpp"
#include "addivortes/random.hpp"

namespace addivortes {

void SyntheticSpec::validate() const {
  if (n < 1) throw ConfigError("synthetic sample size must be at least 1");
  if (kind == SyntheticKind::RotatedAxis && !(parameter >= 0.0 && parameter <= std::numbers::pi / 4.0))
    throw ConfigError("rotation angle must lie in [0, pi/4]");
  if (!std::isfinite(parameter)) throw ConfigError("synthetic parameter must be finite");
}

int rotated_axis_label(double x1, double x2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double u1 = c * x1 - s * x2;
  const double u2 = s * x1 + c * x2;
  return u1 * u2 > 0.0 ? 1 : 0;
}

int sinusoid_label(double x1, double x2, double alpha) { return x2 > alpha * std::sin(10.0 * x1) ? 1 : 0; }

int synthetic_label(const SyntheticSpec& spec, double x1, double x2) {
  return spec.kind == SyntheticKind::RotatedAxis ? rotated_axis_label(x1, x2, spec.parameter)
                                                 : sinusoid_label(x1, x2, spec.parameter);
}

std::pair<CovariateMatrix, BinaryResponse> generate_dataset(const SyntheticSpec& spec) {
  spec.validate();
  Random rng(spec.seed);
  std::vector<double> data(2 * spec.n);
  BinaryResponse y;
  y.y.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    data[i] = x1;
    data[spec.n + i] = x2;
    y.y[i] = static_cast<std::uint8_t>(synthetic_label(spec, x1, x2));
  }
  return {CovariateMatrix(spec.n, 2, std::move(data), {"x1", "x2"}), std::move(y)};
}

}  // namespace addivortes
