#ifndef ADDIVORTES_SYNTHETIC_HPP
#define ADDIVORTES_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <utility>

#include "addivortes/probit.hpp"
#include "addivortes/tessellation.hpp"

namespace addivortes {

enum class SyntheticKind { RotatedAxis, Sinusoid };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::RotatedAxis;
  // theta in [0, pi/4] for RotatedAxis, amplitude alpha >= 0 for Sinusoid
  double parameter = 0.0;
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

// Rotate counter-clockwise by theta; 1 iff u1 * u2 > 0.
int rotated_axis_label(double x1, double x2, double theta);

// 1 iff x2 > alpha sin(10 x1).
int sinusoid_label(double x1, double x2, double alpha);

int synthetic_label(const SyntheticSpec& spec, double x1, double x2);

// n points uniform on [0,1]^2 (columns x1, x2) with labels from the spec.
std::pair<CovariateMatrix, BinaryResponse> generate_dataset(const SyntheticSpec& spec);

}  // namespace addivortes

#endif
