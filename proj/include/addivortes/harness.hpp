#ifndef ADDIVORTES_HARNESS_HPP
#define ADDIVORTES_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "addivortes/data.hpp"
#include "addivortes/metrics.hpp"
#include "addivortes/sampler.hpp"
#include "addivortes/synthetic.hpp"

namespace addivortes {

struct FitScore {
  EvalReport report;
  std::vector<double> probabilities;
  MoveCounters moves;
  double seconds = 0.0;
};

// Fits the encoding and the sampler on `train` and scores `test`, without
// storing snapshots. The AUC is NaN when the test rows hold one class.
FitScore fit_and_score(const RawTable& train, const RawTable& test, const SamplerConfig& config);
FitScore fit_and_score(const CovariateMatrix& x_train, const BinaryResponse& y_train, const CovariateMatrix& x_test,
                       const BinaryResponse& y_test, const SamplerConfig& config);

// Hyperparameter grid; each list replaces the base value when non-empty.
struct CvGrid {
  std::vector<std::size_t> m;
  std::vector<double> k;
  std::vector<double> sigma_c;
  std::vector<double> omega;
  std::vector<double> lambda_c;

  // m = 200, k = 3, sigma_c in {0.2, 0.4}, omega in {3, 5}, lambda_c in {15, 30, 45}
  static CvGrid standard();
  static CvGrid from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Cartesian product in a fixed order (m, k, sigma_c, omega, lambda_c, last varying fastest).
  std::vector<SamplerConfig> expand(const SamplerConfig& base) const;
};

struct CvCandidate {
  SamplerConfig config;
  double mean_accuracy = 0.0;
  double mean_auc = 0.0;
};

struct CvResult {
  SamplerConfig best;
  std::vector<CvCandidate> candidates;
};

// k-fold cross-validation over the grid. The winner has the highest mean
// accuracy, then the highest mean AUC, then the earliest grid position.
CvResult cross_validate(const RawTable& train, const SamplerConfig& base, const CvGrid& grid, std::size_t folds,
                        std::uint64_t seed, std::size_t threads);

struct DatasetSpec {
  std::string name;
  std::string data;
  SchemaHints hints;
  std::optional<double> reference_accuracy;  // percent
  std::optional<double> reference_auc;
  std::optional<double> min_accuracy;        // percent
  std::optional<double> min_auc;

  static DatasetSpec from_json(const nlohmann::json& j, const std::string& base_dir = "");
};

// Suite file: {"datasets": [{"name", "data", "schema" | "hints", "reference": {"accuracy", "auc"},
//                            "bands": {"accuracy", "auc"}}]}
std::vector<DatasetSpec> load_suite(const std::string& path);

struct BenchmarkOptions {
  std::size_t splits = 20;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  SamplerConfig config;
  std::optional<CvGrid> grid;
  std::size_t folds = 5;
  std::size_t threads = 1;
};

struct SplitResult {
  std::string dataset;
  std::size_t split = 0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;
  double auc = 0.0;
  SamplerConfig config;
  double acceptance = 0.0;
  double seconds = 0.0;
};

struct DatasetSummary {
  std::string name;
  std::size_t splits = 0;
  double mean_accuracy = 0.0;
  double mean_auc = 0.0;
  double sd_accuracy = 0.0;
  double sd_auc = 0.0;
  bool failed = false;
  std::string error;
};

// Seeds of split s: the split permutation, the chain and the CV folds.
std::uint64_t split_seed(std::uint64_t suite_seed, std::size_t split);

// Every split of one dataset, in split order. Throws on failure.
std::vector<SplitResult> benchmark_dataset(const DatasetSpec& spec, const BenchmarkOptions& options);
DatasetSummary summarize(const std::string& name, const std::vector<SplitResult>& splits);

struct SimulationOptions {
  SyntheticKind kind = SyntheticKind::RotatedAxis;
  std::vector<double> parameters;
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 1;
  SamplerConfig config;
  std::size_t lattice = 100;
  std::size_t threads = 1;

  // theta in {0, pi/24, ..., pi/4} or alpha in {0, 0.1, ..., 1}
  static std::vector<double> default_parameters(SyntheticKind kind);
};

struct SimulationPoint {
  double parameter = 0.0;
  double accuracy = 0.0;  // fraction of correct test labels
  double auc = 0.0;
  // lattice x lattice probabilities, row-major with x2 varying fastest, at
  // cell midpoints ((i + 0.5) / L, (j + 0.5) / L)
  std::vector<double> lattice;
};

std::vector<SimulationPoint> run_simulation(const SimulationOptions& options);

// Percentage of (draw, tessellation) pairs using at least one encoded
// column of each source column.
std::vector<std::pair<std::string, double>> grouped_inclusion(const PosteriorDraws& draws,
                                                              const std::vector<std::string>& encoding_map);

}  // namespace addivortes

#endif
