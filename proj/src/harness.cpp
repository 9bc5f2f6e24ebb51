#include "addivortes/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "addivortes/error.hpp"
#include "addivortes/parallel.hpp"
#include "addivortes/random.hpp"

namespace addivortes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
std::vector<T> read_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::optional<double> optional_number(const nlohmann::json& j, const char* outer, const char* inner) {
  if (!j.contains(outer) || !j.at(outer).contains(inner)) return std::nullopt;
  return j.at(outer).at(inner).get<double>();
}

// Column-wise z-scores of `x` with the mean and n-1 sd of `reference`.
CovariateMatrix standardize_like(const CovariateMatrix& x, const CovariateMatrix& reference) {
  std::vector<double> data(x.rows() * x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto ref = reference.column(c);
    double mu = 0.0;
    for (double v : ref) mu += v;
    mu /= static_cast<double>(ref.size());
    double ss = 0.0;
    for (double v : ref) ss += (v - mu) * (v - mu);
    const double sd = ref.size() > 1 ? std::sqrt(ss / static_cast<double>(ref.size() - 1)) : 1.0;
    const double scale = sd > 0.0 ? sd : 1.0;
    for (std::size_t r = 0; r < x.rows(); ++r) data[c * x.rows() + r] = (x(r, c) - mu) / scale;
  }
  return CovariateMatrix(x.rows(), x.cols(), std::move(data), x.names());
}

// AUC is left NaN when the scored rows hold a single class.
EvalReport score_report(const BinaryResponse& y, const std::vector<double>& probs, double threshold) {
  if (y.has_both_classes()) return evaluate(y.y, probs, threshold);
  EvalReport r;
  std::vector<std::uint8_t> labels;
  for (double p : probs) labels.push_back(static_cast<std::uint8_t>(predict_class(p, threshold)));
  r.accuracy = accuracy(y.y, labels);
  r.auc = std::numeric_limits<double>::quiet_NaN();
  r.n_test = y.size();
  r.threshold = threshold;
  return r;
}

}  // namespace

FitScore fit_and_score(const CovariateMatrix& x_train, const BinaryResponse& y_train, const CovariateMatrix& x_test,
                       const BinaryResponse& y_test, const SamplerConfig& config) {
  const auto start = Clock::now();
  PredictionAccumulator acc(x_test, config.offset());
  const auto draws = run_gibbs(
      x_train, y_train, config, [&](std::size_t, const Ensemble& e) { acc.add(e); }, false);
  FitScore out;
  out.probabilities = acc.mean_probabilities();
  out.report = score_report(y_test, out.probabilities, config.threshold);
  out.moves = draws.total_moves();
  out.seconds = seconds_since(start);
  return out;
}

FitScore fit_and_score(const RawTable& train, const RawTable& test, const SamplerConfig& config) {
  const auto pre = Preprocessor::fit(train);
  const auto tr = pre.transform(train);
  const auto te = pre.transform(test);
  if (te.y.size() == 0) throw InputError("test rows have no target values");
  return fit_and_score(tr.x, tr.y, te.x, te.y, config);
}

CvGrid CvGrid::standard() {
  CvGrid g;
  g.m = {200};
  g.k = {3.0};
  g.sigma_c = {0.2, 0.4};
  g.omega = {3.0, 5.0};
  g.lambda_c = {15.0, 30.0, 45.0};
  return g;
}

CvGrid CvGrid::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"m", "k", "sigma_c", "omega", "lambda_c"};
  if (!j.is_object()) throw ConfigError("cv grid must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown cv grid key '" + key + "'");
  CvGrid g;
  try {
    g.m = read_list<std::size_t>(j, "m");
    g.k = read_list<double>(j, "k");
    g.sigma_c = read_list<double>(j, "sigma_c");
    g.omega = read_list<double>(j, "omega");
    g.lambda_c = read_list<double>(j, "lambda_c");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cv grid: ") + e.what());
  }
  return g;
}

nlohmann::json CvGrid::to_json() const {
  return {{"m", m}, {"k", k}, {"sigma_c", sigma_c}, {"omega", omega}, {"lambda_c", lambda_c}};
}

std::vector<SamplerConfig> CvGrid::expand(const SamplerConfig& base) const {
  const std::vector<std::size_t> ms = m.empty() ? std::vector<std::size_t>{base.m} : m;
  const std::vector<double> ks = k.empty() ? std::vector<double>{base.k} : k;
  const std::vector<double> ss = sigma_c.empty() ? std::vector<double>{base.sigma_c} : sigma_c;
  const std::vector<double> os = omega.empty() ? std::vector<double>{base.omega} : omega;
  const std::vector<double> ls = lambda_c.empty() ? std::vector<double>{base.lambda_c} : lambda_c;
  std::vector<SamplerConfig> out;
  for (auto mv : ms)
    for (auto kv : ks)
      for (auto sv : ss)
        for (auto ov : os)
          for (auto lv : ls) {
            SamplerConfig c = base;
            c.m = mv;
            c.k = kv;
            c.sigma_c = sv;
            c.omega = ov;
            c.lambda_c = lv;
            c.validate();
            out.push_back(c);
          }
  return out;
}

CvResult cross_validate(const RawTable& train, const SamplerConfig& base, const CvGrid& grid, std::size_t folds,
                        std::uint64_t seed, std::size_t threads) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (train.rows() < folds) throw InputError("fewer training rows than folds");
  const auto configs = grid.expand(base);
  const auto fold_rows = kfold_indices(train.rows(), folds, mix_seed(seed, 0));

  std::vector<RawTable> fit_part(folds);
  std::vector<RawTable> held_out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) rest.insert(rest.end(), fold_rows[g].begin(), fold_rows[g].end());
    std::sort(rest.begin(), rest.end());
    fit_part[f] = train.select_rows(rest);
    held_out[f] = train.select_rows(fold_rows[f]);
  }

  std::vector<EvalReport> reports(configs.size() * folds);
  parallel_for(reports.size(), threads, [&](std::size_t i) {
    const std::size_t c = i / folds;
    const std::size_t f = i % folds;
    SamplerConfig cfg = configs[c];
    cfg.seed = mix_seed(seed, 1 + f);
    reports[i] = fit_and_score(fit_part[f], held_out[f], cfg).report;
  });

  CvResult result;
  std::size_t best = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    CvCandidate cand;
    cand.config = configs[c];
    for (std::size_t f = 0; f < folds; ++f) {
      cand.mean_accuracy += reports[c * folds + f].accuracy;
      cand.mean_auc += reports[c * folds + f].auc;
    }
    cand.mean_accuracy /= static_cast<double>(folds);
    cand.mean_auc /= static_cast<double>(folds);
    if (c > 0) {
      const auto& top = result.candidates[best];
      if (cand.mean_accuracy > top.mean_accuracy ||
          (cand.mean_accuracy == top.mean_accuracy && cand.mean_auc > top.mean_auc))
        best = c;
    }
    result.candidates.push_back(cand);
  }
  result.best = result.candidates[best].config;
  result.best.seed = base.seed;
  return result;
}

DatasetSpec DatasetSpec::from_json(const nlohmann::json& j, const std::string& base_dir) {
  namespace fs = std::filesystem;
  const auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || base_dir.empty()) return path.string();
    return (fs::path(base_dir) / path).string();
  };
  DatasetSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.data = resolve(j.at("data").get<std::string>());
    if (j.contains("schema")) {
      s.hints = SchemaHints::load(resolve(j.at("schema").get<std::string>()));
    } else if (j.contains("hints")) {
      s.hints = SchemaHints::from_json(j.at("hints"));
    }
    s.reference_accuracy = optional_number(j, "reference", "accuracy");
    s.reference_auc = optional_number(j, "reference", "auc");
    s.min_accuracy = optional_number(j, "bands", "accuracy");
    s.min_auc = optional_number(j, "bands", "auc");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid dataset entry: ") + e.what());
  }
  return s;
}

std::vector<DatasetSpec> load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open suite file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("suite file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("datasets") || !j.at("datasets").is_array())
    throw ConfigError("suite file needs a \"datasets\" array");
  const std::string dir = std::filesystem::path(path).parent_path().string();
  std::vector<DatasetSpec> out;
  for (const auto& entry : j.at("datasets")) out.push_back(DatasetSpec::from_json(entry, dir));
  return out;
}

std::uint64_t split_seed(std::uint64_t suite_seed, std::size_t split) { return mix_seed(suite_seed, split); }

std::vector<SplitResult> benchmark_dataset(const DatasetSpec& spec, const BenchmarkOptions& options) {
  if (options.splits < 1) throw ConfigError("splits must be at least 1");
  options.config.validate();
  const RawTable table = load_csv(spec.data, spec.hints);
  std::vector<SplitResult> results(options.splits);
  parallel_for(options.splits, options.threads, [&](std::size_t s) {
    const std::uint64_t seed = split_seed(options.seed, s);
    auto [train, test] = train_test_split(table, options.train_fraction, mix_seed(seed, 0));
    SamplerConfig cfg = options.config;
    if (options.grid) cfg = cross_validate(train, cfg, *options.grid, options.folds, mix_seed(seed, 2), 1).best;
    cfg.seed = mix_seed(seed, 1);
    const auto score = fit_and_score(train, test, cfg);
    SplitResult& r = results[s];
    r.dataset = spec.name;
    r.split = s;
    r.seed = seed;
    r.n_train = train.rows();
    r.n_test = score.report.n_test;
    r.accuracy = score.report.accuracy;
    r.auc = score.report.auc;
    r.config = cfg;
    r.acceptance = score.moves.acceptance_rate();
    r.seconds = score.seconds;
  });
  return results;
}

DatasetSummary summarize(const std::string& name, const std::vector<SplitResult>& splits) {
  DatasetSummary s;
  s.name = name;
  s.splits = splits.size();
  std::vector<double> acc;
  std::vector<double> auc;
  for (const auto& r : splits) {
    acc.push_back(r.accuracy);
    auc.push_back(r.auc);
  }
  s.mean_accuracy = mean_of(acc);
  s.mean_auc = mean_of(auc);
  s.sd_accuracy = sd_of(acc);
  s.sd_auc = sd_of(auc);
  return s;
}

std::vector<double> SimulationOptions::default_parameters(SyntheticKind kind) {
  std::vector<double> out;
  if (kind == SyntheticKind::RotatedAxis) {
    for (int i = 0; i <= 6; ++i) out.push_back(std::numbers::pi * static_cast<double>(i) / 24.0);
  } else {
    for (int i = 0; i <= 10; ++i) out.push_back(static_cast<double>(i) / 10.0);
  }
  return out;
}

std::vector<SimulationPoint> run_simulation(const SimulationOptions& options) {
  options.config.validate();
  const auto params = options.parameters.empty() ? SimulationOptions::default_parameters(options.kind)
                                                 : options.parameters;
  const std::size_t lattice = options.lattice;
  std::optional<CovariateMatrix> grid_raw;
  if (lattice > 0) {
    std::vector<double> grid_data(2 * lattice * lattice);
    for (std::size_t i = 0; i < lattice; ++i)
      for (std::size_t j = 0; j < lattice; ++j) {
        const std::size_t r = i * lattice + j;
        grid_data[r] = (static_cast<double>(i) + 0.5) / static_cast<double>(lattice);
        grid_data[lattice * lattice + r] = (static_cast<double>(j) + 0.5) / static_cast<double>(lattice);
      }
    grid_raw.emplace(lattice * lattice, 2, std::move(grid_data), std::vector<std::string>{"x1", "x2"});
  }

  std::vector<SimulationPoint> out(params.size());
  parallel_for(params.size(), options.threads, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed(options.seed, i);
    SyntheticSpec spec;
    spec.kind = options.kind;
    spec.parameter = params[i];
    spec.n = options.n_train;
    spec.seed = mix_seed(seed, 0);
    const auto [x_train_raw, y_train] = generate_dataset(spec);
    spec.n = options.n_test;
    spec.seed = mix_seed(seed, 1);
    const auto [x_test_raw, y_test] = generate_dataset(spec);
    const auto x_train = standardize_like(x_train_raw, x_train_raw);
    const auto x_test = standardize_like(x_test_raw, x_train_raw);

    SamplerConfig cfg = options.config;
    cfg.seed = mix_seed(seed, 2);
    PredictionAccumulator test_acc(x_test, cfg.offset());
    std::optional<CovariateMatrix> x_grid;
    std::optional<PredictionAccumulator> grid_acc;
    if (grid_raw) {
      x_grid = standardize_like(*grid_raw, x_train_raw);
      grid_acc.emplace(*x_grid, cfg.offset());
    }
    run_gibbs(
        x_train, y_train, cfg,
        [&](std::size_t, const Ensemble& e) {
          test_acc.add(e);
          if (grid_acc) grid_acc->add(e);
        },
        false);
    const auto probs = test_acc.mean_probabilities();
    const auto report = score_report(y_test, probs, cfg.threshold);
    SimulationPoint& p = out[i];
    p.parameter = params[i];
    p.accuracy = report.accuracy / 100.0;
    p.auc = report.auc;
    if (grid_acc) p.lattice = grid_acc->mean_probabilities();
  });
  return out;
}

std::vector<std::pair<std::string, double>> grouped_inclusion(const PosteriorDraws& draws,
                                                              const std::vector<std::string>& encoding_map) {
  if (draws.draws.empty()) throw StructuralError("no posterior draws");
  if (encoding_map.size() != draws.p) throw StructuralError("encoding map does not match the covariate count");
  std::vector<std::string> groups;
  std::map<std::string, std::size_t> group_of_name;
  std::vector<std::size_t> group_of(encoding_map.size());
  for (std::size_t c = 0; c < encoding_map.size(); ++c) {
    auto [it, fresh] = group_of_name.emplace(encoding_map[c], groups.size());
    if (fresh) groups.push_back(encoding_map[c]);
    group_of[c] = it->second;
  }
  std::vector<double> counts(groups.size(), 0.0);
  std::vector<std::uint8_t> hit(groups.size());
  double pairs = 0.0;
  for (const auto& e : draws.draws) {
    for (const auto& member : e.members) {
      std::fill(hit.begin(), hit.end(), 0);
      for (std::size_t k : member.structure.dims) hit[group_of.at(k)] = 1;
      for (std::size_t g = 0; g < groups.size(); ++g) counts[g] += hit[g];
      pairs += 1.0;
    }
  }
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t g = 0; g < groups.size(); ++g) out.emplace_back(groups[g], 100.0 * counts[g] / pairs);
  return out;
}

}  // namespace addivortes
