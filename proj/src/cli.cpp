#include "addivortes/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "addivortes/data.hpp"
#include "addivortes/error.hpp"
#include "addivortes/harness.hpp"
#include "addivortes/metrics.hpp"
#include "addivortes/model_io.hpp"
#include "addivortes/moves.hpp"
#include "addivortes/parallel.hpp"
#include "addivortes/sampler.hpp"

namespace addivortes {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Options {
  std::string data;
  std::string schema;
  std::string target;
  std::string model;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<double> interval;
  std::optional<std::size_t> splits;
  std::string cv_grid;
  std::optional<std::size_t> threads;

  std::string predictions;
  std::size_t folds = 5;
  std::string suite;
  std::vector<std::string> datasets;
  std::string function = "rotated";
  std::vector<double> params;
  std::size_t n_train = 1000;
  std::size_t n_test = 1000;
  std::size_t lattice = 100;
  bool grouped = false;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required flag ") + flag);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

SchemaHints load_hints(const Options& o, const json* fallback = nullptr) {
  SchemaHints hints;
  if (!o.schema.empty()) {
    hints = SchemaHints::load(o.schema);
  } else if (fallback && fallback->is_object()) {
    hints = SchemaHints::from_json(*fallback);
  }
  if (!o.target.empty()) hints.target = o.target;
  return hints;
}

SamplerConfig load_config(const Options& o, SamplerConfig base = {}) {
  SamplerConfig c = base;
  if (!o.config.empty()) c = config_from_json(read_json_file(o.config), c);
  if (o.seed) c.seed = *o.seed;
  if (o.threshold) c.threshold = *o.threshold;
  c.validate();
  return c;
}

CvGrid load_grid(const std::string& spec) {
  if (spec.empty() || spec == "standard") return CvGrid::standard();
  return CvGrid::from_json(read_json_file(spec));
}

std::size_t threads_of(const Options& o) { return resolve_threads(o.threads); }

std::string sibling(const std::string& primary, const std::string& suffix) {
  fs::path p(primary);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

void write_manifest(const std::string& primary, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    double seconds, const json& extra = json::object()) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["seed"] = seed;
  json fingerprints = json::object();
  for (const auto& in : inputs)
    if (!in.empty() && fs::is_regular_file(in)) fingerprints[in] = file_fingerprint(in);
  m["inputs"] = fingerprints;
  m["outputs"] = outputs;
  m["timings"] = {{"total_seconds", seconds}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  const std::string path = primary + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << m.dump(2) << '\n';
}

std::map<std::size_t, std::size_t> histogram(const PosteriorDraws& draws, bool centres) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& e : draws.draws)
    for (const auto& member : e.members)
      ++h[centres ? member.structure.centre_count() : member.structure.dimension()];
  return h;
}

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  json j = json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

// Per-row mean probabilities and, when alpha is set, per-row intervals.
// Rows are split into contiguous blocks so the result does not depend on
// the thread count.
struct Scored {
  std::vector<double> p;
  std::vector<Interval> intervals;
};

Scored score_rows(const ModelBundle& model, const CovariateMatrix& x, std::optional<double> alpha,
                  std::size_t threads) {
  Scored s;
  const std::size_t n = x.rows();
  s.p.resize(n);
  if (alpha) s.intervals.resize(n);
  const std::size_t blocks = std::min<std::size_t>(std::max<std::size_t>(threads, 1), std::max<std::size_t>(n, 1));
  parallel_for(n == 0 ? 0 : blocks, threads, [&](std::size_t b) {
    const std::size_t lo = n * b / blocks;
    const std::size_t hi = n * (b + 1) / blocks;
    std::vector<std::size_t> rows;
    for (std::size_t r = lo; r < hi; ++r) rows.push_back(r);
    const auto part = x.select_rows(rows);
    PredictionAccumulator acc(part, model.draws.offset, alpha.has_value());
    for (const auto& e : model.draws.draws) acc.add(e);
    const auto mean = acc.mean_probabilities();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s.p[lo + i] = mean[i];
      if (alpha) s.intervals[lo + i] = posterior_interval(acc.row_draws(i), *alpha);
    }
  });
  return s;
}

json report_json(const EvalReport& r) {
  json roc = json::array();
  for (const auto& pt : r.roc_points) roc.push_back({pt.fpr, pt.tpr});
  return {{"accuracy", r.accuracy}, {"auc", r.auc}, {"n_test", r.n_test}, {"threshold", r.threshold}, {"roc", roc}};
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.data, "--data");
  const std::string model_path = o.model.empty() ? o.out : o.model;
  require(model_path, "--model");
  auto hints = load_hints(o);
  const SamplerConfig config = load_config(o);
  const RawTable table = load_csv(o.data, hints);
  hints.target = table.target_name;
  ModelBundle model;
  model.preprocessor = Preprocessor::fit(table);
  const auto prepared = model.preprocessor.transform(table);
  if (prepared.x.rows() == 0) throw InputError("no complete rows to train on");
  model.config = config;
  model.draws = run_gibbs(prepared.x, prepared.y, config);

  const auto moves = model.draws.total_moves();
  json acceptance = json::object();
  for (std::size_t i = 0; i < kMoveCount; ++i) {
    const auto name = std::string(move_name(static_cast<MoveKind>(i)));
    const double rate = moves.proposed[i] == 0
                            ? 0.0
                            : static_cast<double>(moves.accepted[i]) / static_cast<double>(moves.proposed[i]);
    acceptance[name] = rate;
  }
  const auto dims = histogram(model.draws, false);
  const auto centres = histogram(model.draws, true);
  model.summary = {{"schema", hints.to_json()},
                   {"training_rows", prepared.x.rows()},
                   {"dropped_rows", prepared.dropped},
                   {"acceptance", acceptance},
                   {"overall_acceptance", moves.acceptance_rate()},
                   {"dims_histogram", histogram_json(dims)},
                   {"centres_histogram", histogram_json(centres)}};
  save_model(model_path, model);

  out << "trained on " << prepared.x.rows() << " rows (" << prepared.dropped << " dropped), "
      << prepared.x.cols() << " covariates, " << model.draws.size() << " draws\n";
  out << "acceptance overall=" << moves.acceptance_rate();
  for (const auto& [k, v] : acceptance.items()) out << ' ' << k << '=' << v.get<double>();
  out << "\ndimension histogram:";
  for (const auto& [k, v] : dims) out << ' ' << k << ':' << v;
  out << "\ncentre-count histogram:";
  for (const auto& [k, v] : centres) out << ' ' << k << ':' << v;
  out << "\nmodel written to " << model_path << '\n';
  write_manifest(model_path, "train", config_to_json(config), config.seed, {o.data, o.schema}, {model_path},
                 seconds_since(start), {{"summary", model.summary}});
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.model, "--model");
  require(o.data, "--data");
  require(o.out, "--out");
  if (o.interval && !(*o.interval > 0.0 && *o.interval < 1.0)) throw ConfigError("--interval must lie in (0,1)");
  const ModelBundle model = load_model(o.model);
  const json* stored = model.summary.contains("schema") ? &model.summary.at("schema") : nullptr;
  const auto hints = load_hints(o, stored);
  const RawTable table = load_csv(o.data, hints, TargetPolicy::Optional);
  const auto prepared = model.preprocessor.transform(table);
  const double threshold = o.threshold.value_or(model.config.threshold);
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
  const auto scored = score_rows(model, prepared.x, o.interval, threads_of(o));

  std::vector<std::string> header{"row_id", "p_hat", "class"};
  if (o.interval) {
    header.push_back("lo");
    header.push_back("hi");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < scored.p.size(); ++i) {
    std::vector<std::string> r{std::to_string(prepared.kept[i]), num(scored.p[i]),
                               std::to_string(predict_class(scored.p[i], threshold))};
    if (o.interval) {
      r.push_back(num(scored.intervals[i].lo));
      r.push_back(num(scored.intervals[i].hi));
    }
    rows.push_back(std::move(r));
  }
  write_csv_rows(o.out, header, rows);
  out << "wrote " << rows.size() << " predictions to " << o.out;
  if (prepared.dropped) out << " (" << prepared.dropped << " rows with missing values skipped)";
  out << '\n';
  json cfg = config_to_json(model.config);
  cfg["threshold"] = threshold;
  if (o.interval) cfg["interval"] = *o.interval;
  write_manifest(o.out, "predict", cfg, model.config.seed, {o.model, o.data, o.schema}, {o.out},
                 seconds_since(start), {{"dropped_rows", prepared.dropped}});
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.data, "--data");
  if (o.predictions.empty() == o.model.empty()) throw ConfigError("evaluate needs exactly one of --predictions or --model");
  std::optional<ModelBundle> model;
  if (!o.model.empty()) model = load_model(o.model);
  const json* stored = model && model->summary.contains("schema") ? &model->summary.at("schema") : nullptr;
  const auto hints = load_hints(o, stored);
  const RawTable table = load_csv(o.data, hints);
  double threshold = o.threshold.value_or(model ? model->config.threshold : 0.5);
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");

  std::vector<std::uint8_t> labels;
  std::vector<double> probs;
  if (model) {
    const auto prepared = model->preprocessor.transform(table);
    probs = score_rows(*model, prepared.x, std::nullopt, threads_of(o)).p;
    labels = prepared.y.y;
  } else {
    std::ifstream in(o.predictions, std::ios::binary);
    if (!in) throw InputError("cannot open file '" + o.predictions + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto records = parse_csv(buf.str());
    if (records.empty()) throw InputError(o.predictions + ": missing header row");
    const auto& head = records[0];
    const auto id_col = std::find(head.begin(), head.end(), "row_id") - head.begin();
    const auto p_col = std::find(head.begin(), head.end(), "p_hat") - head.begin();
    if (id_col == static_cast<std::ptrdiff_t>(head.size()) || p_col == static_cast<std::ptrdiff_t>(head.size()))
      throw InputError(o.predictions + ": needs row_id and p_hat columns");
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.size() != head.size()) throw InputError(o.predictions + ": ragged row at line " + std::to_string(r + 1));
      std::size_t id = 0;
      double p = 0.0;
      try {
        std::size_t used = 0;
        id = std::stoul(rec[id_col], &used);
        if (used != rec[id_col].size()) throw std::invalid_argument("row_id");
        p = std::stod(rec[p_col], &used);
        if (used != rec[p_col].size()) throw std::invalid_argument("p_hat");
      } catch (const std::logic_error&) {
        throw InputError(o.predictions + ": bad value at line " + std::to_string(r + 1));
      }
      if (id >= table.rows()) throw InputError(o.predictions + ": row_id " + std::to_string(id) + " not in data");
      if (table.target_missing[id]) throw InputError("row " + std::to_string(id) + " has no target value");
      labels.push_back(table.target[id]);
      probs.push_back(p);
    }
  }
  const auto report = evaluate(labels, probs, threshold);
  out << report.to_text();
  std::vector<std::string> outputs;
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw InputError("cannot write file: " + o.out);
    f << report_json(report).dump(2) << '\n';
    outputs.push_back(o.out);
    write_manifest(o.out, "evaluate", {{"threshold", threshold}}, model ? model->config.seed : 0,
                   {o.data, o.predictions, o.model, o.schema}, outputs, seconds_since(start));
  }
  return kExitOk;
}

int cmd_cv(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.data, "--data");
  require(o.out, "--out");
  const auto hints = load_hints(o);
  const SamplerConfig base = load_config(o);
  const CvGrid grid = load_grid(o.cv_grid);
  const RawTable table = load_csv(o.data, hints);
  const auto result = cross_validate(table, base, grid, o.folds, base.seed, threads_of(o));
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : result.candidates)
    rows.push_back({std::to_string(c.config.m), num(c.config.k), num(c.config.sigma_c), num(c.config.omega),
                    num(c.config.lambda_c), num(c.mean_accuracy), num(c.mean_auc)});
  write_csv_rows(o.out, {"m", "k", "sigma_c", "omega", "lambda_c", "mean_accuracy", "mean_auc"}, rows);
  const auto& b = result.best;
  out << "best m=" << b.m << " k=" << b.k << " sigma_c=" << b.sigma_c << " omega=" << b.omega
      << " lambda_c=" << b.lambda_c << '\n';
  write_manifest(o.out, "cv", {{"base", config_to_json(base)}, {"grid", grid.to_json()}, {"folds", o.folds}},
                 base.seed, {o.data, o.schema}, {o.out}, seconds_since(start),
                 {{"best", config_to_json(result.best)}});
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.out, "--out");
  SimulationOptions sim;
  if (o.function == "rotated") {
    sim.kind = SyntheticKind::RotatedAxis;
  } else if (o.function == "sinusoid") {
    sim.kind = SyntheticKind::Sinusoid;
  } else {
    throw ConfigError("--function must be 'rotated' or 'sinusoid'");
  }
  sim.parameters = o.params;
  sim.n_train = o.n_train;
  sim.n_test = o.n_test;
  sim.lattice = o.lattice;
  sim.config = load_config(o);
  sim.seed = sim.config.seed;
  sim.threads = threads_of(o);
  const auto points = run_simulation(sim);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> grid;
  for (const auto& p : points) {
    rows.push_back({num(p.parameter), num(p.accuracy), num(p.auc)});
    for (std::size_t i = 0; i < sim.lattice; ++i)
      for (std::size_t j = 0; j < sim.lattice; ++j)
        grid.push_back({num(p.parameter), num((static_cast<double>(i) + 0.5) / static_cast<double>(sim.lattice)),
                        num((static_cast<double>(j) + 0.5) / static_cast<double>(sim.lattice)),
                        num(p.lattice[i * sim.lattice + j])});
  }
  write_csv_rows(o.out, {"parameter", "accuracy", "auc"}, rows);
  std::vector<std::string> outputs{o.out};
  if (sim.lattice > 0) {
    const auto lattice_path = sibling(o.out, "_lattice.csv");
    write_csv_rows(lattice_path, {"parameter", "x1", "x2", "p_hat"}, grid);
    outputs.push_back(lattice_path);
  }
  for (const auto& p : points) out << "parameter=" << p.parameter << " accuracy=" << p.accuracy << '\n';
  write_manifest(o.out, "simulate",
                 {{"function", o.function}, {"n_train", o.n_train}, {"n_test", o.n_test}, {"lattice", o.lattice},
                  {"sampler", config_to_json(sim.config)}},
                 sim.seed, {}, outputs, seconds_since(start));
  return kExitOk;
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  require(o.suite, "--suite");
  require(o.out, "--out");
  auto specs = load_suite(o.suite);
  if (!o.datasets.empty()) {
    std::vector<DatasetSpec> chosen;
    for (const auto& name : o.datasets) {
      const auto it = std::find_if(specs.begin(), specs.end(), [&](const DatasetSpec& s) { return s.name == name; });
      if (it == specs.end()) throw ConfigError("dataset '" + name + "' is not in the suite");
      chosen.push_back(*it);
    }
    specs = std::move(chosen);
  }
  BenchmarkOptions bo;
  bo.config = load_config(o);
  bo.seed = bo.config.seed;
  if (o.splits) bo.splits = *o.splits;
  if (!o.cv_grid.empty()) bo.grid = load_grid(o.cv_grid);
  bo.folds = o.folds;
  bo.threads = threads_of(o);

  std::vector<std::vector<std::string>> split_rows;
  std::vector<std::vector<std::string>> summary_rows;
  std::vector<std::string> inputs{o.suite};
  json timings = json::object();
  bool failed = false;
  const auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& spec : specs) {
    const auto t0 = Clock::now();
    DatasetSummary summary;
    summary.name = spec.name;
    try {
      inputs.push_back(spec.data);
      const auto results = benchmark_dataset(spec, bo);
      for (const auto& r : results)
        split_rows.push_back({r.dataset, std::to_string(r.split), std::to_string(r.seed), std::to_string(r.n_train),
                              std::to_string(r.n_test), num(r.accuracy), num(r.auc), std::to_string(r.config.m),
                              num(r.config.k), num(r.config.sigma_c), num(r.config.omega), num(r.config.lambda_c),
                              num(r.acceptance)});
      summary = summarize(spec.name, results);
    } catch (const std::exception& e) {
      summary.failed = true;
      summary.error = e.what();
      failed = true;
      err << "benchmark " << spec.name << " failed: " << e.what() << '\n';
    }
    timings[spec.name] = seconds_since(t0);
    std::string band;
    if (!summary.failed && (spec.min_accuracy || spec.min_auc)) {
      const bool ok = (!spec.min_accuracy || summary.mean_accuracy >= *spec.min_accuracy) &&
                      (!spec.min_auc || summary.mean_auc >= *spec.min_auc);
      band = ok ? "yes" : "no";
    }
    summary_rows.push_back({summary.name, summary.failed ? "failed" : "ok", std::to_string(summary.splits),
                            summary.failed ? "" : num(summary.mean_accuracy),
                            summary.failed ? "" : num(summary.sd_accuracy),
                            summary.failed ? "" : num(summary.mean_auc), summary.failed ? "" : num(summary.sd_auc),
                            opt(spec.reference_accuracy), opt(spec.reference_auc), opt(spec.min_accuracy),
                            opt(spec.min_auc), band, summary.error});
    if (!summary.failed)
      out << spec.name << ": accuracy " << summary.mean_accuracy << " (sd " << summary.sd_accuracy << "), auc "
          << summary.mean_auc << " (sd " << summary.sd_auc << ") over " << summary.splits << " splits\n";
  }
  write_csv_rows(o.out,
                 {"dataset", "split", "seed", "n_train", "n_test", "accuracy", "auc", "m", "k", "sigma_c", "omega",
                  "lambda_c", "acceptance"},
                 split_rows);
  const auto summary_path = sibling(o.out, "_summary.csv");
  write_csv_rows(summary_path,
                 {"dataset", "status", "splits", "mean_accuracy", "sd_accuracy", "mean_auc", "sd_auc",
                  "reference_accuracy", "reference_auc", "min_accuracy", "min_auc", "within_band", "error"},
                 summary_rows);
  json cfg = {{"sampler", config_to_json(bo.config)},
              {"splits", bo.splits},
              {"train_fraction", bo.train_fraction},
              {"folds", bo.folds}};
  if (bo.grid) cfg["cv_grid"] = bo.grid->to_json();
  write_manifest(o.out, "benchmark", cfg, bo.seed, inputs, {o.out, summary_path}, seconds_since(start),
                 {{"dataset_seconds", timings}, {"threads", bo.threads}});
  return failed ? kExitBenchmarkFailure : kExitOk;
}

int cmd_inclusion(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  require(o.model, "--model");
  require(o.out, "--out");
  const ModelBundle model = load_model(o.model);
  std::vector<std::pair<std::string, double>> rows;
  if (o.grouped) {
    rows = grouped_inclusion(model.draws, model.preprocessor.encoding_map());
  } else {
    const auto names = model.preprocessor.feature_names();
    const auto pct = variable_inclusion(model.draws);
    for (std::size_t i = 0; i < pct.size(); ++i) rows.emplace_back(names.at(i), pct[i]);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::vector<std::string>> csv;
  for (const auto& [name, pct] : rows) csv.push_back({name, num(pct)});
  write_csv_rows(o.out, {"covariate", "inclusion_percent"}, csv);
  out << "wrote " << csv.size() << " inclusion percentages to " << o.out << '\n';
  write_manifest(o.out, "inclusion", {{"grouped", o.grouped}}, model.config.seed, {o.model}, {o.out},
                 seconds_since(start));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary classification with additive Voronoi tessellations", "addivortes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  const auto add_data = [&](CLI::App* c) {
    c->add_option("--data", o.data, "CSV file");
    c->add_option("--schema", o.schema, "schema hints JSON");
    c->add_option("--target", o.target, "target column name");
  };
  const auto add_sampler = [&](CLI::App* c) {
    c->add_option("--config", o.config, "sampler configuration JSON");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--threads", o.threads, "worker threads (default: ADDIVORTES_THREADS or hardware count)");
  };

  auto* train = app.add_subcommand("train", "fit a model and write it to --model");
  add_data(train);
  add_sampler(train);
  train->add_option("--model", o.model, "model output path");
  train->add_option("--out", o.out, "alias for --model");
  train->add_option("--threshold", o.threshold, "classification threshold stored with the model");

  auto* predict = app.add_subcommand("predict", "score a CSV with a trained model");
  add_data(predict);
  predict->add_option("--model", o.model, "model file");
  predict->add_option("--out", o.out, "prediction CSV");
  predict->add_option("--threshold", o.threshold, "classification threshold");
  predict->add_option("--interval", o.interval, "two-sided level alpha of the per-row posterior interval");
  predict->add_option("--threads", o.threads, "worker threads");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "accuracy, AUC and ROC of predictions against labels");
  add_data(evaluate_cmd);
  evaluate_cmd->add_option("--predictions", o.predictions, "prediction CSV from predict");
  evaluate_cmd->add_option("--model", o.model, "model file (predicts first)");
  evaluate_cmd->add_option("--out", o.out, "report JSON");
  evaluate_cmd->add_option("--threshold", o.threshold, "classification threshold");
  evaluate_cmd->add_option("--threads", o.threads, "worker threads");

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation over a hyperparameter grid");
  add_data(cv);
  add_sampler(cv);
  cv->add_option("--cv-grid", o.cv_grid, "grid JSON or 'standard'");
  cv->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(2, 1000));
  cv->add_option("--out", o.out, "candidate CSV");

  auto* simulate = app.add_subcommand("simulate", "accuracy sweep on a synthetic boundary");
  add_sampler(simulate);
  simulate->add_option("--function", o.function, "rotated or sinusoid");
  simulate->add_option("--params", o.params, "comma-separated parameter values")->delimiter(',');
  simulate->add_option("--n-train", o.n_train, "training points")->check(CLI::PositiveNumber);
  simulate->add_option("--n-test", o.n_test, "test points")->check(CLI::PositiveNumber);
  simulate->add_option("--lattice", o.lattice, "probability lattice side (0 disables)");
  simulate->add_option("--out", o.out, "sweep CSV");

  auto* bench = app.add_subcommand("benchmark", "repeated train/test splits over a dataset suite");
  add_sampler(bench);
  bench->add_option("--suite", o.suite, "suite JSON");
  bench->add_option("--datasets", o.datasets, "comma-separated subset of suite names")->delimiter(',');
  bench->add_option("--splits", o.splits, "splits per dataset")->check(CLI::PositiveNumber);
  bench->add_option("--cv-grid", o.cv_grid, "cross-validate each split over this grid JSON or 'standard'");
  bench->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(2, 1000));
  bench->add_option("--out", o.out, "per-split CSV");

  auto* inclusion = app.add_subcommand("inclusion", "per-covariate inclusion percentages of a model");
  inclusion->add_option("--model", o.model, "model file");
  inclusion->add_option("--out", o.out, "inclusion CSV");
  inclusion->add_flag("--grouped", o.grouped, "aggregate one-hot indicators to their source column");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (train->parsed()) return cmd_train(o, out);
    if (predict->parsed()) return cmd_predict(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (cv->parsed()) return cmd_cv(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (bench->parsed()) return cmd_benchmark(o, out, err);
    if (inclusion->parsed()) return cmd_inclusion(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UndefinedMetricError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitInput;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace addivortes
