#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "addivortes/cli.hpp"
#include "addivortes/data.hpp"
#include "addivortes/metrics.hpp"
#include "addivortes/model_io.hpp"
#include "support.hpp"

using namespace addivortes;
using namespace test_support;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kToy =
    "age,colour,score,outcome\n"
    "23,red,1.5,yes\n41,blue,2.5,no\n35,red,0.5,yes\n52,green,3.5,no\n29,blue,1.0,yes\n"
    "60,green,4.0,no\n33,red,2.0,yes\n47,blue,3.0,no\n38,green,1.5,yes\n55,red,3.5,no\n"
    "26,blue,0.5,yes\n44,green,2.5,no\n31,red,1.0,yes\n58,blue,4.5,no\n36,green,2.0,yes\n"
    "49,red,3.0,no\n27,blue,1.5,no\n42,green,2.5,yes\n34,red,?,yes\n51,blue,3.5,no\n";

struct Toy {
  std::string data = temp_file("cli_toy.csv", kToy).string();
  std::string schema = temp_file("cli_toy_schema.json", R"({"target": "outcome", "positive": ["yes"]})").string();
  std::string config = temp_file("cli_small.json", R"({"m": 4, "burn_in": 20, "post_draws": 15})").string();
};

std::vector<std::vector<std::string>> read_csv(const std::string& path) { return parse_csv(slurp(path)); }

}  // namespace

TEST_CASE("train writes a loadable model and a manifest") {
  Toy toy;
  const auto model = temp_path("cli_model.avm").string();
  const auto r = run({"train", "--data", toy.data, "--schema", toy.schema, "--config", toy.config, "--model", model});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("dimension histogram") != std::string::npos);
  CHECK(r.out.find("19 rows (1 dropped)") != std::string::npos);
  const auto bundle = load_model(model);
  CHECK(bundle.draws.size() == 15);
  CHECK(bundle.config.m == 4);
  const auto manifest = nlohmann::json::parse(slurp(model + ".manifest.json"));
  CHECK(manifest["command"] == "train");
  CHECK(manifest["inputs"][toy.data] == file_fingerprint(toy.data));
  CHECK(manifest["outputs"][0] == model);
  CHECK(manifest.contains("timings"));
  CHECK(manifest["version"] == kVersion);
}

TEST_CASE("same seed gives byte-identical models, different seed does not") {
  Toy toy;
  const auto a = temp_path("cli_a.avm").string();
  const auto b = temp_path("cli_b.avm").string();
  const auto c = temp_path("cli_c.avm").string();
  const std::vector<std::string> base{"train", "--data", toy.data, "--schema", toy.schema, "--config", toy.config};
  auto with = [&](std::vector<std::string> extra) {
    auto v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return run(v).code;
  };
  REQUIRE(with({"--model", a, "--seed", "5"}) == 0);
  REQUIRE(with({"--model", b, "--seed", "5"}) == 0);
  REQUIRE(with({"--model", c, "--seed", "6"}) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("exit codes for bad input") {
  Toy toy;
  auto r = run({"train", "--data", "/nonexistent/data.csv", "--model", temp_path("x.avm").string()});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("/nonexistent/data.csv") != std::string::npos);
  CHECK(run({"train", "--data", toy.data}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
  CHECK(run({"train", "--data", toy.data, "--bogus"}).code == kExitInput);
  const auto bad_cfg = temp_file("cli_bad_cfg.json", R"({"m": 0})").string();
  CHECK(run({"train", "--data", toy.data, "--schema", toy.schema, "--config", bad_cfg, "--model",
             temp_path("x.avm").string()})
            .code == kExitInput);
  CHECK(run({"inclusion", "--model", toy.data, "--out", temp_path("inc.csv").string()}).code == kExitInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("predict, evaluate and inclusion close the pipeline") {
  Toy toy;
  const auto model = temp_path("cli_pipe.avm").string();
  REQUIRE(run({"train", "--data", toy.data, "--schema", toy.schema, "--config", toy.config, "--model", model}).code ==
          0);
  const auto preds = temp_path("cli_preds.csv").string();
  REQUIRE(run({"predict", "--model", model, "--data", toy.data, "--out", preds, "--interval", "0.1"}).code == 0);
  const auto rows = read_csv(preds);
  REQUIRE(rows.size() == 20);
  CHECK(rows[0] == std::vector<std::string>{"row_id", "p_hat", "class", "lo", "hi"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double p = std::stod(rows[i][1]);
    CHECK(std::stod(rows[i][3]) <= p);
    CHECK(p <= std::stod(rows[i][4]));
    CHECK(rows[i][2] == (p > 0.5 ? "1" : "0"));
  }
  CHECK(std::none_of(rows.begin() + 1, rows.end(), [](const auto& r) { return r[0] == "18"; }));

  const auto report_a = temp_path("cli_eval_a.json").string();
  const auto report_b = temp_path("cli_eval_b.json").string();
  REQUIRE(run({"evaluate", "--predictions", preds, "--data", toy.data, "--schema", toy.schema, "--out", report_a})
              .code == 0);
  REQUIRE(run({"evaluate", "--model", model, "--data", toy.data, "--out", report_b}).code == 0);
  const auto a = nlohmann::json::parse(slurp(report_a));
  const auto b = nlohmann::json::parse(slurp(report_b));
  CHECK(a["accuracy"] == b["accuracy"]);
  CHECK(a["auc"] == b["auc"]);
  CHECK(a["n_test"] == 19);

  const auto inc = temp_path("cli_inc.csv").string();
  REQUIRE(run({"inclusion", "--model", model, "--out", inc}).code == 0);
  const auto inc_rows = read_csv(inc);
  REQUIRE(inc_rows.size() == 5);
  for (std::size_t i = 2; i < inc_rows.size(); ++i) CHECK(std::stod(inc_rows[i - 1][1]) >= std::stod(inc_rows[i][1]));
  const auto grouped = temp_path("cli_inc_grouped.csv").string();
  REQUIRE(run({"inclusion", "--model", model, "--out", grouped, "--grouped"}).code == 0);
  CHECK(read_csv(grouped).size() == 4);
}

TEST_CASE("predict reports missing model columns") {
  Toy toy;
  const auto model = temp_path("cli_mismatch.avm").string();
  REQUIRE(run({"train", "--data", toy.data, "--schema", toy.schema, "--config", toy.config, "--model", model}).code ==
          0);
  const auto other = temp_file("cli_other.csv", "age,score\n30,1.0\n").string();
  const auto r = run({"predict", "--model", model, "--data", other, "--out", temp_path("p.csv").string()});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("a constant ensemble predicts one probability everywhere") {
  Toy toy;
  ModelBundle bundle;
  bundle.preprocessor = Preprocessor::fit(load_csv(toy.data, SchemaHints::load(toy.schema)));
  bundle.summary = {{"schema", SchemaHints::load(toy.schema).to_json()}};
  bundle.draws.p = bundle.preprocessor.features().size();
  Ensemble e;
  EnsembleMember m;
  m.structure.dims = {0};
  m.structure.centres = {0.0};
  m.outputs.values = {0.4};
  e.members = {m, m};
  bundle.draws.draws = {e, e};
  const auto model = temp_path("cli_const.avm").string();
  save_model(model, bundle);
  const auto preds = temp_path("cli_const.csv").string();
  REQUIRE(run({"predict", "--model", model, "--data", toy.data, "--out", preds}).code == 0);
  const auto rows = read_csv(preds);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == exact(normal_cdf(0.8)));
}

TEST_CASE("single-tessellation model on one covariate has full inclusion") {
  const auto data = temp_file("cli_one.csv", "x,y\n1,0\n2,1\n3,0\n4,1\n5,1\n6,0\n").string();
  const auto cfg = temp_file("cli_one.json", R"({"m": 1, "burn_in": 5, "post_draws": 5})").string();
  const auto model = temp_path("cli_one.avm").string();
  REQUIRE(run({"train", "--data", data, "--config", cfg, "--model", model}).code == 0);
  const auto inc = temp_path("cli_one_inc.csv").string();
  REQUIRE(run({"inclusion", "--model", model, "--out", inc}).code == 0);
  const auto rows = read_csv(inc);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "x");
  CHECK(std::stod(rows[1][1]) == 100.0);
}

TEST_CASE("benchmark isolates failing datasets") {
  Toy toy;
  const auto dir = temp_path("cli_suite");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "suite.json") << R"({"datasets": [
    {"name": "toy", "data": ")" << toy.data << R"(", "schema": ")" << toy.schema << R"(",
     "reference": {"accuracy": 90, "auc": 0.9}, "bands": {"accuracy": 0, "auc": 0}},
    {"name": "absent", "data": "absent.csv"}]})";
  const auto out = (dir / "splits.csv").string();
  const auto r = run({"benchmark", "--suite", (dir / "suite.json").string(), "--splits", "2", "--config", toy.config,
                      "--out", out, "--threads", "2"});
  CHECK(r.code == kExitBenchmarkFailure);
  CHECK(r.err.find("absent") != std::string::npos);
  const auto splits = read_csv(out);
  REQUIRE(splits.size() == 3);
  CHECK(splits[1][0] == "toy");
  CHECK(splits[1][1] == "0");
  CHECK(splits[2][1] == "1");
  const auto summary = read_csv((dir / "splits_summary.csv").string());
  REQUIRE(summary.size() == 3);
  CHECK(summary[1][1] == "ok");
  CHECK(summary[1][11] == "yes");
  CHECK(summary[2][1] == "failed");

  const auto again = (dir / "again.csv").string();
  run({"benchmark", "--suite", (dir / "suite.json").string(), "--splits", "2", "--config", toy.config, "--out", again,
       "--threads", "1", "--datasets", "toy"});
  CHECK(slurp(again) == slurp(out));
  CHECK(run({"benchmark", "--suite", (dir / "suite.json").string(), "--datasets", "nope", "--out", again}).code ==
        kExitInput);
}

TEST_CASE("simulate writes one row per parameter and a lattice") {
  const auto cfg = temp_file("cli_sim.json", R"({"m": 3, "burn_in": 10, "post_draws": 10})").string();
  const auto out = temp_path("cli_sim.csv").string();
  const auto r = run({"simulate", "--function", "rotated", "--params", "0,0.5", "--n-train", "80", "--n-test", "40",
                      "--lattice", "5", "--config", cfg, "--out", out});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][0] == "0.5");
  const auto grid = read_csv(temp_path("cli_sim_lattice.csv").string());
  REQUIRE(grid.size() == 51);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double p = std::stod(grid[i][3]);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(grid[1][1] == "0.10000000000000001");
  CHECK(run({"simulate", "--function", "spiral", "--out", out}).code == kExitInput);
}
