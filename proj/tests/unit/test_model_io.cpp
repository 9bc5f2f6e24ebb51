#include <doctest.h>

#include <sstream>

#include "addivortes/data.hpp"
#include "addivortes/error.hpp"
#include "addivortes/model_io.hpp"
#include "addivortes/synthetic.hpp"

using namespace addivortes;

namespace {

ModelBundle small_model() {
  const auto table = parse_table("a,b,colour,y\n0.1,2,red,1\n0.5,1,blue,0\n0.9,4,red,1\n0.3,3,green,0\n"
                                 "0.7,5,blue,1\n0.2,0,green,0\n",
                                 {});
  ModelBundle model;
  model.preprocessor = Preprocessor::fit(table);
  const auto prepared = model.preprocessor.transform(table);
  model.config.m = 5;
  model.config.burn_in = 10;
  model.config.post_draws = 7;
  model.config.seed = 11;
  model.draws = run_gibbs(prepared.x, prepared.y, model.config);
  model.summary = {{"note", "x"}};
  return model;
}

std::string bytes_of(const ModelBundle& m) {
  std::ostringstream out(std::ios::binary);
  write_model(out, m);
  return out.str();
}

ModelBundle from_bytes(const std::string& s) {
  std::istringstream in(s, std::ios::binary);
  return read_model(in);
}

}  // namespace

TEST_CASE("models round-trip exactly") {
  const auto model = small_model();
  const auto bytes = bytes_of(model);
  const auto back = from_bytes(bytes);
  CHECK(bytes_of(back) == bytes);
  CHECK(back.draws.p == model.draws.p);
  CHECK(back.draws.offset == model.draws.offset);
  REQUIRE(back.draws.size() == model.draws.size());
  for (std::size_t k = 0; k < model.draws.size(); ++k) {
    for (std::size_t j = 0; j < model.config.m; ++j) {
      const auto& a = model.draws.draws[k].members[j];
      const auto& b = back.draws.draws[k].members[j];
      CHECK(a.structure.dims == b.structure.dims);
      CHECK(a.structure.centres == b.structure.centres);
      CHECK(a.outputs.values == b.outputs.values);
    }
  }
  CHECK(back.preprocessor.feature_names() == model.preprocessor.feature_names());
  CHECK(back.summary == model.summary);
  CHECK(config_to_json(back.config) == config_to_json(model.config));
  const std::vector<double> x{0.2, -1.0, 1.0, 0.0};
  CHECK(predict_proba(back.draws, x) == predict_proba(model.draws, x));
}

TEST_CASE("damaged model files are input errors") {
  const auto bytes = bytes_of(small_model());
  CHECK_THROWS_AS(from_bytes("NOTAMODEL" + bytes), InputError);
  CHECK_THROWS_AS(from_bytes(bytes.substr(0, bytes.size() - 3)), InputError);
  CHECK_THROWS_AS(from_bytes(bytes.substr(0, 10)), InputError);
  CHECK_THROWS_AS(from_bytes(bytes + "x"), InputError);
  auto wrong_version = bytes;
  wrong_version[8] = 9;
  CHECK_THROWS_AS(from_bytes(wrong_version), InputError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.avm"), InputError);
}

TEST_CASE("configuration json overrides and rejects unknown keys") {
  SamplerConfig base;
  const auto c = config_from_json({{"m", 7}, {"sigma_c", 0.3}}, base);
  CHECK(c.m == 7);
  CHECK(c.sigma_c == 0.3);
  CHECK(c.lambda_c == base.lambda_c);
  CHECK_THROWS_AS(config_from_json({{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"m", "many"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}
