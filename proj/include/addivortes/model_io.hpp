#ifndef ADDIVORTES_MODEL_IO_HPP
#define ADDIVORTES_MODEL_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "addivortes/data.hpp"
#include "addivortes/sampler.hpp"

namespace addivortes {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Everything needed to predict on raw CSV rows: the fitted encoding, the
// sampler configuration and the retained posterior draws.
struct ModelBundle {
  Preprocessor preprocessor;
  SamplerConfig config;
  PosteriorDraws draws;
  nlohmann::json summary = nlohmann::json::object();
};

nlohmann::json config_to_json(const SamplerConfig& config);
// Overrides the fields present in `j`; unknown keys are a ConfigError.
SamplerConfig config_from_json(const nlohmann::json& j, SamplerConfig base = {});

// Binary layout documented in docs/model_format.md.
void write_model(std::ostream& out, const ModelBundle& model);
void save_model(const std::string& path, const ModelBundle& model);
ModelBundle read_model(std::istream& in);
ModelBundle load_model(const std::string& path);

}  // namespace addivortes

#endif
