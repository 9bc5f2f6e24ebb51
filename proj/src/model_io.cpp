#include "addivortes/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "addivortes/error.hpp"

namespace addivortes {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'D', 'I', 'V', 'O', 'R', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw InputError("model file is truncated");
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

nlohmann::json config_to_json(const SamplerConfig& c) {
  return {{"m", c.m},
          {"k", c.k},
          {"omega", c.omega},
          {"lambda_c", c.lambda_c},
          {"sigma_c", c.sigma_c},
          {"burn_in", c.burn_in},
          {"post_draws", c.post_draws},
          {"thin", c.thin},
          {"seed", c.seed},
          {"threshold", c.threshold},
          {"p0", c.p0}};
}

SamplerConfig config_from_json(const nlohmann::json& j, SamplerConfig c) {
  if (!j.is_object()) throw ConfigError("sampler configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "m") c.m = value.get<std::size_t>();
      else if (key == "k") c.k = value.get<double>();
      else if (key == "omega") c.omega = value.get<double>();
      else if (key == "lambda_c") c.lambda_c = value.get<double>();
      else if (key == "sigma_c") c.sigma_c = value.get<double>();
      else if (key == "burn_in") c.burn_in = value.get<std::size_t>();
      else if (key == "post_draws") c.post_draws = value.get<std::size_t>();
      else if (key == "thin") c.thin = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threshold") c.threshold = value.get<double>();
      else if (key == "p0") c.p0 = value.get<double>();
      else throw ConfigError("unknown configuration key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

void write_model(std::ostream& out, const ModelBundle& model) {
  const auto& draws = model.draws;
  if (draws.draws.empty()) throw StructuralError("model has no posterior draws");
  nlohmann::json header;
  header["format_version"] = kModelFormatVersion;
  header["p"] = draws.p;
  header["m"] = draws.draws.front().members.size();
  header["K"] = draws.draws.size();
  header["offset"] = draws.offset;
  header["config"] = config_to_json(model.config);
  header["preprocessor"] = model.preprocessor.to_json();
  header["feature_names"] = model.preprocessor.feature_names();
  header["summary"] = model.summary;
  const std::string text = header.dump();

  out.write(kMagic, sizeof kMagic);
  put_u32(out, kModelFormatVersion);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& e : draws.draws) {
    if (e.members.size() != draws.draws.front().members.size())
      throw StructuralError("posterior draws disagree on the number of tessellations");
    for (const auto& member : e.members) {
      const auto& t = member.structure;
      put_u32(out, static_cast<std::uint32_t>(t.dimension()));
      put_u32(out, static_cast<std::uint32_t>(t.centre_count()));
      for (auto k : t.dims) put_u32(out, static_cast<std::uint32_t>(k));
      for (double v : t.centres) put_f64(out, v);
      for (double v : member.outputs.values) put_f64(out, v);
    }
  }
  if (!out) throw InputError("failed writing model");
}

void save_model(const std::string& path, const ModelBundle& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path);
  write_model(out, model);
}

ModelBundle read_model(std::istream& in) {
  char magic[sizeof kMagic];
  read_exact(in, magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw InputError("not a model file (bad magic)");
  const auto version = get_u32(in);
  if (version != kModelFormatVersion)
    throw InputError("unsupported model format version " + std::to_string(version));
  const auto length = get_u64(in);
  if (length > (std::uint64_t{1} << 32)) throw InputError("model header is implausibly large");
  std::string text(length, '\0');
  read_exact(in, text.data(), text.size());

  ModelBundle model;
  try {
    const auto header = nlohmann::json::parse(text);
    model.config = config_from_json(header.at("config"));
    model.preprocessor = Preprocessor::from_json(header.at("preprocessor"));
    model.summary = header.value("summary", nlohmann::json::object());
    model.draws.p = header.at("p").get<std::size_t>();
    model.draws.offset = header.at("offset").get<double>();
    const auto m = header.at("m").get<std::size_t>();
    const auto K = header.at("K").get<std::size_t>();
    if (model.preprocessor.features().size() != model.draws.p)
      throw InputError("model header: feature count does not match p");
    model.draws.draws.resize(K);
    for (auto& e : model.draws.draws) {
      e.members.resize(m);
      for (auto& member : e.members) {
        const auto d = get_u32(in);
        const auto b = get_u32(in);
        if (d == 0 || d > model.draws.p || b == 0 || b > (1u << 24)) throw InputError("model body is corrupt");
        auto& t = member.structure;
        t.dims.resize(d);
        for (auto& k : t.dims) k = get_u32(in);
        t.centres.resize(static_cast<std::size_t>(d) * b);
        for (auto& v : t.centres) v = get_f64(in);
        member.outputs.values.resize(b);
        for (auto& v : member.outputs.values) v = get_f64(in);
        try {
          t.validate(model.draws.p);
        } catch (const StructuralError& err) {
          throw InputError(std::string("model body is corrupt: ") + err.what());
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model header is malformed: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("model header is malformed: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("trailing bytes after model body");
  return model;
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path);
  return read_model(in);
}

}  // namespace addivortes
