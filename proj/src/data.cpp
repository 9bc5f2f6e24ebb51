#include "addivortes/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "addivortes/error.hpp"
#include "addivortes/log.hpp"
#include "addivortes/random.hpp"

namespace addivortes {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& field) {
  const std::string s = trim(field);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

ColumnType parse_type(const std::string& s) {
  if (s == "numeric") return ColumnType::Numeric;
  if (s == "categorical") return ColumnType::Categorical;
  if (s == "ignore") return ColumnType::Ignore;
  throw InputError("unknown column type in schema: " + s);
}

std::string type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Numeric: return "numeric";
    case ColumnType::Categorical: return "categorical";
    case ColumnType::Ignore: return "ignore";
  }
  return "numeric";
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Random rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  return perm;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    rows.push_back(std::move(row));
    row.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw InputError("stray quote inside unquoted field at line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  // Blank lines carry no data.
  std::erase_if(rows, [](const std::vector<std::string>& r) { return r.size() == 1 && r[0].empty(); });
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_rows(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(r[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  if (!out) throw InputError("failed writing file: " + path);
}

SchemaHints SchemaHints::from_json(const nlohmann::json& j) {
  SchemaHints h;
  if (j.contains("target")) h.target = j.at("target").get<std::string>();
  if (j.contains("positive")) {
    const auto& p = j.at("positive");
    if (p.is_array()) {
      for (const auto& v : p) h.positive.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      h.positive.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    }
  }
  if (j.contains("target_map"))
    for (const auto& [k, v] : j.at("target_map").items()) h.target_map[k] = v.get<int>();
  if (j.contains("columns"))
    for (const auto& [k, v] : j.at("columns").items()) h.types[k] = parse_type(v.get<std::string>());
  if (j.contains("missing")) h.missing = j.at("missing").get<std::vector<std::string>>();
  for (const auto& [k, v] : h.target_map)
    if (v != 0 && v != 1) throw InputError("target_map values must be 0 or 1 (label " + k + ")");
  return h;
}

SchemaHints SchemaHints::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed schema file " + path + ": " + e.what());
  }
}

nlohmann::json SchemaHints::to_json() const {
  nlohmann::json j;
  if (target) j["target"] = *target;
  if (!positive.empty()) j["positive"] = positive;
  if (!target_map.empty()) j["target_map"] = target_map;
  nlohmann::json cols = nlohmann::json::object();
  for (const auto& [k, v] : types) cols[k] = type_name(v);
  j["columns"] = cols;
  j["missing"] = missing;
  return j;
}

bool SchemaHints::is_missing(const std::string& field) const {
  const std::string s = trim(field);
  return std::find(missing.begin(), missing.end(), s) != missing.end();
}

RawTable RawTable::select_rows(std::span<const std::size_t> indices) const {
  RawTable out;
  out.header = header;
  out.target_name = target_name;
  out.has_target = has_target;
  for (const auto& col : columns) {
    Column c;
    c.name = col.name;
    c.type = col.type;
    for (std::size_t i : indices) {
      c.text.push_back(col.text.at(i));
      c.missing.push_back(col.missing.at(i));
      if (!col.numeric.empty()) c.numeric.push_back(col.numeric.at(i));
    }
    out.columns.push_back(std::move(c));
  }
  for (std::size_t i : indices) {
    out.lines.push_back(lines.at(i));
    if (has_target) {
      out.target_text.push_back(target_text.at(i));
      out.target.push_back(target.at(i));
      out.target_missing.push_back(target_missing.at(i));
    }
  }
  return out;
}

const Column* RawTable::find(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

RawTable parse_table(const std::string& text, const SchemaHints& hints, TargetPolicy policy,
                     const std::string& source) {
  const auto records = parse_csv(text);
  if (records.empty()) throw InputError(source + ": missing header row");
  RawTable table;
  for (const auto& h : records[0]) table.header.push_back(trim(h));
  const std::size_t width = table.header.size();
  {
    std::set<std::string> seen;
    for (const auto& h : table.header)
      if (!seen.insert(h).second) throw InputError(source + ": duplicate column name '" + h + "'");
  }

  std::size_t target_index = width;  // none
  if (hints.target) {
    const auto it = std::find(table.header.begin(), table.header.end(), *hints.target);
    if (it != table.header.end()) {
      target_index = static_cast<std::size_t>(it - table.header.begin());
    } else if (policy == TargetPolicy::Required) {
      throw InputError(source + ": target column '" + *hints.target + "' not found");
    }
  } else if (policy == TargetPolicy::Required) {
    target_index = width - 1;
  }
  table.has_target = target_index < width;
  if (table.has_target) table.target_name = table.header[target_index];

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width)
      throw InputError(source + ": ragged row at line " + std::to_string(r + 1) + " (" +
                       std::to_string(records[r].size()) + " fields, expected " + std::to_string(width) + ")");
  }
  const std::size_t n = records.size() - 1;
  for (std::size_t r = 0; r < n; ++r) table.lines.push_back(r + 2);

  for (std::size_t c = 0; c < width; ++c) {
    if (c == target_index) continue;
    Column col;
    col.name = table.header[c];
    col.text.reserve(n);
    col.missing.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      col.text.push_back(records[r + 1][c]);
      col.missing.push_back(hints.is_missing(records[r + 1][c]) ? 1 : 0);
    }
    const auto hinted = hints.types.find(col.name);
    if (hinted != hints.types.end()) {
      col.type = hinted->second;
    } else {
      bool numeric = true;
      for (std::size_t r = 0; r < n && numeric; ++r)
        if (!col.missing[r] && !parse_number(col.text[r])) numeric = false;
      col.type = numeric ? ColumnType::Numeric : ColumnType::Categorical;
    }
    if (col.type == ColumnType::Numeric) {
      col.numeric.resize(n, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t r = 0; r < n; ++r) {
        if (col.missing[r]) continue;
        const auto v = parse_number(col.text[r]);
        if (!v)
          throw InputError(source + ": non-numeric value '" + col.text[r] + "' in numeric column '" + col.name +
                           "' at line " + std::to_string(r + 2));
        col.numeric[r] = *v;
      }
    }
    table.columns.push_back(std::move(col));
  }

  if (table.has_target) {
    for (std::size_t r = 0; r < n; ++r) {
      const std::string raw = records[r + 1][target_index];
      const std::string label = trim(raw);
      table.target_text.push_back(raw);
      if (hints.is_missing(raw)) {
        table.target.push_back(0);
        table.target_missing.push_back(1);
        continue;
      }
      int value = -1;
      if (!hints.target_map.empty()) {
        const auto it = hints.target_map.find(label);
        if (it != hints.target_map.end()) value = it->second;
      } else if (!hints.positive.empty()) {
        value = std::find(hints.positive.begin(), hints.positive.end(), label) != hints.positive.end() ? 1 : 0;
      } else if (const auto v = parse_number(label); v && (*v == 0.0 || *v == 1.0)) {
        value = static_cast<int>(*v);
      }
      if (value < 0)
        throw InputError(source + ": unparseable target value '" + label + "' in column '" + table.target_name +
                         "' at line " + std::to_string(r + 2));
      table.target.push_back(static_cast<std::uint8_t>(value));
      table.target_missing.push_back(0);
    }
  }
  return table;
}

RawTable load_csv(const std::string& path, const SchemaHints& hints, TargetPolicy policy) {
  return parse_table(read_file(path), hints, policy, path);
}

void write_csv(const RawTable& table, const std::string& path) {
  std::vector<std::vector<std::string>> rows(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (const auto& name : table.header) {
      if (table.has_target && name == table.target_name) {
        rows[r].push_back(table.target_text[r]);
      } else {
        rows[r].push_back(table.find(name)->text[r]);
      }
    }
  }
  write_csv_rows(path, table.header, rows);
}

Preprocessor Preprocessor::fit(const RawTable& train, const PreprocessPolicy& policy) {
  Preprocessor pre;
  pre.target_name_ = train.target_name;
  std::vector<std::uint8_t> complete(train.rows(), 1);
  for (const auto& col : train.columns) {
    if (col.type == ColumnType::Ignore) continue;
    for (std::size_t r = 0; r < train.rows(); ++r)
      if (col.missing[r]) complete[r] = 0;
  }
  if (train.has_target)
    for (std::size_t r = 0; r < train.rows(); ++r)
      if (train.target_missing[r]) complete[r] = 0;
  const auto kept = static_cast<std::size_t>(std::count(complete.begin(), complete.end(), 1));
  if (kept == 0) throw InputError("every training row has missing values");

  for (const auto& col : train.columns) {
    if (col.type == ColumnType::Ignore) continue;
    pre.sources_.push_back(col.name);
    if (col.type == ColumnType::Numeric) {
      double sum = 0.0;
      for (std::size_t r = 0; r < train.rows(); ++r)
        if (complete[r]) sum += col.numeric[r];
      const double mean = sum / static_cast<double>(kept);
      double ss = 0.0;
      for (std::size_t r = 0; r < train.rows(); ++r)
        if (complete[r]) ss += (col.numeric[r] - mean) * (col.numeric[r] - mean);
      const double sd = kept > 1 ? std::sqrt(ss / static_cast<double>(kept - 1)) : 0.0;
      if (!(sd > 0.0)) {
        warn("dropping zero-variance column '" + col.name + "'");
        continue;
      }
      Feature f;
      f.name = col.name;
      f.source = col.name;
      f.kind = ColumnType::Numeric;
      f.mean = policy.standardize ? mean : 0.0;
      f.sd = policy.standardize ? sd : 1.0;
      pre.features_.push_back(std::move(f));
    } else {
      std::set<std::string> levels;
      for (std::size_t r = 0; r < train.rows(); ++r)
        if (complete[r]) levels.insert(trim(col.text[r]));
      if (levels.size() < 2) {
        warn("dropping single-level categorical column '" + col.name + "'");
        continue;
      }
      pre.levels_[col.name] = std::vector<std::string>(levels.begin(), levels.end());
      auto it = levels.begin();
      for (++it; it != levels.end(); ++it) {
        Feature f;
        f.name = col.name + "=" + *it;
        f.source = col.name;
        f.kind = ColumnType::Categorical;
        f.level = *it;
        pre.features_.push_back(std::move(f));
      }
    }
  }
  if (pre.features_.empty()) throw InputError("no usable covariates after preprocessing");
  return pre;
}

PreparedData Preprocessor::transform(const RawTable& table) const {
  std::vector<std::string> absent;
  std::vector<const Column*> cols;
  for (const auto& name : sources_) {
    const Column* c = table.find(name);
    if (!c) absent.push_back(name);
    cols.push_back(c);
  }
  if (!absent.empty()) {
    std::string msg = "data is missing model columns:";
    for (const auto& a : absent) msg += " " + a;
    throw InputError(msg);
  }
  for (const auto& f : features_) {
    const Column* c = table.find(f.source);
    if (f.kind == ColumnType::Numeric && c->type != ColumnType::Numeric)
      throw InputError("column '" + f.source + "' must be numeric");
  }

  PreparedData out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool ok = true;
    for (const Column* c : cols)
      if (c->missing[r]) ok = false;
    if (table.has_target && table.target_missing[r]) ok = false;
    if (ok) {
      out.kept.push_back(r);
    } else {
      ++out.dropped;
    }
  }
  if (out.kept.empty()) throw InputError("every row has missing values");
  const std::size_t n = out.kept.size();
  const std::size_t p = features_.size();
  std::vector<double> data(n * p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const auto& f = features_[k];
    const Column* c = table.find(f.source);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = out.kept[i];
      if (f.kind == ColumnType::Numeric) {
        data[k * n + i] = (c->numeric[r] - f.mean) / f.sd;
      } else {
        data[k * n + i] = trim(c->text[r]) == f.level ? 1.0 : 0.0;
      }
    }
  }
  for (const auto& [name, levels] : levels_) {
    const Column* c = table.find(name);
    std::set<std::string> unseen;
    for (std::size_t r : out.kept) {
      const std::string level = trim(c->text[r]);
      if (!std::binary_search(levels.begin(), levels.end(), level)) unseen.insert(level);
    }
    for (const auto& u : unseen) warn("unseen category " + name + "=" + u + " encoded as all-zero indicators");
  }

  std::vector<std::string> names;
  for (const auto& f : features_) names.push_back(f.name);
  out.x = CovariateMatrix(n, p, std::move(data), std::move(names));
  if (table.has_target) {
    out.y.y.reserve(n);
    for (std::size_t r : out.kept) out.y.y.push_back(table.target[r]);
  }
  return out;
}

std::vector<std::string> Preprocessor::feature_names() const {
  std::vector<std::string> out;
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

StandardizationStats Preprocessor::stats() const {
  StandardizationStats s;
  for (const auto& f : features_) {
    if (f.kind != ColumnType::Numeric) continue;
    s.columns.push_back(f.name);
    s.mean.push_back(f.mean);
    s.sd.push_back(f.sd);
  }
  return s;
}

std::vector<std::string> Preprocessor::encoding_map() const {
  std::vector<std::string> out;
  for (const auto& f : features_) out.push_back(f.source);
  return out;
}

nlohmann::json Preprocessor::to_json() const {
  nlohmann::json j;
  j["target"] = target_name_;
  j["sources"] = sources_;
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features_) {
    feats.push_back({{"name", f.name},
                     {"source", f.source},
                     {"kind", type_name(f.kind)},
                     {"level", f.level},
                     {"mean", f.mean},
                     {"sd", f.sd}});
  }
  j["features"] = feats;
  j["levels"] = levels_;
  return j;
}

Preprocessor Preprocessor::from_json(const nlohmann::json& j) {
  Preprocessor pre;
  pre.target_name_ = j.at("target").get<std::string>();
  pre.sources_ = j.at("sources").get<std::vector<std::string>>();
  for (const auto& fj : j.at("features")) {
    Feature f;
    f.name = fj.at("name").get<std::string>();
    f.source = fj.at("source").get<std::string>();
    f.kind = parse_type(fj.at("kind").get<std::string>());
    f.level = fj.at("level").get<std::string>();
    f.mean = fj.at("mean").get<double>();
    f.sd = fj.at("sd").get<double>();
    pre.features_.push_back(std::move(f));
  }
  if (j.contains("levels")) pre.levels_ = j.at("levels").get<std::map<std::string, std::vector<std::string>>>();
  return pre;
}

SplitIndices train_test_split(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0,1)");
  const auto perm = permutation(n, seed);
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::pair<RawTable, RawTable> train_test_split(const RawTable& table, double fraction, std::uint64_t seed) {
  const auto s = train_test_split(table.rows(), fraction, seed);
  return {table.select_rows(s.train), table.select_rows(s.test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (n < k) throw ConfigError("k-fold needs at least k rows");
  const auto perm = permutation(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string file_fingerprint(const std::string& path) {
  const std::string content = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace addivortes
