#ifndef ADDIVORTES_DATA_HPP
#define ADDIVORTES_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "addivortes/probit.hpp"
#include "addivortes/tessellation.hpp"

namespace addivortes {

// RFC 4180 record parsing. Returns rows of fields; the header is row 0.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);
void write_csv_rows(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

enum class ColumnType { Numeric, Categorical, Ignore };

// Column name -> type/target/mapping hints, read from a small JSON file:
//   {"target": "class", "positive": ["4"], "target_map": {"4": 1, "2": 0},
//    "columns": {"bare_nuclei": "numeric", "purpose": "categorical"},
//    "missing": ["", "?", "NA"]}
struct SchemaHints {
  std::optional<std::string> target;
  std::vector<std::string> positive;
  std::map<std::string, int> target_map;
  std::map<std::string, ColumnType> types;
  std::vector<std::string> missing{"", "?", "NA", "NaN", "nan", "null"};

  static SchemaHints from_json(const nlohmann::json& j);
  static SchemaHints load(const std::string& path);
  nlohmann::json to_json() const;
  bool is_missing(const std::string& field) const;
};

struct Column {
  std::string name;
  ColumnType type = ColumnType::Numeric;
  std::vector<std::string> text;  // raw field values
  std::vector<double> numeric;    // parsed values, NaN when missing (numeric columns only)
  std::vector<std::uint8_t> missing;
};

struct RawTable {
  std::vector<std::string> header;  // every column in file order, target included
  std::vector<Column> columns;      // covariate columns (target excluded)
  std::string target_name;
  bool has_target = false;
  std::vector<std::string> target_text;
  std::vector<std::uint8_t> target;          // 0/1
  std::vector<std::uint8_t> target_missing;
  // source line (1-based, header = 1) of each row
  std::vector<std::size_t> lines;

  std::size_t rows() const { return lines.size(); }
  RawTable select_rows(std::span<const std::size_t> indices) const;
  const Column* find(const std::string& name) const;
};

enum class TargetPolicy { Required, Optional };

RawTable load_csv(const std::string& path, const SchemaHints& hints, TargetPolicy policy = TargetPolicy::Required);
RawTable parse_table(const std::string& text, const SchemaHints& hints,
                     TargetPolicy policy = TargetPolicy::Required, const std::string& source = "<memory>");
void write_csv(const RawTable& table, const std::string& path);

struct StandardizationStats {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> sd;
};

// One covariate of the encoded matrix.
struct Feature {
  std::string name;
  std::string source;  // parent column
  ColumnType kind = ColumnType::Numeric;
  std::string level;   // categorical indicator level
  double mean = 0.0;   // numeric standardization
  double sd = 1.0;
};

struct PreparedData {
  CovariateMatrix x;
  BinaryResponse y;               // empty when the table has no target
  std::vector<std::size_t> kept;  // indices of table rows that survived
  std::size_t dropped = 0;        // rows removed for missing values
};

struct PreprocessPolicy {
  bool standardize = true;
};

// Fitted encoding: missing-row removal, one-hot with the first (sorted)
// level dropped, z-scoring of numeric columns with training statistics.
class Preprocessor {
 public:
  static Preprocessor fit(const RawTable& train, const PreprocessPolicy& policy = {});

  PreparedData transform(const RawTable& table) const;

  const std::vector<Feature>& features() const { return features_; }
  std::vector<std::string> feature_names() const;
  StandardizationStats stats() const;
  // feature index -> parent column name
  std::vector<std::string> encoding_map() const;
  const std::string& target_name() const { return target_name_; }
  const std::vector<std::string>& source_columns() const { return sources_; }

  nlohmann::json to_json() const;
  static Preprocessor from_json(const nlohmann::json& j);

 private:
  std::vector<Feature> features_;
  std::vector<std::string> sources_;
  // every training level of each encoded categorical column, reference included
  std::map<std::string, std::vector<std::string>> levels_;
  std::string target_name_;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded permutation; the first floor(fraction n) go to train. Both sorted.
SplitIndices train_test_split(std::size_t n, double fraction, std::uint64_t seed);
std::pair<RawTable, RawTable> train_test_split(const RawTable& table, double fraction, std::uint64_t seed);

// k near-equal disjoint folds covering 0..n-1, each sorted.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

// Content hash (FNV-1a 64) of a file, hex encoded.
std::string file_fingerprint(const std::string& path);

}  // namespace addivortes

#endif
