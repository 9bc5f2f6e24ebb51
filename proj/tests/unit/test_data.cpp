#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "addivortes/data.hpp"
#include "addivortes/error.hpp"
#include "addivortes/log.hpp"
#include "support.hpp"

using namespace addivortes;
namespace fs = std::filesystem;
using namespace test_support;

namespace {

struct WarningCapture {
  std::vector<std::string> messages;
  WarningSink old;
  WarningCapture() {
    old = set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { set_warning_sink(old); }
};

}  // namespace

TEST_CASE("csv parsing handles quotes and line endings") {
  const auto rows = parse_csv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n1,\"two\nlines\"\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "x, y");
  CHECK(rows[1][1] == "say \"hi\"");
  CHECK(rows[2][1] == "two\nlines");
  CHECK_THROWS_AS(parse_csv("a\n\"open"), InputError);
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("q\"") == "\"q\"\"\"");
}

TEST_CASE("a small file round-trips through load and write") {
  const auto src = temp_file("toy.csv", "x,colour,label\n1.5,\"red, dark\",1\n-2,blue,0\n3e1,red,1\n");
  SchemaHints hints;
  const auto a = load_csv(src.string(), hints);
  const auto out = src.parent_path() / "toy_out.csv";
  write_csv(a, out.string());
  const auto b = load_csv(out.string(), hints);
  CHECK(a.header == b.header);
  CHECK(a.target == b.target);
  REQUIRE(a.columns.size() == b.columns.size());
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    CHECK(a.columns[c].text == b.columns[c].text);
    CHECK(a.columns[c].type == b.columns[c].type);
  }
  CHECK(slurp(out) == slurp(src));
  CHECK(a.columns[0].type == ColumnType::Numeric);
  CHECK(a.columns[1].type == ColumnType::Categorical);
  CHECK(a.target == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("input errors name the row and column") {
  SchemaHints hints;
  hints.types["x"] = ColumnType::Numeric;
  const auto bad = temp_file("bad.csv", "x,y\n1,0\nabc,1\n");
  try {
    load_csv(bad.string(), hints);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'x'") != std::string::npos);
  }
  const auto ragged = temp_file("ragged.csv", "x,y\n1,0\n2\n");
  CHECK_THROWS_AS(load_csv(ragged.string(), {}), InputError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {}), InputError);
  const auto target = temp_file("target.csv", "x,y\n1,maybe\n");
  CHECK_THROWS_AS(load_csv(target.string(), {}), InputError);
}

TEST_CASE("target mapping hints") {
  const auto f = temp_file("yesno.csv", "a,answer\n1,yes\n2,no\n3,yes\n");
  SchemaHints hints;
  hints.target = "answer";
  hints.target_map = {{"yes", 1}, {"no", 0}};
  CHECK(load_csv(f.string(), hints).target == std::vector<std::uint8_t>{1, 0, 1});
  SchemaHints pos;
  pos.positive = {"no"};
  CHECK(load_csv(f.string(), pos).target == std::vector<std::uint8_t>{0, 1, 0});
  const auto json = nlohmann::json::parse(R"({"target": "answer", "positive": ["yes"], "columns": {"a": "categorical"}})");
  const auto h = SchemaHints::from_json(json);
  const auto t = load_csv(f.string(), h);
  CHECK(t.target == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(t.columns[0].type == ColumnType::Categorical);
}

TEST_CASE("standardization uses training statistics only") {
  const auto f = temp_file("num.csv", "a,b,y\n1,10,0\n2,20,1\n3,30,0\n4,40,1\n");
  const auto table = load_csv(f.string(), {});
  const auto pre = Preprocessor::fit(table);
  const auto prepared = pre.transform(table);
  REQUIRE(prepared.x.cols() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    double mean = 0.0;
    for (double v : prepared.x.column(k)) mean += v;
    CHECK(std::abs(mean / 4.0) < 1e-10);
  }
  // sample sd with n - 1
  CHECK(pre.stats().sd[0] == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  // a test table with different values does not change the fitted statistics
  const auto g = temp_file("num_test.csv", "a,b,y\n100,1000,0\n");
  const auto moved = pre.transform(load_csv(g.string(), {}));
  CHECK(moved.x(0, 0) == doctest::Approx((100.0 - 2.5) / std::sqrt(5.0 / 3.0)).epsilon(1e-14));

  // refitting on already standardized data is the identity
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 4; ++i)
    rows.push_back({exact(prepared.x(i, 0)), exact(prepared.x(i, 1)), std::to_string(prepared.y.y[i])});
  const auto std_file = f.parent_path() / "standardized.csv";
  write_csv_rows(std_file.string(), {"a", "b", "y"}, rows);
  const auto again = Preprocessor::fit(load_csv(std_file.string(), {}));
  const auto twice = again.transform(load_csv(std_file.string(), {}));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(twice.x(i, k) - std::stod(rows[i][k])) < 1e-12);
}

TEST_CASE("categorical encoding, missing rows and unseen levels") {
  const auto f = temp_file("cat.csv", "c,n,y\nlow,1,0\nmid,2,1\nhigh,?,1\nhigh,4,0\nmid,5,1\n");
  WarningCapture capture;
  const auto table = load_csv(f.string(), {});
  const auto pre = Preprocessor::fit(table);
  // levels sorted: high, low, mid; the first is dropped
  CHECK(pre.feature_names() == std::vector<std::string>{"c=low", "c=mid", "n"});
  const auto prepared = pre.transform(table);
  CHECK(prepared.dropped == 1);
  CHECK(prepared.x.rows() == 4);
  CHECK(prepared.kept == std::vector<std::size_t>{0, 1, 3, 4});
  CHECK(prepared.x(0, 0) == 1.0);
  CHECK(prepared.x(2, 0) == 0.0);
  CHECK(prepared.x(2, 1) == 0.0);
  CHECK(pre.encoding_map() == std::vector<std::string>{"c", "c", "n"});

  const auto g = temp_file("cat_test.csv", "c,n,y\nextreme,3,1\nhigh,3,0\n");
  capture.messages.clear();
  const auto test = pre.transform(load_csv(g.string(), {}));
  CHECK(test.x(0, 0) == 0.0);
  CHECK(test.x(0, 1) == 0.0);
  REQUIRE(capture.messages.size() == 1);
  CHECK(capture.messages[0].find("extreme") != std::string::npos);

  const auto all_missing = temp_file("missing.csv", "a,y\n?,1\nNA,0\n");
  CHECK_THROWS_AS(Preprocessor::fit(load_csv(all_missing.string(), {})), InputError);

  const auto missing_col = temp_file("nocol.csv", "n,y\n1,1\n");
  try {
    pre.transform(load_csv(missing_col.string(), {}));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("c") != std::string::npos);
  }

  // JSON round trip preserves the encoding
  const auto restored = Preprocessor::from_json(pre.to_json());
  const auto again = restored.transform(table);
  CHECK(again.x.data() == prepared.x.data());
}

TEST_CASE("zero-variance columns are dropped with a warning") {
  const auto f = temp_file("const.csv", "a,b,y\n1,5,0\n2,5,1\n3,5,1\n");
  WarningCapture capture;
  const auto pre = Preprocessor::fit(load_csv(f.string(), {}));
  CHECK(pre.feature_names() == std::vector<std::string>{"a"});
  REQUIRE(capture.messages.size() == 1);
  CHECK(capture.messages[0].find("'b'") != std::string::npos);
}

TEST_CASE("train/test split") {
  const auto s = train_test_split(10, 0.8, 3);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (auto i : s.test) CHECK(all.insert(i).second);
  CHECK(all.size() == 10);
  CHECK(*all.rbegin() == 9);
  const auto again = train_test_split(10, 0.8, 3);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK_THROWS_AS(train_test_split(10, 1.0, 3), ConfigError);
  const auto odd = train_test_split(7, 0.8, 1);
  CHECK(odd.train.size() == 5);
}

TEST_CASE("k folds") {
  const auto f = kfold_indices(10, 5, 1);
  REQUIRE(f.size() == 5);
  for (const auto& fold : f) CHECK(fold.size() == 2);
  CHECK(kfold_indices(10, 5, 1) == f);
  CHECK_THROWS_AS(kfold_indices(3, 5, 1), ConfigError);
  CHECK_THROWS_AS(kfold_indices(10, 1, 1), ConfigError);
  for (std::size_t n = 5; n < 60; n += 7) {
    for (std::size_t k = 2; k <= 5; ++k) {
      const auto folds = kfold_indices(n, k, n * k);
      std::vector<int> seen(n, 0);
      std::size_t smallest = n, largest = 0;
      for (const auto& fold : folds) {
        smallest = std::min(smallest, fold.size());
        largest = std::max(largest, fold.size());
        for (auto i : fold) {
          REQUIRE(i < n);
          ++seen[i];
        }
      }
      for (int v : seen) CHECK(v == 1);
      CHECK(largest - smallest <= 1);
    }
  }
}

TEST_CASE("file fingerprint follows content") {
  const auto a = temp_file("fp_a.txt", "hello");
  const auto b = temp_file("fp_b.txt", "hello");
  const auto c = temp_file("fp_c.txt", "hellp");
  CHECK(file_fingerprint(a.string()) == file_fingerprint(b.string()));
  CHECK(file_fingerprint(a.string()) != file_fingerprint(c.string()));
  // FNV-1a 64 of "hello"
  CHECK(file_fingerprint(a.string()) == "a430d84680aabd0b");
}
