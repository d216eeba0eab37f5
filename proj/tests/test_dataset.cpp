#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "driftgate/dataset.hpp"
#include "driftgate/errors.hpp"
#include "test_util.hpp"

using namespace driftgate;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "dgtest_" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

FeatureSchema toy_schema() {
  FeatureSchema s;
  s.columns = {{"x1", ColumnKind::numeric, true},
               {"x2", ColumnKind::numeric, true},
               {"color", ColumnKind::categorical, true}};
  s.label_column = "y";
  return s;
}

}  // namespace

TEST_CASE("load_csv: four rows, two numeric and one categorical") {
  auto path = write_temp("basic.csv",
                         "x1,x2,color,y\n"
                         "1.5,2,red,0\n"
                         "2.5,,blue,1\n"
                         "-1,0.25,red,0\n"
                         "4,8,\"gre,en\",1\n");
  auto ds = load_csv(path, toy_schema());
  CHECK(ds.n_rows() == 4);
  CHECK(ds.numeric_cols.size() == 2);
  CHECK(ds.categorical_cols.size() == 1);
  CHECK(ds.numeric("x1").values[0] == 1.5);
  CHECK(is_missing(ds.numeric("x2").values[1]));
  const auto& color = ds.categorical("color");
  CHECK(color.dict->size() == 3);
  CHECK(color.dict->value(color.codes[3]) == "gre,en");
  CHECK(color.codes[0] == color.codes[2]);
  REQUIRE(ds.labels.has_value());
  CHECK((*ds.labels) == std::vector<std::int8_t>{0, 1, 0, 1});
  std::remove(path.c_str());
}

TEST_CASE("load_csv: header-only and empty files are empty-input errors") {
  auto only_header = write_temp("header.csv", "x1,x2,color,y\n");
  CHECK_THROWS_AS(load_csv(only_header, toy_schema()), EmptyInputError);
  auto empty = write_temp("empty.csv", "");
  CHECK_THROWS_AS(load_csv(empty, toy_schema()), EmptyInputError);
  std::remove(only_header.c_str());
  std::remove(empty.c_str());
}

TEST_CASE("load_csv: schema and parse errors carry context") {
  auto missing_col = write_temp("missing_col.csv", "x1,color,y\n1,red,0\n");
  CHECK_THROWS_WITH_AS(load_csv(missing_col, toy_schema()),
                       doctest::Contains("x2"), SchemaError);
  auto bad_cell = write_temp("bad_cell.csv", "x1,x2,color,y\n1,2,red,0\noops,2,red,1\n");
  CHECK_THROWS_WITH_AS(load_csv(bad_cell, toy_schema()), doctest::Contains("row 2"),
                       ParseError);
  CHECK_THROWS_AS(load_csv("does_not_exist.csv", toy_schema()), IoError);
  std::remove(missing_col.c_str());
  std::remove(bad_cell.c_str());
}

TEST_CASE("load_csv: header order does not matter and extra columns are ignored") {
  auto path = write_temp("reorder.csv",
                         "y,extra,color,x2,x1\n"
                         "1,zzz,red,2,1\n"
                         "0,zzz,blue,4,3\n");
  auto ds = load_csv(path, toy_schema());
  CHECK(ds.numeric("x1").values == std::vector<double>{1, 3});
  CHECK(ds.numeric("x2").values == std::vector<double>{2, 4});
  std::remove(path.c_str());
}

TEST_CASE("load_csv: dictionary reuse maps unseen categories to the unknown code") {
  auto train_path = write_temp("dict_train.csv", "x1,x2,color,y\n1,1,red,0\n2,2,blue,1\n");
  auto test_path = write_temp("dict_test.csv", "x1,x2,color,y\n3,3,green,0\n4,4,red,1\n");
  auto train = load_csv(train_path, toy_schema());
  auto test = load_csv(test_path, toy_schema(), &train);
  CHECK(test.categorical("color").codes[0] == kUnknownCategory);
  CHECK(test.categorical("color").codes[1] == train.categorical("color").codes[0]);
  CHECK(test.categorical("color").dict == train.categorical("color").dict);
  std::remove(train_path.c_str());
  std::remove(test_path.c_str());
}

TEST_CASE("encode_loan_status: keeps only resolved loans") {
  auto path = write_temp("loans.csv",
                         "x1,x2,color,loan_status\n"
                         "1,1,red,Fully Paid\n"
                         "2,2,red,Charged Off\n"
                         "3,3,blue,Current\n"
                         "4,4,blue,Late (31-120 days)\n"
                         "5,5,red,Fully Paid\n");
  auto schema = toy_schema();
  schema.label_column = "loan_status";
  auto raw = load_csv(path, schema);
  REQUIRE(raw.raw_label.has_value());
  auto ds = encode_loan_status(raw);
  CHECK(ds.n_rows() == 3);
  CHECK((*ds.labels) == std::vector<std::int8_t>{0, 1, 0});
  CHECK(ds.row_ids == std::vector<std::int64_t>{0, 1, 4});  // survivors keep ids
  CHECK_FALSE(ds.raw_label.has_value());

  // positive ratio is exact
  std::size_t pos = 0;
  for (auto l : *ds.labels) pos += l;
  CHECK(static_cast<double>(pos) / ds.n_rows() == doctest::Approx(1.0 / 3.0));
  std::remove(path.c_str());
}

TEST_CASE("encode_loan_status: all rows filtered is fine, absent column is not") {
  auto path = write_temp("current.csv", "x1,x2,color,loan_status\n1,1,red,Current\n");
  auto schema = toy_schema();
  schema.label_column = "loan_status";
  auto ds = encode_loan_status(load_csv(path, schema));
  CHECK(ds.n_rows() == 0);

  auto no_status = testing::make_dataset({{1.0, 2.0}}, {0, 1});
  CHECK_THROWS_AS(encode_loan_status(no_status), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("preprocess: fico average, log10 transforms, emp_length map") {
  auto path = write_temp(
      "lc.csv",
      "emp_length,fico_range_low,fico_range_high,annual_inc,revol_bal,term,y\n"
      "10+ years,700,704,65535,9999,36 months,0\n"
      "< 1 year,660,664,0,0,60 months,1\n"
      "3 years,,704,50000,100,36 months,0\n"
      ",700,704,1000,10,60 months,1\n");
  FeatureSchema schema;
  schema.columns = {{"emp_length", ColumnKind::categorical, true},
                    {"fico_range_low", ColumnKind::numeric, true},
                    {"fico_range_high", ColumnKind::numeric, true},
                    {"annual_inc", ColumnKind::numeric, true},
                    {"revol_bal", ColumnKind::numeric, true},
                    {"term", ColumnKind::categorical, true}};
  schema.label_column = "y";
  auto ds = preprocess_lending_club(load_csv(path, schema));

  CHECK(ds.schema.find("fico_score") != nullptr);
  CHECK(ds.schema.find("fico_range_low") == nullptr);
  CHECK(ds.schema.find("fico_range_high") == nullptr);
  CHECK(ds.numeric("fico_score").values[0] == 702.0);
  CHECK(is_missing(ds.numeric("fico_score").values[2]));

  CHECK(ds.numeric("log_annual_inc").values[0] == doctest::Approx(4.81648).epsilon(1e-5));
  CHECK(ds.numeric("log_annual_inc").values[1] == 0.0);  // log10(0 + 1)
  CHECK(ds.numeric("log_revol_bal").values[0] == doctest::Approx(4.0).epsilon(1e-3));

  CHECK(ds.numeric("emp_length").values[0] == 10.0);
  CHECK(ds.numeric("emp_length").values[1] == 0.0);
  CHECK(ds.numeric("emp_length").values[2] == 3.0);
  CHECK(is_missing(ds.numeric("emp_length").values[3]));

  CHECK(ds.numeric("term").values == std::vector<double>{36, 60, 36, 60});

  // applying the pipeline twice fails: source columns are gone
  CHECK_THROWS_AS(preprocess_lending_club(ds), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("preprocess: earliest_cr_line reduces to its year") {
  auto path = write_temp(
      "ecl.csv",
      "emp_length,fico_range_low,fico_range_high,annual_inc,revol_bal,earliest_cr_line,y\n"
      "1 year,700,704,1,1,Apr-1999,0\n"
      "2 years,700,704,1,1,2004-11,1\n");
  FeatureSchema schema;
  schema.columns = {{"emp_length", ColumnKind::categorical, true},
                    {"fico_range_low", ColumnKind::numeric, true},
                    {"fico_range_high", ColumnKind::numeric, true},
                    {"annual_inc", ColumnKind::numeric, true},
                    {"revol_bal", ColumnKind::numeric, true},
                    {"earliest_cr_line", ColumnKind::categorical, true}};
  schema.label_column = "y";
  auto ds = preprocess_lending_club(load_csv(path, schema));
  CHECK(ds.numeric("earliest_cr_line").values == std::vector<double>{1999, 2004});
  std::remove(path.c_str());
}

TEST_CASE("split_by_month: ordering and row id preservation") {
  auto ds = testing::make_dataset({{1, 2, 3}}, {0, 1, 0},
                                  {{2018, 1}, {2018, 2}, {2018, 3}});
  auto [before, after] = split_by_month(ds, {2018, 2});
  CHECK(before.n_rows() == 1);
  CHECK(after.n_rows() == 2);
  CHECK(before.row_ids == std::vector<std::int64_t>{0});
  CHECK(after.row_ids == std::vector<std::int64_t>{1, 2});

  auto [none, all] = split_by_month(ds, {2017, 12});
  CHECK(none.n_rows() == 0);
  CHECK(all.n_rows() == 3);

  // union of the split reproduces the input rows exactly
  std::set<std::int64_t> ids(before.row_ids.begin(), before.row_ids.end());
  ids.insert(after.row_ids.begin(), after.row_ids.end());
  CHECK(ids == std::set<std::int64_t>(ds.row_ids.begin(), ds.row_ids.end()));

  auto no_months = testing::make_dataset({{1, 2}}, {0, 1});
  CHECK_THROWS_AS(split_by_month(no_months, {2018, 1}), SchemaError);
}

TEST_CASE("summarize: moments, quartiles and missing accounting") {
  TabularDataset ds = testing::make_dataset({{1, 2, 3, 4}, {5, 5, 5, 5}}, {0, 0, 1, 1});
  ds.numeric_cols[0].values.push_back(missing_value());
  ds.numeric_cols[1].values.push_back(5);
  ds.labels->push_back(1);
  ds.row_ids.push_back(4);

  auto stats = summarize(ds);
  REQUIRE(stats.size() == 3);  // f0, f1, label
  CHECK(stats[0].count == 4);
  CHECK(stats[0].missing == 1);
  CHECK(stats[0].count + stats[0].missing == ds.n_rows());
  CHECK(stats[0].mean == doctest::Approx(2.5));
  CHECK(stats[0].std_dev == doctest::Approx(1.2910).epsilon(1e-4));
  CHECK(stats[0].min == 1);
  CHECK(stats[0].q50 == doctest::Approx(2.5));
  CHECK(stats[0].max == 4);

  CHECK(stats[1].mean == 5.0);
  CHECK(stats[1].std_dev == 0.0);

  CHECK(stats[2].name == "y");
  CHECK(stats[2].mean == doctest::Approx(0.6));
}

TEST_CASE("summarize: empty column flags undefined moments") {
  TabularDataset ds = testing::make_dataset({{missing_value(), missing_value()}}, {0, 1});
  auto stats = summarize(ds);
  CHECK(stats[0].count == 0);
  CHECK(stats[0].missing == 2);
  CHECK_FALSE(stats[0].moments_defined);
}

TEST_CASE("dataset file: save/load round-trip preserves everything") {
  auto csv = write_temp("rt.csv",
                        "x1,x2,color,y,month\n"
                        "1.25,,red,0,2018-01\n"
                        "2,3,blue,1,2018-02\n");
  auto schema = toy_schema();
  schema.month_column = "month";
  auto ds = load_csv(csv, schema);
  save_dataset(ds, "dgtest_rt.ds");
  auto back = load_dataset("dgtest_rt.ds");
  CHECK(back.schema == ds.schema);
  CHECK(back.row_ids == ds.row_ids);
  CHECK(back.numeric("x1").values == ds.numeric("x1").values);
  CHECK(is_missing(back.numeric("x2").values[0]));
  CHECK(back.categorical("color").codes == ds.categorical("color").codes);
  CHECK(back.categorical("color").dict->values() == ds.categorical("color").dict->values());
  CHECK(*back.labels == *ds.labels);
  CHECK(*back.months == *ds.months);
  std::remove(csv.c_str());
  std::remove("dgtest_rt.ds");
}

TEST_CASE("write_csv/load_csv: numeric values survive bit-exactly") {
  auto ds = testing::make_dataset({{0.1, 1.0 / 3.0, -2.5e-17}, {1, 2, 3}}, {0, 1, 0},
                                  {{2018, 1}, {2018, 1}, {2018, 2}});
  write_csv(ds, "dgtest_w.csv");
  auto back = load_csv("dgtest_w.csv", ds.schema);
  CHECK(back.numeric("f0").values == ds.numeric("f0").values);
  CHECK(back.numeric("f1").values == ds.numeric("f1").values);
  CHECK(*back.months == *ds.months);
  std::remove("dgtest_w.csv");
}
