#include <doctest.h>

#include "driftgate/errors.hpp"
#include "driftgate/month.hpp"
#include "driftgate/schema.hpp"

using namespace driftgate;

TEST_CASE("month: parses both text forms") {
  CHECK(MonthStamp::parse("2018-01") == MonthStamp{2018, 1});
  CHECK(MonthStamp::parse("2018M1") == MonthStamp{2018, 1});
  CHECK(MonthStamp::parse("2020M12") == MonthStamp{2020, 12});
  CHECK_THROWS_AS(MonthStamp::parse("2018"), ParseError);
  CHECK_THROWS_AS(MonthStamp::parse("2018-13"), ParseError);
  CHECK_THROWS_AS(MonthStamp::parse("x-1"), ParseError);
  CHECK_THROWS_AS(MonthStamp::parse(""), ParseError);
}

TEST_CASE("month: format round-trips and total order") {
  for (int year : {2017, 2018, 2020}) {
    for (int month = 1; month <= 12; ++month) {
      MonthStamp m{year, month};
      CHECK(MonthStamp::parse(m.str()) == m);
    }
  }
  CHECK(MonthStamp{2018, 12} < MonthStamp{2019, 1});
  CHECK(MonthStamp{2019, 6} < MonthStamp{2019, 7});
  CHECK(MonthStamp{2018, 3}.plus(11) == MonthStamp{2019, 2});
  CHECK(MonthStamp::from_index(MonthStamp{2019, 7}.index()) == MonthStamp{2019, 7});
}

TEST_CASE("schema: json round-trip") {
  FeatureSchema schema;
  schema.columns = {{"a", ColumnKind::numeric, true},
                    {"b", ColumnKind::categorical, false}};
  schema.label_column = "y";
  schema.month_column = "month";
  auto back = FeatureSchema::from_json_string(schema.to_json_string());
  CHECK(back == schema);
}

TEST_CASE("schema: validation rejects collisions") {
  FeatureSchema schema;
  schema.columns = {{"a", ColumnKind::numeric, true}, {"a", ColumnKind::numeric, true}};
  schema.label_column = "y";
  CHECK_THROWS_AS(schema.validate(), SchemaError);

  schema.columns = {{"y", ColumnKind::numeric, true}};
  CHECK_THROWS_AS(schema.validate(), SchemaError);

  schema.columns = {{"a", ColumnKind::numeric, true}};
  schema.label_column = "";
  CHECK_THROWS_AS(schema.validate(), SchemaError);
}

TEST_CASE("schema: lending club raw schema has 24 features and the status label") {
  auto schema = lending_club_raw_schema();
  CHECK(schema.columns.size() == 24);
  CHECK(schema.label_column == "loan_status");
  CHECK(schema.find("fico_range_low") != nullptr);
  CHECK(schema.find("loan_status") == nullptr);
}

#ifdef DRIFTGATE_SOURCE_DIR
TEST_CASE("schema: the shipped lending club schema file matches the built-in") {
  auto shipped =
      FeatureSchema::load(std::string(DRIFTGATE_SOURCE_DIR) + "/schemas/lending_club.json");
  CHECK(shipped == lending_club_raw_schema());
}
#endif
