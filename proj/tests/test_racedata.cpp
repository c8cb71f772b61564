#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sixday/racedata.hpp"

using namespace sixday::racedata;
using testutil::Perf;
using testutil::make_dataset;

namespace {

const std::string kModernRows =
    std::string(kCsvHeader) +
    "\n"
    "r1,Across the Years,USA,2005-12-28,144,SixDay,Complete,Alice Smith,W,1970,410.5,mi\n"
    "r1,Across the Years,USA,2005-12-28,144,SixDay,Complete,Bob Jones,M,1960,1036.8,km\n"
    "r2,EMU Six Day,HUN,2012-05-09,144,SixDay,Complete,Alice Smith,W,1970,395,mi\n"
    "r2,EMU Six Day,HUN,2012-05-09,144,SixDay,Complete,\"Jones, Bob\",M,,520.1,mi\n";

Dataset parse_modern(const std::string& text) {
    std::istringstream in(text);
    return parse_results(in, CsvFormat::ModernCsv);
}

}  // namespace

TEST_CASE("kilometre distances convert to statute miles", "[racedata]") {
    const Dataset ds = parse_modern(kModernRows);
    REQUIRE(ds.records().size() == 4);
    CHECK_THAT(ds.records()[1].distance_miles,
               Catch::Matchers::WithinAbs(644.2376518656, 1e-9));
    // Round trip mi -> km -> mi stays put.
    const double miles = 500.0;
    const double km = miles / kMilesPerKm;
    CHECK_THAT(km * kMilesPerKm, Catch::Matchers::WithinAbs(miles, 1e-9));
}

TEST_CASE("span is floored at one year", "[racedata]") {
    const Dataset single = make_dataset({{1990, "a", Gender::Men, 300.0, {}}});
    CHECK(single.span_years() == 1.0);
    CHECK(single.first_year() == 1990);
    CHECK(single.last_year() == 1990);

    const Dataset multi = make_dataset({{1981, "a", Gender::Men, 300.0, {}},
                                        {2018, "b", Gender::Men, 310.0, {}}});
    CHECK(multi.span_years() == 37.0);
}

TEST_CASE("age groups bucket as expected", "[racedata]") {
    CHECK(age_group_of(Gender::Men, 22).label() == "MU23");
    CHECK(age_group_of(Gender::Men, 23).label() == "M23");
    CHECK(age_group_of(Gender::Women, 34).label() == "W23");
    CHECK(age_group_of(Gender::Men, 35).label() == "M35");
    CHECK(age_group_of(Gender::Men, 37).label() == "M35");
    CHECK(age_group_of(Gender::Men, 61).label() == "M60");
    CHECK(age_group_of(Gender::Women, 79).label() == "W75");
    CHECK(age_group_of(Gender::Women, 80).label() == "W80+");
    CHECK(age_group_of(Gender::Men, 100).label() == "M80+");
    CHECK(age_group_of(Gender::Men, 5).label() == "MU23");
    CHECK_THROWS_AS(age_group_of(Gender::Men, 4), OutOfRange);
    CHECK_THROWS_AS(age_group_of(Gender::Men, 101), OutOfRange);
}

TEST_CASE("age group labels round trip through parse", "[racedata]") {
    for (const Gender g : {Gender::Men, Gender::Women}) {
        for (const AgeBand band : all_age_bands()) {
            const AgeGroup group{g, band};
            const auto parsed = AgeGroup::parse(group.label());
            REQUIRE(parsed.has_value());
            CHECK(*parsed == group);
        }
    }
    CHECK(AgeGroup::parse("mu23") == AgeGroup{Gender::Men, AgeBand::U23});
    CHECK(AgeGroup::parse("w80plus") == AgeGroup{Gender::Women, AgeBand::A80plus});
    CHECK_FALSE(AgeGroup::parse("X40").has_value());
    CHECK_FALSE(AgeGroup::parse("M34").has_value());
    CHECK_FALSE(AgeGroup::parse("").has_value());
}

TEST_CASE("filter selects by gender, distance, and age group", "[racedata]") {
    const Dataset ds = make_dataset({
        {1990, "a", Gender::Men, 320.0, 1950},
        {1990, "b", Gender::Women, 410.0, 1960},
        {1995, "c", Gender::Men, 510.0, 1950},
        {1995, "d", Gender::Women, 280.0, {}},
    });

    FilterSpec men;
    men.gender = Gender::Men;
    const Dataset only_men = filter(ds, men);
    REQUIRE(only_men.records().size() == 2);
    for (const auto& rec : only_men.records()) CHECK(rec.gender == Gender::Men);

    FilterSpec far;
    far.min_distance_miles = 400.0;
    const Dataset only_far = filter(ds, far);
    REQUIRE(only_far.records().size() == 2);
    for (const auto& rec : only_far.records()) CHECK(rec.distance_miles >= 400.0);

    // Age 1990-1950 = 40 -> M40; 1995-1950 = 45 -> M45. Records without a
    // yob never match an age-group filter.
    FilterSpec m40;
    m40.age_group = AgeGroup{Gender::Men, AgeBand::A40};
    const Dataset only_m40 = filter(ds, m40);
    REQUIRE(only_m40.records().size() == 1);
    CHECK(only_m40.records()[0].athlete_name == "a");

    FilterSpec nothing;
    nothing.min_distance_miles = 900.0;
    const Dataset empty = filter(ds, nothing);
    CHECK(empty.empty());
    CHECK(empty.races().empty());
}

TEST_CASE("filter keeps only races still referenced", "[racedata]") {
    const Dataset ds = make_dataset({
        {1990, "a", Gender::Men, 320.0, {}},
        {1995, "b", Gender::Women, 410.0, {}},
    });
    FilterSpec women;
    women.gender = Gender::Women;
    const Dataset out = filter(ds, women);
    REQUIRE(out.races().size() == 1);
    CHECK(out.races()[0].race_id == "race-1995");
    // Surviving race metadata is untouched.
    CHECK(out.races()[0] == ds.races()[1]);
}

TEST_CASE("filter is idempotent and order-insensitive", "[racedata]") {
    const Dataset ds = make_dataset({
        {1990, "a", Gender::Men, 320.0, 1950},
        {1990, "b", Gender::Women, 410.0, 1960},
        {1995, "c", Gender::Men, 510.0, 1950},
        {1995, "d", Gender::Women, 280.0, 1970},
        {2000, "e", Gender::Men, 450.0, 1980},
    });
    FilterSpec g;
    g.gender = Gender::Men;
    FilterSpec d;
    d.min_distance_miles = 400.0;

    const auto summarize = [](const Dataset& x) {
        std::vector<std::string> names;
        for (const auto& rec : x.records()) names.push_back(rec.athlete_name);
        return names;
    };

    const Dataset once = filter(ds, g);
    const Dataset twice = filter(once, g);
    CHECK(summarize(once) == summarize(twice));

    const Dataset gd = filter(filter(ds, g), d);
    const Dataset dg = filter(filter(ds, d), g);
    CHECK(summarize(gd) == summarize(dg));

    FilterSpec both;
    both.gender = Gender::Men;
    both.min_distance_miles = 400.0;
    CHECK(summarize(filter(ds, both)) == summarize(gd));
}

TEST_CASE("age-group filters partition the records that carry a yob", "[racedata]") {
    const Dataset ds = make_dataset({
        {1990, "a", Gender::Men, 320.0, 1950},
        {1990, "b", Gender::Men, 360.0, 1968},
        {1995, "c", Gender::Men, 510.0, 1935},
        {1995, "d", Gender::Men, 280.0, {}},
        {2000, "e", Gender::Men, 450.0, 1940},
        {2000, "f", Gender::Men, 330.0, 1920},
    });
    std::size_t with_yob = 0;
    for (const auto& rec : ds.records()) {
        if (rec.year_of_birth) ++with_yob;
    }
    std::size_t sum = 0;
    for (const AgeBand band : all_age_bands()) {
        FilterSpec spec;
        spec.age_group = AgeGroup{Gender::Men, band};
        sum += filter(ds, spec).records().size();
    }
    CHECK(sum == with_yob);
}

TEST_CASE("unique participants dedup by normalized name and yob", "[racedata]") {
    const Dataset ds = make_dataset({
        {1990, "Alice Smith", Gender::Women, 400.0, 1970},
        {1995, "alice  SMITH", Gender::Women, 410.0, 1970},
        {1995, "Alice Smith", Gender::Women, 390.0, 1971},
        {1995, "Bob Jones", Gender::Men, 500.0, 1960},
        {2000, "Bob Jones", Gender::Men, 505.0, 1960},
    });
    const ParticipantCounts counts = unique_participants(ds);
    CHECK(counts.total == 3);
    CHECK(counts.men == 1);
    CHECK(counts.women == 2);
}

TEST_CASE("normalize_name folds case and whitespace", "[racedata]") {
    CHECK(normalize_name("  Alice   SMITH ") == "alice smith");
    CHECK(normalize_name("bob\tjones") == "bob jones");
    CHECK(normalize_name("") == "");
}

TEST_CASE("parse accepts the canonical corpus and resolves races", "[racedata]") {
    const Dataset ds = parse_modern(kModernRows);
    REQUIRE(ds.records().size() == 4);
    REQUIRE(ds.races().size() == 2);
    CHECK(ds.first_year() == 2005);
    CHECK(ds.last_year() == 2012);
    CHECK(ds.race_of(ds.records()[3]).name == "EMU Six Day");
    CHECK(ds.records()[3].athlete_name == "Jones, Bob");
    CHECK_FALSE(ds.records()[3].year_of_birth.has_value());
    CHECK(ds.age_at_race(ds.records()[0]) == 35);
    CHECK(ds.race_year(ds.records()[2]) == 2012);
}

TEST_CASE("parse rejects malformed rows with line context", "[racedata]") {
    const std::string head = std::string(kCsvHeader) + "\n";
    const auto expect_malformed = [&](const std::string& row) {
        std::istringstream in(head + row + "\n");
        CHECK_THROWS_AS(parse_results(in, CsvFormat::ModernCsv), MalformedRow);
    };
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,410.5");
    expect_malformed("r1,X,USA,2005-13-28,144,SixDay,Complete,A,M,1970,410.5,mi");
    expect_malformed("r1,X,USA,2005-12-28,100,SixDay,Complete,A,M,1970,410.5,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,X,1970,410.5,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,2010,410.5,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,-5,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,1200,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,410.5,furlong");
    expect_malformed("r1,X,US,2005-12-28,144,SixDay,Complete,A,M,1970,410.5,mi");
    expect_malformed("r1,X,USA,1979-12-28,144,SixDay,Complete,A,M,1970,410.5,mi");
    expect_malformed(",X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,410.5,mi");
    expect_malformed("r1,X,USA,2005-12-28,144,SixDay,Complete,,M,1970,410.5,mi");
}

TEST_CASE("pedestrianism era enforces its window", "[racedata]") {
    const std::string head = std::string(kCsvHeader) + "\n";
    {
        std::istringstream in(head +
                              "p1,Astley Belt,GBR,1879-03-10,144,SixDay,Complete,"
                              "C Rowell,M,1852,530,mi\n");
        const Dataset ds = parse_results(in, CsvFormat::PedestrianCsv);
        CHECK(ds.records()[0].era == Era::Pedestrianism);
    }
    {
        std::istringstream in(head +
                              "p1,Astley Belt,GBR,1979-03-10,144,SixDay,Complete,"
                              "C Rowell,M,1952,530,mi\n");
        CHECK_THROWS_AS(parse_results(in, CsvFormat::PedestrianCsv), MalformedRow);
    }
}

TEST_CASE("empty input and duplicate race ids are rejected", "[racedata]") {
    {
        std::istringstream in(std::string(kCsvHeader) + "\n");
        CHECK_THROWS_AS(parse_results(in, CsvFormat::ModernCsv), EmptyDataset);
    }
    {
        std::istringstream in{std::string{}};
        CHECK_THROWS_AS(parse_results(in, CsvFormat::ModernCsv), EmptyDataset);
    }
    {
        // Same race_id, conflicting metadata.
        std::istringstream in(std::string(kCsvHeader) +
                              "\n"
                              "r1,X,USA,2005-12-28,144,SixDay,Complete,A,M,1970,410.5,mi\n"
                              "r1,Y,USA,2006-12-28,144,SixDay,Complete,B,M,1970,420.5,mi\n");
        CHECK_THROWS_AS(parse_results(in, CsvFormat::ModernCsv), DuplicateRaceId);
    }
    {
        std::vector<RaceEvent> races = {testutil::make_race(1990), testutil::make_race(1990)};
        CHECK_THROWS_AS(Dataset::build({}, std::move(races)), DuplicateRaceId);
    }
    {
        std::vector<PerformanceRecord> recs = {
            {"nope", "a", {}, Gender::Men, 300.0, Era::Modern}};
        CHECK_THROWS_AS(Dataset::build(std::move(recs), {}), MalformedRow);
    }
}

TEST_CASE("write then parse is the identity on datasets", "[racedata]") {
    const Dataset ds = parse_modern(kModernRows);
    std::ostringstream out;
    write_results(ds, out);
    std::istringstream in(out.str());
    const Dataset again = parse_results(in, CsvFormat::ModernCsv);
    REQUIRE(again.records().size() == ds.records().size());
    REQUIRE(again.races().size() == ds.races().size());
    for (std::size_t i = 0; i < ds.records().size(); ++i) {
        CHECK(again.records()[i] == ds.records()[i]);
    }
    for (std::size_t i = 0; i < ds.races().size(); ++i) {
        CHECK(again.races()[i] == ds.races()[i]);
    }
    // A second round trip is byte-identical: the canonical form is a fixed point.
    std::ostringstream out2;
    write_results(again, out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("csv quoting survives commas and quotes", "[racedata]") {
    const std::string head = std::string(kCsvHeader) + "\n";
    std::istringstream in(head +
                          "r1,\"Race, with comma\",USA,2005-12-28,144,SixDay,Complete,"
                          "\"O\"\"Brien, Pat\",M,1970,410.5,mi\n");
    const Dataset ds = parse_results(in, CsvFormat::ModernCsv);
    CHECK(ds.races()[0].name == "Race, with comma");
    CHECK(ds.records()[0].athlete_name == "O\"Brien, Pat");
    std::ostringstream out;
    write_results(ds, out);
    std::istringstream in2(out.str());
    const Dataset again = parse_results(in2, CsvFormat::ModernCsv);
    CHECK(again.records()[0].athlete_name == "O\"Brien, Pat");
    CHECK(again.races()[0].name == "Race, with comma");
}

TEST_CASE("date parsing validates the calendar", "[racedata]") {
    CHECK(Date::parse("2004-02-29").has_value());
    CHECK_FALSE(Date::parse("2005-02-29").has_value());
    CHECK(Date::parse("2000-02-29").has_value());
    CHECK_FALSE(Date::parse("1900-02-29").has_value());
    CHECK_FALSE(Date::parse("2005-00-10").has_value());
    CHECK_FALSE(Date::parse("2005-1-10").has_value());
    CHECK_FALSE(Date::parse("05-01-10").has_value());
    const Date d = *Date::parse("1984-06-17");
    CHECK(d.to_string() == "1984-06-17");
    CHECK(Date{1984, 6, 17} == d);
    CHECK(Date{1984, 6, 16} < d);
}
