#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sixday/errors.hpp"

// Domain types and file ingestion for fixed-time race results. A Dataset is
// immutable after construction: every accessor returns values or const
// references, and filtering produces a fresh Dataset.

namespace sixday::racedata {

inline constexpr double kMilesPerKm = 0.621371192;
inline constexpr double kSixDayHours = 144.0;
inline constexpr double kMaxCredibleMiles = 1000.0;

enum class Gender { Men, Women };
enum class Era { Modern, Pedestrianism };
enum class RaceKind { SixDay, SixDaySplit, Other };
enum class Completeness { Complete, Partial };

struct MalformedRow : Error {
    using Error::Error;
};
struct EmptyDataset : Error {
    using Error::Error;
};
struct DuplicateRaceId : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Calendar date (YYYY-MM-DD), validated on parse.

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;

    [[nodiscard]] std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    static std::optional<Date> parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        int y = 0, m = 0, d = 0;
        auto num = [&](int pos, int len, int& out) {
            auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
            return ec == std::errc{} && p == text.data() + pos + len;
        };
        if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
        if (m < 1 || m > 12 || d < 1) return std::nullopt;
        static constexpr int days_in[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        const int limit = (m == 2 && leap) ? 29 : days_in[m - 1];
        if (d > limit) return std::nullopt;
        return Date{y, m, d};
    }
};

// ---------------------------------------------------------------------------
// Core records.

struct RaceEvent {
    std::string race_id;
    std::string name;
    std::string country;  // ISO 3166 alpha-3
    Date start_date;
    double duration_hours = kSixDayHours;
    RaceKind kind = RaceKind::SixDay;
    Completeness completeness = Completeness::Complete;

    friend bool operator==(const RaceEvent&, const RaceEvent&) = default;
};

struct PerformanceRecord {
    std::string race_id;
    std::string athlete_name;
    std::optional<int> year_of_birth;
    Gender gender = Gender::Men;
    double distance_miles = 0.0;
    Era era = Era::Modern;

    friend bool operator==(const PerformanceRecord&, const PerformanceRecord&) = default;
};

// ---------------------------------------------------------------------------
// Age groups. U23 is everything below 23, the open class spans 23-34, and
// five-year bands follow from 35 up, capped at 80+.

enum class AgeBand {
    U23,
    A23,
    A35,
    A40,
    A45,
    A50,
    A55,
    A60,
    A65,
    A70,
    A75,
    A80plus,
};

struct AgeGroup {
    Gender gender = Gender::Men;
    AgeBand band = AgeBand::A23;

    friend bool operator==(const AgeGroup&, const AgeGroup&) = default;

    [[nodiscard]] std::string label() const {
        static constexpr const char* names[] = {"U23", "23", "35", "40", "45", "50",
                                                "55",  "60", "65", "70", "75", "80+"};
        std::string out(gender == Gender::Men ? "M" : "W");
        out += names[static_cast<int>(band)];
        return out;
    }

    static std::optional<AgeGroup> parse(std::string_view text) {
        if (text.empty()) return std::nullopt;
        Gender g;
        if (text[0] == 'M' || text[0] == 'm') g = Gender::Men;
        else if (text[0] == 'W' || text[0] == 'w') g = Gender::Women;
        else return std::nullopt;
        std::string_view rest = text.substr(1);
        static constexpr std::pair<std::string_view, AgeBand> bands[] = {
            {"U23", AgeBand::U23},    {"u23", AgeBand::U23},    {"23", AgeBand::A23},
            {"35", AgeBand::A35},     {"40", AgeBand::A40},     {"45", AgeBand::A45},
            {"50", AgeBand::A50},     {"55", AgeBand::A55},     {"60", AgeBand::A60},
            {"65", AgeBand::A65},     {"70", AgeBand::A70},     {"75", AgeBand::A75},
            {"80+", AgeBand::A80plus}, {"80plus", AgeBand::A80plus},
        };
        for (const auto& [token, band] : bands) {
            if (rest == token) return AgeGroup{g, band};
        }
        return std::nullopt;
    }
};

// Buckets an age in calendar years. Ages outside [5, 100] are rejected; the
// data upstream never legitimately produces them.
inline AgeGroup age_group_of(Gender gender, int age_years) {
    if (age_years < 5 || age_years > 100) {
        throw OutOfRange("age_group_of: age " + std::to_string(age_years) +
                         " outside [5, 100]");
    }
    AgeBand band;
    if (age_years < 23) {
        band = AgeBand::U23;
    } else if (age_years <= 34) {
        band = AgeBand::A23;
    } else if (age_years >= 80) {
        band = AgeBand::A80plus;
    } else {
        band = static_cast<AgeBand>(static_cast<int>(AgeBand::A35) + (age_years - 35) / 5);
    }
    return AgeGroup{gender, band};
}

inline std::vector<AgeBand> all_age_bands() {
    std::vector<AgeBand> bands;
    for (int b = 0; b <= static_cast<int>(AgeBand::A80plus); ++b) {
        bands.push_back(static_cast<AgeBand>(b));
    }
    return bands;
}

// ---------------------------------------------------------------------------
// Dataset: validated records plus the races they resolve to.

class Dataset {
  public:
    // Validates referential integrity and computes the span. An empty
    // dataset is representable (filters may exclude everything); ingestion
    // rejects empty files separately.
    static Dataset build(std::vector<PerformanceRecord> records, std::vector<RaceEvent> races) {
        Dataset ds;
        ds.records_ = std::move(records);
        ds.races_ = std::move(races);
        for (std::size_t i = 0; i < ds.races_.size(); ++i) {
            auto [it, inserted] = ds.race_index_.emplace(ds.races_[i].race_id, i);
            if (!inserted) {
                throw DuplicateRaceId("duplicate race_id '" + ds.races_[i].race_id + "'");
            }
        }
        for (const auto& rec : ds.records_) {
            if (!ds.race_index_.contains(rec.race_id)) {
                throw MalformedRow("record references unknown race_id '" + rec.race_id + "'");
            }
        }
        if (!ds.races_.empty()) {
            ds.first_year_ = ds.races_.front().start_date.year;
            ds.last_year_ = ds.first_year_;
            for (const auto& race : ds.races_) {
                ds.first_year_ = std::min(ds.first_year_, race.start_date.year);
                ds.last_year_ = std::max(ds.last_year_, race.start_date.year);
            }
        }
        return ds;
    }

    [[nodiscard]] bool empty() const { return records_.empty(); }

    [[nodiscard]] const std::vector<PerformanceRecord>& records() const { return records_; }
    [[nodiscard]] const std::vector<RaceEvent>& races() const { return races_; }
    [[nodiscard]] int first_year() const { return first_year_; }
    [[nodiscard]] int last_year() const { return last_year_; }

    // Observed span in years. Floored at 1 so downstream per-year rates stay
    // finite for single-year datasets.
    [[nodiscard]] double span_years() const {
        return std::max(1.0, static_cast<double>(last_year_ - first_year_));
    }

    [[nodiscard]] const RaceEvent& race_of(const PerformanceRecord& rec) const {
        return races_[race_index_.at(rec.race_id)];
    }

    [[nodiscard]] int race_year(const PerformanceRecord& rec) const {
        return race_of(rec).start_date.year;
    }

    [[nodiscard]] std::optional<int> age_at_race(const PerformanceRecord& rec) const {
        if (!rec.year_of_birth) return std::nullopt;
        return race_year(rec) - *rec.year_of_birth;
    }

  private:
    std::vector<PerformanceRecord> records_;
    std::vector<RaceEvent> races_;
    std::unordered_map<std::string, std::size_t> race_index_;
    int first_year_ = 0;
    int last_year_ = 0;
};

// ---------------------------------------------------------------------------
// Participant identity. DUV exports carry only name and year of birth, so the
// dedup key is the case-folded, whitespace-normalized name plus yob. Records
// without a yob are keyed by name alone.

inline std::string normalize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (const char ch : name) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isspace(uc)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(uc));
    }
    return out;
}

inline std::string participant_key(const PerformanceRecord& rec) {
    std::string key = normalize_name(rec.athlete_name);
    key += '\x1f';
    if (rec.year_of_birth) key += std::to_string(*rec.year_of_birth);
    return key;
}

struct ParticipantCounts {
    long total = 0;
    long men = 0;
    long women = 0;
};

// Counts distinct athletes. Name collisions with differing yob are reported
// on clog: the key is a heuristic and those cases deserve a human look.
inline ParticipantCounts unique_participants(const Dataset& ds) {
    std::unordered_set<std::string> seen_total, seen_men, seen_women;
    std::unordered_map<std::string, std::unordered_set<std::string>> yob_by_name;
    for (const auto& rec : ds.records()) {
        const std::string key = participant_key(rec);
        seen_total.insert(key);
        (rec.gender == Gender::Men ? seen_men : seen_women).insert(key);
        yob_by_name[normalize_name(rec.athlete_name)].insert(
            rec.year_of_birth ? std::to_string(*rec.year_of_birth) : std::string("?"));
    }
    for (const auto& [name, yobs] : yob_by_name) {
        if (yobs.size() > 1) {
            std::clog << "warning: athlete name '" << name << "' appears with "
                      << yobs.size() << " distinct years of birth; treated as distinct people\n";
        }
    }
    return {static_cast<long>(seen_total.size()), static_cast<long>(seen_men.size()),
            static_cast<long>(seen_women.size())};
}

// ---------------------------------------------------------------------------
// Filtering. Returns a new Dataset whose records satisfy every given
// predicate; races still referenced by a surviving record are kept with full
// metadata. Records without a yob are excluded from age-group queries but
// unaffected otherwise. An all-excluding filter is legal and yields an empty
// record list (bypassing Dataset::build's non-empty check is not: callers get
// the EmptyDataset error, which is what the CLI reports).

struct FilterSpec {
    std::optional<Gender> gender;
    std::optional<AgeGroup> age_group;
    std::optional<double> min_distance_miles;
    std::optional<Era> era;
};

inline Dataset filter(const Dataset& ds, const FilterSpec& spec) {
    std::vector<PerformanceRecord> records;
    std::unordered_set<std::string> keep_race;
    for (const auto& rec : ds.records()) {
        if (spec.gender && rec.gender != *spec.gender) continue;
        if (spec.era && rec.era != *spec.era) continue;
        if (spec.min_distance_miles && rec.distance_miles < *spec.min_distance_miles) continue;
        if (spec.age_group) {
            const auto age = ds.age_at_race(rec);
            if (!age || *age < 5 || *age > 100) continue;
            if (!(age_group_of(rec.gender, *age) == *spec.age_group)) continue;
        }
        keep_race.insert(rec.race_id);
        records.push_back(rec);
    }
    std::vector<RaceEvent> races;
    for (const auto& race : ds.races()) {
        if (keep_race.contains(race.race_id)) races.push_back(race);
    }
    return Dataset::build(std::move(records), std::move(races));
}

// ---------------------------------------------------------------------------
// Canonical CSV.
//
//   race_id,race_name,country,start_date,duration_hours,kind,completeness,
//   athlete_name,gender,yob,distance,distance_unit
//
// UTF-8, one header row, RFC-4180 style quoting for fields containing commas
// or quotes. Distances may be given in miles or kilometres; everything is
// stored in statute miles.

enum class CsvFormat { ModernCsv, PedestrianCsv };

inline constexpr std::string_view kCsvHeader =
    "race_id,race_name,country,start_date,duration_hours,kind,completeness,"
    "athlete_name,gender,yob,distance,distance_unit";

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (const char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::string format_double(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(const std::string& s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

[[noreturn]] inline void bad_row(std::size_t line_no, const std::string& why) {
    throw MalformedRow("line " + std::to_string(line_no) + ": " + why);
}

}  // namespace detail

inline Dataset parse_results(std::istream& in, CsvFormat format) {
    const Era era = format == CsvFormat::PedestrianCsv ? Era::Pedestrianism : Era::Modern;
    std::vector<PerformanceRecord> records;
    std::vector<RaceEvent> races;
    std::unordered_map<std::string, std::size_t> race_index;

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            if (line.starts_with("race_id")) continue;  // header row
            detail::bad_row(line_no, "missing canonical header row");
        }
        auto fields = detail::split_csv_row(line);
        if (fields.size() != 12) {
            detail::bad_row(line_no, "expected 12 fields, got " + std::to_string(fields.size()));
        }
        for (auto& f : fields) f = detail::trim(f);

        RaceEvent race;
        race.race_id = fields[0];
        race.name = fields[1];
        race.country = fields[2];
        if (race.race_id.empty()) detail::bad_row(line_no, "empty race_id");
        if (race.country.size() != 3 ||
            !std::all_of(race.country.begin(), race.country.end(), [](unsigned char c) {
                return std::isalpha(c);
            })) {
            detail::bad_row(line_no, "country must be an ISO 3166 alpha-3 code");
        }
        for (auto& ch : race.country) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));

        const auto date = Date::parse(fields[3]);
        if (!date) detail::bad_row(line_no, "invalid start_date '" + fields[3] + "'");
        race.start_date = *date;

        const auto duration = detail::parse_double(fields[4]);
        if (!duration || *duration <= 0.0) detail::bad_row(line_no, "invalid duration_hours");
        race.duration_hours = *duration;

        if (detail::iequals(fields[5], "SixDay")) race.kind = RaceKind::SixDay;
        else if (detail::iequals(fields[5], "SixDaySplit")) race.kind = RaceKind::SixDaySplit;
        else if (detail::iequals(fields[5], "Other")) race.kind = RaceKind::Other;
        else detail::bad_row(line_no, "kind must be SixDay|SixDaySplit|Other");
        if (race.kind != RaceKind::Other && race.duration_hours < kSixDayHours) {
            detail::bad_row(line_no, "six-day events require duration_hours >= 144");
        }

        if (detail::iequals(fields[6], "Complete")) race.completeness = Completeness::Complete;
        else if (detail::iequals(fields[6], "Partial")) race.completeness = Completeness::Partial;
        else detail::bad_row(line_no, "completeness must be Complete|Partial");

        if (era == Era::Modern && race.start_date.year < 1981) {
            detail::bad_row(line_no, "modern-era race before 1981");
        }
        if (era == Era::Pedestrianism &&
            (race.start_date.year < 1874 || race.start_date.year > 1888)) {
            detail::bad_row(line_no, "pedestrianism-era race outside 1874-1888");
        }

        PerformanceRecord rec;
        rec.race_id = race.race_id;
        rec.athlete_name = fields[7];
        if (rec.athlete_name.empty()) detail::bad_row(line_no, "empty athlete_name");
        if (fields[8] == "M" || fields[8] == "m") rec.gender = Gender::Men;
        else if (fields[8] == "W" || fields[8] == "w") rec.gender = Gender::Women;
        else detail::bad_row(line_no, "gender must be M|W");
        if (!fields[9].empty()) {
            const auto yob = detail::parse_int(fields[9]);
            if (!yob || *yob < 1800 || *yob > race.start_date.year) {
                detail::bad_row(line_no, "invalid yob '" + fields[9] + "'");
            }
            rec.year_of_birth = yob;
        }
        const auto raw_distance = detail::parse_double(fields[10]);
        if (!raw_distance) detail::bad_row(line_no, "invalid distance");
        if (detail::iequals(fields[11], "mi")) rec.distance_miles = *raw_distance;
        else if (detail::iequals(fields[11], "km")) rec.distance_miles = *raw_distance * kMilesPerKm;
        else detail::bad_row(line_no, "distance_unit must be mi|km");
        if (!(rec.distance_miles > 0.0) || rec.distance_miles >= kMaxCredibleMiles) {
            detail::bad_row(line_no, "distance outside (0, 1000) miles");
        }
        rec.era = era;

        const auto it = race_index.find(race.race_id);
        if (it == race_index.end()) {
            race_index.emplace(race.race_id, races.size());
            races.push_back(race);
        } else if (!(races[it->second] == race)) {
            throw DuplicateRaceId("line " + std::to_string(line_no) + ": race_id '" +
                                  race.race_id + "' redefined with different metadata");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw EmptyDataset("no result rows found");
    return Dataset::build(std::move(records), std::move(races));
}

inline Dataset parse_results(const std::filesystem::path& path, CsvFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file '" + path.string() + "'");
    return parse_results(in, format);
}

inline void write_results(const Dataset& ds, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& rec : ds.records()) {
        const auto& race = ds.race_of(rec);
        out << detail::csv_escape(race.race_id) << ',' << detail::csv_escape(race.name) << ','
            << race.country << ',' << race.start_date.to_string() << ','
            << detail::format_double(race.duration_hours) << ',';
        switch (race.kind) {
            case RaceKind::SixDay: out << "SixDay"; break;
            case RaceKind::SixDaySplit: out << "SixDaySplit"; break;
            case RaceKind::Other: out << "Other"; break;
        }
        out << ',' << (race.completeness == Completeness::Complete ? "Complete" : "Partial") << ','
            << detail::csv_escape(rec.athlete_name) << ','
            << (rec.gender == Gender::Men ? 'M' : 'W') << ',';
        if (rec.year_of_birth) out << *rec.year_of_birth;
        out << ',' << detail::format_double(rec.distance_miles) << ",mi\n";
    }
}

inline void write_results(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path.string() + "'");
    write_results(ds, out);
}

}  // namespace sixday::racedata
