#pragma once

// Shared test utilities: quadrature-based oracles that are independent of the
// library's own special-function implementations, dataset fixture builders,
// and temp-file plumbing for CLI tests.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sixday/racedata.hpp"

namespace testutil {

// Composite Simpson rule; panels is halved intervals (must be even).
inline double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                                int panels) {
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(8.0 * std::atan(1.0));
}

// Quadrature oracle for the standard normal CDF. Integrates the density
// directly; the tail form integrates over [z-30, z] where the integrand
// carries essentially all remaining mass.
inline double oracle_norm_cdf(double z) {
    if (z < -1.0) {
        return integrate_simpson(normal_pdf, z - 30.0, z, 60000);
    }
    if (z > 1.0) return 1.0 - oracle_norm_cdf(-z);
    return 0.5 + integrate_simpson(normal_pdf, 0.0, z, 20000);
}

// ln Phi(z) for deep tails via the Mills-ratio integral
// Phi(z) = phi(z) * int_0^inf exp(-|z| t - t^2/2) dt, z < 0.
inline double oracle_log_norm_cdf_tail(double z) {
    const double a = -z;
    const auto integrand = [a](double t) { return std::exp(-a * t - 0.5 * t * t); };
    const double mills = integrate_simpson(integrand, 0.0, 60.0 / a, 200000);
    return -0.5 * z * z - 0.5 * std::log(8.0 * std::atan(1.0)) + std::log(mills);
}

// --- dataset fixtures ------------------------------------------------------

struct Perf {
    int year = 1990;
    std::string name = "a";
    sixday::racedata::Gender gender = sixday::racedata::Gender::Men;
    double miles = 300.0;
    std::optional<int> yob;
};

inline sixday::racedata::RaceEvent make_race(int year, int month = 7, int day = 1) {
    sixday::racedata::RaceEvent race;
    race.race_id = "race-" + std::to_string(year);
    race.name = "Test Six Day " + std::to_string(year);
    race.country = "USA";
    race.start_date = {year, month, day};
    race.duration_hours = sixday::racedata::kSixDayHours;
    race.kind = sixday::racedata::RaceKind::SixDay;
    race.completeness = sixday::racedata::Completeness::Complete;
    return race;
}

// One race per distinct year; records reference them by year.
inline sixday::racedata::Dataset make_dataset(const std::vector<Perf>& perfs) {
    std::vector<sixday::racedata::RaceEvent> races;
    std::vector<sixday::racedata::PerformanceRecord> records;
    std::vector<int> years;
    for (const auto& p : perfs) {
        if (std::find(years.begin(), years.end(), p.year) == years.end()) {
            years.push_back(p.year);
            races.push_back(make_race(p.year));
        }
        records.push_back({"race-" + std::to_string(p.year), p.name, p.yob, p.gender,
                           p.miles, sixday::racedata::Era::Modern});
    }
    return sixday::racedata::Dataset::build(std::move(records), std::move(races));
}

// --- temp files -------------------------------------------------------------

class TempDir {
  public:
    TempDir() {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("sixday-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::filesystem::path path() const { return path_; }

    std::string write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }

    [[nodiscard]] std::string read(const std::string& name) const {
        std::ifstream in(path_ / name, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

  private:
    std::filesystem::path path_;
};

}  // namespace testutil
