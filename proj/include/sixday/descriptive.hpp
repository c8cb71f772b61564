#pragma once

// Descriptive analytics over six-day race datasets: participation growth,
// distance histograms with truncated log-normal fits, exceptional-performance
// tallies, and record progressions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sixday/errors.hpp"
#include "sixday/fit.hpp"
#include "sixday/math.hpp"
#include "sixday/racedata.hpp"

namespace sixday::descriptive {

class DegenerateData : public Error {
  public:
    using Error::Error;
};

class InsufficientBins : public Error {
  public:
    using Error::Error;
};

struct YearBin {
    int year = 0;
    std::int64_t count = 0;
};

struct YearHistogram {
    std::vector<YearBin> bins;  // consecutive years, zero-filled
};

struct GrowthFit {
    double n0 = 0.0;  // participants at t0
    double r = 0.0;   // 1/yr
    double t0 = 0.0;  // yr
    double stderr_n0 = 0.0;
    double stderr_r = 0.0;
    double sse = 0.0;
};

struct SummaryStats {
    std::size_t n = 0;
    double median = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;  // n-1 denominator; 0 when n == 1
};

struct DistanceBin {
    double lower_edge = 0.0;  // miles; bin covers [lower_edge, lower_edge + width)
    double count = 0.0;
};

struct DistanceHistogram {
    double bin_width = 0.0;
    std::vector<DistanceBin> bins;  // contiguous edges, anchored at multiples of bin_width
};

struct LogNormalFit {
    double arith_mean = 0.0;  // miles
    double arith_std = 0.0;   // miles
    double norm = 0.0;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    double log_mu = 0.0;     // mean of ln(distance)
    double log_sigma = 0.0;  // std of ln(distance)
};

struct ProgressionEntry {
    racedata::Date date;
    std::string athlete_name;
    double distance_miles = 0.0;
};

struct RecordProgression {
    std::vector<ProgressionEntry> entries;  // dates nondecreasing, distances strictly increasing
};

struct ExceptionalYear {
    int year = 0;
    std::int64_t men = 0;
    std::int64_t women = 0;
};

struct ExceptionalCounts {
    std::vector<ExceptionalYear> per_year;  // zero-filled over the dataset span
    std::int64_t total_men = 0;
    std::int64_t total_women = 0;
    std::int64_t unique_men = 0;
    std::int64_t unique_women = 0;
};

struct AttemptStat {
    int attempt = 0;                // k-th race of an athlete's career
    std::int64_t athletes = 0;      // ever-exceptional athletes with >= k races
    std::int64_t exceptional = 0;   // of those, how many were exceptional at race k
};

struct DebutRepeatAnalysis {
    std::vector<AttemptStat> attempts;                      // k = 1..5
    std::array<std::int64_t, 4> participation_ladder{};    // >= 1, 2, 5, 10 races, all athletes
    std::array<std::int64_t, 4> exceptional_ladder{};      // same thresholds, ever-exceptional
};

constexpr double kExceptionalMenMiles = 500.0;
constexpr double kExceptionalWomenMiles = 450.0;
constexpr std::array<int, 4> kLadderThresholds{1, 2, 5, 10};

inline YearHistogram yearly_participation(const racedata::Dataset& ds) {
    if (ds.empty()) throw racedata::EmptyDataset("yearly_participation: empty dataset");
    YearHistogram h;
    const int y0 = ds.first_year();
    const int y1 = ds.last_year();
    h.bins.resize(static_cast<std::size_t>(y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y) h.bins[static_cast<std::size_t>(y - y0)].year = y;
    for (const auto& rec : ds.records()) {
        ++h.bins[static_cast<std::size_t>(ds.race_year(rec) - y0)].count;
    }
    return h;
}

// Exponential growth fit over arbitrary (t, count) points. Used directly by
// recovery tests on noise-free real-valued series; fit_growth adapts yearly
// histograms to it.
inline GrowthFit fit_growth_points(std::span<const double> t, std::span<const double> counts,
                                   double t0) {
    std::size_t nonzero = 0;
    for (const double c : counts) {
        if (c > 0.0) ++nonzero;
    }
    if (nonzero == 0) throw DegenerateData("growth fit: all counts zero");
    if (nonzero < 3) throw DegenerateData("growth fit: fewer than 3 nonzero points");

    // Log-linear regression over positive counts seeds the nonlinear fit.
    double sw = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (counts[i] <= 0.0) continue;
        const double x = t[i] - t0;
        const double y = std::log(counts[i]);
        sw += 1.0;
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
    }
    const double det = sw * stt - st * st;
    double r0 = 0.0;
    double ln_n0 = sy / sw;
    if (std::fabs(det) > 1e-12) {
        r0 = (sw * sty - st * sy) / det;
        ln_n0 = (sy - r0 * st) / sw;
    }

    auto model = [t0](std::span<const double> q, double x) {
        return q[0] * std::exp(q[1] * (x - t0));
    };
    const auto res = fit::levenberg_marquardt(model, t, counts, {std::exp(ln_n0), r0});
    GrowthFit out;
    out.n0 = res.params[0];
    out.r = res.params[1];
    out.t0 = t0;
    out.stderr_n0 = res.stderrs[0];
    out.stderr_r = res.stderrs[1];
    out.sse = res.sse;
    return out;
}

inline GrowthFit fit_growth(const YearHistogram& h, double t0) {
    std::vector<double> t, y;
    t.reserve(h.bins.size());
    y.reserve(h.bins.size());
    for (const auto& bin : h.bins) {
        t.push_back(static_cast<double>(bin.year) + 0.5);
        y.push_back(static_cast<double>(bin.count));
    }
    return fit_growth_points(t, y, t0);
}

inline SummaryStats summary_stats(const racedata::Dataset& ds) {
    if (ds.empty()) throw racedata::EmptyDataset("summary_stats: empty dataset");
    std::vector<double> d;
    d.reserve(ds.records().size());
    for (const auto& rec : ds.records()) d.push_back(rec.distance_miles);
    std::sort(d.begin(), d.end());

    SummaryStats out;
    out.n = d.size();
    const std::size_t mid = d.size() / 2;
    out.median = d.size() % 2 == 1 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
    double sum = 0.0;
    for (const double v : d) sum += v;
    out.mean = sum / static_cast<double>(d.size());
    if (d.size() > 1) {
        double ss = 0.0;
        for (const double v : d) ss += (v - out.mean) * (v - out.mean);
        out.std_dev = std::sqrt(ss / static_cast<double>(d.size() - 1));
    }
    return out;
}

inline DistanceHistogram distance_histogram(const racedata::Dataset& ds,
                                            double bin_width = 20.0) {
    if (!(bin_width > 0.0)) throw Error("distance_histogram: bin_width must be positive");
    if (ds.empty()) throw racedata::EmptyDataset("distance_histogram: empty dataset");

    std::int64_t lo = 0, hi = 0;
    bool first = true;
    std::map<std::int64_t, double> counts;
    for (const auto& rec : ds.records()) {
        const auto idx = static_cast<std::int64_t>(std::floor(rec.distance_miles / bin_width));
        counts[idx] += 1.0;
        if (first) {
            lo = hi = idx;
            first = false;
        } else {
            lo = std::min(lo, idx);
            hi = std::max(hi, idx);
        }
    }

    DistanceHistogram h;
    h.bin_width = bin_width;
    h.bins.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t idx = lo; idx <= hi; ++idx) {
        const auto it = counts.find(idx);
        h.bins.push_back({static_cast<double>(idx) * bin_width,
                          it == counts.end() ? 0.0 : it->second});
    }
    return h;
}

inline LogNormalFit fit_lognormal_truncated(const DistanceHistogram& h, double threshold) {
    std::vector<double> centers, obs;
    for (const auto& bin : h.bins) {
        if (bin.lower_edge < threshold || bin.count <= 0.0) continue;
        centers.push_back(bin.lower_edge + 0.5 * h.bin_width);
        obs.push_back(bin.count);
    }
    if (centers.size() < 4) {
        throw InsufficientBins("lognormal fit: need >= 4 nonzero bins at or above threshold");
    }

    // Weighted log-moments seed (norm, M, S).
    double sw = 0.0, sl = 0.0, sll = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double l = std::log(centers[i]);
        sw += obs[i];
        sl += obs[i] * l;
        sll += obs[i] * l * l;
    }
    const double m0 = sl / sw;
    const double s0 = std::max(0.05, std::sqrt(std::max(0.0, sll / sw - m0 * m0)));
    const double norm0 = sw * h.bin_width;

    auto model = [](std::span<const double> q, double x) {
        const double s = std::fabs(q[2]);
        if (s < 1e-12 || x <= 0.0) return 0.0;
        const double z = (std::log(x) - q[1]) / s;
        return q[0] * math::kInvSqrt2Pi / (x * s) * std::exp(-0.5 * z * z);
    };
    const auto res = fit::levenberg_marquardt(model, centers, obs, {norm0, m0, s0});

    LogNormalFit out;
    out.norm = res.params[0];
    out.log_mu = res.params[1];
    out.log_sigma = std::fabs(res.params[2]);
    out.arith_mean = std::exp(out.log_mu + 0.5 * out.log_sigma * out.log_sigma);
    out.arith_std = out.arith_mean * std::sqrt(std::expm1(out.log_sigma * out.log_sigma));
    out.chi2 = 0.0;
    const std::span<const double> q(res.params);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double mu = model(q, centers[i]);
        if (mu > 0.0) out.chi2 += (obs[i] - mu) * (obs[i] - mu) / mu;
    }
    out.dof = static_cast<int>(centers.size()) - 3;
    out.p_value = math::chi2_pvalue(out.chi2, out.dof);
    return out;
}

namespace detail {

inline bool is_exceptional(const racedata::PerformanceRecord& rec, double threshold_men,
                           double threshold_women) {
    const double thr =
        rec.gender == racedata::Gender::Men ? threshold_men : threshold_women;
    return rec.distance_miles >= thr;
}

}  // namespace detail

inline ExceptionalCounts exceptional_counts(const racedata::Dataset& ds,
                                            double threshold_men = kExceptionalMenMiles,
                                            double threshold_women = kExceptionalWomenMiles) {
    ExceptionalCounts out;
    if (ds.empty()) return out;

    const int y0 = ds.first_year();
    const int y1 = ds.last_year();
    out.per_year.resize(static_cast<std::size_t>(y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y) out.per_year[static_cast<std::size_t>(y - y0)].year = y;

    std::unordered_set<std::string> unique_men, unique_women;
    for (const auto& rec : ds.records()) {
        if (!detail::is_exceptional(rec, threshold_men, threshold_women)) continue;
        auto& bin = out.per_year[static_cast<std::size_t>(ds.race_year(rec) - y0)];
        if (rec.gender == racedata::Gender::Men) {
            ++bin.men;
            ++out.total_men;
            unique_men.insert(racedata::participant_key(rec));
        } else {
            ++bin.women;
            ++out.total_women;
            unique_women.insert(racedata::participant_key(rec));
        }
    }
    out.unique_men = static_cast<std::int64_t>(unique_men.size());
    out.unique_women = static_cast<std::int64_t>(unique_women.size());
    return out;
}

inline DebutRepeatAnalysis debut_and_repeat_analysis(
    const racedata::Dataset& ds, double threshold_men = kExceptionalMenMiles,
    double threshold_women = kExceptionalWomenMiles) {
    struct Career {
        std::vector<const racedata::PerformanceRecord*> races;
    };
    std::unordered_map<std::string, Career> careers;
    for (const auto& rec : ds.records()) {
        careers[racedata::participant_key(rec)].races.push_back(&rec);
    }

    DebutRepeatAnalysis out;
    out.attempts.resize(5);
    for (int k = 0; k < 5; ++k) out.attempts[static_cast<std::size_t>(k)].attempt = k + 1;

    for (auto& [key, career] : careers) {
        std::sort(career.races.begin(), career.races.end(),
                  [&](const racedata::PerformanceRecord* a,
                      const racedata::PerformanceRecord* b) {
                      const auto& da = ds.race_of(*a).start_date;
                      const auto& db = ds.race_of(*b).start_date;
                      if (da != db) return da < db;
                      return a->race_id < b->race_id;
                  });
        const auto n_races = static_cast<std::int64_t>(career.races.size());
        bool ever = false;
        for (const auto* rec : career.races) {
            if (detail::is_exceptional(*rec, threshold_men, threshold_women)) {
                ever = true;
                break;
            }
        }
        for (std::size_t i = 0; i < kLadderThresholds.size(); ++i) {
            if (n_races >= kLadderThresholds[i]) {
                ++out.participation_ladder[i];
                if (ever) ++out.exceptional_ladder[i];
            }
        }
        if (!ever) continue;
        for (std::size_t k = 0; k < 5 && k < career.races.size(); ++k) {
            ++out.attempts[k].athletes;
            if (detail::is_exceptional(*career.races[k], threshold_men, threshold_women)) {
                ++out.attempts[k].exceptional;
            }
        }
    }
    return out;
}

inline RecordProgression record_progression(const racedata::Dataset& ds,
                                            racedata::Gender gender) {
    std::vector<const racedata::PerformanceRecord*> recs;
    for (const auto& rec : ds.records()) {
        if (rec.gender == gender) recs.push_back(&rec);
    }
    if (recs.empty()) throw racedata::EmptyDataset("record_progression: no records for gender");
    std::sort(recs.begin(), recs.end(),
              [&](const racedata::PerformanceRecord* a, const racedata::PerformanceRecord* b) {
                  const auto& da = ds.race_of(*a).start_date;
                  const auto& db = ds.race_of(*b).start_date;
                  if (da != db) return da < db;
                  if (a->distance_miles != b->distance_miles) {
                      return a->distance_miles > b->distance_miles;
                  }
                  return a->athlete_name < b->athlete_name;
              });

    RecordProgression out;
    double best = -1.0;
    for (const auto* rec : recs) {
        if (rec->distance_miles > best) {
            best = rec->distance_miles;
            out.entries.push_back(
                {ds.race_of(*rec).start_date, rec->athlete_name, rec->distance_miles});
        }
    }
    return out;
}

}  // namespace sixday::descriptive
