#pragma once

// Synthetic dataset generation and brute-force Monte-Carlo oracles. Datasets
// mirror the real structure: Poisson yearly participation growing
// exponentially, a log-normal bulk below the tail threshold, and an exact
// count of truncated-normal tail performances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sixday/errors.hpp"
#include "sixday/math.hpp"
#include "sixday/racedata.hpp"
#include "sixday/rng.hpp"

namespace sixday::synth {

inline const double kDefaultThreshold = -std::log(500.0);  // x at 500 miles

struct GrowthParams {
    double n0 = 25.0;  // participants at t0
    double r = 0.082;  // 1/yr
    double t0 = 1981.5;
};

struct SynthSpec {
    double mu_star = -6.35;
    double sigma_star = 0.12;
    double c = kDefaultThreshold;  // tail threshold in x = -ln(D miles)
    std::size_t n = 500;           // exact number of tail performances
    GrowthParams growth{};
    int first_year = 1981;
    int last_year = 2018;
    double bulk_log_mean = 5.7;   // mean of ln(distance) for sub-threshold bulk
    double bulk_log_sigma = 0.25;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(sigma_star > 0.0)) throw Error("sigma_star must be positive");
        if (n < 1) throw Error("tail count must be >= 1");
        if (first_year > last_year) throw Error("empty year range");
        if (!(growth.n0 > 0.0)) throw Error("growth n0 must be positive");
        if (!(bulk_log_sigma > 0.0)) throw Error("bulk_log_sigma must be positive");
    }
};

// One inverse-CDF draw from Normal(mu, sigma) truncated above at c. The min
// guards the support against boundary rounding in cdf/ppf.
inline double sample_truncated_normal(rng::Rng& r, double mu, double sigma, double c,
                                      double phi_c) {
    const double u = r.uniform01();
    return std::min(c, mu + sigma * math::norm_ppf(u * phi_c));
}

inline double sample_truncated_normal(rng::Rng& r, double mu, double sigma, double c) {
    const double phi_c = math::norm_cdf((c - mu) / sigma);
    if (phi_c < 1e-300) throw Error("truncation threshold too far below the mean");
    return sample_truncated_normal(r, mu, sigma, c, phi_c);
}

inline std::vector<double> sample_truncated_normal(const SynthSpec& spec) {
    spec.validate();
    const double phi_c = math::norm_cdf((spec.c - spec.mu_star) / spec.sigma_star);
    if (phi_c < 1e-300) throw Error("truncation threshold too far below the mean");
    rng::Rng r(spec.seed);
    std::vector<double> xs;
    xs.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        xs.push_back(sample_truncated_normal(r, spec.mu_star, spec.sigma_star, spec.c, phi_c));
    }
    return xs;
}

// Noise-free growth curve at mid-year bin centers; pairs with the yearly
// histogram convention used by the growth fit.
inline std::vector<double> expected_yearly_counts(const GrowthParams& g, int first_year,
                                                  int last_year) {
    std::vector<double> counts;
    counts.reserve(static_cast<std::size_t>(last_year - first_year + 1));
    for (int year = first_year; year <= last_year; ++year) {
        const double t = static_cast<double>(year) + 0.5;
        counts.push_back(g.n0 * std::exp(g.r * (t - g.t0)));
    }
    return counts;
}

// Exact bin values norm * lognormal_pdf(center); noise-free input for the
// histogram fit recovery tests.
inline std::vector<double> expected_lognormal_counts(double norm, double log_mu,
                                                     double log_sigma,
                                                     std::span<const double> centers) {
    std::vector<double> counts;
    counts.reserve(centers.size());
    for (const double x : centers) {
        const double z = (std::log(x) - log_mu) / log_sigma;
        counts.push_back(norm * math::kInvSqrt2Pi / (x * log_sigma) * std::exp(-0.5 * z * z));
    }
    return counts;
}

inline racedata::Dataset generate_dataset(const SynthSpec& spec) {
    spec.validate();
    const double d_min = std::exp(-spec.c);
    const double phi_c = math::norm_cdf((spec.c - spec.mu_star) / spec.sigma_star);
    if (phi_c < 1e-300) throw Error("truncation threshold too far below the mean");

    rng::Rng r(spec.seed);
    std::vector<racedata::RaceEvent> races;
    std::vector<racedata::PerformanceRecord> records;
    const int n_years = spec.last_year - spec.first_year + 1;
    races.reserve(static_cast<std::size_t>(n_years));

    auto race_id_of = [](int year) { return "synth-race-" + std::to_string(year); };

    std::size_t bulk_idx = 0;
    for (int year = spec.first_year; year <= spec.last_year; ++year) {
        races.push_back({race_id_of(year), "Synthetic Six Day " + std::to_string(year), "USA",
                         racedata::Date{year, 7, 1}, racedata::kSixDayHours,
                         racedata::RaceKind::SixDay, racedata::Completeness::Complete});
        const double t = static_cast<double>(year) + 0.5;
        const double mean = spec.growth.n0 * std::exp(spec.growth.r * (t - spec.growth.t0));
        const std::uint64_t count = r.poisson(mean);
        for (std::uint64_t k = 0; k < count; ++k) {
            // Bulk stays strictly below the tail threshold so the threshold
            // selection recovers exactly the n tail draws.
            double d = d_min;
            for (int tries = 0; tries < 10000 && d >= d_min; ++tries) {
                d = std::exp(spec.bulk_log_mean + spec.bulk_log_sigma * r.normal());
            }
            if (d >= d_min) d = 0.5 * d_min;
            records.push_back({race_id_of(year), "synth-bulk-" + std::to_string(bulk_idx++),
                               year - 30, racedata::Gender::Men, d, racedata::Era::Modern});
        }
    }

    for (std::size_t i = 0; i < spec.n; ++i) {
        double d = racedata::kMaxCredibleMiles;
        while (d >= racedata::kMaxCredibleMiles) {
            const double x =
                sample_truncated_normal(r, spec.mu_star, spec.sigma_star, spec.c, phi_c);
            d = std::exp(-x);
        }
        const int year = spec.first_year + static_cast<int>(r.below(
                             static_cast<std::uint64_t>(n_years)));
        records.push_back({race_id_of(year), "synth-tail-" + std::to_string(i), year - 30,
                           racedata::Gender::Men, d, racedata::Era::Modern});
    }
    return racedata::Dataset::build(std::move(records), std::move(races));
}

struct OracleBest {
    double mean_best_x = 0.0;
    double stderr_best_x = 0.0;
};

// Brute-force order-statistic oracle: the average minimum of `attempts`
// truncated-normal draws, with its Monte-Carlo standard error.
inline OracleBest oracle_best_performance(double mu, double sigma, double c,
                                          std::int64_t attempts, std::int64_t replicates,
                                          std::uint64_t seed) {
    if (attempts < 1) throw Error("attempts must be >= 1");
    if (replicates < 2) throw Error("replicates must be >= 2");
    const double phi_c = math::norm_cdf((c - mu) / sigma);
    if (phi_c < 1e-300) throw Error("truncation threshold too far below the mean");

    rng::Rng r(seed);
    double sum = 0.0;   // accumulated relative to mu to limit cancellation
    double sumsq = 0.0;
    for (std::int64_t rep = 0; rep < replicates; ++rep) {
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t a = 0; a < attempts; ++a) {
            best = std::min(best, sample_truncated_normal(r, mu, sigma, c, phi_c));
        }
        const double s = best - mu;
        sum += s;
        sumsq += s * s;
    }
    const double nrep = static_cast<double>(replicates);
    const double mean_s = sum / nrep;
    const double var = std::max(0.0, (sumsq - nrep * mean_s * mean_s) / (nrep - 1.0));
    return {mu + mean_s, std::sqrt(var / nrep)};
}

}  // namespace sixday::synth
