#pragma once

// Record-forecasting pipeline: truncated-normal tail likelihood over
// x = -ln(D miles), MCMC posterior over (mu, sigma), gridded posterior,
// population scaling, record-break probabilities, and expected best
// performance over future horizons.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sixday/errors.hpp"
#include "sixday/math.hpp"
#include "sixday/racedata.hpp"
#include "sixday/sampler.hpp"

namespace sixday::forecast {

class InsufficientTail : public Error {
  public:
    explicit InsufficientTail(std::size_t count)
        : Error("tail sample has only " + std::to_string(count) + " performances (need >= 10)"),
          count_(count) {}

    [[nodiscard]] std::size_t count() const { return count_; }

  private:
    std::size_t count_;
};

class DegenerateCDF : public Error {
  public:
    using Error::Error;
};

class RecordBelowThreshold : public Error {
  public:
    using Error::Error;
};

inline constexpr std::size_t kMinTailSize = 10;
inline constexpr double kGridDeltaMu = 0.005;
inline constexpr double kGridDeltaSigma = 0.0025;

struct TailSample {
    std::vector<double> x_values;  // x = -ln(D miles), every x <= c
    double c = 0.0;                // -ln(d_min)
    std::size_t n = 0;
    double t_m = 0.0;  // observed span, years
    double worst = 0.0;
    double sum_x = 0.0;   // cached for the likelihood
    double sum_xx = 0.0;
};

inline TailSample make_tail_sample(std::vector<double> x_values, double c, double t_m) {
    if (x_values.size() < kMinTailSize) throw InsufficientTail(x_values.size());
    if (!(t_m > 0.0)) throw Error("tail sample needs a positive span");
    TailSample X;
    X.x_values = std::move(x_values);
    X.c = c;
    X.n = X.x_values.size();
    X.t_m = t_m;
    X.worst = -std::numeric_limits<double>::infinity();
    for (const double x : X.x_values) {
        if (x > c) throw Error("tail value above the truncation threshold");
        X.worst = std::max(X.worst, x);
        X.sum_x += x;
        X.sum_xx += x * x;
    }
    return X;
}

inline TailSample build_tail_sample(const racedata::Dataset& ds, double d_min_miles) {
    if (!(d_min_miles > 0.0)) throw Error("d_min must be positive");
    std::vector<double> xs;
    for (const auto& rec : ds.records()) {
        if (rec.distance_miles >= d_min_miles) xs.push_back(-std::log(rec.distance_miles));
    }
    if (xs.size() < kMinTailSize) throw InsufficientTail(xs.size());
    return make_tail_sample(std::move(xs), -std::log(d_min_miles), ds.span_years());
}

struct PriorBox {
    double mu_min = 0.0;
    double mu_max = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;

    [[nodiscard]] bool contains(double mu, double sigma) const {
        return mu >= mu_min && mu <= mu_max && sigma >= sigma_min && sigma <= sigma_max;
    }

    void validate() const {
        if (!(mu_min < mu_max) || !(sigma_min > 0.0) || !(sigma_min < sigma_max)) {
            throw Error("invalid prior box");
        }
    }
};

inline constexpr PriorBox kMenPriorBox{-6.6, -5.9, 0.05, 0.5};
inline constexpr PriorBox kWomenPriorBox{-6.4, -5.7, 0.05, 0.5};

// Truncated-normal log density at x: ln phi(x|mu,sigma) - ln Phi(c|mu,sigma)
// for x <= c, -inf above the threshold.
inline double log_likelihood(double x, double mu, double sigma, double c) {
    if (x > c) return -std::numeric_limits<double>::infinity();
    const double z = (x - mu) / sigma;
    const double zc = (c - mu) / sigma;
    return -0.5 * z * z - math::kLnSqrt2Pi - std::log(sigma) - math::log_norm_cdf(zc);
}

// Joint log posterior over the cached tail (uniform priors inside the box).
inline double log_posterior(const TailSample& X, double mu, double sigma,
                            const PriorBox& prior) {
    if (!prior.contains(mu, sigma)) return -std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(X.n);
    const double zc = (X.c - mu) / sigma;
    const double quad = X.sum_xx - 2.0 * mu * X.sum_x + nd * mu * mu;
    return nd * (-std::log(sigma) - math::log_norm_cdf(zc) - math::kLnSqrt2Pi) -
           quad / (2.0 * sigma * sigma);
}

struct PosteriorGrid {
    double mu_min = 0.0;
    double mu_max = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::size_t n_mu = 0;
    std::size_t n_sigma = 0;
    std::vector<double> cell_mass;  // row-major [i_mu * n_sigma + j_sigma], sums to 1

    [[nodiscard]] double mu_step() const {
        return (mu_max - mu_min) / static_cast<double>(n_mu);
    }
    [[nodiscard]] double sigma_step() const {
        return (sigma_max - sigma_min) / static_cast<double>(n_sigma);
    }
    [[nodiscard]] double mu_center(std::size_t i) const {
        return mu_min + (static_cast<double>(i) + 0.5) * mu_step();
    }
    [[nodiscard]] double sigma_center(std::size_t j) const {
        return sigma_min + (static_cast<double>(j) + 0.5) * sigma_step();
    }
    [[nodiscard]] double mass(std::size_t i, std::size_t j) const {
        return cell_mass[i * n_sigma + j];
    }
    [[nodiscard]] double mass_sum() const {
        double s = 0.0;
        for (const double m : cell_mass) s += m;
        return s;
    }

    static PosteriorGrid empty_over(const PriorBox& box) {
        box.validate();
        PosteriorGrid g;
        g.mu_min = box.mu_min;
        g.mu_max = box.mu_max;
        g.sigma_min = box.sigma_min;
        g.sigma_max = box.sigma_max;
        g.n_mu = static_cast<std::size_t>(std::llround((box.mu_max - box.mu_min) / kGridDeltaMu));
        g.n_sigma = static_cast<std::size_t>(
            std::llround((box.sigma_max - box.sigma_min) / kGridDeltaSigma));
        g.n_mu = std::max<std::size_t>(g.n_mu, 1);
        g.n_sigma = std::max<std::size_t>(g.n_sigma, 1);
        g.cell_mass.assign(g.n_mu * g.n_sigma, 0.0);
        return g;
    }

    static PosteriorGrid from_chain(const sampler::Chain& chain, const PriorBox& box) {
        if (chain.samples.empty()) throw sampler::EmptyChain("cannot grid an empty chain");
        PosteriorGrid g = empty_over(box);
        const double dmu = g.mu_step();
        const double dsg = g.sigma_step();
        for (const auto& s : chain.samples) {
            auto i = static_cast<std::int64_t>(std::floor((s[0] - g.mu_min) / dmu));
            auto j = static_cast<std::int64_t>(std::floor((s[1] - g.sigma_min) / dsg));
            i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(g.n_mu) - 1);
            j = std::clamp<std::int64_t>(j, 0, static_cast<std::int64_t>(g.n_sigma) - 1);
            g.cell_mass[static_cast<std::size_t>(i) * g.n_sigma + static_cast<std::size_t>(j)] +=
                1.0;
        }
        const double total = static_cast<double>(chain.samples.size());
        for (double& m : g.cell_mass) m /= total;
        return g;
    }

    // All mass in the cell containing (mu, sigma); expectation over the grid
    // then reduces to a pointwise evaluation at that cell's center.
    static PosteriorGrid point_mass(const PriorBox& box, double mu, double sigma) {
        PosteriorGrid g = empty_over(box);
        auto i = static_cast<std::int64_t>(std::floor((mu - g.mu_min) / g.mu_step()));
        auto j = static_cast<std::int64_t>(std::floor((sigma - g.sigma_min) / g.sigma_step()));
        i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(g.n_mu) - 1);
        j = std::clamp<std::int64_t>(j, 0, static_cast<std::int64_t>(g.n_sigma) - 1);
        g.cell_mass[static_cast<std::size_t>(i) * g.n_sigma + static_cast<std::size_t>(j)] = 1.0;
        return g;
    }
};

// Latent population producing the observed tail: N = n / Phi(w|mu,sigma).
inline double population_size(double n, double w, double mu, double sigma) {
    const double phi = math::norm_cdf((w - mu) / sigma);
    if (phi < 1e-300) throw DegenerateCDF("population scaling CDF underflow");
    return n / phi;
}

// Probability that the best of the next t_f years beats level a:
// B = 1 - [1 - Phi(a|mu,sigma)]^(N*t_f/t_m), in log space.
inline double prob_best_better(double a, double mu, double sigma, double N, double t_f,
                               double t_m) {
    if (!(N > 0.0) || !(t_m > 0.0) || t_f < 0.0) throw Error("invalid Bernoulli exponent");
    if (t_f == 0.0) return 0.0;
    const double exponent = N * t_f / t_m;
    const double alpha = (a - mu) / sigma;
    const double cdf = math::norm_cdf(alpha);
    if (cdf <= 0.0) return 0.0;
    double log_one_minus;
    if (cdf < 0.5) {
        log_one_minus = std::log1p(-cdf);
    } else {
        const double sf = math::norm_sf(alpha);
        if (sf <= 0.0) return 1.0;
        log_one_minus = std::log(sf);
    }
    const double b = -std::expm1(exponent * log_one_minus);
    return std::clamp(b, 0.0, 1.0);
}

namespace detail {

struct GridCell {
    double mu = 0.0;
    double sigma = 0.0;
    double N = 0.0;
    double mass = 0.0;
};

// Occupied cells with the population size precomputed; N depends on the cell,
// not on the probe level or horizon.
inline std::vector<GridCell> occupied_cells(const PosteriorGrid& grid, double n, double w) {
    std::vector<GridCell> cells;
    for (std::size_t i = 0; i < grid.n_mu; ++i) {
        for (std::size_t j = 0; j < grid.n_sigma; ++j) {
            const double m = grid.mass(i, j);
            if (m <= 0.0) continue;
            const double mu = grid.mu_center(i);
            const double sigma = grid.sigma_center(j);
            cells.push_back({mu, sigma, population_size(n, w, mu, sigma), m});
        }
    }
    return cells;
}

inline double expected_b(const std::vector<GridCell>& cells, double a, double t_f,
                         double t_m) {
    double p = 0.0;
    for (const auto& cell : cells) {
        p += cell.mass * prob_best_better(a, cell.mu, cell.sigma, cell.N, t_f, t_m);
    }
    return p;
}

}  // namespace detail

// Posterior expectation of B over the gridded posterior, with the population
// size recomputed from (mu, sigma) at each cell center.
inline double expected_record_prob(double a, const PosteriorGrid& grid, double n, double w,
                                   double t_f, double t_m) {
    return detail::expected_b(detail::occupied_cells(grid, n, w), a, t_f, t_m);
}

struct YGridSpec {
    double d_best_miles = 1250.0;   // far end of the performance grid
    double d_worst_miles = 250.0;   // near end
    double step_miles = 1.0;
};

struct ExpectedBest {
    double y1 = 0.0;     // expectation of x = -ln(D) over the grid
    double miles = 0.0;  // exp(-y1)
    bool non_monotone = false;  // p-hat decreased beyond 1e-12 along the grid
    double max_decrease = 0.0;
};

// Expected best performance after t_f years: treat p-hat(y) as the CDF of the
// future best, differentiate by forward differences over the y grid, and
// integrate y against that density.
inline ExpectedBest expected_best(const PosteriorGrid& grid, double n, double w, double t_f,
                                  double t_m, const YGridSpec& yspec = {}) {
    if (!(yspec.d_best_miles > yspec.d_worst_miles) || !(yspec.d_worst_miles > 0.0) ||
        !(yspec.step_miles > 0.0)) {
        throw Error("invalid y grid");
    }
    std::vector<double> ys, ps;
    for (double d = yspec.d_best_miles; d >= yspec.d_worst_miles - 1e-9;
         d -= yspec.step_miles) {
        ys.push_back(-std::log(d));
    }
    const auto cells = detail::occupied_cells(grid, n, w);
    ps.reserve(ys.size());
    for (const double y : ys) ps.push_back(detail::expected_b(cells, y, t_f, t_m));

    ExpectedBest out;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
        const double dp = ps[k + 1] - ps[k];
        if (dp < -1e-12) {
            out.non_monotone = true;
            out.max_decrease = std::max(out.max_decrease, -dp);
        }
        num += 0.5 * (ys[k] + ys[k + 1]) * dp;
        den += dp;
    }
    if (den <= 0.0) throw Error("no probability mass on the y grid");
    out.y1 = num / den;
    out.miles = std::exp(-out.y1);
    return out;
}

struct HorizonProb {
    double t_f = 0.0;
    double p_hat = 0.0;
};

struct ExpectedBestPoint {
    double t_f = 0.0;
    double miles = 0.0;
    double p_hat = 0.0;  // record-break probability at this horizon
};

struct SamplerMetadata {
    std::uint64_t seed = 0;
    int n_walkers = 0;
    int n_burn = 0;
    int n_steps = 0;
    double stretch_a = 0.0;
    double acceptance_fraction = 0.0;
    double map_mu = 0.0;
    double map_sigma = 0.0;
};

struct ForecastResult {
    double record_x = 0.0;      // -ln(d_rec)
    double record_miles = 0.0;  // d_rec
    double d_min_miles = 0.0;
    PriorBox prior;
    double t_m = 0.0;
    std::vector<HorizonProb> horizons;              // p-hat nondecreasing in t_f
    std::vector<ExpectedBestPoint> expected_best_curve;  // miles nondecreasing in t_f
    std::optional<double> breakeven_years;
    SamplerMetadata sampler_metadata;
    bool non_monotone = false;
};

struct FitTailResult {
    sampler::Chain chain;
    PosteriorGrid grid;
};

inline constexpr double kTightBallScale = 1e-4;

inline FitTailResult fit_tail(const TailSample& X, const PriorBox& prior,
                              const sampler::SamplerConfig& cfg) {
    prior.validate();
    const double nd = static_cast<double>(X.n);
    double mu0 = X.sum_x / nd;
    double var0 = std::max(0.0, X.sum_xx / nd - mu0 * mu0);
    double sigma0 = std::sqrt(var0);
    const double mu_pad = 1e-3 * (prior.mu_max - prior.mu_min);
    const double sigma_pad = 1e-3 * (prior.sigma_max - prior.sigma_min);
    mu0 = std::clamp(mu0, prior.mu_min + mu_pad, prior.mu_max - mu_pad);
    sigma0 = std::clamp(sigma0, prior.sigma_min + sigma_pad, prior.sigma_max - sigma_pad);

    auto target = [&X, &prior](double mu, double sigma) {
        return log_posterior(X, mu, sigma, prior);
    };
    FitTailResult out;
    out.chain = sampler::run(target, cfg, {mu0, sigma0}, kTightBallScale);
    out.grid = PosteriorGrid::from_chain(out.chain, prior);
    return out;
}

inline constexpr int kExpectedBestBins = 21;
inline constexpr double kExpectedBestMinYears = 1.0;
inline constexpr double kExpectedBestMaxYears = 100.0;

inline std::vector<double> log_spaced_horizons(double t_lo = kExpectedBestMinYears,
                                               double t_hi = kExpectedBestMaxYears,
                                               int bins = kExpectedBestBins) {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(bins));
    const double l0 = std::log(t_lo);
    const double l1 = std::log(t_hi);
    for (int i = 0; i < bins; ++i) {
        const double f = bins == 1 ? 0.0 : static_cast<double>(i) / (bins - 1);
        t.push_back(std::exp(l0 + f * (l1 - l0)));
    }
    return t;
}

inline ForecastResult forecast(const racedata::Dataset& ds, double d_min_miles,
                               double d_rec_miles, const PriorBox& prior,
                               const sampler::SamplerConfig& cfg,
                               const std::vector<double>& horizons = {1.0, 5.0, 10.0},
                               const YGridSpec& yspec = {},
                               std::optional<double> t_m_override = std::nullopt) {
    if (d_rec_miles < d_min_miles) {
        throw RecordBelowThreshold("record must lie inside the modeled tail");
    }
    TailSample X = build_tail_sample(ds, d_min_miles);
    if (t_m_override) {
        if (!(*t_m_override > 0.0)) throw Error("t_m override must be positive");
        X.t_m = *t_m_override;
    }
    const auto fit = fit_tail(X, prior, cfg);

    ForecastResult out;
    out.record_miles = d_rec_miles;
    out.record_x = -std::log(d_rec_miles);
    out.d_min_miles = d_min_miles;
    out.prior = prior;
    out.t_m = X.t_m;
    out.sampler_metadata = {cfg.seed,
                            cfg.n_walkers,
                            cfg.n_burn,
                            cfg.n_steps,
                            cfg.stretch_a,
                            fit.chain.acceptance_fraction,
                            fit.chain.map_estimate[0],
                            fit.chain.map_estimate[1]};

    const double nd = static_cast<double>(X.n);
    for (const double t_f : horizons) {
        out.horizons.push_back(
            {t_f, expected_record_prob(out.record_x, fit.grid, nd, X.worst, t_f, X.t_m)});
    }

    for (const double t_f : log_spaced_horizons()) {
        const auto eb = expected_best(fit.grid, nd, X.worst, t_f, X.t_m, yspec);
        const double p =
            expected_record_prob(out.record_x, fit.grid, nd, X.worst, t_f, X.t_m);
        out.expected_best_curve.push_back({t_f, eb.miles, p});
        out.non_monotone = out.non_monotone || eb.non_monotone;
    }

    // First crossing of the record, linearly interpolated in (miles, ln t_f).
    const auto& curve = out.expected_best_curve;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].miles < d_rec_miles) continue;
        if (i == 0) {
            out.breakeven_years = curve[0].t_f;
        } else {
            const double m0 = curve[i - 1].miles;
            const double m1 = curve[i].miles;
            const double l0 = std::log(curve[i - 1].t_f);
            const double l1 = std::log(curve[i].t_f);
            const double f = m1 > m0 ? (d_rec_miles - m0) / (m1 - m0) : 1.0;
            out.breakeven_years = std::exp(l0 + f * (l1 - l0));
        }
        break;
    }
    return out;
}

}  // namespace sixday::forecast
