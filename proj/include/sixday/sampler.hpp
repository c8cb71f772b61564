#pragma once

// Affine-invariant ensemble MCMC (stretch move) over a 2-D (mu, sigma)
// parameter space, with tight-ball initialization, burn-in, and a re-centering
// restart around the best point seen before the production run.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "sixday/errors.hpp"
#include "sixday/rng.hpp"

namespace sixday::sampler {

inline constexpr int kDim = 2;

using Params = std::array<double, kDim>;

class AllWalkersInvalid : public Error {
  public:
    using Error::Error;
};

class NonFiniteLogPost : public Error {
  public:
    using Error::Error;
};

class EmptyChain : public Error {
  public:
    using Error::Error;
};

struct SamplerConfig {
    int n_walkers = 1000;  // even, >= 2*kDim
    int n_burn = 1000;
    int n_steps = 1000;
    double stretch_a = 2.0;  // > 1
    std::uint64_t seed = 0;
};

struct Ensemble {
    std::vector<Params> walkers;
    std::vector<double> log_post;  // cached; finite or -inf
    std::int64_t step_count = 0;
    std::int64_t accept_count = 0;
};

struct Chain {
    std::vector<Params> samples;    // post-burn, step-major then walker order
    std::vector<double> log_posts;  // aligned with samples
    Params map_estimate{};          // best over every evaluated point
    double map_log_post = -std::numeric_limits<double>::infinity();
    double acceptance_fraction = 0.0;  // post-burn proposals only
    std::int64_t accepted = 0;
    std::int64_t proposals = 0;
};

struct StretchProposal {
    Params proposal{};
    double log_hastings = 0.0;
};

inline StretchProposal stretch_propose(const Params& walker, const Params& complement_draw,
                                       double z, int dim = kDim) {
    StretchProposal out;
    for (int i = 0; i < kDim; ++i) {
        out.proposal[i] = complement_draw[i] + z * (walker[i] - complement_draw[i]);
    }
    out.log_hastings = static_cast<double>(dim - 1) * std::log(z);
    return out;
}

// Stretch scale z ~ g(z) proportional to 1/sqrt(z) on [1/a, a].
inline double draw_stretch_z(rng::Rng& r, double a) {
    const double u = r.uniform01();
    const double s = (a - 1.0) * u + 1.0;
    return s * s / a;
}

inline double acceptance_fraction(const Chain& chain) {
    if (chain.samples.empty()) throw EmptyChain("chain holds no samples");
    if (chain.proposals == 0) return 0.0;
    return static_cast<double>(chain.accepted) / static_cast<double>(chain.proposals);
}

namespace detail {

inline std::string param_context(const Params& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(mu=%.17g, sigma=%.17g)", p[0], p[1]);
    return buf;
}

}  // namespace detail

// Ensemble sampler. Protocol: tight Gaussian ball at init_center, n_burn
// steps, re-center every walker in a tight ball (same scale) around the best
// point seen so far, then n_steps production steps whose states form the
// chain. Walkers landing where log_post is -inf at (re)initialization are
// rejection-resampled, falling back to the ball center.
template <typename LogPost>
Chain run(LogPost&& log_post, const SamplerConfig& cfg, const Params& init_center,
          double init_scale) {
    if (cfg.n_walkers < 2 * kDim || cfg.n_walkers % 2 != 0) {
        throw Error("n_walkers must be even and >= " + std::to_string(2 * kDim));
    }
    if (!(cfg.stretch_a > 1.0)) throw Error("stretch_a must exceed 1");
    if (cfg.n_burn < 0 || cfg.n_steps < 0) throw Error("negative step counts");
    if (!(init_scale > 0.0)) throw Error("init_scale must be positive");

    rng::Rng r(cfg.seed);
    const auto n = static_cast<std::size_t>(cfg.n_walkers);
    const std::size_t half = n / 2;

    Chain chain;
    auto evaluate = [&](const Params& p) {
        const double lp = log_post(p[0], p[1]);
        if (std::isnan(lp) || lp == std::numeric_limits<double>::infinity()) {
            throw NonFiniteLogPost("log posterior not finite at " + detail::param_context(p));
        }
        if (lp > chain.map_log_post) {
            chain.map_log_post = lp;
            chain.map_estimate = p;
        }
        return lp;
    };

    Ensemble ens;
    ens.walkers.resize(n);
    ens.log_post.resize(n);

    auto init_ball = [&](const Params& center, double center_lp) {
        constexpr int kMaxTries = 1000;
        for (std::size_t i = 0; i < n; ++i) {
            double lp = -std::numeric_limits<double>::infinity();
            Params w{};
            for (int tries = 0; tries < kMaxTries; ++tries) {
                for (int d = 0; d < kDim; ++d) w[d] = center[d] + init_scale * r.normal();
                lp = evaluate(w);
                if (lp > -std::numeric_limits<double>::infinity()) break;
            }
            if (lp == -std::numeric_limits<double>::infinity()) {
                w = center;
                lp = center_lp;
            }
            ens.walkers[i] = w;
            ens.log_post[i] = lp;
        }
    };

    const double center_lp = evaluate(init_center);
    if (center_lp == -std::numeric_limits<double>::infinity()) {
        throw AllWalkersInvalid("log posterior is -inf at init_center " +
                                detail::param_context(init_center));
    }
    init_ball(init_center, center_lp);

    auto update_half = [&](std::size_t begin, std::size_t end, std::size_t comp_begin,
                           bool count) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t j = comp_begin + r.below(half);
            const double z = draw_stretch_z(r, cfg.stretch_a);
            const auto prop = stretch_propose(ens.walkers[i], ens.walkers[j], z);
            const double lp = evaluate(prop.proposal);
            const double log_accept = prop.log_hastings + lp - ens.log_post[i];
            const double u = r.uniform01();
            if (count) ++chain.proposals;
            if (std::log(u) < log_accept) {
                ens.walkers[i] = prop.proposal;
                ens.log_post[i] = lp;
                ++ens.accept_count;
                if (count) ++chain.accepted;
            }
        }
    };

    auto step = [&](bool count) {
        update_half(0, half, half, count);
        update_half(half, n, 0, count);
        ++ens.step_count;
    };

    for (int s = 0; s < cfg.n_burn; ++s) step(false);

    // Restart from the best point found so far; the production chain begins
    // from a concentrated ensemble near the mode.
    init_ball(chain.map_estimate, chain.map_log_post);

    chain.samples.reserve(static_cast<std::size_t>(cfg.n_steps) * n);
    chain.log_posts.reserve(static_cast<std::size_t>(cfg.n_steps) * n);
    for (int s = 0; s < cfg.n_steps; ++s) {
        step(true);
        for (std::size_t i = 0; i < n; ++i) {
            chain.samples.push_back(ens.walkers[i]);
            chain.log_posts.push_back(ens.log_post[i]);
        }
    }
    if (chain.proposals > 0) {
        chain.acceptance_fraction =
            static_cast<double>(chain.accepted) / static_cast<double>(chain.proposals);
    }
    return chain;
}

}  // namespace sixday::sampler
