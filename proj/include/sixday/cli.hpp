#pragma once

// Command-line front end. Every subcommand reads canonical results CSV (or
// generates data), applies optional era/gender/age/distance filters, and
// writes plot-ready JSON (default) or CSV to --output / stdout. Diagnostics
// go to stderr. Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sixday/descriptive.hpp"
#include "sixday/errors.hpp"
#include "sixday/forecast.hpp"
#include "sixday/racedata.hpp"
#include "sixday/sampler.hpp"
#include "sixday/synth.hpp"

namespace sixday::cli {

inline constexpr int kSchemaVersion = 1;

namespace detail {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline racedata::Gender parse_gender(const std::string& text) {
    if (text == "M" || text == "m" || text == "men") return racedata::Gender::Men;
    if (text == "W" || text == "w" || text == "women") return racedata::Gender::Women;
    throw UsageError("--gender must be M or W");
}

inline const char* gender_label(racedata::Gender g) {
    return g == racedata::Gender::Men ? "M" : "W";
}

inline forecast::PriorBox parse_prior(const std::string& text) {
    forecast::PriorBox box;
    double* fields[4] = {&box.mu_min, &box.mu_max, &box.sigma_min, &box.sigma_max};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t next = i == 3 ? text.size() : text.find(':', pos);
        if (next == std::string::npos) {
            throw UsageError("--prior expects mu_min:mu_max:sigma_min:sigma_max");
        }
        try {
            std::size_t used = 0;
            *fields[i] = std::stod(text.substr(pos, next - pos), &used);
            if (used != next - pos) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("--prior expects four colon-separated numbers");
        }
        pos = next + 1;
    }
    try {
        box.validate();
    } catch (const Error& e) {
        throw UsageError(std::string("--prior: ") + e.what());
    }
    return box;
}

inline std::vector<double> parse_horizons(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !(v >= 0.0)) throw std::invalid_argument("bad");
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--horizons expects comma-separated nonnegative years");
        }
    }
    if (out.empty()) throw UsageError("--horizons is empty");
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct CommonOpts {
    std::string input;
    std::string output;
    std::string format = "json";
    std::string era = "modern";
    std::string gender;
    std::string age_group;
    double min_distance = 0.0;
    CLI::Option* gender_opt = nullptr;
    CLI::Option* age_group_opt = nullptr;
    CLI::Option* min_distance_opt = nullptr;
};

inline void add_common(CLI::App* sub, CommonOpts& o, bool with_format = true) {
    sub->add_option("--input", o.input, "canonical results CSV")->required();
    sub->add_option("--output", o.output, "output path (default: stdout)");
    if (with_format) {
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    sub->add_option("--era", o.era, "validation windows for ingestion")
        ->check(CLI::IsMember({"modern", "pedestrian"}));
    o.gender_opt = sub->add_option("--gender", o.gender, "keep only one gender (M or W)");
    o.age_group_opt = sub->add_option("--age-group", o.age_group, "keep one age group, e.g. M45");
    o.min_distance_opt =
        sub->add_option("--min-distance", o.min_distance, "keep distances >= this (miles)")
            ->check(CLI::PositiveNumber);
}

inline racedata::Dataset load(const CommonOpts& o) {
    const auto format = o.era == "pedestrian" ? racedata::CsvFormat::PedestrianCsv
                                              : racedata::CsvFormat::ModernCsv;
    auto ds = racedata::parse_results(std::filesystem::path(o.input), format);
    racedata::FilterSpec f;
    if (o.gender_opt->count() > 0) f.gender = parse_gender(o.gender);
    if (o.age_group_opt->count() > 0) {
        const auto ag = racedata::AgeGroup::parse(o.age_group);
        if (!ag) throw UsageError("unrecognized --age-group '" + o.age_group + "'");
        f.age_group = *ag;
    }
    if (o.min_distance_opt->count() > 0) f.min_distance_miles = o.min_distance;
    if (f.gender || f.age_group || f.min_distance_miles) ds = racedata::filter(ds, f);
    return ds;
}

struct SamplerOpts {
    int walkers = 1000;
    int burn = 1000;
    int steps = 1000;
    double stretch_a = 2.0;
    std::uint64_t seed = 0;
    bool fast = false;
    CLI::Option* walkers_opt = nullptr;
    CLI::Option* burn_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
};

inline void add_sampler(CLI::App* sub, SamplerOpts& s) {
    s.walkers_opt = sub->add_option("--walkers", s.walkers, "ensemble size (even)")
                        ->check(CLI::PositiveNumber);
    s.burn_opt = sub->add_option("--burn", s.burn, "burn-in steps")
                     ->check(CLI::NonNegativeNumber);
    s.steps_opt = sub->add_option("--steps", s.steps, "production steps")
                      ->check(CLI::PositiveNumber);
    sub->add_option("--stretch-a", s.stretch_a, "stretch move scale (> 1)");
    sub->add_option("--seed", s.seed, "RNG seed");
    sub->add_flag("--fast", s.fast, "CI profile: 100 walkers, 200 burn, 200 steps");
}

inline sampler::SamplerConfig to_config(const SamplerOpts& s) {
    sampler::SamplerConfig cfg;
    if (s.fast) {
        cfg.n_walkers = 100;
        cfg.n_burn = 200;
        cfg.n_steps = 200;
    }
    if (s.walkers_opt->count() > 0) cfg.n_walkers = s.walkers;
    if (s.burn_opt->count() > 0) cfg.n_burn = s.burn;
    if (s.steps_opt->count() > 0) cfg.n_steps = s.steps;
    cfg.stretch_a = s.stretch_a;
    cfg.seed = s.seed;
    return cfg;
}

inline json sampler_metadata_json(const forecast::SamplerMetadata& m) {
    json j;
    j["seed"] = m.seed;
    j["n_walkers"] = m.n_walkers;
    j["n_burn"] = m.n_burn;
    j["n_steps"] = m.n_steps;
    j["stretch_a"] = m.stretch_a;
    j["acceptance_fraction"] = m.acceptance_fraction;
    j["map_mu"] = m.map_mu;
    j["map_sigma"] = m.map_sigma;
    return j;
}

inline json prior_json(const forecast::PriorBox& box) {
    json j;
    j["mu_min"] = box.mu_min;
    j["mu_max"] = box.mu_max;
    j["sigma_min"] = box.sigma_min;
    j["sigma_max"] = box.sigma_max;
    return j;
}

inline int do_ingest(const CommonOpts& o) {
    const auto ds = load(o);
    if (o.format == "csv") {
        std::ostringstream out;
        racedata::write_results(ds, out);
        write_text(o.output, out.str());
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["n_records"] = ds.records().size();
    j["n_races"] = ds.races().size();
    json races = json::array();
    for (const auto& race : ds.races()) {
        json r;
        r["race_id"] = race.race_id;
        r["race_name"] = race.name;
        r["country"] = race.country;
        r["start_date"] = race.start_date.to_string();
        r["duration_hours"] = race.duration_hours;
        r["kind"] = race.kind == racedata::RaceKind::SixDay        ? "SixDay"
                    : race.kind == racedata::RaceKind::SixDaySplit ? "SixDaySplit"
                                                                   : "Other";
        r["completeness"] =
            race.completeness == racedata::Completeness::Complete ? "complete" : "partial";
        races.push_back(std::move(r));
    }
    j["races"] = std::move(races);
    json records = json::array();
    for (const auto& rec : ds.records()) {
        json r;
        r["race_id"] = rec.race_id;
        r["athlete_name"] = rec.athlete_name;
        r["gender"] = gender_label(rec.gender);
        if (rec.year_of_birth) {
            r["yob"] = *rec.year_of_birth;
        } else {
            r["yob"] = nullptr;
        }
        r["distance_miles"] = rec.distance_miles;
        records.push_back(std::move(r));
    }
    j["records"] = std::move(records);
    write_text(o.output, dump(j));
    return 0;
}

inline int do_describe(const CommonOpts& o) {
    const auto ds = load(o);
    const auto yearly = descriptive::yearly_participation(ds);
    if (o.format == "csv") {
        std::string out = "year,count\n";
        for (const auto& bin : yearly.bins) {
            out += std::to_string(bin.year) + ',' + std::to_string(bin.count) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    const auto stats = descriptive::summary_stats(ds);
    const auto participants = racedata::unique_participants(ds);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["n_records"] = ds.records().size();
    j["n_races"] = ds.races().size();
    j["first_year"] = ds.first_year();
    j["last_year"] = ds.last_year();
    j["participants"] = {{"total", participants.total},
                         {"men", participants.men},
                         {"women", participants.women}};
    j["summary"] = {{"n", stats.n},
                    {"median_miles", stats.median},
                    {"mean_miles", stats.mean},
                    {"std_miles", stats.std_dev}};
    json years = json::array();
    for (const auto& bin : yearly.bins) {
        years.push_back({{"year", bin.year}, {"count", bin.count}});
    }
    j["yearly"] = std::move(years);
    write_text(o.output, dump(j));
    return 0;
}

inline int do_fit_growth(const CommonOpts& o, double t0) {
    const auto ds = load(o);
    const auto yearly = descriptive::yearly_participation(ds);
    const auto fit = descriptive::fit_growth(yearly, t0);
    if (o.format == "csv") {
        std::string out = "year,count,model\n";
        for (const auto& bin : yearly.bins) {
            const double t = static_cast<double>(bin.year) + 0.5;
            const double model = fit.n0 * std::exp(fit.r * (t - fit.t0));
            out += std::to_string(bin.year) + ',' + std::to_string(bin.count) + ',' +
                   racedata::detail::format_double(model) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["n0"] = fit.n0;
    j["r_per_year"] = fit.r;
    j["t0"] = fit.t0;
    j["stderr_n0"] = fit.stderr_n0;
    j["stderr_r"] = fit.stderr_r;
    j["sse"] = fit.sse;
    write_text(o.output, dump(j));
    return 0;
}

inline int do_fit_lognormal(const CommonOpts& o, double bin_width, double threshold) {
    const auto ds = load(o);
    const auto hist = descriptive::distance_histogram(ds, bin_width);
    const auto fit = descriptive::fit_lognormal_truncated(hist, threshold);
    if (o.format == "csv") {
        std::string out = "lower_edge_miles,count,model\n";
        for (const auto& bin : hist.bins) {
            const double center = bin.lower_edge + 0.5 * hist.bin_width;
            const double z = (std::log(center) - fit.log_mu) / fit.log_sigma;
            const double model =
                fit.norm * math::kInvSqrt2Pi / (center * fit.log_sigma) * std::exp(-0.5 * z * z);
            out += racedata::detail::format_double(bin.lower_edge) + ',' +
                   racedata::detail::format_double(bin.count) + ',' +
                   racedata::detail::format_double(model) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["bin_width_miles"] = bin_width;
    j["threshold_miles"] = threshold;
    j["arith_mean_miles"] = fit.arith_mean;
    j["arith_std_miles"] = fit.arith_std;
    j["norm"] = fit.norm;
    j["log_mu"] = fit.log_mu;
    j["log_sigma"] = fit.log_sigma;
    j["chi2"] = fit.chi2;
    j["dof"] = fit.dof;
    j["p_value"] = fit.p_value;
    write_text(o.output, dump(j));
    return 0;
}

inline int do_progression(const CommonOpts& o) {
    if (o.gender_opt->count() == 0) throw UsageError("progression requires --gender");
    const auto gender = parse_gender(o.gender);
    const auto ds = load(o);
    const auto prog = descriptive::record_progression(ds, gender);
    if (o.format == "csv") {
        std::string out = "date,athlete_name,distance_miles\n";
        for (const auto& e : prog.entries) {
            out += e.date.to_string() + ',' + racedata::detail::csv_escape(e.athlete_name) +
                   ',' + racedata::detail::format_double(e.distance_miles) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["gender"] = gender_label(gender);
    json entries = json::array();
    for (const auto& e : prog.entries) {
        entries.push_back({{"date", e.date.to_string()},
                           {"athlete_name", e.athlete_name},
                           {"distance_miles", e.distance_miles}});
    }
    j["entries"] = std::move(entries);
    write_text(o.output, dump(j));
    return 0;
}

inline int do_exceptional(const CommonOpts& o, double thr_men, double thr_women) {
    const auto ds = load(o);
    const auto counts = descriptive::exceptional_counts(ds, thr_men, thr_women);
    if (o.format == "csv") {
        std::string out = "year,men,women\n";
        for (const auto& bin : counts.per_year) {
            out += std::to_string(bin.year) + ',' + std::to_string(bin.men) + ',' +
                   std::to_string(bin.women) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    const auto debut = descriptive::debut_and_repeat_analysis(ds, thr_men, thr_women);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["threshold_men_miles"] = thr_men;
    j["threshold_women_miles"] = thr_women;
    j["totals"] = {{"men", counts.total_men}, {"women", counts.total_women}};
    j["unique"] = {{"men", counts.unique_men}, {"women", counts.unique_women}};
    json per_year = json::array();
    for (const auto& bin : counts.per_year) {
        per_year.push_back({{"year", bin.year}, {"men", bin.men}, {"women", bin.women}});
    }
    j["per_year"] = std::move(per_year);
    json attempts = json::array();
    for (const auto& a : debut.attempts) {
        attempts.push_back({{"attempt", a.attempt},
                            {"athletes", a.athletes},
                            {"exceptional", a.exceptional}});
    }
    j["attempts"] = std::move(attempts);
    json ladder = json::array();
    json ladder_exc = json::array();
    for (std::size_t i = 0; i < descriptive::kLadderThresholds.size(); ++i) {
        ladder.push_back({{"min_races", descriptive::kLadderThresholds[i]},
                          {"athletes", debut.participation_ladder[i]}});
        ladder_exc.push_back({{"min_races", descriptive::kLadderThresholds[i]},
                              {"athletes", debut.exceptional_ladder[i]}});
    }
    j["participation_ladder"] = std::move(ladder);
    j["exceptional_ladder"] = std::move(ladder_exc);
    write_text(o.output, dump(j));
    return 0;
}

inline int do_fit_tail(const CommonOpts& o, const SamplerOpts& s, double d_min,
                       const std::string& prior_text) {
    const auto ds = load(o);
    const auto prior = parse_prior(prior_text);
    const auto X = forecast::build_tail_sample(ds, d_min);
    const auto cfg = to_config(s);
    const auto fit = forecast::fit_tail(X, prior, cfg);
    if (o.format == "csv") {
        std::string out = "mu,sigma,log_post\n";
        for (std::size_t i = 0; i < fit.chain.samples.size(); ++i) {
            out += racedata::detail::format_double(fit.chain.samples[i][0]) + ',' +
                   racedata::detail::format_double(fit.chain.samples[i][1]) + ',' +
                   racedata::detail::format_double(fit.chain.log_posts[i]) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = cfg.seed;
    j["n_walkers"] = cfg.n_walkers;
    j["n_burn"] = cfg.n_burn;
    j["n_steps"] = cfg.n_steps;
    j["stretch_a"] = cfg.stretch_a;
    j["acceptance_fraction"] = fit.chain.acceptance_fraction;
    j["map_mu"] = fit.chain.map_estimate[0];
    j["map_sigma"] = fit.chain.map_estimate[1];
    j["n"] = X.n;
    j["c"] = X.c;
    j["worst"] = X.worst;
    j["t_m_years"] = X.t_m;
    j["d_min_miles"] = d_min;
    j["prior_box"] = prior_json(prior);
    write_text(o.output, dump(j));
    return 0;
}

struct ForecastOpts {
    double d_min = 0.0;
    double record = 0.0;
    std::string prior = "-6.6:-5.9:0.05:0.5";
    std::string horizons = "1,5,10";
    double t_m = 0.0;
    double y_best = 1250.0;
    double y_worst = 250.0;
    double y_step = 1.0;
    CLI::Option* record_opt = nullptr;
    CLI::Option* t_m_opt = nullptr;
};

inline int do_forecast(const CommonOpts& o, const SamplerOpts& s, const ForecastOpts& fo) {
    const auto ds = load(o);
    const auto prior = parse_prior(fo.prior);
    const auto horizons = parse_horizons(fo.horizons);
    double d_rec = fo.record;
    if (fo.record_opt->count() == 0) {
        d_rec = 0.0;
        for (const auto& rec : ds.records()) d_rec = std::max(d_rec, rec.distance_miles);
    }
    std::optional<double> t_m;
    if (fo.t_m_opt->count() > 0) t_m = fo.t_m;
    const forecast::YGridSpec yspec{fo.y_best, fo.y_worst, fo.y_step};
    const auto result = forecast::forecast(ds, fo.d_min, d_rec, prior, to_config(s), horizons,
                                           yspec, t_m);
    if (result.non_monotone) {
        std::cerr << "warning: p-hat decreased along the performance grid "
                     "(grid or sampling noise)\n";
    }
    if (o.format == "csv") {
        std::string out = "t_f_years,p_hat,expected_best_miles\n";
        for (const auto& pt : result.expected_best_curve) {
            out += racedata::detail::format_double(pt.t_f) + ',' +
                   racedata::detail::format_double(pt.p_hat) + ',' +
                   racedata::detail::format_double(pt.miles) + '\n';
        }
        write_text(o.output, out);
        return 0;
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["record_miles"] = result.record_miles;
    j["d_min_miles"] = result.d_min_miles;
    j["prior_box"] = prior_json(result.prior);
    j["t_m"] = result.t_m;
    json hz = json::array();
    for (const auto& h : result.horizons) {
        hz.push_back({{"t_f", h.t_f}, {"p_hat", h.p_hat}});
    }
    j["horizons"] = std::move(hz);
    json curve = json::array();
    for (const auto& pt : result.expected_best_curve) {
        curve.push_back({{"t_f", pt.t_f}, {"miles", pt.miles}});
    }
    j["expected_best"] = std::move(curve);
    if (result.breakeven_years) {
        j["breakeven_years"] = *result.breakeven_years;
    } else {
        j["breakeven_years"] = nullptr;
    }
    j["sampler_metadata"] = sampler_metadata_json(result.sampler_metadata);
    write_text(o.output, dump(j));
    return 0;
}

struct SynthOpts {
    synth::SynthSpec spec;
    double c_miles = 500.0;
    std::string output;
};

inline int do_synth(const SynthOpts& so) {
    synth::SynthSpec spec = so.spec;
    spec.c = -std::log(so.c_miles);
    const auto ds = synth::generate_dataset(spec);
    std::ostringstream out;
    racedata::write_results(ds, out);
    write_text(so.output, out.str());
    if (!so.output.empty()) {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["mu_star"] = spec.mu_star;
        j["sigma_star"] = spec.sigma_star;
        j["c"] = spec.c;
        j["c_miles"] = so.c_miles;
        j["n_tail"] = spec.n;
        j["growth"] = {{"n0", spec.growth.n0}, {"r", spec.growth.r}, {"t0", spec.growth.t0}};
        j["first_year"] = spec.first_year;
        j["last_year"] = spec.last_year;
        j["bulk_log_mean"] = spec.bulk_log_mean;
        j["bulk_log_sigma"] = spec.bulk_log_sigma;
        j["seed"] = spec.seed;
        j["rng"] = std::string(rng::kAlgorithmName);
        write_text(so.output + ".meta.json", dump(j));
    }
    return 0;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"six-day race analytics and record forecasting"};
    app.require_subcommand(1);

    detail::CommonOpts ingest_o, describe_o, growth_o, lognormal_o, progression_o,
        exceptional_o, tail_o, forecast_o;
    detail::SamplerOpts tail_s, forecast_s;
    detail::ForecastOpts fo;
    detail::SynthOpts so;

    auto* ingest = app.add_subcommand("ingest", "normalize and filter a results CSV");
    detail::add_common(ingest, ingest_o);

    auto* describe = app.add_subcommand("describe", "participation and summary statistics");
    detail::add_common(describe, describe_o);

    auto* fit_growth = app.add_subcommand("fit-growth", "exponential participation fit");
    detail::add_common(fit_growth, growth_o);
    double t0 = 1981.5;
    fit_growth->add_option("--t0", t0, "growth model reference year");

    auto* fit_lognormal =
        app.add_subcommand("fit-lognormal", "truncated log-normal histogram fit");
    detail::add_common(fit_lognormal, lognormal_o);
    double bin_width = 20.0;
    double ln_threshold = 240.0;
    fit_lognormal->add_option("--bin-width", bin_width, "histogram bin width (miles)")
        ->check(CLI::PositiveNumber);
    fit_lognormal->add_option("--threshold", ln_threshold, "fit bins at or above this (miles)")
        ->check(CLI::PositiveNumber);

    auto* progression = app.add_subcommand("progression", "world record progression");
    detail::add_common(progression, progression_o);

    auto* exceptional = app.add_subcommand("exceptional", "exceptional performance tallies");
    detail::add_common(exceptional, exceptional_o);
    double thr_men = 500.0;
    double thr_women = 450.0;
    exceptional->add_option("--threshold-men", thr_men, "men's threshold (miles)")
        ->check(CLI::PositiveNumber);
    exceptional->add_option("--threshold-women", thr_women, "women's threshold (miles)")
        ->check(CLI::PositiveNumber);

    auto* fit_tail = app.add_subcommand("fit-tail", "truncated-normal tail posterior via MCMC");
    detail::add_common(fit_tail, tail_o);
    detail::add_sampler(fit_tail, tail_s);
    double tail_dmin = 0.0;
    std::string tail_prior = "-6.6:-5.9:0.05:0.5";
    fit_tail->add_option("--dmin", tail_dmin, "tail threshold (miles)")
        ->required()
        ->check(CLI::PositiveNumber);
    fit_tail->add_option("--prior", tail_prior, "prior box mu_min:mu_max:sigma_min:sigma_max");

    auto* forecast_cmd = app.add_subcommand("forecast", "record probabilities and expected best");
    detail::add_common(forecast_cmd, forecast_o);
    detail::add_sampler(forecast_cmd, forecast_s);
    forecast_cmd->add_option("--dmin", fo.d_min, "tail threshold (miles)")
        ->required()
        ->check(CLI::PositiveNumber);
    fo.record_opt = forecast_cmd->add_option(
        "--record", fo.record, "record to beat (miles; default: best in input)");
    forecast_cmd->add_option("--prior", fo.prior, "prior box mu_min:mu_max:sigma_min:sigma_max");
    forecast_cmd->add_option("--horizons", fo.horizons, "comma-separated horizons (years)");
    fo.t_m_opt = forecast_cmd->add_option("--t-m", fo.t_m, "override observed span (years)")
                     ->check(CLI::PositiveNumber);
    forecast_cmd->add_option("--y-best-miles", fo.y_best, "far end of the performance grid")
        ->check(CLI::PositiveNumber);
    forecast_cmd->add_option("--y-worst-miles", fo.y_worst, "near end of the performance grid")
        ->check(CLI::PositiveNumber);
    forecast_cmd->add_option("--y-step-miles", fo.y_step, "performance grid spacing")
        ->check(CLI::PositiveNumber);

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth_cmd->add_option("--mu", so.spec.mu_star, "tail location in x = -ln(D)");
    synth_cmd->add_option("--sigma", so.spec.sigma_star, "tail scale")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--c-miles", so.c_miles, "tail threshold (miles)")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--n", so.spec.n, "tail sample count")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", so.spec.seed, "RNG seed");
    synth_cmd->add_option("--n0", so.spec.growth.n0, "participants at t0")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--r", so.spec.growth.r, "growth rate (1/yr)");
    synth_cmd->add_option("--t0", so.spec.growth.t0, "growth reference year");
    synth_cmd->add_option("--first-year", so.spec.first_year, "first race year");
    synth_cmd->add_option("--last-year", so.spec.last_year, "last race year");
    synth_cmd->add_option("--bulk-log-mean", so.spec.bulk_log_mean, "bulk ln-distance mean");
    synth_cmd->add_option("--bulk-log-sigma", so.spec.bulk_log_sigma, "bulk ln-distance std")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--output", so.output,
                          "output CSV path; parameters go to <output>.meta.json");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("sixday");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (app.got_subcommand(ingest)) return detail::do_ingest(ingest_o);
        if (app.got_subcommand(describe)) return detail::do_describe(describe_o);
        if (app.got_subcommand(fit_growth)) return detail::do_fit_growth(growth_o, t0);
        if (app.got_subcommand(fit_lognormal)) {
            return detail::do_fit_lognormal(lognormal_o, bin_width, ln_threshold);
        }
        if (app.got_subcommand(progression)) return detail::do_progression(progression_o);
        if (app.got_subcommand(exceptional)) {
            return detail::do_exceptional(exceptional_o, thr_men, thr_women);
        }
        if (app.got_subcommand(fit_tail)) {
            return detail::do_fit_tail(tail_o, tail_s, tail_dmin, tail_prior);
        }
        if (app.got_subcommand(forecast_cmd)) {
            return detail::do_forecast(forecast_o, forecast_s, fo);
        }
        if (app.got_subcommand(synth_cmd)) return detail::do_synth(so);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const detail::UsageError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}

}  // namespace sixday::cli
