#include "pfl/runner.hpp"

#include "pfl/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pfl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_q(double q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string resolve_output_dir(const Scenario& scenario, const RunOptions& options) {
    if (!options.output_dir.empty()) return options.output_dir;
    if (const char* env = std::getenv("PFL_OUTPUT_DIR")) {
        if (*env) return std::string(env) + "/" + scenario.name;
    }
    if (!scenario.output_dir.empty()) return scenario.output_dir;
    return "out/" + scenario.name;
}

struct HistogramSeries {
    std::string label;
    int day = 0;
    std::vector<double> samples;
};

std::string write_histogram_csv(const HistogramSeries& series, int bins, const std::string& dir) {
    double lo = *std::min_element(series.samples.begin(), series.samples.end());
    double hi = *std::max_element(series.samples.begin(), series.samples.end());
    if (hi <= lo) hi = lo + 1.0;
    const double width = (hi - lo) / bins;

    std::vector<std::size_t> counts(bins, 0);
    for (double v : series.samples) {
        auto b = static_cast<long>((v - lo) / width);
        if (b < 0) b = 0;
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }

    std::ostringstream os;
    os << "bin_low,bin_high,count,density\n";
    const double n = static_cast<double>(series.samples.size());
    for (int b = 0; b < bins; ++b) {
        const double bl = lo + b * width;
        os << fmt_double(bl) << ',' << fmt_double(bl + width) << ',' << counts[b] << ','
           << fmt_double(counts[b] / (n * width)) << '\n';
    }
    char name[128];
    std::snprintf(name, sizeof name, "hist_%s_t%.4f.csv", series.label.c_str(),
                  days_to_years(series.day));
    const std::string path = dir + "/" + name;
    write_text(path, os.str());
    return path;
}

json breach_to_json(const BreachReport& b, const TimeGrid* grid) {
    json j;
    j["counterparty"] = b.counterparty;
    j["netting_set"] = b.netting_set;
    j["metric"] = metric_name(b.metric);
    j["q"] = b.q;
    j["limit"] = b.limit;
    j["breached"] = b.breached();
    if (b.first_breach_time) j["first_breach_t_years"] = *b.first_breach_time;
    else j["first_breach_t_years"] = nullptr;
    if (std::isfinite(b.max_utilization)) j["max_utilization"] = b.max_utilization;
    else j["max_utilization"] = "inf";
    json headroom = json::array();
    for (double h : b.headroom) headroom.push_back(h);
    j["headroom"] = headroom;
    if (grid) {
        json t = json::array();
        for (double y : grid->years()) t.push_back(y);
        j["t_years"] = t;
    }
    return j;
}

} // namespace

bool RunReport::any_breach() const {
    return std::any_of(breaches.begin(), breaches.end(),
                       [](const BreachReport& b) { return b.breached(); });
}

void write_profile_csv(const Profile& profile, const std::string& path) {
    std::ostringstream os;
    os << "t_years,value\n";
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        os << fmt_double(profile.grid.year(i)) << ',' << fmt_double(profile.values[i]) << '\n';
    write_text(path, os.str());
}

void write_profile_json(const Profile& profile, const std::string& scenario_hash,
                        std::optional<double> incurred_cva_x, const std::string& path) {
    json j;
    j["metric"] = metric_name(profile.kind);
    j["q"] = profile.q;
    j["lgd"] = profile.lgd_description;
    j["scenario_hash"] = scenario_hash;
    if (incurred_cva_x) j["incurred_cva_x"] = *incurred_cva_x;
    json t = json::array(), v = json::array();
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        t.push_back(profile.grid.year(i));
        v.push_back(profile.values[i]);
    }
    j["t_years"] = t;
    j["values"] = v;
    write_text(path, j.dump(2) + "\n");
}

Profile load_profile_json(const std::string& path, std::optional<double>* incurred_cva_x,
                          std::string* counterparty, std::string* netting_set) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open profile " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InputError(path + " is not valid JSON");

    Profile p;
    p.kind = metric_from_name(j.at("metric").get<std::string>());
    p.q = j.at("q").get<double>();
    p.lgd_description = j.value("lgd", "");
    std::vector<int> days;
    for (const auto& t : j.at("t_years")) days.push_back(years_to_days_exact(t.get<double>()));
    p.grid = TimeGrid(std::move(days));
    for (const auto& v : j.at("values")) p.values.push_back(v.get<double>());
    if (p.values.size() != p.grid.size()) throw InputError(path + ": t/value length mismatch");

    if (incurred_cva_x) {
        if (j.contains("incurred_cva_x")) *incurred_cva_x = j["incurred_cva_x"].get<double>();
        else *incurred_cva_x = std::nullopt;
    }
    if (counterparty && j.contains("counterparty")) *counterparty = j["counterparty"];
    if (netting_set && j.contains("netting_set")) *netting_set = j["netting_set"];
    return p;
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();

    RunReport report;
    report.scenario_name = scenario.name;
    report.scenario_hash = scenario.hash;
    report.seed = scenario.seed;
    report.n_paths = scenario.n_paths;
    report.output_dir = resolve_output_dir(scenario, options);
    fs::create_directories(report.output_dir);

    const auto grids = build_scenario_grids(scenario);

    ExposureJob job;
    job.model = scenario.model;
    job.measure = scenario.measure;
    job.sim_grid = grids.sim_grid;
    job.eval_indices = grids.eval_indices;
    job.portfolio = scenario.portfolio;
    job.csa = scenario.csa;
    job.im_terms = scenario.im_terms;
    job.deltas = scenario.deltas;
    job.n_paths = scenario.n_paths;
    job.seed = scenario.seed;
    job.antithetic = scenario.antithetic;
    job.with_shocks = std::holds_alternative<CorrelatedLgd>(scenario.lgd);
    job.scenario_hash = scenario.hash;
    job.block_size = options.block_size;
    job.threads = options.threads;

    ExposureCube cube = build_exposure_cube(job);
    report.n_eval_dates = cube.n_dates();

    // Loss-side inputs shared by the adjusted metrics.
    std::optional<IncurredCVA> x;
    std::vector<double> x_schedule;
    if (scenario.credit_curve) {
        x = incurred_cva(cube, *scenario.credit_curve, scenario.lgd);
        report.incurred_cva_x = x->x;
        if (scenario.cva_adjustment == CvaAdjustment::Forward)
            x_schedule = forward_cva_schedule(cube, *scenario.credit_curve, scenario.lgd);
    }
    const ProtectionProfile y = protection_of(scenario);

    std::vector<Profile> computed;
    for (const auto& request : scenario.metrics) {
        Profile profile;
        switch (request.kind) {
        case MetricKind::PFE:
            profile = pfe_profile(cube, request.q);
            break;
        case MetricKind::PFL:
            profile = pfl_profile(cube, scenario.lgd, request.q);
            break;
        case MetricKind::aPFL:
            profile = x_schedule.empty()
                          ? apfl_profile(cube, scenario.lgd, *x, request.q)
                          : apfl_profile_with_schedule(cube, scenario.lgd, x_schedule, request.q);
            break;
        case MetricKind::paPFL:
            profile = x_schedule.empty()
                          ? papfl_profile(cube, scenario.lgd, *x, y, request.q)
                          : papfl_profile_with_schedule(cube, scenario.lgd, x_schedule, y, request.q);
            break;
        }
        const std::string stem =
            report.output_dir + "/profile_" + metric_name(request.kind) + "_q" + fmt_q(request.q);
        write_profile_csv(profile, stem + ".csv");
        const bool adjusted =
            request.kind == MetricKind::aPFL || request.kind == MetricKind::paPFL;
        write_profile_json(profile, scenario.hash,
                           adjusted ? std::optional<double>(x->x) : std::nullopt, stem + ".json");
        report.profiles.push_back({request.kind, request.q, stem + ".csv", stem + ".json"});
        computed.push_back(std::move(profile));
    }

    // Comparison series (PFL - PFE)/PFE per shared quantile.
    for (const auto& pfe : computed) {
        if (pfe.kind != MetricKind::PFE) continue;
        for (const auto& pfl : computed) {
            if (pfl.kind != MetricKind::PFL || pfl.q != pfe.q) continue;
            std::ostringstream os;
            os << "t_years,ratio\n";
            for (std::size_t i = 0; i < pfe.values.size(); ++i) {
                if (pfe.values[i] <= 0.0) continue;
                os << fmt_double(pfe.grid.year(i)) << ','
                   << fmt_double((pfl.values[i] - pfe.values[i]) / pfe.values[i]) << '\n';
            }
            const std::string path =
                report.output_dir + "/ratio_pfl_vs_pfe_q" + fmt_q(pfe.q) + ".csv";
            write_text(path, os.str());
            report.ratios.push_back({pfe.q, path});
        }
    }

    // Distribution histograms at the requested dates (raw exposures; the
    // uncollateralized counterpart reruns the same paths without the CSA).
    if (scenario.histogram) {
        const auto& req = *scenario.histogram;
        std::vector<HistogramSeries> series;
        for (int day : req.date_days) {
            const auto e = cube.grid().index_of_day(day);
            if (!e) throw ConfigError("histogram date is not on the evaluation grid");
            const auto slice = cube.raw_slice(*e);
            series.push_back({scenario.csa ? "exposure" : "uncollateralized", day,
                              {slice.begin(), slice.end()}});
        }
        if (req.include_uncollateralized && scenario.csa) {
            ExposureJob uncol = job;
            uncol.csa.reset();
            uncol.im_terms = IMTerms{};
            uncol.eval_indices.clear();
            for (int day : req.date_days)
                uncol.eval_indices.push_back(*grids.sim_grid.index_of_day(day));
            ExposureCube flat = build_exposure_cube(uncol);
            for (std::size_t i = 0; i < req.date_days.size(); ++i) {
                const auto slice = flat.raw_slice(i);
                series.push_back(
                    {"uncollateralized", req.date_days[i], {slice.begin(), slice.end()}});
            }
        }
        for (const auto& hs : series)
            report.histogram_files.push_back(write_histogram_csv(hs, req.bins, report.output_dir));
    }

    // Limit checks: aPFL/paPFL limits are shifted by the same incurred CVA
    // that shifted their profiles.
    if (!scenario.limits_file.empty()) {
        const auto limits = load_limits_csv(scenario.limits_file);
        for (const auto& spec : limits) {
            if (spec.counterparty != scenario.counterparty ||
                spec.netting_set != scenario.portfolio.netting_set)
                continue;
            for (const auto& profile : computed) {
                if (profile.kind != spec.metric || profile.q != spec.q) continue;
                LimitSpec effective = spec;
                if (spec.metric == MetricKind::aPFL || spec.metric == MetricKind::paPFL) {
                    if (!x) throw ConfigError("aPFL/paPFL limit needs a credit_curve in the scenario");
                    effective = adjust_limit(spec, *x).spec;
                }
                report.breaches.push_back(check_limit(profile, effective));
            }
        }
        json arr = json::array();
        const TimeGrid* grid = computed.empty() ? nullptr : &computed.front().grid;
        for (std::size_t i = 0; i < report.breaches.size(); ++i)
            arr.push_back(breach_to_json(report.breaches[i], grid));
        json breach_doc;
        breach_doc["scenario_hash"] = scenario.hash;
        breach_doc["reports"] = arr;
        write_text(report.output_dir + "/breach_report.json", breach_doc.dump(2) + "\n");
    }

    if (options.cube_dump) {
        report.cube_file = report.output_dir + "/cube.pflc";
        dump_cube(cube, report.cube_file);
    }

    write_text(report.output_dir + "/scenario_resolved.json", serialize_scenario(scenario));

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Manifest last: every referenced file exists by now. The timestamp and
    // timing fields are the only nondeterministic bytes a run produces.
    json manifest;
    manifest["scenario_name"] = report.scenario_name;
    manifest["scenario_hash"] = report.scenario_hash;
    manifest["counterparty"] = scenario.counterparty;
    manifest["netting_set"] = scenario.portfolio.netting_set;
    manifest["seed"] = report.seed;
    manifest["n_paths"] = report.n_paths;
    manifest["n_eval_dates"] = report.n_eval_dates;
    manifest["elapsed_seconds"] = report.elapsed_seconds;
    manifest["generated_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    if (report.incurred_cva_x) manifest["incurred_cva_x"] = *report.incurred_cva_x;
    json profs = json::array();
    for (const auto& p : report.profiles)
        profs.push_back({{"metric", metric_name(p.kind)},
                         {"q", p.q},
                         {"csv", p.csv_path},
                         {"json", p.json_path}});
    manifest["profiles"] = profs;
    json ratios = json::array();
    for (const auto& r : report.ratios) ratios.push_back({{"q", r.q}, {"csv", r.csv_path}});
    manifest["ratios"] = ratios;
    manifest["histograms"] = report.histogram_files;
    if (!report.cube_file.empty()) manifest["cube"] = report.cube_file;
    manifest["breached"] = report.any_breach();

    report.manifest_path = report.output_dir + "/run_manifest.json";
    write_text(report.manifest_path, manifest.dump(2) + "\n");
    return report;
}

RunReport load_run_report(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw InputError("cannot open run manifest " + manifest_path);
    json m = json::parse(in, nullptr, false);
    if (m.is_discarded()) throw InputError(manifest_path + " is not valid JSON");

    RunReport report;
    report.scenario_name = m.at("scenario_name");
    report.scenario_hash = m.at("scenario_hash");
    report.seed = m.at("seed").get<std::uint64_t>();
    report.n_paths = m.at("n_paths").get<std::size_t>();
    report.n_eval_dates = m.at("n_eval_dates").get<std::size_t>();
    report.elapsed_seconds = m.value("elapsed_seconds", 0.0);
    report.output_dir = fs::path(manifest_path).parent_path().string();
    if (m.contains("incurred_cva_x")) report.incurred_cva_x = m["incurred_cva_x"].get<double>();
    for (const auto& p : m.at("profiles"))
        report.profiles.push_back({metric_from_name(p.at("metric").get<std::string>()),
                                   p.at("q").get<double>(), p.at("csv").get<std::string>(),
                                   p.at("json").get<std::string>()});
    for (const auto& r : m.value("ratios", json::array()))
        report.ratios.push_back({r.at("q").get<double>(), r.at("csv").get<std::string>()});
    for (const auto& h : m.value("histograms", json::array()))
        report.histogram_files.push_back(h.get<std::string>());
    if (m.contains("cube")) report.cube_file = m["cube"].get<std::string>();
    report.manifest_path = manifest_path;
    return report;
}

PlotBundle emit_plot_data(const RunReport& report, const std::string& plot_dir) {
    fs::create_directories(plot_dir);
    PlotBundle bundle;
    json manifest;
    json series = json::array();

    // Profile overlays per quantile: one CSV with a column per metric.
    std::vector<double> qs;
    for (const auto& p : report.profiles)
        if (std::find(qs.begin(), qs.end(), p.q) == qs.end()) qs.push_back(p.q);
    for (double q : qs) {
        std::vector<std::pair<MetricKind, Profile>> profiles;
        for (const auto& p : report.profiles)
            if (p.q == q) profiles.emplace_back(p.kind, load_profile_json(p.json_path));
        if (profiles.empty()) continue;
        std::ostringstream os;
        os << "t_years";
        for (const auto& [kind, _] : profiles) os << ',' << metric_name(kind);
        os << '\n';
        const auto& grid = profiles.front().second.grid;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            os << fmt_double(grid.year(i));
            for (const auto& [_, prof] : profiles) os << ',' << fmt_double(prof.values[i]);
            os << '\n';
        }
        const std::string path = plot_dir + "/overlay_q" + fmt_q(q) + ".csv";
        write_text(path, os.str());
        bundle.files.push_back(path);
        json entry;
        entry["name"] = "profile overlay q=" + fmt_q(q);
        entry["file"] = path;
        json cols = json::array();
        for (const auto& [kind, _] : profiles) cols.push_back(metric_name(kind));
        entry["columns"] = cols;
        series.push_back(entry);
    }

    for (const auto& r : report.ratios) {
        series.push_back({{"name", "(PFL-PFE)/PFE q=" + fmt_q(r.q)}, {"file", r.csv_path}});
        bundle.files.push_back(r.csv_path);
    }
    for (const auto& h : report.histogram_files) {
        series.push_back({{"name", fs::path(h).stem().string()}, {"file", h}});
        bundle.files.push_back(h);
    }

    manifest["scenario_hash"] = report.scenario_hash;
    manifest["series"] = series;
    bundle.manifest_path = plot_dir + "/plot_manifest.json";
    write_text(bundle.manifest_path, manifest.dump(2) + "\n");
    return bundle;
}

std::vector<BreachReport> check_limits_against(const std::vector<std::string>& profile_json_paths,
                                               const std::string& limits_csv,
                                               const std::string& counterparty,
                                               const std::string& netting_set) {
    const auto limits = load_limits_csv(limits_csv);
    std::vector<BreachReport> reports;
    for (const auto& path : profile_json_paths) {
        std::optional<double> x;
        Profile profile = load_profile_json(path, &x);
        for (const auto& spec : limits) {
            if (spec.counterparty != counterparty || spec.netting_set != netting_set) continue;
            if (spec.metric != profile.kind || std::fabs(spec.q - profile.q) > 1e-12) continue;
            LimitSpec effective = spec;
            if (spec.metric == MetricKind::aPFL || spec.metric == MetricKind::paPFL) {
                if (!x)
                    throw ConfigError(path +
                                      ": adjusted profile lacks incurred_cva_x; cannot pair the "
                                      "limit adjustment");
                effective = adjust_limit(spec, IncurredCVA{*x}).spec;
            }
            reports.push_back(check_limit(profile, effective));
        }
    }
    return reports;
}

} // namespace pfl
