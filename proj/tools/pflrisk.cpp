// Command-line entry points: run a scenario end to end, lint scenario
// files, re-check limits against written profiles, and emit plot-ready
// data bundles.
//
// Exit codes: 0 clean, 2 configuration error, 3 limit breach, 4 numerical
// failure.

#include <CLI11.hpp>

#include "pfl/errors.hpp"
#include "pfl/runner.hpp"
#include "pfl/scenario.hpp"

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitClean = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBreach = 3;
constexpr int kExitNumerical = 4;

void print_report(const pfl::RunReport& report) {
    std::printf("scenario   %s (hash %s)\n", report.scenario_name.c_str(),
                report.scenario_hash.c_str());
    std::printf("paths      %zu  eval dates %zu  seed %llu\n", report.n_paths,
                report.n_eval_dates, static_cast<unsigned long long>(report.seed));
    std::printf("elapsed    %.2fs\n", report.elapsed_seconds);
    if (report.incurred_cva_x)
        std::printf("incurred CVA X = %.6g\n", *report.incurred_cva_x);
    for (const auto& p : report.profiles)
        std::printf("profile    %-5s q=%-5g %s\n", pfl::metric_name(p.kind).c_str(), p.q,
                    p.csv_path.c_str());
    for (const auto& r : report.ratios)
        std::printf("ratio      q=%-5g %s\n", r.q, r.csv_path.c_str());
    for (const auto& h : report.histogram_files) std::printf("histogram  %s\n", h.c_str());
    if (!report.cube_file.empty()) std::printf("cube       %s\n", report.cube_file.c_str());
    for (const auto& b : report.breaches) {
        if (b.breached())
            std::printf("limit      %-5s q=%-5g limit=%.6g BREACH at t=%.4f\n",
                        pfl::metric_name(b.metric).c_str(), b.q, b.limit, *b.first_breach_time);
        else
            std::printf("limit      %-5s q=%-5g limit=%.6g ok (max utilization %.3f)\n",
                        pfl::metric_name(b.metric).c_str(), b.q, b.limit, b.max_utilization);
    }
    std::printf("manifest   %s\n", report.manifest_path.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterparty exposure and potential-future-loss engine"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::vector<std::string> overrides;
    pfl::RunOptions options;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write profiles and reports");
    run->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    run->add_option("--override", overrides, "key=value scenario overrides (dotted paths)");
    run->add_option("--threads", options.threads, "Worker thread count (0 = all cores)");
    run->add_option("--output-dir", options.output_dir, "Output directory override");
    run->add_flag("--cube-dump", options.cube_dump, "Also dump the exposure cube (PFLC binary)");

    auto* validate = app.add_subcommand("validate", "Lint a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    validate->add_option("--override", overrides, "key=value scenario overrides");

    std::string manifest_path;
    std::string plot_dir = "plots";
    auto* plot = app.add_subcommand("plot-data", "Emit plot-ready CSV bundles from a finished run");
    plot->add_option("manifest", manifest_path, "run_manifest.json of a completed run")->required();
    plot->add_option("--plot-dir", plot_dir, "Bundle output directory");

    std::vector<std::string> profile_paths;
    std::string limits_csv, counterparty = "CPTY", netting_set = "NS";
    auto* check = app.add_subcommand("check-limits", "Check profile files against a limits file");
    check->add_option("--profiles", profile_paths, "Profile JSON files")->required();
    check->add_option("--limits", limits_csv, "Limits CSV")->required();
    check->add_option("--counterparty", counterparty, "Counterparty id");
    check->add_option("--netting-set", netting_set, "Netting set id");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto scenario = pfl::load_scenario(scenario_path, overrides);
            const auto report = pfl::run_scenario(scenario, options);
            print_report(report);
            return report.any_breach() ? kExitBreach : kExitClean;
        }
        if (validate->parsed()) {
            const auto scenario = pfl::load_scenario(scenario_path, overrides);
            std::printf("ok: %s (hash %s)\n", scenario.name.c_str(), scenario.hash.c_str());
            return kExitClean;
        }
        if (plot->parsed()) {
            const auto report = pfl::load_run_report(manifest_path);
            const auto bundle = pfl::emit_plot_data(report, plot_dir);
            std::printf("bundle manifest %s (%zu files)\n", bundle.manifest_path.c_str(),
                        bundle.files.size());
            return kExitClean;
        }
        if (check->parsed()) {
            const auto reports =
                pfl::check_limits_against(profile_paths, limits_csv, counterparty, netting_set);
            bool breach = false;
            for (const auto& b : reports) {
                breach = breach || b.breached();
                if (b.breached())
                    std::printf("%-5s q=%-5g limit=%.6g BREACH at t=%.4f\n",
                                pfl::metric_name(b.metric).c_str(), b.q, b.limit,
                                *b.first_breach_time);
                else
                    std::printf("%-5s q=%-5g limit=%.6g ok\n", pfl::metric_name(b.metric).c_str(),
                                b.q, b.limit);
            }
            return breach ? kExitBreach : kExitClean;
        }
    } catch (const pfl::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const pfl::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitConfig;
    } catch (const pfl::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitClean;
}
