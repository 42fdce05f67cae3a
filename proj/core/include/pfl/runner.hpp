#pragma once

#include "pfl/exposure.hpp"
#include "pfl/limits.hpp"
#include "pfl/metrics.hpp"
#include "pfl/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfl {

struct RunOptions {
    unsigned threads = 0;           // 0 = hardware concurrency
    std::string output_dir;         // overrides scenario + environment
    bool cube_dump = false;
    std::size_t block_size = 8192;
};

struct ProfileArtifact {
    MetricKind kind = MetricKind::PFE;
    double q = 0.95;
    std::string csv_path;
    std::string json_path;
};

struct RatioArtifact {
    double q = 0.95;
    std::string csv_path; // (PFL - PFE)/PFE where PFE > 0
};

// What a run produced: every referenced file is written before the report
// is finalized.
struct RunReport {
    std::string scenario_name;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::size_t n_eval_dates = 0;
    double elapsed_seconds = 0.0;
    std::string output_dir;
    std::vector<ProfileArtifact> profiles;
    std::vector<RatioArtifact> ratios;
    std::vector<std::string> histogram_files;
    std::vector<BreachReport> breaches;
    std::optional<double> incurred_cva_x;
    std::string cube_file;      // when dumped
    std::string manifest_path;

    bool any_breach() const;
};

// Simulation -> metrics -> limit checks -> files. Deterministic outputs for
// a fixed seed (the manifest's timestamp/timing fields aside).
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// run_manifest.json written by run_scenario, reloadable for plot-data and
// check-limits.
RunReport load_run_report(const std::string& manifest_path);

struct PlotBundle {
    std::string manifest_path;
    std::vector<std::string> files;
};

// Assembles plot-ready data from a completed run: profile overlays per
// quantile (PFE/PFL columns on the shared grid), ratio series and
// distribution histograms, with a manifest naming each series.
PlotBundle emit_plot_data(const RunReport& report, const std::string& plot_dir);

// Profiles (JSON artifacts) + limits file -> breach reports. aPFL/paPFL
// limits are shifted by the profile's embedded incurred CVA so profile and
// limit adjustments cannot diverge.
std::vector<BreachReport> check_limits_against(const std::vector<std::string>& profile_json_paths,
                                               const std::string& limits_csv,
                                               const std::string& counterparty,
                                               const std::string& netting_set);

// Writers shared by the CLI.
void write_profile_csv(const Profile& profile, const std::string& path);
void write_profile_json(const Profile& profile, const std::string& scenario_hash,
                        std::optional<double> incurred_cva_x, const std::string& path);
Profile load_profile_json(const std::string& path, std::optional<double>* incurred_cva_x = nullptr,
                          std::string* counterparty = nullptr, std::string* netting_set = nullptr);

} // namespace pfl
