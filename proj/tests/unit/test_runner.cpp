#include <doctest.h>

#include "pfl/errors.hpp"
#include "pfl/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pfl;
namespace fs = std::filesystem;

namespace {

const std::string kScenarioDir = PFL_SCENARIO_DIR;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunReport run_small(const std::string& name, const std::string& out,
                    std::vector<std::string> extra = {}) {
    std::vector<std::string> overrides{"n_paths=2000"};
    for (auto& e : extra) overrides.push_back(std::move(e));
    const auto scenario = load_scenario(kScenarioDir + "/" + name + ".scenario.json", overrides);
    RunOptions options;
    options.output_dir = out;
    options.threads = 2;
    return run_scenario(scenario, options);
}

} // namespace

TEST_CASE("a run writes every artifact it reports") {
    const std::string out = "/tmp/pfl_run_artifacts";
    fs::remove_all(out);
    const auto report = run_small("fig1", out);
    for (const auto& p : report.profiles) {
        CHECK(fs::exists(p.csv_path));
        CHECK(fs::exists(p.json_path));
    }
    for (const auto& r : report.ratios) CHECK(fs::exists(r.csv_path));
    for (const auto& h : report.histogram_files) CHECK(fs::exists(h));
    CHECK(fs::exists(report.manifest_path));
    CHECK(fs::exists(out + "/scenario_resolved.json"));
    fs::remove_all(out);
}

TEST_CASE("equal seeds produce byte-identical profile files") {
    const std::string out_a = "/tmp/pfl_run_det_a";
    const std::string out_b = "/tmp/pfl_run_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const auto a = run_small("usd_irs_collat", out_a);
    const auto b = run_small("usd_irs_collat", out_b);
    REQUIRE(a.profiles.size() == b.profiles.size());
    for (std::size_t i = 0; i < a.profiles.size(); ++i)
        CHECK(slurp(a.profiles[i].csv_path) == slurp(b.profiles[i].csv_path));
    for (std::size_t i = 0; i < a.ratios.size(); ++i)
        CHECK(slurp(a.ratios[i].csv_path) == slurp(b.ratios[i].csv_path));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("different seeds change the outputs") {
    const std::string out_a = "/tmp/pfl_run_seed_a";
    const std::string out_b = "/tmp/pfl_run_seed_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const auto a = run_small("fig1", out_a);
    const auto b = run_small("fig1", out_b, {"seed=1"});
    CHECK(slurp(a.profiles[0].csv_path) != slurp(b.profiles[0].csv_path));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("a tiny limit is reported as breached") {
    const std::string out = "/tmp/pfl_run_breach";
    fs::remove_all(out);
    // usd_irs_uncollat carries a limits file; shrink the paths and check
    // against a one-line limits file of almost nothing.
    const std::string limits = "/tmp/pfl_tiny_limits.csv";
    {
        std::ofstream f(limits);
        f << "counterparty,netting_set,metric,q,limit\n";
        f << "CPTY-1,NS-1,pfe,0.95,1000\n";
    }
    const auto report = run_small("usd_irs_uncollat", out, {"limits_file=" + fs::absolute(limits).string()});
    REQUIRE(!report.breaches.empty());
    CHECK(report.any_breach());
    CHECK(fs::exists(out + "/breach_report.json"));
    fs::remove(limits);
    fs::remove_all(out);
}

TEST_CASE("plot bundle overlays align PFE and PFL on the shared grid") {
    const std::string out = "/tmp/pfl_run_plot";
    fs::remove_all(out);
    const auto report = run_small("usd_irs_collat", out);
    const auto bundle = emit_plot_data(report, out + "/plots");
    CHECK(fs::exists(bundle.manifest_path));
    bool found_overlay = false;
    for (const auto& f : bundle.files) {
        if (f.find("overlay_q0.95") == std::string::npos) continue;
        found_overlay = true;
        std::ifstream in(f);
        std::string header;
        std::getline(in, header);
        CHECK(header == "t_years,pfe,pfl");
        std::size_t rows = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        CHECK(rows == report.n_eval_dates);
    }
    CHECK(found_overlay);
    fs::remove_all(out);
}

TEST_CASE("an empty metrics request still yields a valid empty bundle") {
    const std::string out = "/tmp/pfl_run_empty";
    fs::remove_all(out);
    const auto scenario =
        load_scenario(kScenarioDir + "/fig1.scenario.json",
                      {"n_paths=500", "metrics=[]", "histogram={\"dates_years\":[1.0]}"});
    RunOptions options;
    options.output_dir = out;
    auto report = run_scenario(scenario, options);
    report.histogram_files.clear(); // bundle only the (absent) profiles
    const auto bundle = emit_plot_data(report, out + "/plots");
    CHECK(fs::exists(bundle.manifest_path));
    CHECK(bundle.files.empty());
    fs::remove_all(out);
}

TEST_CASE("check-limits pairs adjusted profiles with adjusted limits") {
    const std::string out = "/tmp/pfl_run_checklimits";
    fs::remove_all(out);
    const auto report = run_small("usd_irs_uncollat", out);
    std::vector<std::string> jsons;
    for (const auto& p : report.profiles) jsons.push_back(p.json_path);

    const std::string limits = "/tmp/pfl_check_limits.csv";
    {
        std::ofstream f(limits);
        f << "counterparty,netting_set,metric,q,limit\n";
        f << "CPTY-1,NS-1,pfe,0.95,99000000\n";
        f << "CPTY-1,NS-1,apfl,0.95,15000000\n";
    }
    const auto reports = check_limits_against(jsons, limits, "CPTY-1", "NS-1");
    REQUIRE(reports.size() == 2);
    for (const auto& r : reports) {
        if (r.metric == MetricKind::aPFL) {
            // limit was shifted down by the run's incurred CVA
            CHECK(r.limit < 15000000.0);
        } else {
            CHECK(r.limit == 99000000.0);
        }
    }
    fs::remove(limits);
    fs::remove_all(out);
}

TEST_CASE("run manifest reloads into an equivalent report") {
    const std::string out = "/tmp/pfl_run_manifest";
    fs::remove_all(out);
    const auto report = run_small("fig1", out);
    const auto loaded = load_run_report(report.manifest_path);
    CHECK(loaded.scenario_hash == report.scenario_hash);
    CHECK(loaded.n_paths == report.n_paths);
    CHECK(loaded.profiles.size() == report.profiles.size());
    fs::remove_all(out);
}
