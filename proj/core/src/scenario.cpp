#include "pfl/scenario.hpp"

#include "pfl/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pfl {

using nlohmann::json;
namespace fs = std::filesystem;

bool Scenario::operator==(const Scenario& other) const {
    return name == other.name && counterparty == other.counterparty && model == other.model &&
           measure == other.measure && grid == other.grid && n_paths == other.n_paths &&
           seed == other.seed && antithetic == other.antithetic && portfolio == other.portfolio &&
           csa == other.csa && im_terms == other.im_terms && deltas == other.deltas &&
           lgd == other.lgd &&
           ((credit_curve.has_value() && other.credit_curve.has_value() &&
             credit_curve->cds_spread == other.credit_curve->cds_spread &&
             credit_curve->lgd == other.credit_curve->lgd) ||
            (!credit_curve.has_value() && !other.credit_curve.has_value())) &&
           protection == other.protection && cva_adjustment == other.cva_adjustment &&
           metrics == other.metrics && histogram == other.histogram &&
           limits_file == other.limits_file && output_dir == other.output_dir;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path.empty() ? msg : path + ": " + msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) fail(path, "missing required key '" + key + "'");
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

ModelSpec parse_model(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::string type = as_string(require(obj, "type", path), path + ".type");
    if (type == "gbm") {
        reject_unknown_keys(obj, {"type", "spot", "drift_per_year", "vol_per_sqrt_year"}, path);
        GbmSpec m;
        m.spot = as_number(require(obj, "spot", path), path + ".spot");
        m.drift = as_number(require(obj, "drift_per_year", path), path + ".drift_per_year");
        m.vol = as_number(require(obj, "vol_per_sqrt_year", path), path + ".vol_per_sqrt_year");
        return m;
    }
    if (type == "short_rate_1f") {
        reject_unknown_keys(obj,
                            {"type", "mean_reversion_per_year", "vol_per_sqrt_year",
                             "initial_zero_rate_per_year"},
                            path);
        ShortRate1FSpec m;
        m.mean_reversion =
            as_number(require(obj, "mean_reversion_per_year", path), path + ".mean_reversion_per_year");
        m.vol = as_number(require(obj, "vol_per_sqrt_year", path), path + ".vol_per_sqrt_year");
        m.initial_rate = as_number(require(obj, "initial_zero_rate_per_year", path),
                                   path + ".initial_zero_rate_per_year");
        return m;
    }
    fail(path + ".type", "unknown model type '" + type + "' (gbm | short_rate_1f)");
}

Portfolio parse_portfolio(const json& obj, const ModelSpec& model, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, {"netting_set", "trades"}, path);
    Portfolio p;
    p.netting_set = as_string(require(obj, "netting_set", path), path + ".netting_set");
    const json& trades = require(obj, "trades", path);
    if (!trades.is_array() || trades.empty()) fail(path + ".trades", "expected a non-empty array");

    for (std::size_t i = 0; i < trades.size(); ++i) {
        const std::string tp = path + ".trades[" + std::to_string(i) + "]";
        const json& t = trades[i];
        const std::string type = as_string(require(t, "type", tp), tp + ".type");
        if (type == "swap") {
            reject_unknown_keys(t,
                                {"type", "notional", "direction", "fixed_rate_per_year",
                                 "start_years", "maturity_years", "payments_per_year"},
                                tp);
            SwapSpec s;
            s.notional = as_number(require(t, "notional", tp), tp + ".notional");
            const std::string dir = as_string(require(t, "direction", tp), tp + ".direction");
            if (dir == "pay_fixed") s.direction = SwapDirection::PayFixed;
            else if (dir == "receive_fixed") s.direction = SwapDirection::ReceiveFixed;
            else fail(tp + ".direction", "expected pay_fixed | receive_fixed");
            s.start_day = years_to_days_exact(
                t.contains("start_years") ? as_number(t["start_years"], tp + ".start_years") : 0.0);
            s.maturity_day =
                years_to_days_exact(as_number(require(t, "maturity_years", tp), tp + ".maturity_years"));
            s.frequency = t.contains("payments_per_year")
                              ? as_int(t["payments_per_year"], tp + ".payments_per_year")
                              : 1;
            const json& rate = require(t, "fixed_rate_per_year", tp);
            if (rate.is_string()) {
                if (rate.get<std::string>() != "atm")
                    fail(tp + ".fixed_rate_per_year", "expected a number or \"atm\"");
                s.fixed_rate = par_rate(model, s.start_day, s.maturity_day, s.frequency);
            } else {
                s.fixed_rate = as_number(rate, tp + ".fixed_rate_per_year");
            }
            p.trades.emplace_back(s);
        } else if (type == "forward") {
            reject_unknown_keys(t, {"type", "units", "strike", "maturity_years"}, tp);
            ForwardSpec f;
            f.units = as_number(require(t, "units", tp), tp + ".units");
            f.strike = t.contains("strike") ? as_number(t["strike"], tp + ".strike") : 0.0;
            f.maturity_day =
                years_to_days_exact(as_number(require(t, "maturity_years", tp), tp + ".maturity_years"));
            p.trades.emplace_back(f);
        } else {
            fail(tp + ".type", "unknown trade type '" + type + "' (swap | forward)");
        }
    }
    return p;
}

CSATerms parse_csa(const json& obj, const std::string& path) {
    reject_unknown_keys(obj,
                        {"threshold", "minimum_transfer_amount", "independent_amount",
                         "call_frequency_days", "mpor_business_days", "flow_netting"},
                        path);
    CSATerms csa;
    csa.threshold = as_number(require(obj, "threshold", path), path + ".threshold");
    csa.mta = as_number(require(obj, "minimum_transfer_amount", path),
                        path + ".minimum_transfer_amount");
    if (obj.contains("independent_amount"))
        csa.independent_amount = as_number(obj["independent_amount"], path + ".independent_amount");
    if (obj.contains("call_frequency_days"))
        csa.call_frequency_days = as_int(obj["call_frequency_days"], path + ".call_frequency_days");
    csa.mpor_days = as_int(require(obj, "mpor_business_days", path), path + ".mpor_business_days");
    if (obj.contains("flow_netting"))
        csa.flow_netting = as_bool(obj["flow_netting"], path + ".flow_netting");
    validate_csa(csa);
    return csa;
}

std::vector<ScheduleBucket> parse_im_table_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open IM schedule table " + file);
    std::vector<ScheduleBucket> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cls, lo, hi, pct;
        if (!std::getline(ss, cls, ',') || !std::getline(ss, lo, ',') ||
            !std::getline(ss, hi, ',') || !std::getline(ss, pct, ','))
            throw ConfigError(file + ":" + std::to_string(line_no) +
                              ": expected asset_class,bucket_low_years,bucket_high_years,percent");
        if (cls == "asset_class") continue; // header
        ScheduleBucket b;
        b.low_years = std::stod(lo);
        b.high_years = hi == "inf" ? std::numeric_limits<double>::infinity() : std::stod(hi);
        b.percent = std::stod(pct);
        table.push_back(b);
    }
    if (table.empty()) throw ConfigError(file + ": empty IM schedule table");
    return table;
}

IMTerms parse_im(const json& obj, const std::string& base_dir, const std::string& path) {
    IMTerms terms;
    const std::string mode = as_string(require(obj, "mode", path), path + ".mode");
    if (mode == "none") {
        reject_unknown_keys(obj, {"mode"}, path);
        terms.mode = IMMode::None;
    } else if (mode == "schedule") {
        reject_unknown_keys(obj, {"mode", "table_file"}, path);
        terms.mode = IMMode::Schedule;
        if (obj.contains("table_file")) {
            const auto file = fs::path(base_dir) / as_string(obj["table_file"], path + ".table_file");
            terms.schedule = parse_im_table_file(file.string());
        }
    } else if (mode == "quantile") {
        reject_unknown_keys(obj, {"mode", "q", "horizon_business_days", "stress_multiplier"}, path);
        terms.mode = IMMode::Quantile;
        if (obj.contains("q")) terms.q = as_number(obj["q"], path + ".q");
        if (obj.contains("horizon_business_days"))
            terms.horizon_days = as_int(obj["horizon_business_days"], path + ".horizon_business_days");
        if (obj.contains("stress_multiplier"))
            terms.stress_multiplier = as_number(obj["stress_multiplier"], path + ".stress_multiplier");
    } else {
        fail(path + ".mode", "unknown IM mode '" + mode + "' (none | schedule | quantile)");
    }
    validate_im(terms);
    return terms;
}

PartyDeltas parse_party_deltas(const json& obj, const std::string& path) {
    reject_unknown_keys(obj, {"tf_days", "csa_days", "sf_days", "im_days"}, path);
    PartyDeltas d;
    d.tf = as_int(require(obj, "tf_days", path), path + ".tf_days");
    d.csa = as_int(require(obj, "csa_days", path), path + ".csa_days");
    d.sf = as_int(require(obj, "sf_days", path), path + ".sf_days");
    d.im = as_int(require(obj, "im_days", path), path + ".im_days");
    return d;
}

LGDModel parse_lgd(const json& obj, const std::string& path) {
    const std::string type = as_string(require(obj, "type", path), path + ".type");
    if (type == "constant") {
        reject_unknown_keys(obj, {"type", "lgd"}, path);
        return ConstantLgd{as_number(require(obj, "lgd", path), path + ".lgd")};
    }
    if (type == "term_structure") {
        reject_unknown_keys(obj, {"type", "points"}, path);
        TermStructureLgd ts;
        const json& pts = require(obj, "points", path);
        if (!pts.is_array() || pts.empty()) fail(path + ".points", "expected a non-empty array");
        for (const auto& pt : pts) {
            if (!pt.is_array() || pt.size() != 2) fail(path + ".points", "expected [t_years, lgd] pairs");
            ts.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
        return ts;
    }
    if (type == "correlated") {
        reject_unknown_keys(obj, {"type", "base", "beta"}, path);
        CorrelatedLgd c;
        c.base = as_number(require(obj, "base", path), path + ".base");
        c.beta = as_number(require(obj, "beta", path), path + ".beta");
        return c;
    }
    fail(path + ".type", "unknown lgd type '" + type + "' (constant | term_structure | correlated)");
}

void apply_override(json& doc, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + kv + "' is not of the form key=value");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);

    json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("override '" + kv + "' has an empty key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
        node = &(*node)[parts[i]];
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value; // plain string
    (*node)[parts.back()] = parsed;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Scenario parse_scenario(json doc, const std::string& base_dir,
                        const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
    for (const auto& kv : overrides) apply_override(doc, kv);

    reject_unknown_keys(doc,
                        {"name", "counterparty", "model", "measure", "grid", "n_paths", "seed",
                         "antithetic", "portfolio", "csa", "im", "deltas", "lgd", "credit_curve",
                         "protection", "cva_adjustment", "metrics", "histogram", "limits_file",
                         "output_dir"},
                        "");

    Scenario s;
    s.hash = fnv1a_hex(doc.dump());
    s.name = as_string(require(doc, "name", ""), "name");
    if (doc.contains("counterparty")) s.counterparty = as_string(doc["counterparty"], "counterparty");

    s.model = parse_model(require(doc, "model", ""), "model");
    validate_model(s.model);

    if (doc.contains("measure")) {
        const json& m = doc["measure"];
        reject_unknown_keys(m, {"discounting"}, "measure");
        const std::string d = as_string(require(m, "discounting", "measure"), "measure.discounting");
        if (d == "none") s.measure.discounting = Discounting::None;
        else if (d == "inverse_zero_curve") s.measure.discounting = Discounting::InverseZeroCurve;
        else fail("measure.discounting", "expected none | inverse_zero_curve");
        if (s.measure.discounting == Discounting::InverseZeroCurve && !is_short_rate(s.model))
            fail("measure.discounting", "inverse_zero_curve requires the short-rate model");
    }

    const json& g = require(doc, "grid", "");
    reject_unknown_keys(g, {"end_years", "step_business_days"}, "grid");
    s.grid.end_day = years_to_days_exact(as_number(require(g, "end_years", "grid"), "grid.end_years"));
    s.grid.step_days = as_int(require(g, "step_business_days", "grid"), "grid.step_business_days");
    if (s.grid.end_day < 1) fail("grid.end_years", "grid must end after 0");
    if (s.grid.step_days < 1) fail("grid.step_business_days", "step must be >= 1 business day");

    const json& np = require(doc, "n_paths", "");
    if (!np.is_number_integer() || np.get<long long>() < 1)
        fail("n_paths", "expected a positive integer");
    s.n_paths = np.get<std::size_t>();
    const json& seed = require(doc, "seed", "");
    if (!seed.is_number_integer()) fail("seed", "expected an integer");
    s.seed = seed.get<std::uint64_t>();
    if (doc.contains("antithetic")) s.antithetic = as_bool(doc["antithetic"], "antithetic");

    s.portfolio = parse_portfolio(require(doc, "portfolio", ""), s.model, "portfolio");
    validate_portfolio(s.portfolio, s.model);

    if (doc.contains("csa") && !doc["csa"].is_null()) s.csa = parse_csa(doc["csa"], "csa");
    if (doc.contains("im")) s.im_terms = parse_im(doc["im"], base_dir, "im");
    if (s.im_terms.mode != IMMode::None && !s.csa)
        fail("im", "initial margin requires a csa block (the mpor drives the IM lag)");

    if (doc.contains("deltas")) {
        const json& d = doc["deltas"];
        reject_unknown_keys(d, {"bank", "counterparty"}, "deltas");
        s.deltas.bank = parse_party_deltas(require(d, "bank", "deltas"), "deltas.bank");
        s.deltas.counterparty =
            parse_party_deltas(require(d, "counterparty", "deltas"), "deltas.counterparty");
    } else if (s.csa) {
        s.deltas = classical_plus_deltas(s.csa->mpor_days);
    }
    if (s.csa) validate_deltas(s.deltas, s.csa->mpor_days);

    if (doc.contains("lgd")) {
        s.lgd = parse_lgd(doc["lgd"], "lgd");
        validate_lgd(s.lgd);
    }

    if (doc.contains("credit_curve")) {
        const json& c = doc["credit_curve"];
        reject_unknown_keys(c, {"cds_spread_per_year", "lgd"}, "credit_curve");
        CreditCurve curve;
        curve.cds_spread =
            as_number(require(c, "cds_spread_per_year", "credit_curve"), "credit_curve.cds_spread_per_year");
        curve.lgd = as_number(require(c, "lgd", "credit_curve"), "credit_curve.lgd");
        validate_credit_curve(curve);
        s.credit_curve = curve;
    }

    if (doc.contains("protection")) {
        const json& arr = doc["protection"];
        if (!arr.is_array()) fail("protection", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string pp = "protection[" + std::to_string(i) + "]";
            reject_unknown_keys(arr[i], {"cds_notional", "maturity_years", "lgd"}, pp);
            CdsPosition pos;
            pos.notional = as_number(require(arr[i], "cds_notional", pp), pp + ".cds_notional");
            pos.maturity_years =
                as_number(require(arr[i], "maturity_years", pp), pp + ".maturity_years");
            pos.lgd = as_number(require(arr[i], "lgd", pp), pp + ".lgd");
            if (pos.notional < 0.0) fail(pp + ".cds_notional", "must be >= 0");
            if (pos.lgd < 0.0 || pos.lgd > 1.0) fail(pp + ".lgd", "must lie in [0, 1]");
            s.protection.push_back(pos);
        }
    }

    if (doc.contains("cva_adjustment")) {
        const std::string v = as_string(doc["cva_adjustment"], "cva_adjustment");
        if (v == "constant") s.cva_adjustment = CvaAdjustment::Constant;
        else if (v == "forward") s.cva_adjustment = CvaAdjustment::Forward;
        else fail("cva_adjustment", "expected constant | forward");
    }

    const json& metrics = require(doc, "metrics", "");
    if (!metrics.is_array()) fail("metrics", "expected an array");
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        const std::string mp = "metrics[" + std::to_string(i) + "]";
        reject_unknown_keys(metrics[i], {"kind", "q"}, mp);
        MetricRequest req;
        req.kind = metric_from_name(as_string(require(metrics[i], "kind", mp), mp + ".kind"));
        req.q = as_number(require(metrics[i], "q", mp), mp + ".q");
        if (!(req.q > 0.0 && req.q < 1.0)) fail(mp + ".q", "q must lie in (0, 1)");
        if ((req.kind == MetricKind::aPFL || req.kind == MetricKind::paPFL) && !s.credit_curve)
            fail(mp, metric_name(req.kind) + " needs a credit_curve block for the incurred CVA");
        s.metrics.push_back(req);
    }

    if (doc.contains("histogram")) {
        const json& h = doc["histogram"];
        reject_unknown_keys(h, {"dates_years", "bins", "include_uncollateralized"}, "histogram");
        HistogramRequest req;
        const json& dates = require(h, "dates_years", "histogram");
        if (!dates.is_array() || dates.empty())
            fail("histogram.dates_years", "expected a non-empty array");
        for (const auto& d : dates)
            req.date_days.push_back(years_to_days_exact(d.get<double>()));
        if (h.contains("bins")) req.bins = as_int(h["bins"], "histogram.bins");
        if (req.bins < 2) fail("histogram.bins", "need at least 2 bins");
        if (h.contains("include_uncollateralized"))
            req.include_uncollateralized =
                as_bool(h["include_uncollateralized"], "histogram.include_uncollateralized");
        s.histogram = req;
    }

    if (doc.contains("limits_file")) {
        s.limits_file = (fs::path(base_dir) / as_string(doc["limits_file"], "limits_file"))
                            .lexically_normal()
                            .string();
        if (!fs::exists(s.limits_file)) fail("limits_file", "file does not exist: " + s.limits_file);
    }
    if (doc.contains("output_dir")) s.output_dir = as_string(doc["output_dir"], "output_dir");

    // Flow dates must land on representable business days; the grid builder
    // inserts them, so only consistency with the end date needs a look.
    for (const auto& trade : s.portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            if (swap->start_day > s.grid.end_day)
                fail("portfolio", "swap starts after the grid ends");
        }
    }
    return s;
}

} // namespace

ScenarioGrids build_scenario_grids(const Scenario& scenario) {
    std::vector<int> eval_days;
    for (int d = 0; d < scenario.grid.end_day; d += scenario.grid.step_days) eval_days.push_back(d);
    eval_days.push_back(scenario.grid.end_day);

    // Flow dates and, under a CSA, mpor/2-spaced dates around them so the
    // spike plateau is sampled.
    const auto flow_days = portfolio_flow_days(scenario.portfolio);
    for (int fd : flow_days) {
        if (fd > scenario.grid.end_day) continue;
        eval_days.push_back(fd);
        if (scenario.csa) {
            const int half = std::max(1, scenario.csa->mpor_days / 2);
            for (int d : {fd - half, fd + half, fd + scenario.csa->mpor_days})
                if (d >= 0 && d <= scenario.grid.end_day) eval_days.push_back(d);
        }
    }
    // Swap start days carry the first fixing.
    for (const auto& trade : scenario.portfolio.trades)
        if (const auto* swap = std::get_if<SwapSpec>(&trade))
            if (swap->start_day <= scenario.grid.end_day) eval_days.push_back(swap->start_day);

    if (scenario.histogram)
        for (int d : scenario.histogram->date_days)
            if (d <= scenario.grid.end_day) eval_days.push_back(d);

    std::sort(eval_days.begin(), eval_days.end());
    eval_days.erase(std::unique(eval_days.begin(), eval_days.end()), eval_days.end());

    std::vector<int> sim_days = eval_days;
    if (scenario.csa) {
        for (int d : eval_days) {
            const int companion = d - scenario.csa->mpor_days;
            if (companion > 0) sim_days.push_back(companion);
        }
    }
    TimeGrid sim_grid = make_grid(std::move(sim_days));

    ScenarioGrids grids;
    grids.eval_indices.reserve(eval_days.size());
    for (int d : eval_days) grids.eval_indices.push_back(*sim_grid.index_of_day(d));
    grids.sim_grid = std::move(sim_grid);
    return grids;
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str(), fs::path(path).parent_path().string(), overrides);
}

Scenario load_scenario_text(const std::string& text, const std::string& base_dir,
                            const std::vector<std::string>& overrides) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("scenario file is not valid JSON");
    return parse_scenario(std::move(doc), base_dir.empty() ? "." : base_dir, overrides);
}

namespace {

json model_to_json(const ModelSpec& model) {
    json j;
    if (const auto* g = std::get_if<GbmSpec>(&model)) {
        j["type"] = "gbm";
        j["spot"] = g->spot;
        j["drift_per_year"] = g->drift;
        j["vol_per_sqrt_year"] = g->vol;
    } else {
        const auto& m = std::get<ShortRate1FSpec>(model);
        j["type"] = "short_rate_1f";
        j["mean_reversion_per_year"] = m.mean_reversion;
        j["vol_per_sqrt_year"] = m.vol;
        j["initial_zero_rate_per_year"] = m.initial_rate;
    }
    return j;
}

json lgd_to_json(const LGDModel& lgd) {
    json j;
    if (const auto* c = std::get_if<ConstantLgd>(&lgd)) {
        j["type"] = "constant";
        j["lgd"] = c->lgd;
    } else if (const auto* ts = std::get_if<TermStructureLgd>(&lgd)) {
        j["type"] = "term_structure";
        json pts = json::array();
        for (const auto& [t, l] : ts->points) pts.push_back({t, l});
        j["points"] = pts;
    } else {
        const auto& c = std::get<CorrelatedLgd>(lgd);
        j["type"] = "correlated";
        j["base"] = c.base;
        j["beta"] = c.beta;
    }
    return j;
}

} // namespace

std::string serialize_scenario(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["counterparty"] = s.counterparty;
    doc["model"] = model_to_json(s.model);
    if (s.measure.discounting == Discounting::InverseZeroCurve)
        doc["measure"] = {{"discounting", "inverse_zero_curve"}};
    doc["grid"] = {{"end_years", days_to_years(s.grid.end_day)},
                   {"step_business_days", s.grid.step_days}};
    doc["n_paths"] = s.n_paths;
    doc["seed"] = s.seed;
    if (s.antithetic) doc["antithetic"] = true;

    json trades = json::array();
    for (const auto& trade : s.portfolio.trades) {
        json t;
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            t["type"] = "swap";
            t["notional"] = swap->notional;
            t["direction"] = swap->direction == SwapDirection::PayFixed ? "pay_fixed" : "receive_fixed";
            t["fixed_rate_per_year"] = swap->fixed_rate;
            t["start_years"] = days_to_years(swap->start_day);
            t["maturity_years"] = days_to_years(swap->maturity_day);
            t["payments_per_year"] = swap->frequency;
        } else {
            const auto& f = std::get<ForwardSpec>(trade);
            t["type"] = "forward";
            t["units"] = f.units;
            t["strike"] = f.strike;
            t["maturity_years"] = days_to_years(f.maturity_day);
        }
        trades.push_back(t);
    }
    doc["portfolio"] = {{"netting_set", s.portfolio.netting_set}, {"trades", trades}};

    if (s.csa) {
        doc["csa"] = {{"threshold", s.csa->threshold},
                      {"minimum_transfer_amount", s.csa->mta},
                      {"independent_amount", s.csa->independent_amount},
                      {"call_frequency_days", s.csa->call_frequency_days},
                      {"mpor_business_days", s.csa->mpor_days},
                      {"flow_netting", s.csa->flow_netting}};
    }
    if (s.im_terms.mode == IMMode::Quantile) {
        doc["im"] = {{"mode", "quantile"},
                     {"q", s.im_terms.q},
                     {"horizon_business_days", s.im_terms.horizon_days},
                     {"stress_multiplier", s.im_terms.stress_multiplier}};
    } else if (s.im_terms.mode == IMMode::Schedule) {
        doc["im"] = {{"mode", "schedule"}};
    }
    if (s.csa) {
        doc["deltas"] = {{"bank",
                          {{"tf_days", s.deltas.bank.tf},
                           {"csa_days", s.deltas.bank.csa},
                           {"sf_days", s.deltas.bank.sf},
                           {"im_days", s.deltas.bank.im}}},
                         {"counterparty",
                          {{"tf_days", s.deltas.counterparty.tf},
                           {"csa_days", s.deltas.counterparty.csa},
                           {"sf_days", s.deltas.counterparty.sf},
                           {"im_days", s.deltas.counterparty.im}}}};
    }
    doc["lgd"] = lgd_to_json(s.lgd);
    if (s.credit_curve)
        doc["credit_curve"] = {{"cds_spread_per_year", s.credit_curve->cds_spread},
                               {"lgd", s.credit_curve->lgd}};
    if (!s.protection.empty()) {
        json arr = json::array();
        for (const auto& p : s.protection)
            arr.push_back({{"cds_notional", p.notional},
                           {"maturity_years", p.maturity_years},
                           {"lgd", p.lgd}});
        doc["protection"] = arr;
    }
    if (s.cva_adjustment == CvaAdjustment::Forward) doc["cva_adjustment"] = "forward";

    json metrics = json::array();
    for (const auto& m : s.metrics)
        metrics.push_back({{"kind", metric_name(m.kind)}, {"q", m.q}});
    doc["metrics"] = metrics;

    if (s.histogram) {
        json dates = json::array();
        for (int d : s.histogram->date_days) dates.push_back(days_to_years(d));
        doc["histogram"] = {{"dates_years", dates},
                            {"bins", s.histogram->bins},
                            {"include_uncollateralized", s.histogram->include_uncollateralized}};
    }
    if (!s.limits_file.empty()) doc["limits_file"] = s.limits_file;
    if (!s.output_dir.empty()) doc["output_dir"] = s.output_dir;

    return doc.dump(2) + "\n";
}

ProtectionProfile protection_of(const Scenario& scenario) {
    std::vector<ProtectionProfile> profiles;
    profiles.reserve(scenario.protection.size());
    for (const auto& p : scenario.protection)
        profiles.push_back(protection_profile(p.notional, p.maturity_years, p.lgd));
    return combine(profiles);
}

} // namespace pfl
