#include "mecmob/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include "mecmob/bounds.hpp"
#include "mecmob/errors.hpp"
#include "mecmob/trace_io.hpp"

namespace mecmob {

using nlohmann::json;

const PolicyRun* ReplicationReport::find(const std::string& policy) const {
    for (const auto& r : runs)
        if (r.policy == policy) return &r;
    return nullptr;
}

const PolicyAggregate* ExperimentReport::aggregate(const std::string& policy) const {
    for (const auto& a : aggregates)
        if (a.policy == policy) return &a;
    return nullptr;
}

BoundReport compute_bounds(const ScenarioTrace& trace, const RunConfig& config, const LookaheadResult& lookahead,
                           const RunSeries* psi) {
    BoundReport b;
    b.U = compute_U(trace);
    b.frame_length = config.schedule.frame_length;
    b.budget = config.consts.budget_j;
    b.d_star = lookahead.per_frame_delay();
    b.weights = config.schedule.expanded();
    b.infeasible_frames = lookahead.infeasible_frames;
    b.fsi_delay_bound = theorem1_delay_bound(b.d_star, b.U, 0.0, b.frame_length, b.weights);
    b.fsi_energy_bound = theorem1_energy_bound(b.d_star, b.U, 0.0, b.frame_length, b.weights, b.budget);
    if (psi) {
        b.psi_regret_c_empirical = empirical_regret_constant(*psi);
        b.psi_regret_c_bound = regret_bound_constant(*psi, config.psi.slots);
        b.psi_delay_bound =
            theorem1_delay_bound(b.d_star, b.U, b.psi_regret_c_empirical, b.frame_length, b.weights);
        b.psi_energy_bound = theorem1_energy_bound(b.d_star, b.U, b.psi_regret_c_empirical, b.frame_length,
                                                   b.weights, b.budget);
    }
    return b;
}

namespace {

PolicyRun make_run(RunSeries series, double budget) {
    PolicyRun run;
    run.policy = series.policy;
    run.mean_delay = series.mean_delay();
    run.total_energy = series.total_energy();
    run.budget_satisfied = run.total_energy <= budget;
    run.series = std::move(series);
    return run;
}

ReplicationReport run_replication(const RunConfig& config, int replication) {
    ReplicationReport rep;
    rep.replication = replication;
    rep.seed = config.replication_seed(replication);
    const ScenarioTrace trace = generate_scenario(config, rep.seed);
    rep.trace_hash = trace_hash(trace);

    const auto lookahead =
        solve_lookahead(trace, config.schedule.frame_count, config.schedule.frame_length, config.lookahead);
    rep.d_star = lookahead.d_star;

    std::optional<RunSeries> psi;
    for (const auto& name : config.policies) {
        if (name == "lookahead") {
            rep.runs.push_back(make_run(lookahead.series, config.consts.budget_j));
            continue;
        }
        const PolicyKind kind = policy_from_name(name);
        auto series = run_policy(kind, trace, config.schedule, config.psi, rep.seed);
        if (kind == PolicyKind::Psi) psi = series;
        rep.runs.push_back(make_run(std::move(series), config.consts.budget_j));
    }
    rep.bounds = compute_bounds(trace, config, lookahead, psi ? &*psi : nullptr);
    return rep;
}

double mean_of(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_error_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double n = static_cast<double>(xs.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

std::vector<PolicyAggregate> aggregate_runs(const RunConfig& config, const std::vector<ReplicationReport>& reps) {
    std::vector<PolicyAggregate> out;
    for (const auto& name : config.policies) {
        std::vector<double> delay, energy, satisfied, within, between, fallback;
        for (const auto& rep : reps) {
            const PolicyRun* run = rep.find(name);
            if (!run) continue;
            delay.push_back(run->mean_delay);
            energy.push_back(run->total_energy);
            satisfied.push_back(run->budget_satisfied ? 1.0 : 0.0);
            within.push_back(run->series.mean_handovers_within_period());
            between.push_back(run->series.handovers_between_periods());
            fallback.push_back(run->series.fallback_count());
        }
        PolicyAggregate a;
        a.policy = name;
        a.mean_delay = mean_of(delay);
        a.mean_delay_se = std_error_of(delay);
        a.total_energy = mean_of(energy);
        a.total_energy_se = std_error_of(energy);
        a.budget_satisfied_fraction = mean_of(satisfied);
        a.mean_handovers_within_period = mean_of(within);
        a.handovers_between_periods = mean_of(between);
        a.fallback_periods = mean_of(fallback);
        out.push_back(a);
    }
    return out;
}

std::vector<double> convergence_curve(const std::vector<ReplicationReport>& reps, int slots) {
    std::vector<double> curve(static_cast<std::size_t>(slots), 0.0);
    int used = 0;
    for (const auto& rep : reps) {
        const PolicyRun* psi = rep.find("psi");
        if (!psi) continue;
        std::vector<double> achieved(curve.size(), 0.0);
        double optimum = 0.0;
        for (const auto& p : psi->series.periods) {
            optimum += p.optimal_objective;
            double running = 0.0;
            for (std::size_t k = 0; k < p.slot_expected.size() && k < curve.size(); ++k) {
                running += p.slot_expected[k];
                achieved[k] += running * slots / static_cast<double>(k + 1);
            }
        }
        if (!(optimum > 0.0)) continue;
        for (std::size_t k = 0; k < curve.size(); ++k) curve[k] += achieved[k] / optimum;
        ++used;
    }
    if (used == 0) return {};
    for (double& c : curve) c /= used;
    return curve;
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    const int n = config.replications;
    std::vector<std::optional<ReplicationReport>> results(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                results[i] = run_replication(config, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, n);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (int i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw ReplicationError(i, e.what());
        }
    }
    for (auto& r : results) report.replications.push_back(std::move(*r));
    report.aggregates = aggregate_runs(config, report.replications);
    report.convergence = convergence_curve(report.replications, config.psi.slots);
    return report;
}

bool is_sweepable(const std::string& parameter) {
    return parameter == "budget" || parameter == "K" || parameter == "slots" || parameter == "V";
}

RunConfig with_parameter(RunConfig config, const std::string& parameter, double value) {
    if (parameter == "budget") {
        config.consts.budget_j = value;
    } else if (parameter == "K" || parameter == "slots") {
        if (value != std::floor(value) || value < 1.0) throw ConfigError("K must be a positive integer");
        config.psi.slots = static_cast<int>(value);
    } else if (parameter == "V") {
        config.schedule.weights = {value};
    } else {
        throw ConfigError("parameter '" + parameter + "' is not sweepable (budget, K, V)");
    }
    config.validate();
    return config;
}

std::vector<SweepPoint> sweep(const RunConfig& config, const std::string& parameter, std::span<const double> values) {
    if (!is_sweepable(parameter)) throw ConfigError("parameter '" + parameter + "' is not sweepable (budget, K, V)");
    std::vector<SweepPoint> out;
    for (double v : values) out.push_back({v, run_experiment(with_parameter(config, parameter, v))});
    return out;
}

EmitFormat emit_format_from_name(const std::string& name) {
    if (name == "csv") return EmitFormat::Csv;
    if (name == "json") return EmitFormat::Json;
    if (name == "both") return EmitFormat::Both;
    throw ConfigError("unknown output format '" + name + "' (csv, json, both)");
}

std::vector<std::string> period_metrics() { return {"delay", "energy", "queue", "handover", "switches", "fallback"}; }

namespace {

std::string num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double metric_value(const std::string& metric, const RunSeries& series, std::size_t t) {
    const auto& p = series.periods[t];
    if (metric == "delay") return p.delay;
    if (metric == "energy") return p.energy;
    if (metric == "queue") return p.queue_after;
    if (metric == "handover") {
        if (t == 0) return 0.0;
        const BsId first = p.slot_choices.empty() ? p.chosen_bs : p.slot_choices.front();
        return series.periods[t - 1].chosen_bs != first ? 1.0 : 0.0;
    }
    if (metric == "switches") return p.handovers_within_period;
    return p.infeasible_fallback ? 1.0 : 0.0;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

json bounds_json(const BoundReport& b) {
    return {{"U", b.U},
            {"frame_length", b.frame_length},
            {"budget", b.budget},
            {"d_star", b.d_star},
            {"weights", b.weights},
            {"infeasible_frames", b.infeasible_frames},
            {"fsi", {{"C", 0.0}, {"delay_bound", b.fsi_delay_bound}, {"energy_bound", b.fsi_energy_bound}}},
            {"psi",
             {{"C", b.psi_regret_c_empirical},
              {"C_regret_bound", b.psi_regret_c_bound},
              {"delay_bound", b.psi_delay_bound},
              {"energy_bound", b.psi_energy_bound}}}};
}

}  // namespace

json summary_json(const ExperimentReport& report) {
    json doc;
    doc["schema"] = "mecmob.summary";
    doc["version"] = 1;
    doc["config"] = config_to_json(report.config);
    json aggs = json::array();
    for (const auto& a : report.aggregates) {
        aggs.push_back({{"policy", a.policy},
                        {"mean_delay", a.mean_delay},
                        {"mean_delay_se", a.mean_delay_se},
                        {"total_energy", a.total_energy},
                        {"total_energy_se", a.total_energy_se},
                        {"budget_satisfied_fraction", a.budget_satisfied_fraction},
                        {"mean_handovers_within_period", a.mean_handovers_within_period},
                        {"handovers_between_periods", a.handovers_between_periods},
                        {"fallback_periods", a.fallback_periods}});
    }
    doc["aggregates"] = aggs;
    json reps = json::array();
    for (const auto& rep : report.replications) {
        json runs = json::array();
        for (const auto& r : rep.runs) {
            runs.push_back({{"policy", r.policy},
                            {"mean_delay", r.mean_delay},
                            {"total_energy", r.total_energy},
                            {"budget_satisfied", r.budget_satisfied},
                            {"fallback_periods", r.series.fallback_count()},
                            {"handovers_between_periods", r.series.handovers_between_periods()},
                            {"mean_handovers_within_period", r.series.mean_handovers_within_period()}});
        }
        reps.push_back({{"replication", rep.replication},
                        {"seed", rep.seed},
                        {"trace_hash", rep.trace_hash},
                        {"d_star", rep.d_star},
                        {"runs", runs},
                        {"bounds", bounds_json(rep.bounds)}});
    }
    doc["replications"] = reps;
    doc["convergence"] = report.convergence;
    doc["content_hash"] = git_blob_sha1(doc.dump());
    return doc;
}

void emit(const ExperimentReport& report, const std::filesystem::path& dir, EmitFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    if (format != EmitFormat::Json) {
        for (const auto& metric : period_metrics()) {
            auto out = open_out(dir / (metric + ".csv"));
            out << "t,replication,policy," << metric << '\n';
            for (const auto& rep : report.replications) {
                for (const auto& run : rep.runs) {
                    for (std::size_t t = 0; t < run.series.periods.size(); ++t) {
                        out << t << ',' << rep.replication << ',' << run.policy << ','
                            << num(metric_value(metric, run.series, t)) << '\n';
                    }
                }
            }
        }
        auto conv = open_out(dir / "convergence.csv");
        conv << "k,objective_ratio\n";
        for (std::size_t k = 0; k < report.convergence.size(); ++k)
            conv << k + 1 << ',' << num(report.convergence[k]) << '\n';
        auto agg = open_out(dir / "aggregates.csv");
        agg << "policy,mean_delay,mean_delay_se,total_energy,total_energy_se,budget_satisfied_fraction,"
               "mean_handovers_within_period,handovers_between_periods,fallback_periods\n";
        for (const auto& a : report.aggregates) {
            agg << a.policy << ',' << num(a.mean_delay) << ',' << num(a.mean_delay_se) << ',' << num(a.total_energy)
                << ',' << num(a.total_energy_se) << ',' << num(a.budget_satisfied_fraction) << ','
                << num(a.mean_handovers_within_period) << ',' << num(a.handovers_between_periods) << ','
                << num(a.fallback_periods) << '\n';
        }
        if (!agg) throw IoError("write failed in " + dir.string());
    }
    if (format != EmitFormat::Csv) {
        auto out = open_out(dir / "summary.json");
        out << summary_json(report).dump(2) << '\n';
        if (!out) throw IoError("write failed in " + dir.string());
    }
}

namespace {

void require(const json& obj, const char* key, json::value_t type, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
    const auto actual = obj.at(key).type();
    const bool numeric = type == json::value_t::number_float &&
                         (actual == json::value_t::number_integer || actual == json::value_t::number_unsigned);
    const bool integral = type == json::value_t::number_integer && actual == json::value_t::number_unsigned;
    if (actual != type && !numeric && !integral)
        throw SchemaError(where + ": '" + key + "' has type " + obj.at(key).type_name());
}

}  // namespace

void validate_summary(const json& summary) {
    using vt = json::value_t;
    require(summary, "schema", vt::string, "summary");
    if (summary["schema"] != "mecmob.summary") throw SchemaError("summary: not a mecmob.summary document");
    require(summary, "version", vt::number_integer, "summary");
    if (summary["version"] != 1)
        throw SchemaError("summary version " + summary["version"].dump() + " is not supported (expected 1)");
    require(summary, "config", vt::object, "summary");
    require(summary, "aggregates", vt::array, "summary");
    require(summary, "replications", vt::array, "summary");
    require(summary, "convergence", vt::array, "summary");
    require(summary, "content_hash", vt::string, "summary");
    for (const auto& a : summary["aggregates"]) {
        require(a, "policy", vt::string, "aggregate");
        for (const char* k : {"mean_delay", "mean_delay_se", "total_energy", "total_energy_se",
                              "budget_satisfied_fraction", "mean_handovers_within_period",
                              "handovers_between_periods", "fallback_periods"})
            require(a, k, vt::number_float, "aggregate " + a["policy"].get<std::string>());
    }
    for (const auto& rep : summary["replications"]) {
        require(rep, "replication", vt::number_integer, "replication");
        const std::string where = "replication " + rep["replication"].dump();
        require(rep, "seed", vt::number_integer, where);
        require(rep, "trace_hash", vt::string, where);
        require(rep, "d_star", vt::number_float, where);
        require(rep, "runs", vt::array, where);
        require(rep, "bounds", vt::object, where);
        for (const auto& r : rep["runs"]) {
            require(r, "policy", vt::string, where);
            require(r, "mean_delay", vt::number_float, where);
            require(r, "total_energy", vt::number_float, where);
            require(r, "budget_satisfied", vt::boolean, where);
        }
        const auto& b = rep["bounds"];
        for (const char* k : {"U", "budget"}) require(b, k, vt::number_float, where + " bounds");
        require(b, "frame_length", vt::number_integer, where + " bounds");
        require(b, "d_star", vt::array, where + " bounds");
        require(b, "weights", vt::array, where + " bounds");
        if (b["d_star"].size() != b["weights"].size())
            throw SchemaError(where + " bounds: d_star and weights differ in length");
        for (const char* p : {"fsi", "psi"}) {
            require(b, p, vt::object, where + " bounds");
            for (const char* k : {"C", "delay_bound", "energy_bound"})
                require(b[p], k, vt::number_float, where + " bounds." + p);
        }
    }
    json copy = summary;
    copy.erase("content_hash");
    if (git_blob_sha1(copy.dump()) != summary["content_hash"].get<std::string>())
        throw SchemaError("summary: content_hash does not match the document");
}

json evaluate_summary_bounds(const json& summary) {
    validate_summary(summary);
    json out = json::array();
    for (const auto& rep : summary["replications"]) {
        const auto& b = rep["bounds"];
        const auto d_star = b["d_star"].get<std::vector<double>>();
        const auto weights = b["weights"].get<std::vector<double>>();
        const double U = b["U"].get<double>();
        const int J = b["frame_length"].get<int>();
        const double budget = b["budget"].get<double>();
        json entry{{"replication", rep["replication"]}, {"U", U}};
        for (const auto& r : rep["runs"]) {
            const std::string policy = r["policy"].get<std::string>();
            if (policy != "fsi" && policy != "psi") continue;
            const double C = b[policy]["C"].get<double>();
            const double delay_bound = theorem1_delay_bound(d_star, U, C, J, weights);
            const double energy_bound = theorem1_energy_bound(d_star, U, C, J, weights, budget);
            const double delay = r["mean_delay"].get<double>();
            const double energy = r["total_energy"].get<double>();
            entry[policy] = {{"C", C},
                             {"mean_delay", delay},
                             {"delay_bound", delay_bound},
                             {"delay_slack", delay_bound - delay},
                             {"delay_holds", delay <= delay_bound},
                             {"total_energy", energy},
                             {"energy_bound", energy_bound},
                             {"energy_slack", energy_bound - energy},
                             {"energy_holds", energy <= energy_bound}};
        }
        out.push_back(entry);
    }
    return out;
}

}  // namespace mecmob
