#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mecmob/errors.hpp"
#include "mecmob/harness.hpp"
#include "mecmob/trace_io.hpp"

using namespace mecmob;
using nlohmann::json;

namespace {

RunConfig quick(int replications = 3) {
    RunConfig c = RunConfig::desk();
    c.replications = replications;
    return c;
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "mecmob_tests" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("policies share one trace per replication") {
    RunConfig c = quick(1);
    c.policies = {"fsi", "delay_optimal"};
    const auto report = run_experiment(c);
    REQUIRE(report.replications.size() == 1);
    const auto& rep = report.replications[0];
    REQUIRE(rep.runs.size() == 2);
    CHECK(rep.trace_hash == trace_hash(generate_scenario(c, c.replication_seed(0))));
    CHECK(rep.runs[0].series.periods.size() == 100);
    CHECK(rep.runs[1].series.periods.size() == 100);
    CHECK(report.aggregates.size() == 2);
    CHECK(report.convergence.empty());
}

TEST_CASE("aggregates are the replication means") {
    const auto report = run_experiment(quick());
    for (const auto& agg : report.aggregates) {
        double delay = 0.0, energy = 0.0;
        for (const auto& rep : report.replications) {
            delay += rep.find(agg.policy)->series.mean_delay() / 3.0;
            energy += rep.find(agg.policy)->series.total_energy() / 3.0;
        }
        CHECK(agg.mean_delay == doctest::Approx(delay).epsilon(1e-14));
        CHECK(agg.total_energy == doctest::Approx(energy).epsilon(1e-14));
    }
    CHECK(report.convergence.size() == 100);
}

TEST_CASE("emitted series reproduce the aggregates") {
    const auto report = run_experiment(quick());
    const auto dir = fresh_dir("emit");
    emit(report, dir);
    for (const auto& m : period_metrics()) {
        const auto rows = read_csv(dir / (m + ".csv"));
        REQUIRE(rows.size() == 1 + 100 * 3 * report.config.policies.size());
        CHECK(rows[0] == std::vector<std::string>{"t", "replication", "policy", m});
    }
    std::map<std::string, double> delay_sum, energy_sum, handovers, switches;
    for (const auto& row : read_csv(dir / "delay.csv")) {
        if (row[0] == "t") continue;
        delay_sum[row[2]] += std::stod(row[3]);
    }
    for (const auto& row : read_csv(dir / "energy.csv")) {
        if (row[0] == "t") continue;
        energy_sum[row[2]] += std::stod(row[3]);
    }
    for (const auto& row : read_csv(dir / "handover.csv")) {
        if (row[0] == "t") continue;
        handovers[row[2]] += std::stod(row[3]);
    }
    for (const auto& row : read_csv(dir / "switches.csv")) {
        if (row[0] == "t") continue;
        switches[row[2]] += std::stod(row[3]);
    }
    for (const auto& agg : report.aggregates) {
        CHECK(delay_sum[agg.policy] / 300.0 == doctest::Approx(agg.mean_delay).epsilon(1e-12));
        CHECK(energy_sum[agg.policy] / 3.0 == doctest::Approx(agg.total_energy).epsilon(1e-12));
        CHECK(handovers[agg.policy] / 3.0 == doctest::Approx(agg.handovers_between_periods).epsilon(1e-12));
        CHECK(switches[agg.policy] / 300.0 == doctest::Approx(agg.mean_handovers_within_period).epsilon(1e-12));
    }
    CHECK(read_csv(dir / "convergence.csv").size() == 101);
}

TEST_CASE("summary carries config, hashes and bounds") {
    const auto report = run_experiment(quick());
    const auto doc = summary_json(report);
    CHECK_NOTHROW(validate_summary(doc));
    CHECK_NOTHROW(validate_summary(json::parse(doc.dump(2))));
    CHECK(config_from_json(doc["config"]).replications == 3);
    CHECK(config_to_json(config_from_json(doc["config"])) == doc["config"]);
    const auto& rep = doc["replications"][0];
    CHECK(rep["trace_hash"].get<std::string>().size() == 40);
    CHECK(rep["bounds"]["fsi"]["delay_bound"].get<double>() >= rep["runs"][3]["mean_delay"].get<double>());

    auto tampered = doc;
    tampered["aggregates"][0]["mean_delay"] = 0.0;
    CHECK_THROWS_AS(validate_summary(tampered), SchemaError);
    auto missing = doc;
    missing["replications"][0].erase("bounds");
    CHECK_THROWS_AS(validate_summary(missing), SchemaError);
    auto old = doc;
    old["version"] = 0;
    CHECK_THROWS_AS(validate_summary(old), SchemaError);
}

TEST_CASE("bounds re-evaluation matches the stored values") {
    const auto report = run_experiment(quick());
    const auto eval = evaluate_summary_bounds(summary_json(report));
    REQUIRE(eval.size() == 3);
    for (std::size_t i = 0; i < eval.size(); ++i) {
        const auto& b = report.replications[i].bounds;
        CHECK(eval[i]["fsi"]["delay_bound"].get<double>() == b.fsi_delay_bound);
        CHECK(eval[i]["fsi"]["energy_bound"].get<double>() == b.fsi_energy_bound);
        CHECK(eval[i]["psi"]["energy_bound"].get<double>() == b.psi_energy_bound);
        CHECK(eval[i]["fsi"]["delay_holds"].get<bool>());
    }
}

TEST_CASE("reruns are bit identical") {
    RunConfig c = quick();
    c.output_dir = "same";
    const auto a = fresh_dir("run_a"), b = fresh_dir("run_b");
    emit(run_experiment(c), a);
    emit(run_experiment(c), b);
    for (const auto& entry : std::filesystem::directory_iterator(a))
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
}

TEST_CASE("sweeps") {
    CHECK(is_sweepable("budget"));
    CHECK(is_sweepable("K"));
    CHECK(is_sweepable("V"));
    CHECK_FALSE(is_sweepable("lambda_max"));
    const std::vector<double> values{1.0};
    CHECK_THROWS_AS(sweep(quick(), "lambda_max", values), ConfigError);
    CHECK(with_parameter(quick(), "K", 50).psi.slots == 50);
    CHECK_THROWS_AS(with_parameter(quick(), "K", 2.5), ConfigError);
    CHECK(with_parameter(quick(), "V", 0.5).schedule.weight(3) == 0.5);

    RunConfig c = quick(5);
    c.policies = {"delay_optimal", "fsi"};
    const std::vector<double> budgets{0.5, 3.0, 1000.0};
    const auto points = sweep(c, "budget", budgets);
    REQUIRE(points.size() == 3);
    // common seeds across values
    CHECK(points[0].report.replications[2].seed == points[2].report.replications[2].seed);
    CHECK(points[2].report.aggregate("fsi")->mean_delay ==
          doctest::Approx(points[2].report.aggregate("delay_optimal")->mean_delay));
    CHECK(points[0].report.aggregate("fsi")->budget_satisfied_fraction == 0.0);
    CHECK(points[2].report.aggregate("fsi")->budget_satisfied_fraction == 1.0);
}

TEST_CASE("replication failures carry the index") {
    RunConfig c = quick(2);
    c.consts.min_rate_bps = 1e12;
    c.scenario.processes.max_resample = 2;
    try {
        run_experiment(c);
        FAIL("expected ReplicationError");
    } catch (const ReplicationError& e) {
        CHECK(e.replication() == 0);
        CHECK(std::string(e.what()).find("replication 0") != std::string::npos);
    }
}

TEST_CASE("emit reports unwritable paths") {
    CHECK_THROWS_AS(emit(run_experiment(quick(1)), "/proc/mecmob_cannot_write"), IoError);
    CHECK(emit_format_from_name("csv") == EmitFormat::Csv);
    CHECK_THROWS_AS(emit_format_from_name("xml"), ConfigError);
}

}
