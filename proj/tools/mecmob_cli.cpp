#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mecmob/config.hpp"
#include "mecmob/errors.hpp"
#include "mecmob/harness.hpp"
#include "mecmob/trace_io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string profile;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_replications) {
    cmd->add_option("--config", flags.config_path, "run config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--profile", flags.profile, "built-in profile")->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--seed", flags.seed, "base seed");
    if (with_replications) cmd->add_option("--replications", flags.replications, "replication count")->check(CLI::PositiveNumber);
}

mecmob::RunConfig resolve(const CommonFlags& flags) {
    mecmob::RunConfig config = mecmob::RunConfig::paper();
    if (!flags.config_path.empty()) {
        config = mecmob::load_config(flags.config_path);
        if (!flags.profile.empty() && flags.profile != config.profile)
            throw mecmob::ConfigError("--profile " + flags.profile + " conflicts with the config file profile '" +
                                      config.profile + "'");
    } else if (!flags.profile.empty()) {
        config = mecmob::RunConfig::from_profile(flags.profile);
    }
    if (flags.seed) config.base_seed = *flags.seed;
    if (flags.replications) config.replications = *flags.replications;
    if (!flags.out.empty()) config.output_dir = flags.out;
    config.validate();
    return config;
}

void write_sweep_table(const std::vector<mecmob::SweepPoint>& points, const std::string& parameter,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mecmob::IoError("cannot write " + path.string());
    out << "parameter,value,policy,mean_delay,mean_delay_se,total_energy,total_energy_se,budget_satisfied_fraction,"
           "mean_handovers_within_period,fallback_periods\n";
    out.precision(17);
    for (const auto& p : points) {
        for (const auto& a : p.report.aggregates) {
            out << parameter << ',' << p.value << ',' << a.policy << ',' << a.mean_delay << ',' << a.mean_delay_se
                << ',' << a.total_energy << ',' << a.total_energy_se << ',' << a.budget_satisfied_fraction << ','
                << a.mean_handovers_within_period << ',' << a.fallback_periods << '\n';
        }
    }
}

void print_aggregates(const mecmob::ExperimentReport& report) {
    std::cout << "policy            mean_delay    total_energy  budget_ok\n";
    for (const auto& a : report.aggregates) {
        std::printf("%-16s  %-12.6g  %-12.6g  %.2f\n", a.policy.c_str(), a.mean_delay, a.total_energy,
                    a.budget_satisfied_fraction);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobility management for mobile edge computing: simulator and experiment harness"};
    app.require_subcommand(1);

    CommonFlags gen_flags, run_flags, sweep_flags;
    std::string format = "both";

    auto* gen = app.add_subcommand("generate", "generate one scenario trace");
    add_common(gen, gen_flags, false);
    gen->add_option("--out", gen_flags.out, "trace file")->required();

    auto* run = app.add_subcommand("run", "run every configured policy over the replications");
    add_common(run, run_flags, true);
    run->add_option("--out", run_flags.out, "output directory");
    run->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

    std::string parameter;
    std::vector<double> values;
    auto* sw = app.add_subcommand("sweep", "repeat the experiment over values of one parameter");
    add_common(sw, sweep_flags, true);
    sw->add_option("--out", sweep_flags.out, "output directory");
    sw->add_option("--parameter", parameter, "budget, K or V")->required();
    sw->add_option("--values", values, "parameter values")->required();
    sw->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

    std::string report_path, bounds_out;
    auto* bnd = app.add_subcommand("bounds", "re-evaluate the bounds recorded in a summary.json");
    bnd->add_option("report", report_path, "summary.json of a run")->required()->check(CLI::ExistingFile);
    bnd->add_option("--out", bounds_out, "write the evaluation to this file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto config = resolve(CommonFlags{gen_flags.config_path, gen_flags.profile, gen_flags.seed, {}, {}});
            const auto trace = mecmob::generate_scenario(config, config.base_seed);
            mecmob::save_trace(trace, gen_flags.out);
            std::cout << gen_flags.out << "  periods=" << trace.horizon() << "  sha1=" << mecmob::trace_hash(trace)
                      << '\n';
        } else if (*run) {
            const auto config = resolve(run_flags);
            const auto report = mecmob::run_experiment(config);
            mecmob::emit(report, config.output_dir, mecmob::emit_format_from_name(format));
            print_aggregates(report);
            std::cout << "written to " << config.output_dir << '\n';
        } else if (*sw) {
            const auto config = resolve(sweep_flags);
            const auto points = mecmob::sweep(config, parameter, values);
            const std::filesystem::path root = config.output_dir;
            for (const auto& p : points) {
                std::ostringstream name;
                name << parameter << '=' << p.value;
                mecmob::emit(p.report, root / name.str(), mecmob::emit_format_from_name(format));
                std::cout << "== " << name.str() << '\n';
                print_aggregates(p.report);
            }
            write_sweep_table(points, parameter, root / "sweep.csv");
            std::cout << "written to " << root.string() << '\n';
        } else if (*bnd) {
            std::ifstream in(report_path);
            if (!in) throw mecmob::IoError("cannot open " + report_path);
            nlohmann::json summary;
            try {
                summary = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw mecmob::SchemaError(report_path + ": " + e.what());
            }
            const auto result = mecmob::evaluate_summary_bounds(summary);
            if (bounds_out.empty()) {
                std::cout << result.dump(2) << '\n';
            } else {
                std::ofstream out(bounds_out);
                if (!(out << result.dump(2) << '\n')) throw mecmob::IoError("cannot write " + bounds_out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "mecmob: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
