// tsn5g: run, compare, validate and sweep 5G-TSN bridge scenarios.

#include "tsn5g/report.hpp"
#include "tsn5g/scenario.hpp"
#include "tsn5g/topology.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsn5g;

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> endpoints;
    std::optional<std::string> channel;
    std::optional<std::string> scheduler;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config, "Scenario file or bundled name (ideal_3ep, fading_3ep, ...)")->required();
    cmd->add_option("--seed", args.seed, "Override the scenario seed");
    cmd->add_option("--endpoints", args.endpoints, "Override the endpoint count")->check(CLI::Range(1, 64));
    cmd->add_option("--channel", args.channel, "ideal or fading")->check(CLI::IsMember({"ideal", "fading"}));
    cmd->add_option("--scheduler", args.scheduler, "maxci, pf or rr")->check(CLI::IsMember({"maxci", "pf", "rr"}));
}

ConfigOverrides overrides_of(const CommonArgs& a)
{
    ConfigOverrides o;
    o.seed = a.seed;
    o.endpoints = a.endpoints;
    if (a.channel) o.channel = channel_mode_from_string(*a.channel);
    if (a.scheduler) o.scheduler = scheduler_from_string(*a.scheduler);
    return o;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void print_hierarchy(const HierarchyReport& report)
{
    std::cerr << "clock hierarchy: " << (report.valid() ? "valid" : "invalid") << " (" << report.errors.size()
              << " errors)\n";
    for (const auto& e : report.errors) std::cerr << "  " << e.describe() << '\n';
}

// Parent directory name, or the file path when the report sits in the cwd.
std::string label_of(const std::string& path, const char* fallback)
{
    const std::string dir = fs::path(path).parent_path().filename().string();
    return dir.empty() || dir == "." ? fallback : dir;
}

json load_report(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

int cmd_run(const CommonArgs& args, const std::string& out_dir, bool lineage_dump, bool grant_trace, bool force)
{
    const ScenarioConfig cfg = load_config(args.config, overrides_of(args));
    const HierarchyReport bmca = validate_hierarchy(cfg.hierarchy);
    print_hierarchy(bmca);
    if (!bmca.valid() && !force) {
        std::cerr << "aborting: clock hierarchy invalid (use --force to run anyway)\n";
        return 2;
    }

    fs::create_directories(out_dir);
    std::ofstream trace;
    RunOptions options;
    if (grant_trace) {
        trace.open(fs::path(out_dir) / "grant_trace.csv");
        options.grant_trace = &trace;
    }

    Simulation sim(cfg, options);
    const RunReport report = sim.run();

    write_file(fs::path(out_dir) / "report.json", report_to_json(report).dump(2) + "\n");
    const std::string text = format_report_text(report);
    write_file(fs::path(out_dir) / "report.txt", text);
    for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
        std::ofstream csv(fs::path(out_dir) / ("residence_" + std::to_string(i) + ".csv"));
        sim.ds_tt(i).write_residence_csv(csv);
    }
    if (lineage_dump) {
        std::ofstream csv(fs::path(out_dir) / "lineage.csv");
        sim.write_lineage_csv(csv);
    }
    std::cout << text;
    return bmca.valid() ? 0 : 2;
}

int cmd_sweep(const CommonArgs& args, const std::string& out_dir, std::size_t count, std::size_t jobs)
{
    ConfigOverrides base = overrides_of(args);
    const ScenarioConfig probe = load_config(args.config, base);
    const HierarchyReport bmca = validate_hierarchy(probe.hierarchy);
    if (!bmca.valid()) {
        print_hierarchy(bmca);
        return 2;
    }

    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = probe.seed + i;
    std::vector<json> reports(count);
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                ConfigOverrides o = base;
                o.seed = seeds[i];
                reports[i] = report_to_json(run_scenario(load_config(args.config, o)));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(jobs, count)); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < count; ++i)
        if (!errors[i].empty()) {
            std::cerr << "seed " << seeds[i] << ": " << errors[i] << '\n';
            return 3;
        }

    const auto stats = aggregate_sweep(reports);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "sweep.json", sweep_to_json(stats, seeds).dump(2) + "\n");
    const std::string text = format_sweep(stats);
    write_file(fs::path(out_dir) / "sweep.txt", text);
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event simulator of a 5G system acting as a TSN logical bridge"};
    app.require_subcommand(1);

    CommonArgs run_args;
    std::string out_dir = "out";
    bool lineage_dump = false;
    bool grant_trace = false;
    bool force = false;
    auto* run = app.add_subcommand("run", "Run one scenario and write report.json, report.txt, residence_<i>.csv");
    add_common(run, run_args);
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--lineage-dump", lineage_dump, "Write per-packet lineage.csv");
    run->add_flag("--grant-trace", grant_trace, "Write per-slot grant_trace.csv");
    run->add_flag("--force", force, "Run even if the clock hierarchy is invalid");

    std::string report_a;
    std::string report_b;
    auto* compare = app.add_subcommand("compare", "Compare two report.json files");
    compare->add_option("report_a", report_a)->required()->check(CLI::ExistingFile);
    compare->add_option("report_b", report_b)->required()->check(CLI::ExistingFile);

    CommonArgs validate_args;
    auto* validate = app.add_subcommand("validate", "Check a scenario and its clock hierarchy without running it");
    add_common(validate, validate_args);

    CommonArgs sweep_args;
    std::string sweep_out = "sweep";
    std::size_t count = 5;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "Run consecutive seeds and aggregate headline metrics");
    add_common(sweep, sweep_args);
    sweep->add_option("--count", count, "Number of seeds, starting at the scenario seed")->check(CLI::Range(1, 10000));
    sweep->add_option("--jobs", jobs, "Parallel workers")->check(CLI::Range(1, 256));
    sweep->add_option("--out", sweep_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args, out_dir, lineage_dump, grant_trace, force);
        if (compare->parsed()) {
            const auto c = compare_reports(load_report(report_a), load_report(report_b));
            std::cout << format_comparison(c, label_of(report_a, "a"), label_of(report_b, "b"));
            return 0;
        }
        if (validate->parsed()) {
            const ScenarioConfig cfg = load_config(validate_args.config, overrides_of(validate_args));
            const HierarchyReport bmca = validate_hierarchy(cfg.hierarchy);
            print_hierarchy(bmca);
            std::cout << to_json(cfg).dump(2) << '\n';
            return bmca.valid() ? 0 : 2;
        }
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_out, count, jobs);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
