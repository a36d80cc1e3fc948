// Batch front door: run named experiments from specification documents and
// emit verdict reports. Exit 0 = pass (or informational), 1 = fail,
// 2 = spec/usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "minobs/experiments.hpp"
#include "minobs/spec_io.hpp"

namespace {

using namespace minobs;

struct CommonOpts {
    std::string env_path;
    std::string observer_path;
    std::string observable_path;
    std::string report_path;
    std::string alt_env_path;
    std::size_t trials = 10000;
    std::size_t cycles = 1000;
    std::size_t n_sort = 100000;
    std::size_t n_draw = 10000;
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string out_path;
    std::string format = "json";
};

void write_output(const CommonOpts& opts, const Json& doc, const std::string& csv)
{
    std::string text;
    if (opts.format == "csv" && !csv.empty())
        text = csv;
    else
        text = doc.dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opts.out_path, std::ios::binary);
        if (!out) throw Error(Errc::IoError, "cannot write '" + opts.out_path + "'");
        out << text;
    }
}

int verdict_exit(bool pass) { return pass ? 0 : 1; }

Observable load_single_observable(const CommonOpts& opts, const Environment& env)
{
    const Json j = load_json(opts.observable_path);
    return parse_observable(j.contains("first") ? j.at("first") : j, env);
}

int run_born_rule(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const Observable obs = load_single_observable(opts, env);
    const FrequencyReport report =
        born_rule_experiment(env, obs, opts.n_sort, opts.n_draw, opts.seed);
    write_output(opts, to_json(report), to_csv(report));
    return verdict_exit(report.pass);
}

int run_no_replication(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const ObserverSpec ospec = load_observer_spec(opts.observer_path);
    const Observer observer = make_observer(ospec, env.framing.payload_width);
    const NoReplicationReport report =
        no_replication_check(observer, env, opts.cycles, opts.seed);
    write_output(opts, to_json(report), "");
    return verdict_exit(report.pass);
}

int run_locc_audit(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const ObserverSpec ospec = load_observer_spec(opts.observer_path);
    Observer observer = make_observer(ospec, env.framing.payload_width);

    std::vector<AuditRecord> records;
    if (!opts.report_path.empty()) {
        records = parse_audit_records(load_json(opts.report_path));
    } else {
        Rng rng(opts.seed);
        records = audit_view(observer.observe_session(env, opts.cycles, rng));
    }
    std::map<std::string, std::vector<std::size_t>> components;
    for (const auto& s : env.sources) components[s.id] = s.dofs;
    const LoccAuditReport report = locc_audit(records, observer, ospec.window, components);
    write_output(opts, to_json(report), "");
    return verdict_exit(report.pass);
}

int run_commutativity(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const Json j = load_json(opts.observable_path);
    if (!j.contains("first") || !j.contains("second"))
        throw Error(Errc::SpecInvalid, "commutativity needs {\"first\": ..., \"second\": ...}");
    const Observable first = parse_observable(j.at("first"), env);
    const Observable second = parse_observable(j.at("second"), env);
    const CommutativityReport report =
        commutativity_check(first, second, env, opts.trials, opts.seed, opts.jobs);
    write_output(opts, to_json(report), to_csv(report));
    return verdict_exit(report.pass);
}

int run_objective_ignorance(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const Observable obs = load_single_observable(opts, env);
    const ObjectiveIgnoranceReport report =
        objective_ignorance_experiment(env, obs, opts.trials, opts.seed);
    write_output(opts, to_json(report), "");
    return report.verdict == "fail" ? 1 : 0;
}

int run_time_symmetry(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const TimeSymmetryReport report =
        time_symmetry_check(env, opts.steps, opts.trials, opts.seed);
    write_output(opts, to_json(report), "");
    return verdict_exit(report.pass);
}

int run_decomp_equivalence(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const Environment alt = load_environment(opts.alt_env_path);
    if (alt.num_dof != env.num_dof)
        throw Error(Errc::SpecInvalid, "labelings over different num_dof are not comparable");
    const DecompEquivalenceReport report = decomp_equivalence_check(env, alt.sources, opts.steps);
    write_output(opts, to_json(report), "");
    return verdict_exit(report.pass);
}

int run_observe(const CommonOpts& opts)
{
    const Environment env = load_environment(opts.env_path);
    const ObserverSpec ospec = load_observer_spec(opts.observer_path);
    Observer observer = make_observer(ospec, env.framing.payload_width);
    Rng rng(opts.seed);
    const SessionReport report = observer.observe_session(env, opts.cycles, rng);
    write_output(opts, to_json(report), to_csv(report));
    return 0; // informational
}

int run_validate(const std::string& path)
{
    const Json j = load_json(path);
    if (j.contains("num_dof"))
        build_environment(j);
    else
        parse_observer_spec(j);
    std::cout << "OK\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"minimal-observer experiment runner"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string validate_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--env", opts.env_path, "environment spec (JSON)");
        cmd->add_option("--observer", opts.observer_path, "observer spec (JSON)");
        cmd->add_option("--observable", opts.observable_path, "observable spec (JSON)");
        cmd->add_option("--report", opts.report_path, "existing session report to audit");
        cmd->add_option("--alt-env", opts.alt_env_path, "alternative labeling env spec");
        cmd->add_option("--trials", opts.trials, "trial count");
        cmd->add_option("--cycles", opts.cycles, "observation cycles");
        cmd->add_option("--n-sort", opts.n_sort, "configurations sorted into the ancilla");
        cmd->add_option("--n-draw", opts.n_draw, "configurations drawn back out");
        cmd->add_option("--steps", opts.steps, "dynamics steps");
        cmd->add_option("--seed", opts.seed, "generator seed");
        cmd->add_option("--jobs", opts.jobs, "worker threads for independent trials")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", opts.out_path, "output path (default stdout)");
        cmd->add_option("--format", opts.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        return cmd;
    };

    auto* born = add_common(app.add_subcommand("born-rule", "ancilla sorting/drawing protocol"));
    auto* norep = add_common(app.add_subcommand("no-replication", "capacity and state-blindness check"));
    auto* locc = add_common(app.add_subcommand("locc-audit", "record provenance audit"));
    auto* comm = add_common(app.add_subcommand("commutativity", "two-observer order-swap protocol"));
    auto* objig = add_common(app.add_subcommand("objective-ignorance", "fine-grained probe non-commutation"));
    auto* tsym = add_common(app.add_subcommand("time-symmetry", "forward/inverse recovery check"));
    auto* decomp = add_common(app.add_subcommand("decomp-equivalence", "labeling-independent trajectory check"));
    auto* observe = add_common(app.add_subcommand("observe", "plain observation session"));
    auto* validate = app.add_subcommand("validate", "validate a specification document");
    validate->add_option("spec", validate_path, "spec path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (born->parsed()) return run_born_rule(opts);
        if (norep->parsed()) return run_no_replication(opts);
        if (locc->parsed()) return run_locc_audit(opts);
        if (comm->parsed()) return run_commutativity(opts);
        if (objig->parsed()) return run_objective_ignorance(opts);
        if (tsym->parsed()) return run_time_symmetry(opts);
        if (decomp->parsed()) return run_decomp_equivalence(opts);
        if (observe->parsed()) return run_observe(opts);
        if (validate->parsed()) return run_validate(validate_path);
    } catch (const minobs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
