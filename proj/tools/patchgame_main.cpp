#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "patchgame/attack_graph.hpp"
#include "patchgame/config.hpp"
#include "patchgame/simulation.hpp"
#include "patchgame/threat_intel.hpp"

namespace {

using namespace patchgame;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

struct CommonOpts {
    std::string scenario;
    std::string corpus_dir;
    std::string likelihood_model;
    std::string config_path;
    std::string strategy = "cost_aware";
    std::string attacker = "adaptive";
    int runs = 100;
    uint64_t seed = 42;
    double defender_budget = 7500.0;
    double attacker_budget = 15000.0;
    int horizon = 60;
    std::string out_dir = "out";
    std::string qtable_path;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scenario", o.scenario, "Scenario file (JSON)")->required();
    cmd->add_option("--corpus", o.corpus_dir, "Threat-intelligence corpus directory")
        ->required();
    cmd->add_option("--likelihood-model", o.likelihood_model,
                    "Exploit-likelihood model file (JSON)")
        ->required();
    cmd->add_option("--config", o.config_path, "Optional config file overriding defaults");
    cmd->add_option("--runs", o.runs, "Monte Carlo runs per strategy");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--defender-budget", o.defender_budget, "Defender budget");
    cmd->add_option("--attacker-budget", o.attacker_budget, "Attacker budget");
    cmd->add_option("--horizon", o.horizon, "Step horizon per run");
    cmd->add_option("--out-dir", o.out_dir, "Output directory");
    cmd->add_option("--qtable", o.qtable_path, "Q-table file for the adaptive strategy");
}

SimulationConfig build_config(const CommonOpts& o) {
    SimulationConfig cfg;
    if (!o.config_path.empty()) apply_config_file(cfg, o.config_path);
    cfg.scenario_path = o.scenario;
    cfg.corpus_dir = o.corpus_dir;
    cfg.likelihood_model_path = o.likelihood_model;
    auto strategy = parse_strategy(o.strategy);
    if (!strategy) throw std::runtime_error("unknown strategy: " + o.strategy);
    cfg.strategy = *strategy;
    if (o.attacker == "scripted") {
        cfg.attacker = AttackerKind::Scripted;
    } else if (o.attacker == "adaptive") {
        cfg.attacker = AttackerKind::Adaptive;
    } else {
        throw std::runtime_error("unknown attacker kind: " + o.attacker);
    }
    cfg.runs = o.runs;
    cfg.master_seed = o.seed;
    cfg.budgets.defender = o.defender_budget;
    cfg.budgets.attacker = o.attacker_budget;
    cfg.horizon = o.horizon;
    if (!o.qtable_path.empty()) cfg.qtable = QTable::load(o.qtable_path);
    return cfg;
}

int cmd_simulate(const CommonOpts& o) {
    SimulationConfig cfg = build_config(o);
    ScenarioBundle bundle = load_bundle(cfg);
    std::filesystem::create_directories(o.out_dir);

    BatchReport report = run_batch(cfg, bundle);
    write_file(o.out_dir + "/report.json", report.to_json());
    write_file(o.out_dir + "/effective_config.json", config_to_json(cfg));
    write_file(o.out_dir + "/runs.csv", run_metrics_csv(cfg, bundle));
    write_file(o.out_dir + "/progression.csv", report.progression_csv());
    RunResult first = run_episode(cfg, bundle, 0);
    write_file(o.out_dir + "/trace_run0.csv", trace_csv(first.trace));

    std::cout << report.comparison_table();
    std::cout << "report written to " << o.out_dir << "/report.json\n";
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    SimulationConfig cfg = build_config(o);
    ScenarioBundle bundle = load_bundle(cfg);
    std::filesystem::create_directories(o.out_dir);

    BatchReport report = run_compare(cfg, bundle);
    write_file(o.out_dir + "/comparison.json", report.to_json());
    write_file(o.out_dir + "/comparison.csv", report.comparison_table());
    write_file(o.out_dir + "/progression.csv", report.progression_csv());

    std::cout << report.comparison_table();
    std::cout << "pareto:";
    for (StrategyKind k : report.pareto) std::cout << ' ' << strategy_name(k);
    std::cout << "\ncomparison written to " << o.out_dir << "/comparison.json\n";
    return 0;
}

int cmd_train_rl(const CommonOpts& o, int episodes, const std::string& out_path,
                 const std::string& summary_path) {
    SimulationConfig cfg = build_config(o);
    ScenarioBundle bundle = load_bundle(cfg);

    auto [qtable, summary] = train_on_scenario(cfg, bundle, episodes, o.seed);
    qtable.save(out_path);
    if (!summary_path.empty()) write_file(summary_path, summary.to_json());

    std::cout << "trained " << episodes << " episodes, " << qtable.size()
              << " states visited; mean reward " << summary.mean_reward << "\n";
    std::cout << "q-table written to " << out_path << "\n";
    return 0;
}

int cmd_dump_graph(const CommonOpts& o, const std::string& out_path) {
    SimulationConfig cfg = build_config(o);
    ScenarioBundle bundle = load_bundle(cfg);
    ThreatScores scores = threat_scores(bundle.system, bundle.corpus, bundle.model);
    AttackGraph graph = build_graph(bundle.system, scores, bundle.corpus);
    const std::string dump = dump_graph(graph);
    if (out_path.empty()) {
        std::cout << dump;
    } else {
        write_file(out_path, dump);
        std::cout << "graph written to " << out_path << "\n";
    }
    return 0;
}

int cmd_fit_likelihood(const std::string& csv, const std::string& out, int epochs, double lr) {
    LikelihoodModel m = fit_likelihood_model(csv, epochs, lr);
    nlohmann::json doc;
    doc["bias"] = m.bias;
    doc["weights"] = {{"cvss_norm", m.w_cvss_norm},
                      {"epss", m.w_epss},
                      {"kev", m.w_kev},
                      {"exploit_available", m.w_exploit_available},
                      {"campaign", m.w_campaign}};
    write_file(out, doc.dump(2));
    std::cout << "model written to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Game-theoretic patch strategy simulator"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo batch for one strategy");
    add_common_flags(simulate, sim_opts);
    simulate->add_option("--strategy", sim_opts.strategy,
                         "cvss_only|cvss_exploit_aware|business_value|cost_aware|"
                         "adaptive_threat_intel");
    simulate->add_option("--attacker", sim_opts.attacker, "scripted|adaptive");

    CommonOpts cmp_opts;
    auto* compare = app.add_subcommand(
        "compare", "Run all five strategies and report the Pareto frontier");
    add_common_flags(compare, cmp_opts);
    compare->add_option("--attacker", cmp_opts.attacker, "scripted|adaptive");

    CommonOpts rl_opts;
    int episodes = 200;
    std::string qtable_out = "qtable.tsv";
    std::string summary_out;
    auto* train_rl = app.add_subcommand("train-rl", "Train the adaptive strategy's Q-table");
    add_common_flags(train_rl, rl_opts);
    train_rl->add_option("--episodes", episodes, "Training episodes");
    train_rl->add_option("--out", qtable_out, "Q-table output file");
    train_rl->add_option("--summary", summary_out, "Training summary output (JSON)");

    CommonOpts dump_opts;
    std::string graph_out;
    auto* dump = app.add_subcommand("dump-graph", "Dump the attack graph nodes and edges");
    add_common_flags(dump, dump_opts);
    dump->add_option("--out", graph_out, "Output file (stdout when omitted)");

    std::string fit_csv, fit_out = "likelihood_model.json";
    int fit_epochs = 2000;
    double fit_lr = 0.5;
    auto* fit = app.add_subcommand("fit-likelihood",
                                   "Fit the exploit-likelihood model on a labeled CSV");
    fit->add_option("--csv", fit_csv, "Training CSV")->required();
    fit->add_option("--out", fit_out, "Model output file");
    fit->add_option("--epochs", fit_epochs, "Gradient-descent epochs");
    fit->add_option("--lr", fit_lr, "Learning rate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (compare->parsed()) return cmd_compare(cmp_opts);
        if (train_rl->parsed()) return cmd_train_rl(rl_opts, episodes, qtable_out, summary_out);
        if (dump->parsed()) return cmd_dump_graph(dump_opts, graph_out);
        if (fit->parsed()) return cmd_fit_likelihood(fit_csv, fit_out, fit_epochs, fit_lr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
