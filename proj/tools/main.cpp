#include <Eigen/Core>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "groklab/experiment.hpp"

namespace {

using namespace groklab;

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig resolve_config(const std::string& config_path, const std::vector<std::string>& sets) {
    std::string text = config_path.empty() ? config_to_json(ExperimentConfig{}) : read_file(config_path);
    for (const auto& kv : sets) apply_override(text, kv);
    return config_from_json(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"groklab: grokking dynamics laboratory on finite-group tasks"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    int threads = 0;
    app.add_option("--threads", threads, "Eigen thread count (0 = hardware)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--set", sets, "override config field, e.g. --set train.lr=0.001");
    };

    auto* cmd_train = app.add_subcommand("train", "full-batch training run with telemetry");
    add_common(cmd_train);
    auto* cmd_scan = app.add_subcommand("scan", "phase-boundary scan over (M, p, seed) grid");
    add_common(cmd_scan);
    auto* cmd_ascend = app.add_subcommand("ascend", "energy gradient-ascent survey");
    add_common(cmd_ascend);

    auto* cmd_verify = app.add_subcommand("verify", "run numeric verification suites");
    std::string suite = "all";
    std::uint64_t vseed = 0;
    std::string json_out;
    cmd_verify->add_option("suite", suite, "suite name or 'all'");
    cmd_verify->add_option("--seed", vseed, "master seed");
    cmd_verify->add_option("--json", json_out, "write the aggregated report to this path");
    int vworkers = 0;
    cmd_verify->add_option("--workers", vworkers, "parallel trial workers");

    auto* cmd_group = app.add_subcommand("group", "build or validate a Cayley table");
    std::vector<std::string> recipe;
    std::string group_out;
    cmd_group->add_option("recipe", recipe,
                          "cyclic M | product M1 M2 .. | dihedral N | file PATH")
        ->expected(-1);
    cmd_group->add_option("--out", group_out, "write the canonical table here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads > 0) Eigen::setNbThreads(threads);

    try {
        if (cmd_train->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, sets);
            TrainOutcome out = run_train(cfg);
            const RunRecord& fin = out.log.final_record();
            std::cout << "run dir: " << out.dir << "\n"
                      << "final train acc " << fin.train_acc << ", test acc " << fin.test_acc
                      << ", grokking delay " << out.delay << "\n";
            return 0;
        }
        if (cmd_scan->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, sets);
            ScanOutcome out = run_scan(cfg);
            std::cout << "scan dir: " << out.dir << "\n";
            for (const auto& [M, pstar] : out.pstar)
                std::cout << "  M=" << M << "  p*=" << pstar << "\n";
            std::cout << "fit: p* = " << out.fit_c << " * log(M)/M  (max rel residual " << out.fit_residual
                      << ", " << out.nonconverged << " non-converged cells excluded)\n";
            return 0;
        }
        if (cmd_ascend->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, sets);
            AscendOutcome out = run_ascend(cfg);
            int converged = 0;
            for (const auto& r : out.results) converged += r.converged ? 1 : 0;
            std::cout << "ascend dir: " << out.dir << "\n"
                      << converged << "/" << out.results.size() << " seeds converged\n";
            return 0;
        }
        if (cmd_verify->parsed()) {
            std::vector<VerifyReport> reports;
            try {
                reports = run_verify(suite, vseed, vworkers);
            } catch (const ConfigError& e) {
                std::cerr << e.what() << "\nknown suites:";
                for (const auto& s : verify_suite_names()) std::cerr << ' ' << s;
                std::cerr << " all\n";
                return 2;
            }
            bool ok = true;
            for (const auto& r : reports) {
                std::cout << (r.pass ? "[PASS] " : (r.gating ? "[FAIL] " : "[info] ")) << r.check
                          << "  (" << r.seconds << "s)\n";
                if (r.gating && !r.pass) ok = false;
            }
            const std::string agg = reports_to_json(reports);
            if (!json_out.empty()) {
                std::ofstream f(json_out);
                f << agg << "\n";
            } else {
                std::cout << agg << "\n";
            }
            return ok ? 0 : 1;
        }
        if (cmd_group->parsed()) {
            if (recipe.empty()) {
                std::cerr << "group: recipe required\n";
                return 2;
            }
            Group g;
            const std::string& kind = recipe[0];
            if (kind == "cyclic" && recipe.size() == 2) {
                g = make_cyclic(std::stoi(recipe[1]));
            } else if (kind == "dihedral" && recipe.size() == 2) {
                g = make_dihedral(std::stoi(recipe[1]));
            } else if (kind == "product" && recipe.size() >= 2) {
                std::vector<Group> fs;
                for (std::size_t i = 1; i < recipe.size(); ++i) fs.push_back(make_cyclic(std::stoi(recipe[i])));
                g = make_product(fs);
            } else if (kind == "file" && recipe.size() == 2) {
                g = load_cayley_file(recipe[1]);
            } else {
                std::cerr << "group: bad recipe\n";
                return 2;
            }
            validate_group(g);
            const std::string text = to_cayley_text(g);
            if (group_out.empty())
                std::cout << text;
            else {
                std::ofstream f(group_out, std::ios::binary);
                f << text;
            }
            std::cerr << "group " << g.name << ": order " << g.order << ", "
                      << (g.abelian ? "abelian" : "non-abelian") << ", all invariants valid\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
