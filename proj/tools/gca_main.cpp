// Command-line front end: one config, several analyses.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gca/config.hpp"
#include "gca/error.hpp"
#include "gca/pipeline.hpp"

namespace {

void print_summary(const gca::RunResult& r, std::ostream& os) {
    const auto& rep = r.report;
    auto show = [&os](const nlohmann::ordered_json& v) {
        if (v.is_null()) {
            os << "NA";
        } else if (v.is_number_float()) {
            os << v.get<double>();
        } else {
            os << v;
        }
    };
    if (rep.contains("diagnostics")) {
        const auto& d = rep["diagnostics"];
        if (d.contains("r_squared")) {
            os << "fit: r2=";
            show(d["r_squared"]);
            os << " residual_sd=";
            show(d["residual_sd"]);
            os << " dof=" << d["dof"] << "\n";
        } else {
            os << "gev fit: scale=";
            show(d["scale"]);
            os << " shape=";
            show(d["shape"]);
            os << " loglik=";
            show(d["log_likelihood"]);
            os << "\n";
        }
    }
    if (rep.contains("attribution_table")) {
        for (const auto& row : rep["attribution_table"]) {
            os << "  " << row["name"].get<std::string>() << ": ";
            show(row["best_estimate"]);
            if (!row["ci_lo"].is_null()) {
                os << " (";
                show(row["ci_lo"]);
                os << ", ";
                show(row["ci_hi"]);
                os << ") p=";
                show(row["p_value"]);
            }
            os << " [" << row["units"].get<std::string>() << "]\n";
        }
    }
    if (rep.contains("risk_ratios")) {
        for (const auto& rr : rep["risk_ratios"]) {
            os << "  RR " << rr["name"].get<std::string>() << ": ";
            show(rr["risk_ratio"]);
            os << " p(RR=1)=";
            show(rr["p_value_rr1"]);
            os << "\n";
        }
    }
    if (rep.contains("granger")) {
        for (const auto& g : rep["granger"]) {
            os << "  granger " << g["name"].get<std::string>() << ": F=";
            show(g["f_statistic"]);
            os << " p=";
            show(g["p_value"]);
            os << (g["reject"].get<bool>() ? " reject" : " do not reject") << "\n";
        }
    }
    if (rep.contains("fingerprint")) {
        for (const auto& f : rep["fingerprint"]) {
            for (const auto& s : f["factors"]) {
                os << "  fingerprint " << s["name"].get<std::string>() << ": beta=";
                show(s["estimate"]);
                os << " detected=" << s["detected"] << " attributed=" << s["attributed"] << "\n";
            }
            if (f.contains("comparison")) os << f["comparison"].get<std::string>();
        }
    }
    if (rep.contains("simulation")) {
        const auto& s = rep["simulation"];
        os << "  simulation: " << s["description"].get<std::string>() << ": rejection rate ";
        show(s["rejection_rate"]);
        os << " +- ";
        show(s["mc_standard_error"]);
        os << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal attribution of climate time series: counterfactual regression, Granger tests, "
                 "fingerprinting and extreme-event risk ratios"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> level;
    std::string out_dir = "out";
    bool quiet = false;

    struct Sub {
        const char* name;
        const char* help;
        gca::Command command;
    };
    const Sub subs[] = {
        {"fit", "Fit the counterfactual regression and report diagnostics", gca::Command::Fit},
        {"attribute", "Fit, evaluate scenarios and report change estimates", gca::Command::Attribute},
        {"granger", "Run the configured Granger-causality tests", gca::Command::Granger},
        {"fingerprint", "Run the configured fingerprint regressions", gca::Command::Fingerprint},
        {"simulate", "Run the configured synthetic size/power experiment", gca::Command::Simulate},
        {"report", "Run every configured analysis and write plot data", gca::Command::Report},
    };
    gca::Command chosen = gca::Command::Report;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "Analysis config (JSON)")->required();
        sub->add_option("--seed", seed, "Random seed, overrides the config");
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--level", level, "Confidence level in (0, 1), overrides the config");
        sub->add_flag("--quiet", quiet, "Do not print a summary");
        sub->callback([&chosen, cmd = s.command] { chosen = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const gca::AnalysisConfig cfg = gca::load_config(config_path);
        gca::RunOptions opts;
        opts.command = chosen;
        opts.seed = seed;
        opts.level = level;
        const gca::RunResult result = gca::run(cfg, opts);
        gca::write_outputs(result, out_dir);
        if ((chosen == gca::Command::Report || chosen == gca::Command::Fit) && result.data) {
            (void)gca::emit_plot_data(result, std::filesystem::path(out_dir) / "plot");
        }
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        if (!quiet) {
            print_summary(result, std::cout);
            std::cout << "wrote " << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
        }
    } catch (const gca::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gca::is_numerical(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
