// mmwent: parameter sweeps for entanglement over thermal mm-wave channels.
//
//   mmwent fig2 --freq-ghz 30,300 --points 101 --out fig2.csv
//   mmwent link-budget --config links.cfg
//
// Exit codes: 0 ok, 2 bad configuration, 3 some rows did not converge
// (the CSV is still written with those rows flagged), 1 anything else.

#include "mmwent/errors.hpp"
#include "mmwent/scenario.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::vector<double> freq_ghz;
    std::optional<double> temp_k;
    std::optional<double> squeeze_db;
    std::optional<int> cutoff;
    std::optional<double> tol;
    std::string absorption_table;
    std::optional<int> points;
    bool dump_config = false;
};

void add_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
    cmd->add_option("--freq-ghz", o.freq_ghz, "frequency list in GHz, comma separated")->delimiter(',');
    cmd->add_option("--temp-k", o.temp_k, "environment temperature in K");
    cmd->add_option("--squeeze-db", o.squeeze_db, "two-mode squeezing in dB");
    cmd->add_option("--cutoff", o.cutoff, "initial total photon cutoff for Fock runs");
    cmd->add_option("--tol", o.tol, "E_LN convergence tolerance for cutoff doubling");
    cmd->add_option("--absorption-table", o.absorption_table, "two-column table: GHz, dB/km");
    cmd->add_option("--points", o.points, "grid points on the main axis");
    cmd->add_flag("--dump-config", o.dump_config, "print the effective config and exit");
}

mmwent::SweepSpec build_spec(mmwent::Scenario scenario, const Overrides& o)
{
    mmwent::SweepSpec spec = mmwent::default_spec(scenario);
    if (!o.config.empty())
        mmwent::apply_config_file(spec, o.config);
    if (!o.freq_ghz.empty())
        spec.freq_ghz = o.freq_ghz;
    if (o.temp_k)
        spec.temp_k = *o.temp_k;
    if (o.squeeze_db)
        spec.squeeze_db = *o.squeeze_db;
    if (o.cutoff)
        spec.policy.total_photon_cutoff = *o.cutoff;
    if (o.tol)
        spec.policy.convergence_tol = *o.tol;
    if (!o.absorption_table.empty())
        spec.absorption_table = o.absorption_table;
    if (o.points)
        spec.axis.steps = *o.points;
    if (!o.out.empty())
        spec.out = o.out;
    spec.validate();
    return spec;
}

int emit(const mmwent::SweepResult& res, const std::string& out)
{
    if (out.empty() || out == "-") {
        res.write_csv(std::cout);
    } else {
        std::ofstream f(out);
        if (!f)
            throw mmwent::ConfigError("cannot write " + out);
        res.write_csv(f);
        if (res.scenario == mmwent::Scenario::link_budget)
            std::cout << mmwent::link_budget_report(res);
    }
    if (const std::size_t bad = res.nonconverged()) {
        std::cerr << "mmwent: " << bad << " row(s) did not converge; see the converged column\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement survival over thermal mm-wave channels"};
    app.require_subcommand(1);

    Overrides o;
    std::optional<mmwent::Scenario> chosen;
    for (mmwent::Scenario s : {mmwent::Scenario::fig1, mmwent::Scenario::fig2, mmwent::Scenario::fig3,
                               mmwent::Scenario::fig4, mmwent::Scenario::link_budget,
                               mmwent::Scenario::eb_thresholds}) {
        const std::string name(mmwent::to_string(s));
        CLI::App* cmd = app.add_subcommand(name, "run the " + name + " sweep");
        add_flags(cmd, o);
        cmd->callback([&chosen, s] { chosen = s; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const mmwent::SweepSpec spec = build_spec(*chosen, o);
        if (o.dump_config) {
            std::cout << mmwent::to_config(spec);
            return 0;
        }
        return emit(mmwent::run_scenario(spec), spec.out);
    } catch (const mmwent::ConfigError& e) {
        std::cerr << "mmwent: config error: " << e.what() << '\n';
        return 2;
    } catch (const mmwent::FrequencyOutOfModelRange& e) {
        std::cerr << "mmwent: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mmwent: config error: " << e.what() << '\n';
        return 2;
    } catch (const mmwent::NonConverged& e) {
        std::cerr << "mmwent: " << e.what() << '\n';
        return 3;
    } catch (const mmwent::TruncationTooSmall& e) {
        std::cerr << "mmwent: " << e.what() << '\n';
        return 3;
    } catch (const mmwent::CutoffInsufficient& e) {
        std::cerr << "mmwent: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "mmwent: " << e.what() << '\n';
        return 1;
    }
}
