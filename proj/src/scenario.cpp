#include "mmwent/scenario.hpp"

#include "mmwent/channel.hpp"
#include "mmwent/errors.hpp"
#include "mmwent/link.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>

namespace mmwent {

namespace {

template <typename Fn>
std::vector<SweepRow> compute_rows(std::size_t count, Fn&& fn)
{
    std::vector<SweepRow> rows(count);
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            rows[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

link::AbsorptionModel absorption_for(const SweepSpec& spec)
{
    if (spec.absorption_table.empty())
        return link::AbsorptionModel::default_model();
    try {
        return link::AbsorptionModel::from_file(spec.absorption_table);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

double hz(double ghz) { return ghz * 1e9; }

/// First pair of neighbouring grid values where `inside` flips, refined by bisection.
std::optional<double> grid_crossing(const std::function<bool(double)>& inside, const Axis& axis)
{
    bool prev = inside(axis.at(0));
    for (int i = 1; i < axis.steps; ++i) {
        const bool cur = inside(axis.at(i));
        if (cur != prev)
            return bisect_boundary(inside, axis.at(i - 1), axis.at(i));
        prev = cur;
    }
    return std::nullopt;
}

std::string maybe_number(const std::optional<double>& v) { return v ? format_number(*v) : "none"; }

double single_channel_eln(const Squeezing& s, double tau, double omega)
{
    return log_negativity_cm(evolve_single_channel(tmsv_cm(s), ThermalChannel::from_omega(tau, omega)));
}

bool entangled_after(EbScheme scheme, const Squeezing& s, double tau, double omega)
{
    const ThermalChannel ch = ThermalChannel::from_omega(tau, omega);
    switch (scheme) {
    case EbScheme::single: return smallest_pt_symplectic_eigenvalue(evolve_single_channel(tmsv_cm(s), ch)) < 1.0;
    case EbScheme::direct_relay_symmetric: return smallest_pt_symplectic_eigenvalue(direct_relay_cm(s, ch, ch)) < 1.0;
    case EbScheme::swap_relay_symmetric: return smallest_pt_symplectic_eigenvalue(swap_relay_cm(s, ch, ch)) < 1.0;
    }
    return false;
}

double bisected_eb_transmissivity(EbScheme scheme, const Squeezing& s, double omega)
{
    auto inside = [&](double tau) { return entangled_after(scheme, s, tau, omega); };
    if (inside(0.0))
        return 0.0;
    if (!inside(1.0))
        return 1.0;
    return bisect_boundary(inside, 0.0, 1.0);
}

} // namespace

double bisect_boundary(const std::function<bool(double)>& inside, double lo, double hi, double tol)
{
    const bool at_lo = inside(lo);
    for (int it = 0; it < 400 && (hi - lo) > tol * std::max(1.0, std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (inside(mid) == at_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

SweepResult run_fig1(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::fig1;
    res.columns = {"freq_ghz", "temp_k", "squeeze_db", "nbar", "e_ln_bits"};

    const auto nt = static_cast<std::size_t>(spec.axis.steps);
    const auto ns = static_cast<std::size_t>(spec.axis2.steps);
    const std::size_t per_freq = nt * ns;

    auto eln = [](double f_hz, double temp, double db) {
        const double nbar = link::mean_photon_number(f_hz, temp);
        return log_negativity_cm(thermal_tms_cm(Squeezing::from_db(db), nbar, nbar));
    };

    res.rows = compute_rows(spec.freq_ghz.size() * per_freq, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / per_freq];
        const double temp = spec.axis.at(static_cast<int>((i % per_freq) / ns));
        const double db = spec.axis2.at(static_cast<int>(i % ns));
        SweepRow row;
        row.cells = {f, temp, db, link::mean_photon_number(hz(f), temp), eln(hz(f), temp, db)};
        return row;
    });

    for (double f : spec.freq_ghz) {
        auto at_ref_db = [&](double temp) { return eln(hz(f), temp, spec.ref_squeeze_db) > 0.0; };
        auto at_ref_temp = [&](double db) { return eln(hz(f), spec.ref_temp_k, db) > 0.0; };
        res.summary.push_back({"zero_crossing",
                               {{"freq_ghz", format_number(f)},
                                {"squeeze_db", format_number(spec.ref_squeeze_db)},
                                {"temp_k", maybe_number(grid_crossing(at_ref_db, spec.axis))}}});
        res.summary.push_back({"zero_crossing",
                               {{"freq_ghz", format_number(f)},
                                {"temp_k", format_number(spec.ref_temp_k)},
                                {"squeeze_db", maybe_number(grid_crossing(at_ref_temp, spec.axis2))}}});
    }
    return res;
}

SweepResult run_fig2(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::fig2;
    res.columns = {"freq_ghz", "temp_k", "nbar", "omega", "tau", "e_ln_bits", "tau_eb"};
    const Squeezing s = Squeezing::from_db(spec.squeeze_db);
    const auto nt = static_cast<std::size_t>(spec.axis.steps);

    res.rows = compute_rows(spec.freq_ghz.size() * nt, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / nt];
        const double tau = spec.axis.at(static_cast<int>(i % nt));
        const double nbar = link::mean_photon_number(hz(f), spec.temp_k);
        const double omega = 2.0 * nbar + 1.0;
        SweepRow row;
        row.cells = {f, spec.temp_k, nbar, omega, tau, single_channel_eln(s, tau, omega),
                     eb_transmissivity(EbScheme::single, omega)};
        return row;
    });

    for (double f : spec.freq_ghz) {
        const double omega = link::thermal_variance(hz(f), spec.temp_k);
        auto inside = [&](double tau) { return entangled_after(EbScheme::single, s, tau, omega); };
        res.summary.push_back({"tau_eb",
                               {{"freq_ghz", format_number(f)},
                                {"closed_form", format_number(eb_transmissivity(EbScheme::single, omega))},
                                {"bisection", maybe_number(grid_crossing(inside, spec.axis))}}});
    }
    return res;
}

SweepResult run_fig3(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::fig3;
    res.columns = {"freq_ghz", "temp_k", "state", "tau", "e_ln_bits", "converged", "total_photon_cutoff",
                   "thermal_cutoff", "trace_deficit"};
    const Squeezing s = Squeezing::from_db(spec.squeeze_db);

    std::vector<std::string> states = {"tmsv", "pss"};
    for (int n : spec.noon_n)
        states.push_back("noon" + std::to_string(n));

    const auto nt = static_cast<std::size_t>(spec.axis.steps);
    const std::size_t per_freq = states.size() * nt;

    res.rows = compute_rows(spec.freq_ghz.size() * per_freq, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / per_freq];
        const std::size_t si = (i % per_freq) / nt;
        const double tau = spec.axis.at(static_cast<int>(i % nt));
        const ThermalChannel ch(tau, link::mean_photon_number(hz(f), spec.temp_k));

        FockEvaluation ev;
        if (si == 0) {
            ev.e_ln = log_negativity_cm(evolve_single_channel(tmsv_cm(s), ch));
            ev.converged = true;
        } else if (si == 1) {
            const double kappa = spec.kappa;
            ev = evaluate_after_channel([&](const TruncationPolicy& p) { return pss_density(s, kappa, p); }, ch,
                                        spec.policy, Execution::serial);
        } else {
            ev = noon_after_channel(spec.noon_n[si - 2], ch, spec.policy);
        }
        SweepRow row;
        row.converged = ev.converged;
        row.cells = {f,
                     spec.temp_k,
                     states[si],
                     tau,
                     ev.e_ln,
                     std::int64_t{ev.converged ? 1 : 0},
                     std::int64_t{ev.total_photon_cutoff},
                     std::int64_t{ev.thermal_cutoff},
                     ev.trace_deficit};
        return row;
    });

    const std::size_t e_col = res.column("e_ln_bits");
    for (std::size_t fi = 0; fi < spec.freq_ghz.size(); ++fi)
        for (std::size_t si = 0; si < states.size(); ++si) {
            std::size_t used = 0;
            std::size_t excluded = 0;
            double max_e = 0.0;
            std::optional<double> onset_lo;
            std::optional<double> onset_hi;
            std::optional<double> last_zero;
            for (std::size_t k = 0; k < nt; ++k) {
                const SweepRow& row = res.rows[fi * per_freq + si * nt + k];
                if (!row.converged) {
                    ++excluded;
                    continue;
                }
                ++used;
                const double e = std::get<double>(row.cells[e_col]);
                max_e = std::max(max_e, e);
                const double tau = spec.axis.at(static_cast<int>(k));
                if (e == 0.0)
                    last_zero = tau;
                else if (!onset_hi) {
                    onset_hi = tau;
                    onset_lo = last_zero;
                }
            }
            res.summary.push_back({"state_summary",
                                   {{"freq_ghz", format_number(spec.freq_ghz[fi])},
                                    {"state", states[si]},
                                    {"rows_used", std::to_string(used)},
                                    {"rows_excluded_nonconverged", std::to_string(excluded)},
                                    {"max_e_ln_bits", format_number(max_e)},
                                    {"onset_tau_lo", maybe_number(onset_lo)},
                                    {"onset_tau_hi", maybe_number(onset_hi)}}});
        }
    return res;
}

SweepResult run_fig4(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::fig4;
    res.columns = {"freq_ghz", "temp_k", "omega", "tau_combined", "tau_link", "e_ln_direct_bits",
                   "e_ln_swap_bits", "e_ln_single_bits", "tau_eb_direct", "tau_eb_swap"};
    const Squeezing s = Squeezing::from_db(spec.squeeze_db);
    const auto nt = static_cast<std::size_t>(spec.axis.steps);

    res.rows = compute_rows(spec.freq_ghz.size() * nt, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / nt];
        const double combined = spec.axis.at(static_cast<int>(i % nt));
        const double tau = std::sqrt(combined);
        const double omega = link::thermal_variance(hz(f), spec.temp_k);
        const ThermalChannel ch = ThermalChannel::from_omega(tau, omega);
        SweepRow row;
        row.cells = {f,
                     spec.temp_k,
                     omega,
                     combined,
                     tau,
                     log_negativity_cm(direct_relay_cm(s, ch, ch)),
                     log_negativity_cm(swap_relay_cm(s, ch, ch)),
                     single_channel_eln(s, combined, omega),
                     eb_transmissivity(EbScheme::direct_relay_symmetric, omega),
                     eb_transmissivity(EbScheme::swap_relay_symmetric, omega)};
        return row;
    });

    for (double f : spec.freq_ghz) {
        const double omega = link::thermal_variance(hz(f), spec.temp_k);
        const double d = eb_transmissivity(EbScheme::direct_relay_symmetric, omega);
        const double sw = eb_transmissivity(EbScheme::swap_relay_symmetric, omega);
        auto direct_in = [&](double c) { return entangled_after(EbScheme::direct_relay_symmetric, s, std::sqrt(c), omega); };
        auto swap_in = [&](double c) { return entangled_after(EbScheme::swap_relay_symmetric, s, std::sqrt(c), omega); };
        const auto bd = grid_crossing(direct_in, spec.axis);
        const auto bs = grid_crossing(swap_in, spec.axis);
        res.summary.push_back({"tau_eb",
                               {{"freq_ghz", format_number(f)},
                                {"direct_link", format_number(d)},
                                {"swap_link", format_number(sw)},
                                {"direct_combined_bisection", maybe_number(bd)},
                                {"swap_combined_bisection", maybe_number(bs)},
                                {"relative_gap", format_number((sw - d) / sw)}}});
    }
    return res;
}

SweepResult run_link_budget(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::link_budget;
    res.columns = {"freq_ghz", "temp_k", "aperture_m", "distance_m", "nbar", "omega", "alpha_db_per_km", "tau",
                   "squeeze_db", "e_ln_bits", "tau_eb", "tau_margin", "beyond_eb", "eb_distance_m",
                   "peak_gain_dbi", "gain_3db_contour_dbi", "half_beamwidth_deg", "path_loss_db", "pr_dbm"};
    const auto model = absorption_for(spec);
    for (double f : spec.freq_ghz)
        if (!model.covers(hz(f)))
            throw FrequencyOutOfModelRange("link-budget frequency " + format_number(f) +
                                           " GHz is outside the absorption table");
    const Squeezing s = Squeezing::from_db(spec.squeeze_db);
    const std::size_t nd = spec.distances_m.size();
    const std::size_t na = spec.apertures_m.size();

    res.rows = compute_rows(spec.freq_ghz.size() * na * nd, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / (na * nd)];
        const double aperture = spec.apertures_m[(i / nd) % na];
        const double distance = spec.distances_m[i % nd];
        link::LinkEnvironment env;
        env.frequency_hz = hz(f);
        env.temperature_k = spec.temp_k;
        env.distance_m = distance;
        env.aperture_m = aperture;
        const double contour = link::contour_gain_dbi(env.frequency_hz, aperture, 3.0);
        env.tx_gain_dbi = contour;
        env.rx_gain_dbi = contour;

        const ThermalChannel ch = link::channel_from_environment(env, model);
        const double tau_eb = eb_transmissivity(EbScheme::single, ch.omega());
        double eb_distance = std::numeric_limits<double>::infinity();
        try {
            eb_distance = link::eb_distance_m(env, model, EbScheme::single);
        } catch (const NoBreakingDistance&) {
        }
        const double margin = ch.tau() - tau_eb;
        SweepRow row;
        row.cells = {f,
                     spec.temp_k,
                     aperture,
                     distance,
                     ch.nbar(),
                     ch.omega(),
                     model.alpha_db_per_km(env.frequency_hz),
                     ch.tau(),
                     spec.squeeze_db,
                     log_negativity_cm(evolve_single_channel(tmsv_cm(s), ch)),
                     tau_eb,
                     margin,
                     std::int64_t{margin <= 0.0 ? 1 : 0},
                     eb_distance,
                     link::aperture_gain_dbi(env.frequency_hz, aperture),
                     contour,
                     link::half_beamwidth_deg(f, aperture),
                     link::free_space_path_loss_db(env.frequency_hz, distance),
                     link::friis_received_power_dbm(env, spec.pt_dbm)};
        return row;
    });
    return res;
}

SweepResult run_eb_thresholds(const SweepSpec& spec)
{
    spec.validate();
    SweepResult res;
    res.scenario = Scenario::eb_thresholds;
    res.columns = {"freq_ghz", "temp_k", "nbar", "omega",
                   "tau_eb_single", "tau_eb_single_bisection",
                   "tau_eb_direct", "tau_eb_direct_bisection",
                   "tau_eb_swap", "tau_eb_swap_bisection",
                   "eb_distance_single_m", "eb_distance_direct_m", "eb_distance_swap_m"};
    const auto model = absorption_for(spec);
    const Squeezing s = Squeezing::from_db(spec.squeeze_db);
    const std::vector<double> temps = spec.temps_k.empty() ? std::vector<double>{spec.temp_k} : spec.temps_k;
    const std::size_t ntemp = temps.size();

    res.rows = compute_rows(spec.freq_ghz.size() * ntemp, [&](std::size_t i) {
        const double f = spec.freq_ghz[i / ntemp];
        const double temp = temps[i % ntemp];
        const double nbar = link::mean_photon_number(hz(f), temp);
        const double omega = 2.0 * nbar + 1.0;
        link::LinkEnvironment env;
        env.frequency_hz = hz(f);
        env.temperature_k = temp;

        SweepRow row;
        row.cells = {f, temp, nbar, omega};
        for (EbScheme scheme :
             {EbScheme::single, EbScheme::direct_relay_symmetric, EbScheme::swap_relay_symmetric}) {
            row.cells.emplace_back(eb_transmissivity(scheme, omega));
            row.cells.emplace_back(bisected_eb_transmissivity(scheme, s, omega));
        }
        for (EbScheme scheme :
             {EbScheme::single, EbScheme::direct_relay_symmetric, EbScheme::swap_relay_symmetric}) {
            if (!model.covers(env.frequency_hz)) {
                row.cells.emplace_back(std::string("out_of_model_range"));
                continue;
            }
            try {
                row.cells.emplace_back(link::eb_distance_m(env, model, scheme));
            } catch (const NoBreakingDistance&) {
                row.cells.emplace_back(std::numeric_limits<double>::infinity());
            }
        }
        return row;
    });
    return res;
}

SweepResult run_scenario(const SweepSpec& spec)
{
    switch (spec.scenario) {
    case Scenario::fig1: return run_fig1(spec);
    case Scenario::fig2: return run_fig2(spec);
    case Scenario::fig3: return run_fig3(spec);
    case Scenario::fig4: return run_fig4(spec);
    case Scenario::link_budget: return run_link_budget(spec);
    case Scenario::eb_thresholds: return run_eb_thresholds(spec);
    }
    throw ConfigError("unknown scenario");
}

std::string link_budget_report(const SweepResult& res)
{
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%8s %6s %8s %9s %8s %9s %8s %8s %9s %7s %9s %7s %9s\n", "f[GHz]", "T[K]",
                  "R[m]", "nbar", "omega", "alpha", "tau", "E_LN", "tau_eb", "margin", "R_eb[m]", "G3dB",
                  "hbw[deg]");
    os << line;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        std::snprintf(line, sizeof line,
                      "%8.1f %6.1f %8.1f %9.3f %8.2f %9.4f %8.5f %8.4f %9.5f %7.4f %9.1f %7.2f %9.4f%s\n",
                      res.number(i, "freq_ghz"), res.number(i, "temp_k"), res.number(i, "distance_m"),
                      res.number(i, "nbar"), res.number(i, "omega"), res.number(i, "alpha_db_per_km"),
                      res.number(i, "tau"), res.number(i, "e_ln_bits"), res.number(i, "tau_eb"),
                      res.number(i, "tau_margin"), res.number(i, "eb_distance_m"),
                      res.number(i, "gain_3db_contour_dbi"), res.number(i, "half_beamwidth_deg"),
                      res.number(i, "beyond_eb") > 0 ? "  beyond eb distance" : "");
        os << line;
    }
    return os.str();
}

} // namespace mmwent
