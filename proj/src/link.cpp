#include "mmwent/link.hpp"

#include "mmwent/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmwent::link {

double mean_photon_number(double frequency_hz, double temperature_k)
{
    if (!(frequency_hz > 0.0))
        throw std::invalid_argument("frequency must be > 0");
    if (!(temperature_k >= 0.0))
        throw std::invalid_argument("temperature must be >= 0");
    if (temperature_k == 0.0)
        return 0.0;
    const double x = kPlanck * frequency_hz / (kBoltzmann * temperature_k);
    return 1.0 / std::expm1(x);
}

double thermal_variance(double frequency_hz, double temperature_k)
{
    return 2.0 * mean_photon_number(frequency_hz, temperature_k) + 1.0;
}

void LinkEnvironment::validate() const
{
    if (!(frequency_hz > 0.0))
        throw std::invalid_argument("frequency must be > 0");
    if (!(temperature_k >= 0.0))
        throw std::invalid_argument("temperature must be >= 0");
    if (!(distance_m >= 0.0))
        throw std::invalid_argument("distance must be >= 0");
    if (!(aperture_m > 0.0))
        throw std::invalid_argument("aperture must be > 0");
}

double free_space_path_loss_db(double frequency_hz, double distance_m)
{
    if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
        throw std::invalid_argument("path loss needs positive distance and frequency");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

double friis_received_power_dbm(const LinkEnvironment& env, double pt_dbm)
{
    env.validate();
    return pt_dbm + env.tx_gain_dbi + env.rx_gain_dbi - free_space_path_loss_db(env.frequency_hz, env.distance_m);
}

double half_beamwidth_deg(double frequency_ghz, double aperture_m)
{
    if (!(frequency_ghz > 0.0) || !(aperture_m > 0.0))
        throw std::invalid_argument("beamwidth needs positive frequency and aperture");
    return 10.0 / (frequency_ghz * aperture_m);
}

double aperture_gain_dbi(double frequency_hz, double aperture_m, double efficiency)
{
    if (!(frequency_hz > 0.0) || !(aperture_m > 0.0) || !(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("aperture gain needs positive frequency, aperture and efficiency in (0, 1]");
    const double x = std::numbers::pi * aperture_m * frequency_hz / kSpeedOfLight;
    return 10.0 * std::log10(efficiency * x * x);
}

double contour_gain_dbi(double frequency_hz, double aperture_m, double contour_db, double efficiency)
{
    return aperture_gain_dbi(frequency_hz, aperture_m, efficiency) - contour_db;
}

AbsorptionModel::AbsorptionModel(std::vector<Point> points) : points_(std::move(points))
{
    if (points_.empty())
        throw std::invalid_argument("absorption model needs at least one point");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i].alpha_db_per_km >= 0.0))
            throw std::invalid_argument("absorption must be >= 0 dB/km");
        if (!(points_[i].frequency_hz > 0.0))
            throw std::invalid_argument("absorption table frequency must be > 0");
        if (i > 0 && !(points_[i].frequency_hz > points_[i - 1].frequency_hz))
            throw std::invalid_argument("absorption table frequencies must be strictly increasing");
    }
}

AbsorptionModel AbsorptionModel::default_model()
{
    // alpha = -10 log10(tau) / R_km
    return AbsorptionModel({
        {30e9, -10.0 * std::log10(0.998) / 0.1},
        {300e9, -10.0 * std::log10(0.977) / 0.05},
    });
}

AbsorptionModel AbsorptionModel::from_table(std::istream& in)
{
    std::vector<Point> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double f_ghz = 0.0;
        double alpha = 0.0;
        if (!(fields >> f_ghz >> alpha))
            throw std::invalid_argument("absorption table line " + std::to_string(line_no) + ": expected two numbers");
        pts.push_back({f_ghz * 1e9, alpha});
    }
    return AbsorptionModel(std::move(pts));
}

AbsorptionModel AbsorptionModel::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open absorption table " + path.string());
    return from_table(in);
}

bool AbsorptionModel::covers(double frequency_hz) const
{
    return frequency_hz >= points_.front().frequency_hz && frequency_hz <= points_.back().frequency_hz;
}

double AbsorptionModel::alpha_db_per_km(double frequency_hz) const
{
    if (!covers(frequency_hz)) {
        std::ostringstream msg;
        msg << "frequency " << frequency_hz / 1e9 << " GHz is outside the absorption table ["
            << points_.front().frequency_hz / 1e9 << ", " << points_.back().frequency_hz / 1e9 << "] GHz";
        throw FrequencyOutOfModelRange(msg.str());
    }
    if (points_.size() == 1)
        return points_.front().alpha_db_per_km;
    auto hi = std::lower_bound(points_.begin(), points_.end(), frequency_hz,
                               [](const Point& p, double f) { return p.frequency_hz < f; });
    if (hi == points_.begin())
        return hi->alpha_db_per_km;
    const auto lo = hi - 1;
    const double t = (frequency_hz - lo->frequency_hz) / (hi->frequency_hz - lo->frequency_hz);
    return lo->alpha_db_per_km + t * (hi->alpha_db_per_km - lo->alpha_db_per_km);
}

ThermalChannel channel_from_environment(const LinkEnvironment& env, const AbsorptionModel& model)
{
    env.validate();
    const double alpha = model.alpha_db_per_km(env.frequency_hz);
    const double tau = std::pow(10.0, -alpha * (env.distance_m / 1000.0) / 10.0);
    return ThermalChannel(tau, mean_photon_number(env.frequency_hz, env.temperature_k));
}

double eb_distance_m(const LinkEnvironment& env, const AbsorptionModel& model, EbScheme scheme)
{
    env.validate();
    const double omega = thermal_variance(env.frequency_hz, env.temperature_k);
    const double alpha = model.alpha_db_per_km(env.frequency_hz);
    const double tau_eb = eb_transmissivity(scheme, omega);
    if (!(tau_eb > 0.0))
        throw NoBreakingDistance("vacuum-limited noise: entanglement survives any distance");
    if (!(alpha > 0.0))
        throw NoBreakingDistance("zero absorption: transmissivity never falls to the breaking value");
    return 1000.0 * (-10.0 * std::log10(tau_eb)) / alpha;
}

} // namespace mmwent::link
