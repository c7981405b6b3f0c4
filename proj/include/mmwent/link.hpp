#pragma once

// Physical layer: blackbody occupation, atmospheric absorption, Friis budget
// and the distance at which a link stops carrying entanglement.

#include "mmwent/gaussian.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace mmwent::link {

// CODATA 2018 exact values.
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kSpeedOfLight = 299792458.0;   // m / s

/// Bose-Einstein occupation of one mode; 0 at T = 0.
double mean_photon_number(double frequency_hz, double temperature_k);

/// 2 nbar + 1
double thermal_variance(double frequency_hz, double temperature_k);

struct LinkEnvironment {
    double frequency_hz = 300e9;
    double temperature_k = 300.0;
    double distance_m = 0.0;
    /// Transmit dish size D.
    double aperture_m = 1.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;

    /// Throws std::invalid_argument for non-positive frequency or aperture,
    /// negative temperature or distance.
    void validate() const;
    /// Millimetre-wave band taken as 1-300 GHz.
    bool in_millimetre_band() const { return frequency_hz >= 1e9 && frequency_hz <= 300e9; }
};

/// P_r = P_t + G_t + G_r + 20 log10(c / (4 pi R f)), all in dB(m).
double friis_received_power_dbm(const LinkEnvironment& env, double pt_dbm);

/// 20 log10(4 pi R f / c)
double free_space_path_loss_db(double frequency_hz, double distance_m);

/// 3 dB half-beamwidth in degrees, ~10 / (f D) with f in GHz and D in metres.
double half_beamwidth_deg(double frequency_ghz, double aperture_m);

/// On-axis gain of a uniformly illuminated circular aperture, (pi D f / c)^2 * efficiency.
double aperture_gain_dbi(double frequency_hz, double aperture_m, double efficiency = 1.0);

/// Gain on the contour contour_db below the peak.
double contour_gain_dbi(double frequency_hz, double aperture_m, double contour_db, double efficiency = 1.0);

/// Specific attenuation in dB/km, piecewise linear in frequency between
/// calibration points and undefined outside them.
class AbsorptionModel {
public:
    struct Point {
        double frequency_hz;
        double alpha_db_per_km;
    };

    explicit AbsorptionModel(std::vector<Point> points);

    /// Anchored on 0.2% loss over 100 m at 30 GHz and 2.3% over 50 m at 300 GHz.
    static AbsorptionModel default_model();

    /// Two columns, frequency_ghz and alpha_db_per_km; '#' starts a comment line.
    static AbsorptionModel from_table(std::istream& in);
    static AbsorptionModel from_file(const std::filesystem::path& path);

    const std::vector<Point>& points() const { return points_; }
    bool covers(double frequency_hz) const;
    /// Throws FrequencyOutOfModelRange outside the table.
    double alpha_db_per_km(double frequency_hz) const;

private:
    std::vector<Point> points_;
};

/// Absorption-only transmissivity 10^(-alpha R_km / 10) with nbar at the
/// environment temperature.
ThermalChannel channel_from_environment(const LinkEnvironment& env, const AbsorptionModel& model);

/// Per-link distance where the absorption transmissivity reaches the
/// entanglement-breaking value of the scheme.
/// Throws NoBreakingDistance when omega = 1 or the absorption is zero.
double eb_distance_m(const LinkEnvironment& env, const AbsorptionModel& model, EbScheme scheme);

} // namespace mmwent::link
