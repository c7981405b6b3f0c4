#include "mmwent/config.hpp"

#include "mmwent/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace mmwent {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text)
{
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + s + "'");
    return v;
}

int parse_int(std::string_view key, std::string_view text)
{
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < -1000000000L || v > 1000000000L)
        throw ConfigError("key '" + std::string(key) + "': expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view key, std::string_view text, Parse parse)
{
    std::vector<T> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ','))
        if (!trim(item).empty())
            out.push_back(parse(key, item));
    return out;
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

std::string section_name(Scenario s)
{
    std::string name(to_string(s));
    for (char& c : name)
        if (c == '-')
            c = '_';
    return name;
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

} // namespace

std::string_view to_string(Scenario s)
{
    switch (s) {
    case Scenario::fig1: return "fig1";
    case Scenario::fig2: return "fig2";
    case Scenario::fig3: return "fig3";
    case Scenario::fig4: return "fig4";
    case Scenario::link_budget: return "link-budget";
    case Scenario::eb_thresholds: return "eb-thresholds";
    }
    return "?";
}

Scenario scenario_from_string(std::string_view name)
{
    std::string n(name);
    for (char& c : n)
        if (c == '_')
            c = '-';
    for (Scenario s : {Scenario::fig1, Scenario::fig2, Scenario::fig3, Scenario::fig4, Scenario::link_budget,
                       Scenario::eb_thresholds})
        if (to_string(s) == n)
            return s;
    if (n == "fig1-thermal-prep")
        return Scenario::fig1;
    if (n == "fig2-channel")
        return Scenario::fig2;
    if (n == "fig3-nongaussian")
        return Scenario::fig3;
    if (n == "fig4-relay")
        return Scenario::fig4;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

double Axis::at(int i) const
{
    if (steps <= 1)
        return min;
    if (i == steps - 1)
        return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

SweepSpec default_spec(Scenario s)
{
    SweepSpec spec;
    spec.scenario = s;
    spec.axis = {0.0, 1.0, 201};
    spec.axis2 = {0.0, 20.0, 101};
    spec.freq_ghz = {15.0, 30.0, 100.0, 300.0};
    spec.noon_n = {2, 5};
    spec.distances_m = {10.0, 20.0, 50.0, 100.0, 200.0, 500.0};
    spec.apertures_m = {1.0};
    switch (s) {
    case Scenario::fig1:
        spec.axis = {0.0, 300.0, 101};
        spec.freq_ghz = {300.0};
        break;
    case Scenario::fig3:
        spec.freq_ghz = {300.0};
        spec.squeeze_db = 10.0 * std::log10(2.0); // v = 1.25, one ebit
        break;
    case Scenario::link_budget:
        spec.freq_ghz = {30.0, 300.0};
        break;
    case Scenario::fig2:
    case Scenario::fig4:
    case Scenario::eb_thresholds:
        break;
    }
    return spec;
}

void SweepSpec::validate() const
{
    require(axis.steps >= 2, "points must be >= 2");
    require(axis.max > axis.min, "axis_max must exceed axis_min");
    require(!freq_ghz.empty(), "freq_ghz must not be empty");
    for (double f : freq_ghz)
        require(f > 0.0, "frequencies must be > 0");
    require(temp_k >= 0.0, "temp_k must be >= 0");
    for (double t : temps_k)
        require(t >= 0.0, "temps_k must be >= 0");
    require(squeeze_db >= 0.0, "squeeze_db must be >= 0");
    require(kappa >= 0.0 && kappa <= 1.0, "kappa must lie in [0, 1]");
    for (int n : noon_n)
        require(n >= 1, "noon_n entries must be >= 1");
    try {
        policy.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    switch (scenario) {
    case Scenario::fig1:
        require(axis.min >= 0.0, "temperature axis must be >= 0");
        require(axis2.steps >= 2, "axis2_points must be >= 2");
        require(axis2.max > axis2.min && axis2.min >= 0.0, "squeezing axis must be increasing and >= 0");
        break;
    case Scenario::fig2:
    case Scenario::fig3:
    case Scenario::fig4:
        require(axis.min >= 0.0 && axis.max <= 1.0, "transmissivity axis must lie in [0, 1]");
        break;
    case Scenario::link_budget:
        require(!distances_m.empty(), "distances_m must not be empty");
        for (double d : distances_m)
            require(d > 0.0, "distances must be > 0");
        require(!apertures_m.empty(), "apertures_m must not be empty");
        for (double a : apertures_m)
            require(a > 0.0, "apertures must be > 0");
        break;
    case Scenario::eb_thresholds:
        break;
    }
}

void apply_setting(SweepSpec& spec, std::string_view key_in, std::string_view value)
{
    const std::string key = trim(key_in);
    auto dbl = [&] { return parse_double(key, value); };
    auto integer = [&] { return parse_int(key, value); };
    auto dlist = [&] { return parse_list<double>(key, value, parse_double); };

    if (key == "axis_min") spec.axis.min = dbl();
    else if (key == "axis_max") spec.axis.max = dbl();
    else if (key == "points") spec.axis.steps = integer();
    else if (key == "axis2_min") spec.axis2.min = dbl();
    else if (key == "axis2_max") spec.axis2.max = dbl();
    else if (key == "axis2_points") spec.axis2.steps = integer();
    else if (key == "freq_ghz") spec.freq_ghz = dlist();
    else if (key == "temp_k") spec.temp_k = dbl();
    else if (key == "temps_k") spec.temps_k = dlist();
    else if (key == "squeeze_db") spec.squeeze_db = dbl();
    else if (key == "kappa") spec.kappa = dbl();
    else if (key == "noon_n") spec.noon_n = parse_list<int>(key, value, parse_int);
    else if (key == "cutoff") spec.policy.total_photon_cutoff = integer();
    else if (key == "max_cutoff") spec.policy.max_total_photon_cutoff = integer();
    else if (key == "thermal_cutoff") {
        if (trim(value) == "auto")
            spec.policy.thermal_index_cutoff.reset();
        else
            spec.policy.thermal_index_cutoff = integer();
    }
    else if (key == "tol") spec.policy.convergence_tol = dbl();
    else if (key == "completeness_tol") spec.policy.completeness_tol = dbl();
    else if (key == "distances_m") spec.distances_m = dlist();
    else if (key == "apertures_m") spec.apertures_m = dlist();
    else if (key == "pt_dbm") spec.pt_dbm = dbl();
    else if (key == "ref_squeeze_db") spec.ref_squeeze_db = dbl();
    else if (key == "ref_temp_k") spec.ref_temp_k = dbl();
    else if (key == "absorption_table") spec.absorption_table = trim(value);
    else if (key == "out") spec.out = trim(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config(SweepSpec& spec, std::istream& in)
{
    const std::string wanted = section_name(spec.scenario);
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            section = section_name(scenario_from_string(trim(std::string_view(t).substr(1, t.size() - 2))));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (!section.empty() && section != wanted)
            continue;
        try {
            apply_setting(spec, std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_config_file(SweepSpec& spec, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    apply_config(spec, in);
}

std::string to_config(const SweepSpec& spec)
{
    std::ostringstream os;
    os << "[" << section_name(spec.scenario) << "]\n";
    os << "axis_min = " << fmt_double(spec.axis.min) << "\n";
    os << "axis_max = " << fmt_double(spec.axis.max) << "\n";
    os << "points = " << spec.axis.steps << "\n";
    os << "axis2_min = " << fmt_double(spec.axis2.min) << "\n";
    os << "axis2_max = " << fmt_double(spec.axis2.max) << "\n";
    os << "axis2_points = " << spec.axis2.steps << "\n";
    os << "freq_ghz = " << fmt_list(spec.freq_ghz) << "\n";
    os << "temp_k = " << fmt_double(spec.temp_k) << "\n";
    os << "temps_k = " << fmt_list(spec.temps_k) << "\n";
    os << "squeeze_db = " << fmt_double(spec.squeeze_db) << "\n";
    os << "kappa = " << fmt_double(spec.kappa) << "\n";
    os << "noon_n = " << fmt_list(spec.noon_n) << "\n";
    os << "cutoff = " << spec.policy.total_photon_cutoff << "\n";
    os << "max_cutoff = " << spec.policy.max_total_photon_cutoff << "\n";
    os << "thermal_cutoff = "
       << (spec.policy.thermal_index_cutoff ? std::to_string(*spec.policy.thermal_index_cutoff) : std::string("auto"))
       << "\n";
    os << "tol = " << fmt_double(spec.policy.convergence_tol) << "\n";
    os << "completeness_tol = " << fmt_double(spec.policy.completeness_tol) << "\n";
    os << "distances_m = " << fmt_list(spec.distances_m) << "\n";
    os << "apertures_m = " << fmt_list(spec.apertures_m) << "\n";
    os << "pt_dbm = " << fmt_double(spec.pt_dbm) << "\n";
    os << "ref_squeeze_db = " << fmt_double(spec.ref_squeeze_db) << "\n";
    os << "ref_temp_k = " << fmt_double(spec.ref_temp_k) << "\n";
    if (!spec.absorption_table.empty())
        os << "absorption_table = " << spec.absorption_table << "\n";
    if (!spec.out.empty())
        os << "out = " << spec.out << "\n";
    return os.str();
}

} // namespace mmwent
