#include "dualsat/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

namespace dualsat {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value)
{
    std::vector<std::string_view> out;
    if (trim(value).empty())
        return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = value.find(',', start);
        out.push_back(trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected)
{
    throw ConfigError(key, key + ": expected " + expected + ", got '" + std::string(value) + "'");
}

double to_double(const std::string& key, std::string_view s)
{
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        bad_value(key, s, "a number");
    return x;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view s)
{
    Int x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        bad_value(key, s, "an integer");
    return x;
}

std::vector<double> to_doubles(const std::string& key, std::string_view s)
{
    std::vector<double> out;
    for (auto item : split_list(s))
        out.push_back(to_double(key, item));
    return out;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? ", " : "") + items[i];
    return out;
}

template <typename T, typename F>
std::string join_with(const std::vector<T>& items, F fmt)
{
    std::vector<std::string> parts;
    for (const auto& x : items)
        parts.push_back(fmt(x));
    return join(parts);
}

std::string_view to_string(InducedOver v)
{
    return v == InducedOver::OtherSet ? "other_set" : "unallocated";
}

struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

Field number(std::string key, double ExperimentConfig::*outer)
{
    return {std::move(key), [outer](ExperimentConfig& c, const std::string& k, std::string_view v) { c.*outer = to_double(k, v); },
            [outer](const ExperimentConfig& c) { return format_number(c.*outer); }};
}

template <typename Part>
Field number(std::string key, Part ExperimentConfig::*part, double Part::*field)
{
    return {std::move(key),
            [part, field](ExperimentConfig& c, const std::string& k, std::string_view v) {
                c.*part.*field = to_double(k, v);
            },
            [part, field](const ExperimentConfig& c) { return format_number(c.*part.*field); }};
}

Field integer(std::string key, int ExperimentConfig::*field)
{
    return {std::move(key), [field](ExperimentConfig& c, const std::string& k, std::string_view v) { c.*field = to_int<int>(k, v); },
            [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> kFields = [] {
        std::vector<Field> f;
        f.push_back(integer("experiment.pool_size", &ExperimentConfig::pool_size));
        f.push_back(integer("experiment.trials", &ExperimentConfig::trials));
        f.push_back(integer("experiment.first_trial", &ExperimentConfig::first_trial));
        f.push_back({"experiment.master_seed",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.master_seed = to_int<std::uint64_t>(k, v);
                     },
                     [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }});
        f.push_back({"experiment.snr_points_db",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.snr_points_db = to_doubles(k, v); },
                     [](const ExperimentConfig& c) { return join_with(c.snr_points_db, format_number); }});
        f.push_back({"experiment.scenarios",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.scenarios.clear();
                         for (auto item : split_list(v)) {
                             try {
                                 c.scenarios.push_back(parse_scenario(item));
                             } catch (const std::invalid_argument&) {
                                 bad_value(k, item, "full_cooperation, coordinated, independent or frequency_split");
                             }
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return join_with(c.scenarios, [](Scenario s) { return std::string(to_string(s)); });
                     }});
        f.push_back({"experiment.algorithms",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.algorithms.clear();
                         for (auto item : split_list(v)) {
                             try {
                                 c.algorithms.push_back(parse_algorithm(item));
                             } catch (const std::invalid_argument&) {
                                 bad_value(k, item, "siua, sus or random");
                             }
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return join_with(c.algorithms, [](Algorithm a) { return std::string(to_string(a)); });
                     }});
        f.push_back(integer("experiment.max_redraws", &ExperimentConfig::max_redraws));

        f.push_back({"geometry.beams_per_satellite",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.geometry.beams_per_satellite = to_int<int>(k, v);
                     },
                     [](const ExperimentConfig& c) { return std::to_string(c.geometry.beams_per_satellite); }});
        f.push_back(number("geometry.beam_diameter_km", &ExperimentConfig::geometry, &GeometryConfig::beam_diameter_km));
        f.push_back(number("geometry.altitude_km", &ExperimentConfig::geometry, &GeometryConfig::altitude_km));
        f.push_back({"geometry.lattice_offset_km",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         const auto xy = to_doubles(k, v);
                         if (xy.size() != 2)
                             bad_value(k, v, "two numbers 'x, y'");
                         c.geometry.lattice_offset_km = {xy[0], xy[1]};
                     },
                     [](const ExperimentConfig& c) {
                         return format_number(c.geometry.lattice_offset_km.x()) + ", "
                                + format_number(c.geometry.lattice_offset_km.y());
                     }});
        f.push_back(number("geometry.coverage_radius_km", &ExperimentConfig::geometry, &GeometryConfig::coverage_radius_km));

        f.push_back(number("pattern.u_coeff", &ExperimentConfig::pattern, &PatternConfig::u_coeff));
        f.push_back({"pattern.theta_3db_rad",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         if (v == "auto")
                             c.pattern.theta_3db_rad.reset();
                         else
                             c.pattern.theta_3db_rad = to_double(k, v);
                     },
                     [](const ExperimentConfig& c) {
                         return c.pattern.theta_3db_rad ? format_number(*c.pattern.theta_3db_rad) : std::string("auto");
                     }});

        f.push_back(number("linkbudget.p_sat_dbw", &ExperimentConfig::budget, &LinkBudget::p_sat_dbw));
        f.push_back(number("linkbudget.g_tx_dbi", &ExperimentConfig::budget, &LinkBudget::g_tx_dbi));
        f.push_back(number("linkbudget.g_rx_dbi", &ExperimentConfig::budget, &LinkBudget::g_rx_dbi));
        f.push_back(number("linkbudget.fsl_db", &ExperimentConfig::budget, &LinkBudget::fsl_db));
        f.push_back(number("linkbudget.noise_dbw", &ExperimentConfig::budget, &LinkBudget::noise_dbw));
        f.push_back(number("linkbudget.snr_ref_db", &ExperimentConfig::budget, &LinkBudget::snr_ref_db));

        f.push_back({"sweep.snr_db",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.sweep_snr_db = to_doubles(k, v); },
                     [](const ExperimentConfig& c) { return join_with(c.sweep_snr_db, format_number); }});
        f.push_back({"sweep.pool_sizes",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.pool_sweep.clear();
                         for (auto item : split_list(v))
                             c.pool_sweep.push_back(to_int<int>(k, item));
                     },
                     [](const ExperimentConfig& c) {
                         return join_with(c.pool_sweep, [](int x) { return std::to_string(x); });
                     }});
        f.push_back(number("sweep.pool_snr_db", &ExperimentConfig::pool_sweep_snr_db));

        f.push_back({"scheduling.induced_over",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         if (v == "other_set")
                             c.induced_over = InducedOver::OtherSet;
                         else if (v == "unallocated")
                             c.induced_over = InducedOver::Unallocated;
                         else
                             bad_value(k, v, "other_set or unallocated");
                     },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.induced_over)); }});
        return f;
    }();
    return kFields;
}

}  // namespace

std::string format_number(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& f : fields())
        keys.push_back(f.key);
    return keys;
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig config;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        const Field* field = nullptr;
        for (const auto& f : fields())
            if (f.key == key)
                field = &f;
        if (!field)
            throw ConfigError(key, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(key, "line " + std::to_string(line_no) + ": key '" + key + "' given twice");
        field->set(config, key, value);
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("", "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& config)
{
    std::string out;
    for (const auto& f : fields())
        out += f.key + " = " + f.get(config) + "\n";
    return out;
}

}  // namespace dualsat
