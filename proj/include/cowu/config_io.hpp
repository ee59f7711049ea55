#ifndef COWU_CONFIG_IO_HPP
#define COWU_CONFIG_IO_HPP

// Flat key-value config files: one `key = value` pair per line, `#`
// comments. Unknown keys are errors; omitted keys keep their defaults.

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cowu/core.hpp"

namespace cowu {

/// A fully resolved scenario: system parameters, the queried range and
/// the frame split ratio.
struct Scenario {
    SystemConfig config;
    QueryRange range;
    double alpha = 0.0;

    ObservationModel observation_model() const {
        return ObservationModel::uniform(config);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    bool query_lower_set = false, query_upper_set = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        double num = 0.0;
        try {
            size_t pos = 0;
            num = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": bad numeric value '" + value + "'");
        }

        if (key == "n_pull") sc.config.n_pull = static_cast<int>(num);
        else if (key == "n_push") sc.config.n_push = static_cast<int>(num);
        else if (key == "slots_per_frame")
            sc.config.slots_per_frame = static_cast<int>(num);
        else if (key == "slot_duration_s") sc.config.slot_duration = num;
        else if (key == "tx_prob") sc.config.tx_prob = num;
        else if (key == "arrival_rate") sc.config.arrival_rate = num;
        else if (key == "power_tx_w") sc.config.power_tx = num;
        else if (key == "power_rx_w") sc.config.power_rx = num;
        else if (key == "v_min") sc.config.v_min = num;
        else if (key == "v_max") sc.config.v_max = num;
        else if (key == "query_lower") { sc.range.lower = num; query_lower_set = true; }
        else if (key == "query_upper") { sc.range.upper = num; query_upper_set = true; }
        else if (key == "alpha") sc.alpha = num;
        else
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
    }
    if (!query_lower_set) sc.range.lower = sc.config.v_min;
    if (!query_upper_set) sc.range.upper = sc.config.v_max;
    sc.config.validate();
    if (sc.range.lower < sc.config.v_min || sc.range.upper > sc.config.v_max ||
        sc.range.lower > sc.range.upper)
        throw std::runtime_error("query range outside observation support");
    if (sc.alpha < 0.0 || sc.alpha > 1.0)
        throw std::runtime_error("alpha must be in [0, 1]");
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config file: " + path);
    return parse_scenario(file);
}

}  // namespace cowu

#endif  // COWU_CONFIG_IO_HPP
