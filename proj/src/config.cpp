// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "bsched/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bsched {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kNetworkKeys = {
    "num_bns",       "num_antennas",   "noise_power_dbm", "power_budget_mw", "bandwidth_hz",
    "slot_seconds",  "alpha_max",      "d_max_bits",      "v_param",         "utility",
    "epsilon",       "it_max",         "eta_tol",         "horizon",         "seed",
    "replicas",      "controller",     "rician_k",        "pathloss_exp",    "carrier_freq_hz",
    "geometry",      "blocklength",    "error_prob",      "warmup_fraction", "workers",
};

const std::set<std::string, std::less<>> kGeometryKeys = {"distances", "ring_distance", "average_distance",
                                                          "radius", "inner_radius"};

const std::set<std::string, std::less<>> kExperimentKeys = {"name", "sweep", "output_dir", "emit"};

const char* type_name(const json& v)
{
    return v.type_name();
}

double number_at(const json& doc, const std::string& key, double fallback, const std::string& path)
{
    if (!doc.contains(key))
        return fallback;
    const json& v = doc.at(key);
    if (!v.is_number())
        throw ConfigError(path, std::string("expected a number, got ") + type_name(v));
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(path, "must be finite");
    return x;
}

long long integer_at(const json& doc, const std::string& key, long long fallback, const std::string& path)
{
    if (!doc.contains(key))
        return fallback;
    const json& v = doc.at(key);
    if (v.is_number_integer())
        return v.get<long long>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9e15)
            return static_cast<long long>(x);
    }
    throw ConfigError(path, std::string("expected an integer, got ") + type_name(v));
}

std::string string_at(const json& doc, const std::string& key, const std::string& fallback, const std::string& path)
{
    if (!doc.contains(key))
        return fallback;
    const json& v = doc.at(key);
    if (!v.is_string())
        throw ConfigError(path, std::string("expected a string, got ") + type_name(v));
    return v.get<std::string>();
}

void require(bool ok, const std::string& path, const std::string& message)
{
    if (!ok)
        throw ConfigError(path, message);
}

GeometrySpec parse_geometry(const json& g)
{
    require(g.is_object(), "geometry", "expected an object");
    for (const auto& [key, value] : g.items())
        if (!kGeometryKeys.contains(key))
            throw ConfigError("geometry." + key, "unknown key");
    GeometrySpec spec;
    if (g.contains("distances")) {
        const json& d = g.at("distances");
        require(d.is_array() && !d.empty(), "geometry.distances", "expected a nonempty array of numbers");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::string path = "geometry.distances[" + std::to_string(i) + "]";
            require(d[i].is_number(), path, "expected a number");
            const double x = d[i].get<double>();
            require(x > 0.0 && std::isfinite(x), path, "must be positive");
            spec.distances.push_back(x);
        }
    }
    if (g.contains("ring_distance")) {
        spec.ring_distance = number_at(g, "ring_distance", 0.0, "geometry.ring_distance");
        require(*spec.ring_distance > 0.0, "geometry.ring_distance", "must be positive");
    }
    spec.inner_radius = number_at(g, "inner_radius", spec.inner_radius, "geometry.inner_radius");
    require(spec.inner_radius >= 0.0, "geometry.inner_radius", "must be >= 0");
    if (g.contains("radius")) {
        spec.radius = number_at(g, "radius", 0.0, "geometry.radius");
        require(*spec.radius > spec.inner_radius, "geometry.radius", "must exceed inner_radius");
    }
    spec.average_distance = number_at(g, "average_distance", 30.0, "geometry.average_distance");
    if (!spec.radius && spec.distances.empty() && !spec.ring_distance)
        require(*spec.average_distance > spec.inner_radius, "geometry.average_distance",
                "must exceed inner_radius");
    return spec;
}

bool is_network_path(std::string_view path)
{
    const auto dot = path.find('.');
    if (dot == std::string_view::npos)
        return kNetworkKeys.contains(path) && path != "geometry";
    return path.substr(0, dot) == "geometry" && kGeometryKeys.contains(path.substr(dot + 1));
}

json::json_pointer pointer_for(std::string_view path)
{
    std::string ptr = "/";
    for (char c : path)
        ptr += (c == '.') ? '/' : c;
    return json::json_pointer(ptr);
}

} // namespace

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watts_to_dbm(double watts)
{
    return 10.0 * std::log10(watts) + 30.0;
}

NetworkConfig parse_network_config(const json& doc)
{
    require(doc.is_object(), "", "configuration must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!kNetworkKeys.contains(key))
            throw ConfigError(key, "unknown key");

    NetworkConfig cfg;
    cfg.num_bns = static_cast<int>(integer_at(doc, "num_bns", cfg.num_bns, "num_bns"));
    require(cfg.num_bns >= 1, "num_bns", "must be >= 1");
    cfg.num_antennas = static_cast<int>(integer_at(doc, "num_antennas", cfg.num_antennas, "num_antennas"));
    require(cfg.num_antennas >= 1, "num_antennas", "must be >= 1");
    cfg.channel.num_antennas = cfg.num_antennas;

    cfg.link.noise_power = dbm_to_watts(number_at(doc, "noise_power_dbm", -110.0, "noise_power_dbm"));
    cfg.scheduler.power_budget = 1e-3 * number_at(doc, "power_budget_mw", 500.0, "power_budget_mw");
    require(cfg.scheduler.power_budget > 0.0, "power_budget_mw", "must be > 0");
    cfg.link.bandwidth = number_at(doc, "bandwidth_hz", cfg.link.bandwidth, "bandwidth_hz");
    require(cfg.link.bandwidth > 0.0, "bandwidth_hz", "must be > 0");
    cfg.link.slot_seconds = number_at(doc, "slot_seconds", cfg.link.slot_seconds, "slot_seconds");
    require(cfg.link.slot_seconds > 0.0, "slot_seconds", "must be > 0");
    cfg.link.alpha_max = number_at(doc, "alpha_max", cfg.link.alpha_max, "alpha_max");
    require(cfg.link.alpha_max > 0.0 && cfg.link.alpha_max <= 1.0, "alpha_max", "must lie in (0, 1]");

    cfg.admission.d_max = number_at(doc, "d_max_bits", cfg.admission.d_max, "d_max_bits");
    require(cfg.admission.d_max > 0.0, "d_max_bits", "must be > 0");
    cfg.admission.v_param = number_at(doc, "v_param", cfg.admission.v_param, "v_param");
    require(cfg.admission.v_param > 0.0, "v_param", "must be > 0");
    try {
        cfg.admission.utility = parse_utility(string_at(doc, "utility", "sum", "utility"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("utility", "expected one of sum, proportional, common");
    }

    cfg.scheduler.epsilon = number_at(doc, "epsilon", cfg.scheduler.epsilon, "epsilon");
    require(cfg.scheduler.epsilon > 0.0, "epsilon", "must be > 0");
    cfg.scheduler.it_max = static_cast<int>(integer_at(doc, "it_max", cfg.scheduler.it_max, "it_max"));
    require(cfg.scheduler.it_max >= 1, "it_max", "must be >= 1");
    cfg.scheduler.eta_tol = number_at(doc, "eta_tol", cfg.scheduler.eta_tol, "eta_tol");
    require(cfg.scheduler.eta_tol > 0.0, "eta_tol", "must be > 0");

    if (doc.contains("blocklength")) {
        const json& L = doc.at("blocklength");
        if (L.is_null() || (L.is_string() && L.get<std::string>() == "inf")) {
            cfg.scheduler.rate_model.blocklength.reset();
        } else {
            require(L.is_number(), "blocklength", "expected a number, null or \"inf\"");
            const double x = L.get<double>();
            require(std::isfinite(x) && x >= 1.0, "blocklength", "must be >= 1");
            cfg.scheduler.rate_model.blocklength = x;
        }
    }
    cfg.scheduler.rate_model.error_prob = number_at(doc, "error_prob", cfg.scheduler.rate_model.error_prob, "error_prob");
    require(cfg.scheduler.rate_model.error_prob > 0.0 && cfg.scheduler.rate_model.error_prob < 1.0, "error_prob",
            "must lie in (0, 1)");

    cfg.horizon = static_cast<int>(integer_at(doc, "horizon", cfg.horizon, "horizon"));
    require(cfg.horizon >= 1, "horizon", "must be >= 1");
    const long long seed = integer_at(doc, "seed", 1, "seed");
    require(seed >= 0, "seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.replicas = static_cast<int>(integer_at(doc, "replicas", cfg.replicas, "replicas"));
    require(cfg.replicas >= 1, "replicas", "must be >= 1");
    try {
        cfg.controller = parse_controller(string_at(doc, "controller", "mdpp", "controller"));
    } catch (const std::invalid_argument&) {
        throw ConfigError("controller", "expected mdpp or mrt_baseline");
    }

    cfg.channel.rician_k = number_at(doc, "rician_k", cfg.channel.rician_k, "rician_k");
    require(cfg.channel.rician_k >= 0.0, "rician_k", "must be >= 0");
    cfg.channel.pathloss_exp = number_at(doc, "pathloss_exp", cfg.channel.pathloss_exp, "pathloss_exp");
    require(cfg.channel.pathloss_exp > 0.0, "pathloss_exp", "must be > 0");
    cfg.channel.carrier_freq = number_at(doc, "carrier_freq_hz", cfg.channel.carrier_freq, "carrier_freq_hz");
    require(cfg.channel.carrier_freq > 0.0, "carrier_freq_hz", "must be > 0");

    if (doc.contains("geometry"))
        cfg.geometry = parse_geometry(doc.at("geometry"));
    if (!cfg.geometry.distances.empty())
        require(static_cast<int>(cfg.geometry.distances.size()) == cfg.num_bns, "geometry.distances",
                "length must equal num_bns");

    cfg.warmup_fraction = number_at(doc, "warmup_fraction", cfg.warmup_fraction, "warmup_fraction");
    require(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0, "warmup_fraction", "must lie in [0, 1)");
    cfg.workers = static_cast<int>(integer_at(doc, "workers", cfg.workers, "workers"));
    require(cfg.workers >= 0, "workers", "must be >= 0");

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("", e.what());
    }
    return cfg;
}

json network_config_to_json(const NetworkConfig& cfg)
{
    json g = json::object();
    if (!cfg.geometry.distances.empty())
        g["distances"] = cfg.geometry.distances;
    else if (cfg.geometry.ring_distance)
        g["ring_distance"] = *cfg.geometry.ring_distance;
    else if (cfg.geometry.radius)
        g["radius"] = *cfg.geometry.radius;
    else
        g["average_distance"] = cfg.geometry.average_distance.value_or(30.0);
    if (cfg.geometry.distances.empty() && !cfg.geometry.ring_distance)
        g["inner_radius"] = cfg.geometry.inner_radius;

    json doc = {
        {"num_bns", cfg.num_bns},
        {"num_antennas", cfg.num_antennas},
        {"noise_power_dbm", watts_to_dbm(cfg.link.noise_power)},
        {"power_budget_mw", cfg.scheduler.power_budget * 1e3},
        {"bandwidth_hz", cfg.link.bandwidth},
        {"slot_seconds", cfg.link.slot_seconds},
        {"alpha_max", cfg.link.alpha_max},
        {"d_max_bits", cfg.admission.d_max},
        {"v_param", cfg.admission.v_param},
        {"utility", std::string(to_string(cfg.admission.utility))},
        {"epsilon", cfg.scheduler.epsilon},
        {"it_max", cfg.scheduler.it_max},
        {"eta_tol", cfg.scheduler.eta_tol},
        {"horizon", cfg.horizon},
        {"seed", cfg.seed},
        {"replicas", cfg.replicas},
        {"controller", std::string(to_string(cfg.controller))},
        {"rician_k", cfg.channel.rician_k},
        {"pathloss_exp", cfg.channel.pathloss_exp},
        {"carrier_freq_hz", cfg.channel.carrier_freq},
        {"geometry", g},
        {"error_prob", cfg.scheduler.rate_model.error_prob},
        {"warmup_fraction", cfg.warmup_fraction},
        {"workers", cfg.workers},
    };
    if (cfg.scheduler.rate_model.blocklength)
        doc["blocklength"] = *cfg.scheduler.rate_model.blocklength;
    else
        doc["blocklength"] = "inf";
    return doc;
}

ExperimentSpec parse_experiment(const json& doc)
{
    require(doc.is_object(), "", "configuration must be a JSON object");
    ExperimentSpec spec;
    json network = json::object();
    for (const auto& [key, value] : doc.items()) {
        if (kExperimentKeys.contains(key))
            continue;
        if (!kNetworkKeys.contains(key))
            throw ConfigError(key, "unknown key");
        network[key] = value;
    }
    spec.base_document = network;
    spec.base = parse_network_config(network);
    spec.name = string_at(doc, "name", spec.name, "name");
    spec.output_dir = string_at(doc, "output_dir", spec.output_dir, "output_dir");

    if (doc.contains("emit")) {
        const json& e = doc.at("emit");
        require(e.is_array(), "emit", "expected an array of strings");
        spec.emit.clear();
        for (std::size_t i = 0; i < e.size(); ++i) {
            const std::string path = "emit[" + std::to_string(i) + "]";
            require(e[i].is_string(), path, "expected a string");
            const std::string kind = e[i].get<std::string>();
            if (kind == "summary_json")
                spec.emit.insert(EmitKind::SummaryJson);
            else if (kind == "slots_csv")
                spec.emit.insert(EmitKind::SlotsCsv);
            else if (kind == "sweep_csv")
                spec.emit.insert(EmitKind::SweepCsv);
            else
                throw ConfigError(path, "expected summary_json, slots_csv or sweep_csv");
        }
    }

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        require(s.is_array(), "sweep", "expected an array of {param, values} objects");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string path = "sweep[" + std::to_string(i) + "]";
            const json& axis = s[i];
            require(axis.is_object() && axis.contains("param") && axis.contains("values") && axis.size() == 2, path,
                    "expected an object with exactly the keys param and values");
            require(axis.at("param").is_string(), path + ".param", "expected a string");
            SweepAxis a;
            a.param = axis.at("param").get<std::string>();
            require(is_network_path(a.param), path + ".param", "'" + a.param + "' is not a configuration field");
            const json& values = axis.at("values");
            require(values.is_array() && !values.empty(), path + ".values", "expected a nonempty array");
            for (const json& v : values)
                a.values.push_back(v);
            spec.sweep.push_back(std::move(a));
        }
        // Validates every point up front so a bad value fails before any simulation.
        expand_sweep(spec);
    }
    return spec;
}

ExperimentSpec parse_experiment_text(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", e.what());
    }
    return parse_experiment(doc);
}

ExperimentSpec load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot open configuration file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_text(buffer.str());
}

void apply_override(ExperimentSpec& spec, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("", "override must look like key=value, got '" + std::string(assignment) + "'");
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    if (key == "name" || key == "output_dir") {
        require(value.is_string(), key, "expected a string");
        (key == "name" ? spec.name : spec.output_dir) = value.get<std::string>();
        return;
    }
    if (key == "geometry") {
        spec.base_document["geometry"] = value;
    } else {
        if (!is_network_path(key))
            throw ConfigError(key, "unknown key");
        if (key.starts_with("geometry.") && !spec.base_document.contains("geometry"))
            spec.base_document["geometry"] = json::object();
        spec.base_document[pointer_for(key)] = value;
    }
    spec.base = parse_network_config(spec.base_document);
    expand_sweep(spec);
}

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec)
{
    std::vector<SweepPoint> points;
    std::vector<std::size_t> idx(spec.sweep.size(), 0);
    for (;;) {
        SweepPoint p;
        p.document = spec.base_document;
        for (std::size_t a = 0; a < spec.sweep.size(); ++a) {
            const SweepAxis& axis = spec.sweep[a];
            const json& v = axis.values[idx[a]];
            if (axis.param.starts_with("geometry.") && !p.document.contains("geometry"))
                p.document["geometry"] = json::object();
            p.document[pointer_for(axis.param)] = v;
            p.assignment.emplace_back(axis.param, v);
        }
        try {
            p.config = parse_network_config(p.document);
        } catch (const ConfigError& e) {
            std::string where;
            for (const auto& [k, v] : p.assignment)
                where += (where.empty() ? "" : ", ") + k + "=" + v.dump();
            throw ConfigError(e.field(), std::string(e.what()) + (where.empty() ? "" : " (sweep point " + where + ")"));
        }
        points.push_back(std::move(p));

        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == spec.sweep[k].values.size())
            idx[k++] = 0;
        if (k == idx.size())
            break;
    }
    return points;
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names = {"fig3_convergence", "fig4_tradeoff", "fig5_common_vs_M",
                                                   "fig7_sum_vs_N",    "fig8_fairness", "fig9_fbl_range",
                                                   "fig10_fbl_psi"};
    return names;
}

ExperimentSpec preset(std::string_view name)
{
    json doc;
    if (name == "fig3_convergence") {
        // Mean iterations versus N and M, and utility versus the iteration cap.
        doc = {{"utility", "sum"},
               {"v_param", 1e5},
               {"horizon", 500},
               {"replicas", 5},
               {"sweep",
                {{{"param", "num_bns"}, {"values", {2, 4, 6, 8, 10}}},
                 {{"param", "num_antennas"}, {"values", {5, 10}}},
                 {{"param", "it_max"}, {"values", {1, 2, 100}}}}}};
    } else if (name == "fig4_tradeoff") {
        doc = {{"utility", "proportional"},
               {"replicas", 10},
               {"sweep",
                {{{"param", "v_param"}, {"values", {1e7, 1e8, 1e9}}},
                 {{"param", "num_antennas"}, {"values", {6, 8, 10}}},
                 {{"param", "power_budget_mw"}, {"values", {100, 800}}}}}};
    } else if (name == "fig5_common_vs_M") {
        doc = {{"utility", "common"},
               {"v_param", 1e5},
               {"replicas", 5},
               {"sweep",
                {{{"param", "num_antennas"}, {"values", {6, 8, 10, 12, 14, 16, 18, 20}}},
                 {{"param", "geometry.average_distance"}, {"values", {24, 30, 36}}}}}};
    } else if (name == "fig7_sum_vs_N") {
        doc = {{"utility", "sum"},
               {"v_param", 1e7},
               {"replicas", 5},
               {"warmup_fraction", 0.5},
               {"geometry", {{"radius", 50}}},
               {"sweep",
                {{{"param", "num_bns"}, {"values", {5, 6, 7, 8, 9, 10, 11, 12}}},
                 {{"param", "geometry.radius"}, {"values", {50, 70}}},
                 {{"param", "controller"}, {"values", {"mdpp", "mrt_baseline"}}}}}};
    } else if (name == "fig8_fairness") {
        doc = {{"num_bns", 4},
               {"v_param", 1e7},
               {"replicas", 10},
               {"geometry", {{"distances", {18, 22, 30, 34}}}},
               {"sweep", {{{"param", "utility"}, {"values", {"sum", "proportional", "common"}}}}}};
    } else if (name == "fig9_fbl_range") {
        doc = {{"utility", "common"},
               {"v_param", 1e7},
               {"error_prob", 1e-3},
               {"horizon", 500},
               {"replicas", 3},
               {"geometry", {{"ring_distance", 20}}},
               {"sweep",
                {{{"param", "blocklength"}, {"values", {"inf", 1e4, 1e3, 1e2}}},
                 {{"param", "num_bns"}, {"values", {2, 4, 6, 8}}},
                 {{"param", "geometry.ring_distance"}, {"values", {10, 15, 20, 25, 30, 35, 40}}}}}};
    } else if (name == "fig10_fbl_psi") {
        doc = {{"utility", "common"},
               {"v_param", 1e7},
               {"horizon", 500},
               {"replicas", 3},
               {"sweep",
                {{{"param", "error_prob"}, {"values", {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}}},
                 {{"param", "blocklength"}, {"values", {1e2, 1e3}}},
                 {{"param", "rician_k"}, {"values", {0, 1, 10, 100}}}}}};
    } else {
        throw ConfigError("", "unknown preset '" + std::string(name) + "'");
    }
    doc["name"] = std::string(name);
    doc["output_dir"] = "out/" + std::string(name);
    doc["emit"] = {"summary_json", "sweep_csv"};
    return parse_experiment(doc);
}

} // namespace bsched
