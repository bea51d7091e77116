/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NESSIM_CONFIG_HPP
#define NESSIM_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nessim/engine.hpp"

namespace nessim {

using Json = nlohmann::ordered_json;

struct ConfigIssue
{
    std::string path; // JSON pointer, e.g. /channel/fading_sigma_db
    std::string message;
};

class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<ConfigIssue> issues)
        : std::runtime_error(render(issues)), m_issues(std::move(issues))
    {
    }

    ConfigError(std::string path, std::string message)
        : ConfigError(std::vector<ConfigIssue>{ConfigIssue{std::move(path), std::move(message)}})
    {
    }

    [[nodiscard]] const std::vector<ConfigIssue>& issues() const { return m_issues; }

    static std::string render(const std::vector<ConfigIssue>& issues)
    {
        std::string s;
        for (const auto& i : issues) {
            s += (s.empty() ? "" : "\n") + (i.path.empty() ? std::string("/") : i.path) + ": " + i.message;
        }
        return s;
    }

  private:
    std::vector<ConfigIssue> m_issues;
};

namespace detail {

/// Collects issues while walking a JSON document; never throws mid-walk so a
/// single validation pass reports every problem.
class Reader
{
  public:
    std::vector<ConfigIssue> issues;

    void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

    const Json* object(const Json& parent, const std::string& key, const std::string& path,
                       const std::set<std::string>& allowed)
    {
        if (!parent.contains(key)) {
            return nullptr;
        }
        const Json& j = parent.at(key);
        const std::string p = path + "/" + key;
        if (!j.is_object()) {
            fail(p, "expected an object");
            return nullptr;
        }
        strict(j, p, allowed);
        return &j;
    }

    void strict(const Json& j, const std::string& path, const std::set<std::string>& allowed)
    {
        for (const auto& [k, v] : j.items()) {
            if (!allowed.count(k)) {
                fail(path + "/" + k, "unknown key");
            }
        }
    }

    template <typename T>
    void get(const Json* obj, const std::string& key, const std::string& path, T& out)
    {
        if (obj == nullptr || !obj->contains(key)) {
            return;
        }
        const Json& v = obj->at(key);
        const std::string p = path + "/" + key;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw std::invalid_argument("expected a boolean");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) {
                    throw std::invalid_argument("expected an integer");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    throw std::invalid_argument("expected a number");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    throw std::invalid_argument("expected a string");
                }
            }
            out = v.get<T>();
        } catch (const std::exception& e) {
            fail(p, e.what());
        }
    }

    void check(bool ok, const std::string& path, const std::string& msg)
    {
        if (!ok) {
            fail(path, msg);
        }
    }
};

inline std::vector<std::string> split_dotted(const std::string& key)
{
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    return parts;
}

} // namespace detail

/// Applies `a.b.c=value` overrides; values parse as JSON, falling back to a string.
inline void apply_overrides(Json& doc, const std::vector<std::string>& overrides)
{
    std::vector<ConfigIssue> issues;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            issues.push_back({"", "override '" + o + "' is not key=value"});
            continue;
        }
        const auto parts = detail::split_dotted(o.substr(0, eq));
        Json value;
        try {
            value = Json::parse(o.substr(eq + 1));
        } catch (const std::exception&) {
            value = o.substr(eq + 1);
        }
        Json* node = &doc;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!node->contains(parts[i])) {
                (*node)[parts[i]] = Json::object();
            }
            node = &(*node)[parts[i]];
            if (!node->is_object()) {
                issues.push_back({"", "override '" + o + "' descends into a non-object"});
                node = nullptr;
                break;
            }
        }
        if (node != nullptr) {
            (*node)[parts.back()] = value;
        }
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
}

/// Builds and validates a SimConfig from a parsed document. Relative MCS table
/// paths resolve against `base_dir`.
inline SimConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir)
{
    detail::Reader r;
    SimConfig cfg;
    if (!doc.is_object()) {
        throw ConfigError("", "top level must be an object");
    }
    r.strict(doc, "", {"scenario", "antennas", "schemes", "polite", "traffic", "channel", "link", "power"});

    // scenario
    const Json* sc = r.object(doc, "scenario", "",
                              {"num_ues", "total_rbs", "slot_duration_s", "num_drops", "slots_per_drop",
                               "warmup_slots", "base_seed", "ipv_reservoir", "trace"});
    r.get(sc, "num_ues", "/scenario", cfg.cell.num_ues);
    r.get(sc, "total_rbs", "/scenario", cfg.cell.total_rbs);
    r.get(sc, "slot_duration_s", "/scenario", cfg.cell.slot_duration_s);
    r.get(sc, "num_drops", "/scenario", cfg.run.num_drops);
    r.get(sc, "slots_per_drop", "/scenario", cfg.run.slots_per_drop);
    r.get(sc, "warmup_slots", "/scenario", cfg.run.warmup_slots);
    r.get(sc, "base_seed", "/scenario", cfg.run.base_seed);
    r.get(sc, "ipv_reservoir", "/scenario", cfg.run.ipv_reservoir);
    r.get(sc, "trace", "/scenario", cfg.run.trace);
    r.check(cfg.cell.num_ues >= 1, "/scenario/num_ues", "num_ues >= 1 required");
    r.check(cfg.cell.total_rbs >= 1, "/scenario/total_rbs", "total_rbs >= 1 required");
    r.check(cfg.cell.slot_duration_s > 0.0, "/scenario/slot_duration_s", "slot duration must be positive");
    r.check(cfg.run.num_drops >= 1, "/scenario/num_drops", "num_drops >= 1 required");
    r.check(cfg.run.slots_per_drop >= 1, "/scenario/slots_per_drop", "slots_per_drop >= 1 required");
    r.check(cfg.run.warmup_slots >= 0 && cfg.run.warmup_slots < cfg.run.slots_per_drop, "/scenario/warmup_slots",
            "warmup_slots in [0, slots_per_drop) required");
    r.check(cfg.run.ipv_reservoir >= 1, "/scenario/ipv_reservoir", "ipv_reservoir >= 1 required");

    // antennas
    const Json* ant = r.object(doc, "antennas", "", {"trx_set", "max_power_dbm", "csi_overhead_rbs_per_port"});
    r.get(ant, "trx_set", "/antennas", cfg.cell.trx_set);
    r.get(ant, "max_power_dbm", "/antennas", cfg.cell.max_power_dbm);
    r.get(ant, "csi_overhead_rbs_per_port", "/antennas", cfg.cell.csi_overhead_rbs_per_port);
    r.check(cfg.cell.csi_overhead_rbs_per_port >= 0.0, "/antennas/csi_overhead_rbs_per_port",
            "overhead must be nonnegative");
    {
        auto sorted = cfg.cell.trx_set;
        std::sort(sorted.begin(), sorted.end());
        bool ok = !sorted.empty() && sorted.front() >= 1 &&
                  std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
        r.check(ok, "/antennas/trx_set", "trx_set must be distinct positive TRX counts");
        if (ok) {
            try {
                const auto cs = cfg.config_set();
                for (const auto& c : cs.all()) {
                    r.check(c.csi_overhead_rbs <= cfg.cell.total_rbs, "/antennas/csi_overhead_rbs_per_port",
                            "CSI-RS overhead exceeds total_rbs");
                }
            } catch (const std::exception& e) {
                r.fail("/antennas", e.what());
            }
        }
    }

    // polite defaults
    const Json* pol = r.object(doc, "polite", "", {"chi", "beta_floor"});
    r.get(pol, "chi", "/polite", cfg.link.beta.chi);
    r.get(pol, "beta_floor", "/polite", cfg.link.beta.floor);
    r.check(cfg.link.beta.chi > 0.0 && cfg.link.beta.chi <= 1.0, "/polite/chi", "chi in (0,1] required");
    r.check(cfg.link.beta.floor > 0.0 && cfg.link.beta.floor <= 1.0, "/polite/beta_floor",
            "beta_floor in (0,1] required");

    // schemes
    if (doc.contains("schemes")) {
        const Json& js = doc.at("schemes");
        if (!js.is_array() || js.empty()) {
            r.fail("/schemes", "expected a non-empty array");
        } else {
            cfg.schemes.clear();
            cfg.scheme_beta.clear();
            cfg.scheme_trx.clear();
            for (std::size_t i = 0; i < js.size(); ++i) {
                const std::string p = "/schemes/" + std::to_string(i);
                std::string name;
                BetaParams beta = cfg.link.beta;
                bool has_beta = false;
                std::vector<int> trx_subset;
                if (js[i].is_string()) {
                    name = js[i].get<std::string>();
                } else if (js[i].is_object()) {
                    r.strict(js[i], p, {"name", "chi", "beta_floor", "trx_set"});
                    r.get(&js[i], "name", p, name);
                    has_beta = js[i].contains("chi") || js[i].contains("beta_floor");
                    r.get(&js[i], "chi", p, beta.chi);
                    r.get(&js[i], "beta_floor", p, beta.floor);
                    r.check(beta.chi > 0.0 && beta.chi <= 1.0, p + "/chi", "chi in (0,1] required");
                    r.check(beta.floor > 0.0 && beta.floor <= 1.0, p + "/beta_floor", "beta_floor in (0,1] required");
                    r.get(&js[i], "trx_set", p, trx_subset);
                } else {
                    r.fail(p, "expected a scheme name or object");
                    continue;
                }
                auto s = Scheme::parse(name);
                if (!s) {
                    r.fail(p, "unknown scheme '" + name + "'");
                    continue;
                }
                if (s->kind == SchemeKind::Static &&
                    std::find(cfg.cell.trx_set.begin(), cfg.cell.trx_set.end(), s->static_trx) ==
                        cfg.cell.trx_set.end()) {
                    r.fail(p, "scheme " + name + " needs " + std::to_string(s->static_trx) + " TRX in trx_set");
                }
                if (std::find(cfg.schemes.begin(), cfg.schemes.end(), *s) != cfg.schemes.end()) {
                    r.fail(p, "duplicate scheme '" + name + "'");
                    continue;
                }
                cfg.schemes.push_back(*s);
                if (has_beta) {
                    cfg.scheme_beta[s->name()] = beta;
                }
                if (!trx_subset.empty()) {
                    auto sorted = trx_subset;
                    std::sort(sorted.begin(), sorted.end());
                    const int full = cfg.cell.trx_set.empty()
                                         ? 0
                                         : *std::max_element(cfg.cell.trx_set.begin(), cfg.cell.trx_set.end());
                    bool ok = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() &&
                              sorted.back() == full;
                    for (int t : sorted) {
                        ok = ok && std::find(cfg.cell.trx_set.begin(), cfg.cell.trx_set.end(), t) !=
                                       cfg.cell.trx_set.end();
                    }
                    if (s->kind == SchemeKind::Static) {
                        ok = ok && std::find(sorted.begin(), sorted.end(), s->static_trx) != sorted.end();
                    }
                    if (ok) {
                        cfg.scheme_trx[s->name()] = sorted;
                    } else {
                        r.fail(p + "/trx_set",
                               "must be distinct entries of antennas.trx_set including the full array and, for a "
                               "static scheme, its own TRX count");
                    }
                }
            }
        }
    }

    // traffic
    const Json* tr =
        r.object(doc, "traffic", "", {"loads", "rate", "rate_scope", "packet_size_bytes", "buffer_cap_bits"});
    if (tr != nullptr && tr->contains("loads")) {
        const Json& jl = tr->at("loads");
        if (!jl.is_object() || jl.empty()) {
            r.fail("/traffic/loads", "expected a non-empty object of label: rate");
        } else {
            cfg.traffic.loads.clear();
            cfg.traffic.load_order.clear();
            for (const auto& [label, v] : jl.items()) {
                if (!v.is_number() || !(v.get<double>() >= 0.0)) {
                    r.fail("/traffic/loads/" + label, "rate must be a nonnegative number");
                    continue;
                }
                cfg.traffic.loads[label] = v.get<double>();
                cfg.traffic.load_order.push_back(label);
            }
        }
    }
    if (tr != nullptr && tr->contains("rate")) {
        double rate = 0.0;
        r.get(tr, "rate", "/traffic", rate);
        r.check(rate >= 0.0, "/traffic/rate", "rate must be nonnegative");
        for (auto& [label, v] : cfg.traffic.loads) {
            v = rate;
        }
    }
    {
        std::string scope = cfg.traffic.scope == RateScope::PerUe ? "per_ue" : "per_cell";
        r.get(tr, "rate_scope", "/traffic", scope);
        if (scope == "per_ue") {
            cfg.traffic.scope = RateScope::PerUe;
        } else if (scope == "per_cell") {
            cfg.traffic.scope = RateScope::PerCell;
        } else {
            r.fail("/traffic/rate_scope", "expected 'per_ue' or 'per_cell'");
        }
        std::int64_t bytes = cfg.traffic.packet_size_bits / 8;
        r.get(tr, "packet_size_bytes", "/traffic", bytes);
        r.check(bytes > 0, "/traffic/packet_size_bytes", "packet size must be positive");
        cfg.traffic.packet_size_bits = bytes * 8;
        r.get(tr, "buffer_cap_bits", "/traffic", cfg.traffic.buffer_cap_bits);
        r.check(cfg.traffic.buffer_cap_bits >= cfg.traffic.packet_size_bits, "/traffic/buffer_cap_bits",
                "buffer cap must hold at least one packet");
    }

    // channel
    const Json* ch = r.object(doc, "channel", "",
                              {"path_gain_min_db", "path_gain_max_db", "noise_floor_dbm_per_rb", "fading_sigma_db",
                               "csi_period_slots", "intercell_floor_dbm_per_rb", "leakage_db",
                               "leakage_slope_db_per_rb", "leakage_max_distance_rbs"});
    r.get(ch, "path_gain_min_db", "/channel", cfg.channel.path_gain_min_db);
    r.get(ch, "path_gain_max_db", "/channel", cfg.channel.path_gain_max_db);
    r.get(ch, "noise_floor_dbm_per_rb", "/channel", cfg.channel.noise_floor_dbm_per_rb);
    r.get(ch, "fading_sigma_db", "/channel", cfg.channel.fading_sigma_db);
    r.get(ch, "csi_period_slots", "/channel", cfg.channel.csi_period_slots);
    r.get(ch, "intercell_floor_dbm_per_rb", "/channel", cfg.channel.interference.intercell_floor_dbm_per_rb);
    r.get(ch, "leakage_slope_db_per_rb", "/channel", cfg.channel.interference.distance_slope_db);
    r.get(ch, "leakage_max_distance_rbs", "/channel", cfg.channel.interference.max_distance_rbs);
    if (ch != nullptr && ch->contains("leakage_db")) {
        const Json& jl = ch->at("leakage_db");
        if (!jl.is_object()) {
            r.fail("/channel/leakage_db", "expected an object of trx: attenuation_db");
        } else {
            cfg.channel.interference.leakage_db_by_trx.clear();
            for (const auto& [k, v] : jl.items()) {
                int trx = 0;
                try {
                    std::size_t pos = 0;
                    trx = std::stoi(k, &pos);
                    if (pos != k.size()) {
                        trx = 0;
                    }
                } catch (const std::exception&) {
                    trx = 0;
                }
                if (trx < 1 || !v.is_number()) {
                    r.fail("/channel/leakage_db/" + k, "expected positive TRX key with numeric attenuation");
                    continue;
                }
                cfg.channel.interference.leakage_db_by_trx[trx] = v.get<double>();
            }
        }
    }
    r.check(cfg.channel.path_gain_min_db <= cfg.channel.path_gain_max_db, "/channel/path_gain_min_db",
            "path_gain_min_db must not exceed path_gain_max_db");
    r.check(cfg.channel.fading_sigma_db >= 0.0, "/channel/fading_sigma_db", "fading sigma must be nonnegative");
    r.check(cfg.channel.csi_period_slots >= 1, "/channel/csi_period_slots", "csi_period_slots >= 1 required");
    try {
        cfg.channel.interference.validate();
        for (int trx : cfg.cell.trx_set) {
            (void)cfg.channel.interference.leakage_db(trx);
        }
    } catch (const std::exception& e) {
        r.fail("/channel/leakage_db", e.what());
    }

    // link
    const Json* lk = r.object(doc, "link", "",
                              {"mcs_table", "bler_steepness", "target_bler", "re_per_rb", "r_avg_alpha",
                               "max_harq_retx"});
    std::string table_path = "mcs_table.csv";
    r.get(lk, "mcs_table", "/link", table_path);
    r.get(lk, "bler_steepness", "/link", cfg.link.bler.steepness);
    r.get(lk, "target_bler", "/link", cfg.link.bler.target_bler);
    r.get(lk, "re_per_rb", "/link", cfg.link.re_per_rb);
    r.get(lk, "r_avg_alpha", "/link", cfg.link.r_avg_alpha);
    r.get(lk, "max_harq_retx", "/link", cfg.link.max_harq_retx);
    r.check(cfg.link.bler.steepness > 0.0, "/link/bler_steepness", "steepness must be positive");
    r.check(cfg.link.bler.target_bler > 0.0 && cfg.link.bler.target_bler < 1.0, "/link/target_bler",
            "target_bler in (0,1) required");
    r.check(cfg.link.re_per_rb >= 1, "/link/re_per_rb", "re_per_rb >= 1 required");
    r.check(cfg.link.r_avg_alpha > 0.0 && cfg.link.r_avg_alpha <= 1.0, "/link/r_avg_alpha",
            "r_avg_alpha in (0,1] required");
    r.check(cfg.link.max_harq_retx >= 0, "/link/max_harq_retx", "max_harq_retx >= 0 required");
    {
        std::filesystem::path tp(table_path);
        if (tp.is_relative()) {
            tp = base_dir / tp;
        }
        cfg.link.mcs_table_path = tp.string();
        try {
            cfg.link.table = McsTable::load(cfg.link.mcs_table_path);
            for (const auto& e : cfg.link.table.entries()) {
                if (std::floor(e.spectral_efficiency * cfg.link.re_per_rb) < 1.0) {
                    r.fail("/link/mcs_table", "row " + std::to_string(e.index) + " carries less than one bit per RB");
                }
            }
        } catch (const McsTableError& e) {
            r.fail("/link/mcs_table", std::string(e.what()) + " (" + cfg.link.mcs_table_path + ")");
        }
    }

    // power
    const Json* pw = r.object(doc, "power", "", {"p_static", "p_dyn_joint", "p_dyn_ante", "eta", "sleep"});
    r.get(pw, "p_static", "/power", cfg.power.p_static);
    r.get(pw, "p_dyn_joint", "/power", cfg.power.p_dyn_joint);
    r.get(pw, "p_dyn_ante", "/power", cfg.power.p_dyn_ante);
    if (const Json* eta = pw ? r.object(*pw, "eta", "/power", {"eta_max", "kappa", "table"}) : nullptr) {
        r.get(eta, "eta_max", "/power/eta", cfg.power.eta.eta_max);
        r.get(eta, "kappa", "/power/eta", cfg.power.eta.kappa);
        if (eta->contains("table")) {
            try {
                cfg.power.eta.table = eta->at("table").get<std::vector<std::pair<double, double>>>();
            } catch (const std::exception&) {
                r.fail("/power/eta/table", "expected [[x, eta], ...]");
            }
        }
    }
    if (pw != nullptr && pw->contains("sleep")) {
        const Json& js = pw->at("sleep");
        if (!js.is_object()) {
            r.fail("/power/sleep", "expected an object keyed by micro/light/deep");
        } else {
            r.strict(js, "/power/sleep", {"micro", "light", "deep"});
            const SleepStateParams default_micro = cfg.power.sleep.front();
            cfg.power.sleep.clear();
            if (!js.contains("micro")) {
                cfg.power.sleep.push_back(default_micro); // micro sleep is always available
            }
            const std::pair<const char*, PowerState> states[] = {
                {"micro", PowerState::Micro}, {"light", PowerState::Light}, {"deep", PowerState::Deep}};
            for (const auto& [name, state] : states) {
                const std::string p = std::string("/power/sleep/") + name;
                if (const Json* s = r.object(js, name, "/power/sleep", {"pc", "entry_slots", "transition_energy"})) {
                    SleepStateParams sp;
                    sp.state = state;
                    r.get(s, "pc", p, sp.pc);
                    r.get(s, "entry_slots", p, sp.entry_slots);
                    r.get(s, "transition_energy", p, sp.transition_energy);
                    cfg.power.sleep.push_back(sp);
                }
            }
        }
    }
    try {
        cfg.power.validate();
    } catch (const std::exception& e) {
        r.fail("/power", e.what());
    }

    if (!r.issues.empty()) {
        throw ConfigError(std::move(r.issues));
    }
    return cfg;
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    }
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const std::exception& e) {
        throw ConfigError("", std::string("parse error in '") + path + "': " + e.what());
    }
}

/// Reads, overrides and validates a scenario file.
inline SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {})
{
    Json doc = read_json_file(path);
    apply_overrides(doc, overrides);
    return config_from_json(doc, std::filesystem::path(path).parent_path());
}

} // namespace nessim

#endif // NESSIM_CONFIG_HPP
