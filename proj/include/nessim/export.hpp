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

#ifndef NESSIM_EXPORT_HPP
#define NESSIM_EXPORT_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "nessim/engine.hpp"
#include "nessim/kpi.hpp"

namespace nessim {

inline constexpr const char* kTraceHeader = "slot,state,pc,s_a,s_f,s_p,used_rbs,num_trx";

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows)
{
    out << kTraceHeader << '\n';
    for (const auto& r : rows) {
        out << r.power.slot << ',' << to_string(r.power.state) << ',' << format_float(r.power.pc) << ','
            << format_float(r.power.s_a) << ',' << format_float(r.power.s_f) << ',' << format_float(r.power.s_p)
            << ',' << r.used_rbs << ',' << r.num_trx << '\n';
    }
}

/// Campaign rows for every successful cell, in campaign order.
inline std::vector<CampaignRow> campaign_rows(const std::vector<CellResult>& cells)
{
    std::vector<CampaignRow> rows;
    for (const auto& c : cells) {
        if (c.result) {
            rows.push_back(CampaignRow{c.scheme, c.load, c.drop, c.result->kpi});
        }
    }
    return rows;
}

/// IPV reservoirs pooled over drops per (scheme, load), in first-seen order.
inline std::vector<IpvSeries> ipv_series(const std::vector<CellResult>& cells)
{
    std::vector<IpvSeries> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& c : cells) {
        if (!c.result) {
            continue;
        }
        auto [it, fresh] = index.try_emplace({c.scheme, c.load}, out.size());
        if (fresh) {
            out.push_back(IpvSeries{c.scheme, c.load, {}});
        }
        auto& s = out[it->second].samples;
        const auto& v = c.result->kpi.ipv_samples;
        s.insert(s.end(), v.begin(), v.end());
    }
    return out;
}

struct ExportPaths
{
    std::filesystem::path campaign;
    std::filesystem::path ipv_cdf;
    std::vector<std::filesystem::path> traces;
};

/// Writes campaign.csv, ipv_cdf.csv and, for cells carrying a trace,
/// traces/<scheme>_<load>_drop<k>.csv under `dir`.
inline ExportPaths export_results(const std::vector<CellResult>& cells, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    ExportPaths paths;
    auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write '" + p.string() + "'");
        }
        return f;
    };
    paths.campaign = dir / "campaign.csv";
    {
        auto f = open(paths.campaign);
        write_campaign_csv(f, campaign_rows(cells));
    }
    paths.ipv_cdf = dir / "ipv_cdf.csv";
    {
        auto f = open(paths.ipv_cdf);
        write_ipv_cdf(f, ipv_series(cells));
    }
    for (const auto& c : cells) {
        if (!c.result || c.result->trace.empty()) {
            continue;
        }
        const auto p = dir / "traces" / (c.scheme + "_" + c.load + "_drop" + std::to_string(c.drop) + ".csv");
        std::filesystem::create_directories(p.parent_path());
        auto f = open(p);
        write_trace_csv(f, c.result->trace);
        paths.traces.push_back(p);
    }
    return paths;
}

} // namespace nessim

#endif // NESSIM_EXPORT_HPP
