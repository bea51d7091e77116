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

#ifndef NESSIM_MCS_HPP
#define NESSIM_MCS_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/types.hpp"

namespace nessim {

struct McsEntry
{
    int index{0};
    double spectral_efficiency{0.0}; // bits per resource element
    double snr_threshold_db{0.0};    // SINR at which BLER equals the target
};

/// Error raised by table parsing/validation. `rows` lists the offending 1-based
/// data rows so a config report can point at them.
class McsTableError : public std::runtime_error
{
  public:
    McsTableError(const std::string& what, std::vector<int> rows)
        : std::runtime_error(what), m_rows(std::move(rows))
    {
    }

    [[nodiscard]] const std::vector<int>& rows() const { return m_rows; }

  private:
    std::vector<int> m_rows;
};

/// Ordered MCS set 1..K. Indices are contiguous, and both spectral efficiency and
/// SNR threshold are strictly increasing in the index.
class McsTable
{
  public:
    McsTable() = default;

    explicit McsTable(std::vector<McsEntry> entries) : m_entries(std::move(entries))
    {
        validate(m_entries);
    }

    static void validate(const std::vector<McsEntry>& entries)
    {
        if (entries.empty()) {
            throw McsTableError("MCS table is empty", {});
        }
        std::vector<int> bad_index;
        std::vector<int> bad_se;
        std::vector<int> bad_se_pairs; // row r is not above row r-1
        std::vector<int> bad_thr;       // same, for thresholds
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const int row = static_cast<int>(i) + 1;
            if (entries[i].index != row) {
                bad_index.push_back(row);
            }
            if (!(entries[i].spectral_efficiency > 0.0) || !std::isfinite(entries[i].spectral_efficiency)) {
                bad_se.push_back(row);
            }
            if (i > 0) {
                if (!(entries[i].spectral_efficiency > entries[i - 1].spectral_efficiency)) {
                    bad_se_pairs.push_back(row);
                }
                if (!(entries[i].snr_threshold_db > entries[i - 1].snr_threshold_db)) {
                    bad_thr.push_back(row);
                }
            }
        }
        auto fmt_rows = [](const std::vector<int>& rows) {
            std::string s;
            for (int r : rows) {
                s += (s.empty() ? "" : ", ") + std::to_string(r);
            }
            return s;
        };
        if (!bad_index.empty()) {
            throw McsTableError("MCS indices must be 1..K without gaps; offending rows: " + fmt_rows(bad_index),
                                bad_index);
        }
        auto fmt_pairs = [](const std::vector<int>& rows) {
            std::string s;
            for (int r : rows) {
                s += (s.empty() ? "" : "; ") + std::string("rows ") + std::to_string(r - 1) + " and " +
                     std::to_string(r);
            }
            return s;
        };
        auto pair_rows = [](const std::vector<int>& rows) {
            std::vector<int> out;
            for (int r : rows) {
                for (int x : {r - 1, r}) {
                    if (std::find(out.begin(), out.end(), x) == out.end()) {
                        out.push_back(x);
                    }
                }
            }
            return out;
        };
        if (!bad_se.empty()) {
            throw McsTableError("spectral_efficiency must be positive; offending rows: " + fmt_rows(bad_se), bad_se);
        }
        if (!bad_se_pairs.empty()) {
            throw McsTableError("spectral_efficiency must be strictly increasing; offending " +
                                    fmt_pairs(bad_se_pairs),
                                pair_rows(bad_se_pairs));
        }
        if (!bad_thr.empty()) {
            throw McsTableError("snr_threshold_db must be strictly increasing; offending " + fmt_pairs(bad_thr),
                                pair_rows(bad_thr));
        }
    }

    /// Parses `index,spectral_efficiency,snr_threshold_db` records. A header line
    /// and `#` comments are allowed.
    static McsTable parse_csv(std::istream& in)
    {
        std::vector<McsEntry> entries;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty() || line[0] == '#') {
                continue;
            }
            if (line.rfind("index", 0) == 0) {
                continue;
            }
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream fields(line);
            McsEntry e;
            std::string extra;
            if (!(fields >> e.index >> e.spectral_efficiency >> e.snr_threshold_db) || (fields >> extra)) {
                throw McsTableError("malformed MCS record at line " + std::to_string(line_no),
                                    {static_cast<int>(entries.size()) + 1});
            }
            entries.push_back(e);
        }
        return McsTable(std::move(entries));
    }

    static McsTable load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw McsTableError("cannot open MCS table '" + path + "'", {});
        }
        return parse_csv(in);
    }

    [[nodiscard]] int size() const { return static_cast<int>(m_entries.size()); }
    [[nodiscard]] bool empty() const { return m_entries.empty(); }

    [[nodiscard]] const McsEntry& at(int k) const
    {
        if (k < 1 || k > size()) {
            throw DomainError("MCS index " + std::to_string(k) + " outside 1.." + std::to_string(size()));
        }
        return m_entries[static_cast<std::size_t>(k - 1)];
    }

    [[nodiscard]] const std::vector<McsEntry>& entries() const { return m_entries; }

  private:
    std::vector<McsEntry> m_entries;
};

/// Logistic SINR→BLER curve per MCS in the dB domain, anchored so that
/// BLER(threshold_k, k) equals the target.
struct BlerModel
{
    double steepness{2.0}; // per dB
    double target_bler{0.1};

    void validate() const
    {
        if (!(steepness > 0.0) || !std::isfinite(steepness)) {
            throw DomainError("bler steepness must be positive");
        }
        if (!(target_bler > 0.0 && target_bler < 1.0)) {
            throw DomainError("target_bler must lie in (0,1)");
        }
    }
};

struct BetaParams
{
    double chi{0.5};
    double floor{0.05};

    void validate() const
    {
        if (!(chi > 0.0 && chi <= 1.0)) {
            throw DomainError("chi in (0,1] required, got " + std::to_string(chi));
        }
        if (!(floor > 0.0 && floor <= 1.0)) {
            throw DomainError("beta floor in (0,1] required, got " + std::to_string(floor));
        }
    }
};

struct BaselineLaResult
{
    int mcs{1};
    bool feasible{true};
};

/// Link adaptation over one MCS table: BLER evaluation, the rate-maximizing
/// baseline selection and the PSD-minimizing POLITE refinement.
class LinkAdapter
{
  public:
    LinkAdapter() = default;

    LinkAdapter(McsTable table, BlerModel bler, int re_per_rb = 156)
        : m_table(std::move(table)), m_bler(bler), m_re_per_rb(re_per_rb)
    {
        m_bler.validate();
        if (re_per_rb < 1) {
            throw DomainError("resource elements per RB must be >= 1");
        }
        if (m_table.empty()) {
            throw DomainError("link adapter needs a non-empty MCS table");
        }
        m_bits_per_rb.reserve(static_cast<std::size_t>(m_table.size()));
        for (const auto& e : m_table.entries()) {
            const auto bits = static_cast<Bits>(std::floor(e.spectral_efficiency * m_re_per_rb));
            if (bits < 1) {
                throw DomainError("MCS " + std::to_string(e.index) + " carries less than one bit per RB");
            }
            m_bits_per_rb.push_back(bits);
        }
    }

    [[nodiscard]] const McsTable& table() const { return m_table; }
    [[nodiscard]] const BlerModel& bler_model() const { return m_bler; }
    [[nodiscard]] int num_mcs() const { return m_table.size(); }
    [[nodiscard]] int re_per_rb() const { return m_re_per_rb; }

    /// R(k): spectral efficiency of MCS k.
    [[nodiscard]] double rate(int k) const { return m_table.at(k).spectral_efficiency; }

    [[nodiscard]] Bits bits_per_rb(int k) const
    {
        (void)m_table.at(k);
        return m_bits_per_rb[static_cast<std::size_t>(k - 1)];
    }

    [[nodiscard]] double bler(double gamma_db, int k) const
    {
        const double thr = m_table.at(k).snr_threshold_db;
        if (gamma_db == thr) {
            return m_bler.target_bler;
        }
        const double offset = std::log((1.0 - m_bler.target_bler) / m_bler.target_bler);
        const double x = m_bler.steepness * (gamma_db - thr) + offset;
        if (x > 700.0) {
            return 0.0;
        }
        if (x < -700.0) {
            return 1.0;
        }
        return 1.0 / (1.0 + std::exp(x));
    }

    [[nodiscard]] bool bler_ok(double gamma_db, int k) const { return bler(gamma_db, k) <= m_bler.target_bler; }

    /// Largest k with BLER ≤ target. Binary search relies on BLER being
    /// nondecreasing in k; falls back to k=1 flagged infeasible.
    [[nodiscard]] BaselineLaResult solve_baseline_la(double gamma_db) const
    {
        int lo = 1;
        int hi = num_mcs();
        if (!bler_ok(gamma_db, lo)) {
            return {1, false};
        }
        while (lo < hi) {
            const int mid = lo + (hi - lo + 1) / 2;
            if (bler_ok(gamma_db, mid)) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        return {lo, true};
    }

    [[nodiscard]] BaselineLaResult solve_baseline_la(const CsiReport& report) const
    {
        return solve_baseline_la(report.gamma_db);
    }

    [[nodiscard]] int rbs_needed(Bits buffer_bits, int k) const
    {
        if (buffer_bits < 0) {
            throw DomainError("negative buffer");
        }
        const Bits per_rb = bits_per_rb(k);
        return static_cast<int>((buffer_bits + per_rb - 1) / per_rb);
    }

    /// POLITE refinement of a baseline MCS `k`. UE power is held at the level
    /// that serves the buffer at `k` with the reported PSD, so a lower k′ that
    /// needs more RBs transmits at a proportionally lower PSD; the BLER check
    /// uses the reported SINR shifted by that PSD change. `rb_cap` bounds the RB
    /// count any candidate may need. Among PSD minimizers the largest k′ wins.
    [[nodiscard]] int solve_polite_la(int k, double beta, double reported_gamma_db, Bits buffer_bits,
                                      int rb_cap) const
    {
        if (!(beta > 0.0 && beta <= 1.0)) {
            throw DomainError("beta must lie in (0,1]");
        }
        (void)m_table.at(k);
        const int base_rbs = rbs_needed(buffer_bits, k);
        if (base_rbs == 0 || base_rbs > rb_cap) {
            return k;
        }
        const double min_rate = beta * rate(k);
        int best = k;
        int best_rbs = base_rbs;
        for (int cand = k - 1; cand >= 1; --cand) {
            if (rate(cand) < min_rate) {
                break;
            }
            const int rbs = rbs_needed(buffer_bits, cand);
            if (rbs > rb_cap) {
                break;
            }
            if (rbs <= best_rbs) {
                continue;
            }
            const double gamma = reported_gamma_db + linear_to_db(static_cast<double>(base_rbs) / rbs);
            if (bler_ok(gamma, cand)) {
                best = cand;
                best_rbs = rbs;
            }
        }
        return best;
    }

    [[nodiscard]] int solve_polite_la(int k, double beta, const CsiReport& report, Bits buffer_bits,
                                      int rb_cap) const
    {
        return solve_polite_la(k, beta, report.gamma_db, buffer_bits, rb_cap);
    }

  private:
    McsTable m_table;
    BlerModel m_bler;
    int m_re_per_rb{156};
    std::vector<Bits> m_bits_per_rb;
};

/// Load-driven rate-scaling factor shared by every UE in the slot:
/// β = min(χ · Σ Q_n / (R_avg,n · B), 1), clamped below by the configured floor.
/// All-empty buffers return the floor (POLITE is skipped by the caller).
inline double compute_beta(std::span<const Bits> buffers, std::span<const double> avg_rates, int total_rbs,
                           const BetaParams& params)
{
    if (buffers.size() != avg_rates.size()) {
        throw DomainError("compute_beta: buffer and rate lists differ in length");
    }
    if (total_rbs < 1) {
        throw DomainError("compute_beta: total RBs must be >= 1");
    }
    double load = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < buffers.size(); ++i) {
        if (!(avg_rates[i] > 0.0)) {
            throw DomainError("compute_beta: average rate must be positive");
        }
        if (buffers[i] < 0) {
            throw DomainError("compute_beta: negative buffer");
        }
        if (buffers[i] > 0) {
            any = true;
        }
        load += static_cast<double>(buffers[i]) / (avg_rates[i] * total_rbs);
    }
    if (!any) {
        return params.floor;
    }
    return std::max(std::min(params.chi * load, 1.0), params.floor);
}

} // namespace nessim

#endif // NESSIM_MCS_HPP
