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

// Library usage example: run one Proposed drop next to its Static32 baseline
// at low load and print the headline KPIs.

#include <cstdio>

#include "nessim/nessim.hpp"

int main(int argc, char** argv)
{
    const std::string path = argc > 1 ? argv[1] : std::string(NESSIM_CONFIG_DIR) + "/default.json";
    nessim::SimConfig cfg;
    try {
        cfg = nessim::load_config(path, {"scenario.slots_per_drop=2000"});
    } catch (const nessim::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    for (const char* name : {"Static32", "Proposed"}) {
        const nessim::Scenario sc{cfg, *nessim::Scheme::parse(name), "low"};
        const auto r = nessim::run_drop(sc, 0);
        std::printf("%-9s PC %.3f  UPT %.2f Mbit/s  RB utilization %.3f  TRX histogram %s\n", name, r.kpi.pc_mean,
                    r.kpi.upt_mbps.value_or(0.0), r.kpi.rb_utilization,
                    nessim::format_histogram(r.kpi.m_prime_histogram).c_str());
    }
    return 0;
}
