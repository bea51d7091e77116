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

// Command-line front end: validate a scenario, run one (scheme, load) cell,
// sweep the full campaign, or write reference fixtures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nessim/nessim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

#ifndef NESSIM_CONFIG_DIR
#define NESSIM_CONFIG_DIR "configs"
#endif

struct Common
{
    std::string config = std::string(NESSIM_CONFIG_DIR) + "/default.json";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "results";
    int parallel = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool trace = false;
};

void add_config_options(CLI::App* cmd, Common& c)
{
    cmd->add_option("-c,--config", c.config, "Scenario JSON file")->capture_default_str();
    cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set traffic.rate=500");
    cmd->add_option("--seed", c.seed, "Override scenario.base_seed");
}

void add_run_options(CLI::App* cmd, Common& c)
{
    add_config_options(cmd, c);
    cmd->add_option("-o,--output-dir", c.output_dir, "Directory for CSV outputs")
        ->envname("NESSIM_OUTPUT_DIR")
        ->capture_default_str();
    cmd->add_option("-j,--parallel", c.parallel, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--trace", c.trace, "Write per-slot power traces");
}

nessim::SimConfig load_scenario(const Common& c)
{
    auto overrides = c.overrides;
    if (c.seed) {
        overrides.push_back("scenario.base_seed=" + std::to_string(*c.seed));
    }
    auto cfg = nessim::load_config(c.config, overrides);
    if (c.trace) {
        cfg.run.trace = true;
    }
    return cfg;
}

void print_issues(const nessim::ConfigError& e, const std::string& path)
{
    std::cerr << "invalid configuration '" << path << "':\n";
    for (const auto& i : e.issues()) {
        std::cerr << "  " << (i.path.empty() ? "/" : i.path) << ": " << i.message << '\n';
    }
}

int run_campaign_and_export(const nessim::SimConfig& cfg, const Common& c)
{
    const auto progress = [](const nessim::CellResult& r, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "[%zu/%zu] %s %s drop %d: %s\n", done, total, r.scheme.c_str(), r.load.c_str(), r.drop,
                     r.error.empty() ? "ok" : ("FAILED: " + r.error).c_str());
    };
    const auto cells = nessim::run_campaign(cfg, c.parallel, progress);
    const auto paths = nessim::export_results(cells, c.output_dir);

    std::printf("%-18s %-8s %10s %9s %8s %10s %8s\n", "scheme", "load", "upt_mbps", "pc_mean", "util", "ipv_dbm",
                "loss");
    const auto summary = nessim::summarize(cells);
    for (const auto& s : cfg.schemes) {
        for (const auto& l : cfg.traffic.load_order) {
            auto it = summary.find({s.name(), l});
            if (it == summary.end()) {
                std::printf("%-18s %-8s %10s\n", s.name().c_str(), l.c_str(), "failed");
                continue;
            }
            const auto& x = it->second;
            std::printf("%-18s %-8s %10s %9s %8s %10s %8s\n", s.name().c_str(), l.c_str(),
                        x.upt_mbps ? nessim::format_float(*x.upt_mbps).c_str() : "NA",
                        nessim::format_float(x.pc_mean).c_str(), nessim::format_float(x.rb_utilization).c_str(),
                        x.ipv_mean_dbm ? nessim::format_float(*x.ipv_mean_dbm).c_str() : "NA",
                        nessim::format_float(x.loss_rate).c_str());
        }
    }
    std::printf("wrote %s and %s", paths.campaign.string().c_str(), paths.ipv_cdf.string().c_str());
    if (!paths.traces.empty()) {
        std::printf(" and %zu trace files", paths.traces.size());
    }
    std::printf("\n");

    std::size_t failed = 0;
    for (const auto& cell : cells) {
        failed += cell.error.empty() ? 0 : 1;
    }
    if (failed > 0) {
        std::fprintf(stderr, "%zu of %zu cells failed\n", failed, cells.size());
        return kExitPartial;
    }
    return kExitOk;
}

void copy_text(const std::filesystem::path& from, const std::filesystem::path& to)
{
    std::filesystem::copy_file(from, to, std::filesystem::copy_options::overwrite_existing);
}

void write_json(const nessim::Json& doc, const std::filesystem::path& to)
{
    std::ofstream f(to, std::ios::binary | std::ios::trunc);
    f << doc.dump(2) << '\n';
}

int write_fixtures(const std::filesystem::path& dir)
{
    const std::filesystem::path src(NESSIM_CONFIG_DIR);
    std::filesystem::create_directories(dir);
    copy_text(src / "mcs_table.csv", dir / "mcs_table.csv");
    const auto base = nessim::read_json_file((src / "default.json").string());
    write_json(base, dir / "default.json");

    auto chi = base;
    chi["polite"]["chi"] = 1.5;
    write_json(chi, dir / "chi_out_of_range.json");

    // Swap the thresholds of rows 10 and 11 so the table is no longer monotone.
    std::ifstream in(src / "mcs_table.csv");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    if (lines.size() > 11) {
        const auto tail10 = lines[10].rfind(',');
        const auto tail11 = lines[11].rfind(',');
        const std::string thr10 = lines[10].substr(tail10);
        lines[10] = lines[10].substr(0, tail10) + lines[11].substr(tail11);
        lines[11] = lines[11].substr(0, tail11) + thr10;
    }
    {
        std::ofstream out(dir / "mcs_nonmonotone.csv", std::ios::binary | std::ios::trunc);
        for (const auto& l : lines) {
            out << l << '\n';
        }
    }
    auto mcs = base;
    mcs["link"]["mcs_table"] = "mcs_nonmonotone.csv";
    write_json(mcs, dir / "mcs_nonmonotone.json");

    std::printf("wrote default.json, mcs_table.csv, chi_out_of_range.json, mcs_nonmonotone.json and "
                "mcs_nonmonotone.csv to %s\n",
                dir.string().c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Massive-MIMO downlink network energy saving simulator"};
    app.require_subcommand(1);

    Common c;
    std::string scheme;
    std::string load;
    std::string fixtures_dir = "fixtures";

    auto* validate = app.add_subcommand("validate", "Validate a scenario file and print its shape");
    add_config_options(validate, c);

    auto* run = app.add_subcommand("run", "Run all drops of one (scheme, load) cell");
    add_run_options(run, c);
    run->add_option("-s,--scheme", scheme, "Scheme name, e.g. Proposed or Static32")->required();
    run->add_option("-l,--load", load, "Load label from traffic.loads")->required();

    auto* sweep = app.add_subcommand("sweep", "Run every scheme x load x drop of the scenario");
    add_run_options(sweep, c);

    auto* fixtures = app.add_subcommand("fixtures", "Write the bundled config and invalid reference fixtures");
    fixtures->add_option("-o,--output-dir", fixtures_dir, "Destination directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*fixtures) {
            return write_fixtures(fixtures_dir);
        }
        nessim::SimConfig cfg;
        try {
            cfg = load_scenario(c);
        } catch (const nessim::ConfigError& e) {
            print_issues(e, c.config);
            return kExitInvalid;
        }
        if (*validate) {
            std::printf("%s: ok (%zu schemes x %zu loads x %d drops, %d slots/drop, %d UEs, %d RBs)\n",
                        c.config.c_str(), cfg.schemes.size(), cfg.traffic.load_order.size(), cfg.run.num_drops,
                        cfg.run.slots_per_drop, cfg.cell.num_ues, cfg.cell.total_rbs);
            return kExitOk;
        }
        if (*run) {
            auto s = nessim::Scheme::parse(scheme);
            if (!s) {
                std::cerr << "unknown scheme '" << scheme << "'\n";
                return kExitInvalid;
            }
            if (!cfg.traffic.loads.count(load)) {
                std::cerr << "unknown load '" << load << "'\n";
                return kExitInvalid;
            }
            if (s->kind == nessim::SchemeKind::Static &&
                std::find(cfg.cell.trx_set.begin(), cfg.cell.trx_set.end(), s->static_trx) == cfg.cell.trx_set.end()) {
                std::cerr << "scheme " << scheme << " needs " << s->static_trx << " TRX in antennas.trx_set\n";
                return kExitInvalid;
            }
            cfg.schemes = {*s};
            cfg.traffic.load_order = {load};
        }
        return run_campaign_and_export(cfg, c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
}
