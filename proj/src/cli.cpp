#include "ida/cli.hpp"

#include "ida/accounting.hpp"
#include "ida/config.hpp"
#include "ida/errors.hpp"
#include "ida/harness.hpp"
#include "ida/risk.hpp"
#include "ida/snapshot.hpp"
#include "ida/text.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace ida::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrCode::config_error, "cannot write " + path.string());
    out << content;
}

void write_outputs(const fs::path& dir, const RunOutput& run) {
    fs::create_directories(dir);
    write_file(dir / "metrics.csv", run.metrics.to_csv());
    write_file(dir / "events.jsonl", run.events.to_jsonl());
    write_file(dir / "final_state.json", to_json(run.final_state).dump(2) + "\n");
}

int classify(const Error& e) { return e.code() == ErrCode::config_error ? 1 : 2; }

struct SweepPoint {
    std::vector<std::string> assignments; // key=value overrides for this point
};

std::vector<SweepPoint> expand_grid(const std::vector<std::string>& grid_specs) {
    std::vector<SweepPoint> points{SweepPoint{}};
    for (const auto& spec : grid_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            raise(ErrCode::config_error, "grid spec must look like key=v1,v2: " + spec);
        const std::string key = spec.substr(0, eq);
        std::vector<std::string> values;
        std::stringstream ss(spec.substr(eq + 1));
        std::string v;
        while (std::getline(ss, v, ',')) values.push_back(v);
        if (values.empty()) raise(ErrCode::config_error, "grid spec has no values: " + spec);
        std::vector<SweepPoint> next;
        for (const auto& p : points) {
            for (const auto& value : values) {
                SweepPoint np = p;
                np.assignments.push_back(key + "=" + value);
                next.push_back(np);
            }
        }
        points = std::move(next);
    }
    return points;
}

struct SweepSummary {
    double terminal_coverage{0.0};
    double total_converted{0.0};
    double mean_capital_efficiency{0.0};
};

SweepSummary summarize(const RunOutput& run) {
    SweepSummary s;
    if (!run.metrics.rows.empty()) s.terminal_coverage = run.metrics.rows.back().coverage_ratio;
    double ce = 0.0;
    int ce_count = 0;
    for (const auto& r : run.metrics.rows) {
        if (!std::isnan(r.capital_efficiency)) {
            ce += r.capital_efficiency;
            ++ce_count;
        }
    }
    s.mean_capital_efficiency = ce_count > 0 ? ce / ce_count : 0.0;
    for (const auto& e : run.events.events)
        if (e.value("type", "") == "conversion") s.total_converted += e.value("fraction", 0.0);
    return s;
}

} // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides) {
    try {
        const ScenarioConfig config = load_config(config_path, overrides);
        const RunOutput run = run_scenario(config);
        write_outputs(out_dir, run);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& grid_specs,
              const std::vector<std::string>& overrides, int jobs) {
    try {
        const auto points = expand_grid(grid_specs);
        // Validate the base config once so a bad path fails before any run.
        (void)load_config(config_path, overrides);

        std::vector<SweepSummary> summaries(points.size());
        std::vector<std::string> failures(points.size());
        std::atomic<size_t> next{0};
        const int workers = std::max(1, jobs);

        auto work = [&]() {
            while (true) {
                const size_t idx = next.fetch_add(1);
                if (idx >= points.size()) break;
                try {
                    std::vector<std::string> all = overrides;
                    for (const auto& a : points[idx].assignments) all.push_back(a);
                    const ScenarioConfig config = load_config(config_path, all);
                    const RunOutput run = run_scenario(config);
                    char name[32];
                    std::snprintf(name, sizeof(name), "point_%04zu", idx);
                    const fs::path dir = fs::path(out_dir) / name;
                    write_outputs(dir, run);
                    json manifest;
                    manifest["assignments"] = points[idx].assignments;
                    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
                    summaries[idx] = summarize(run);
                } catch (const std::exception& e) {
                    failures[idx] = e.what();
                }
            }
        };
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& th : threads) th.join();

        for (size_t i = 0; i < points.size(); ++i)
            if (!failures[i].empty()) {
                std::fprintf(stderr, "error in point %zu: %s\n", i, failures[i].c_str());
                return 2;
            }

        std::ostringstream csv;
        csv << "point";
        for (const auto& spec : grid_specs) csv << ',' << spec.substr(0, spec.find('='));
        csv << ",terminal_coverage_ratio,total_converted_fraction,mean_capital_efficiency\n";
        for (size_t i = 0; i < points.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "point_%04zu", i);
            csv << name;
            for (const auto& a : points[i].assignments)
                csv << ',' << a.substr(a.find('=') + 1);
            csv << ',' << fmt_double(summaries[i].terminal_coverage) << ','
                << fmt_double(summaries[i].total_converted) << ','
                << fmt_double(summaries[i].mean_capital_efficiency) << '\n';
        }
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "summary.csv", csv.str());
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides) {
    try {
        const ScenarioConfig config = load_config(config_path, overrides);
        const RunOutput run = run_scenario(config);
        bool all_ok = true;
        auto report = [&](const char* name, bool ok, const std::string& detail) {
            std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                        detail.c_str());
            if (!ok) all_ok = false;
        };

        // Balance-sheet residual: internal transitions never move it; only
        // external repricing does.
        {
            bool ok = true;
            std::string detail;
            const double tol = std::max(1e-9, 1e-12 * run.final_state.circulating_supply);
            for (const auto& e : run.events.events) {
                if (e.value("type", "") != "epoch_summary") continue;
                const double drift =
                    e.value("residual_end", 0.0) - e.value("residual_post_reprice", 0.0);
                if (std::abs(drift) > tol) {
                    ok = false;
                    detail = "epoch " + std::to_string(e.value("epoch", int64_t{0})) +
                             " drift " + fmt_double(drift);
                    break;
                }
            }
            report("balance_sheet_residual", ok, detail);
        }

        // Fee bounds.
        {
            bool ok = true;
            std::string detail;
            for (const auto& e : run.events.events) {
                if (e.value("type", "") != "fee_quote") continue;
                const double fee = e.value("fee", 0.0);
                if (fee < config.policy.fee.theta_floor - 1e-15 ||
                    fee > config.policy.fee.theta_cap + 1e-15) {
                    ok = false;
                    detail = "fee " + fmt_double(fee) + " outside bounds";
                    break;
                }
            }
            report("fee_bounds", ok, detail);
        }

        // PMO conservation: burned IDA equals issued LP nominal at the
        // conversion price.
        {
            bool ok = true;
            std::string detail;
            for (const auto& e : run.events.events) {
                if (e.value("type", "") != "conversion") continue;
                const double burned = e.value("burned", 0.0);
                const double issued = e.value("delta_inventory", 0.0);
                const double px = e.value("price_assets_per_ida", 0.0);
                if (px > 0.0 && std::abs(burned - issued / px) > 1e-9) {
                    ok = false;
                    detail = "epoch " + std::to_string(e.value("epoch", int64_t{0}));
                    break;
                }
            }
            report("pmo_conservation", ok, detail);
        }

        // Lever clamps and threshold ordering.
        {
            bool ok = true;
            std::string detail;
            const auto& lv = config.policy.lever;
            for (const auto& e : run.events.events) {
                if (e.value("type", "") != "lever") continue;
                const double dn = e.value("delta_no", 0.0);
                const double dm = e.value("delta_mn", 0.0);
                const double o = e.value("o_threshold", 0.0);
                const double nn = e.value("n_threshold", 0.0);
                const double m = e.value("m_threshold", 0.0);
                if (dn < lv.delta_no_min - 1e-15 || dn > lv.delta_no_max + 1e-15 ||
                    dm < lv.delta_mn_min - 1e-15 || dm > lv.delta_mn_max + 1e-15 ||
                    !(o <= nn && nn <= m)) {
                    ok = false;
                    detail = "epoch " + std::to_string(e.value("epoch", int64_t{0}));
                    break;
                }
            }
            report("lever_bounds_and_ordering", ok, detail);
        }

        // ES estimator agrees with a direct sort-and-average of the same
        // losses.
        {
            TargetPlan plan;
            for (const auto& p : run.final_state.pools) {
                plan.collateral_targets.push_back(p.collateral_long);
                plan.du_adjustments.push_back(0.0);
                plan.per_pool_targets.push_back(config.policy.target_util);
            }
            std::vector<std::string> syms;
            for (const auto& p : run.final_state.pools) syms.push_back(p.asset.symbol);
            const auto losses = simulate_losses(run.final_state, plan, config.price_model(),
                                                CorrelationMatrix::identity(syms),
                                                substream_seed(config.seed, 0xE5),
                                                config.policy.es);
            const double es = expected_shortfall(losses, config.policy.es.alpha_conf).es;
            std::vector<double> sorted(losses);
            std::sort(sorted.begin(), sorted.end(), std::greater<double>());
            const size_t m = std::clamp<size_t>(
                static_cast<size_t>(
                    std::ceil((1.0 - config.policy.es.alpha_conf) * sorted.size())),
                1, sorted.size());
            double sum = 0.0;
            for (size_t i = 0; i < m; ++i) sum += sorted[i];
            const double brute = sum / static_cast<double>(m);
            report("es_oracle_agreement", es == brute,
                   es == brute ? "" : fmt_double(es) + " vs " + fmt_double(brute));
        }

        return all_ok ? 0 : 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int cmd_describe(const std::string& config_path, const std::vector<std::string>& overrides) {
    try {
        std::ifstream in(config_path);
        if (!in) raise(ErrCode::config_error, "cannot open config file: " + config_path);
        json user = json::parse(in);
        json resolved = merge_config(user);
        for (const auto& o : overrides) apply_override(resolved, o);
        const ScenarioConfig config = config_from_json(resolved);
        config.validate();
        std::printf("%s\n", config_to_json(config).dump(2).c_str());
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace ida::cli
