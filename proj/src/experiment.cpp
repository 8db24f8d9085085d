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

#include "bsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace bsched {

using nlohmann::json;

namespace {

std::string join_vector(const Eigen::VectorXd& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0)
            s += ';';
        s += format_number(v(i));
    }
    return s;
}

std::string csv_value(const json& v)
{
    if (v.is_number())
        return format_number(v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

json vector_json(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json stat_json(const Stat& s)
{
    return {{"mean", s.mean}, {"se", s.se}};
}

json run_summary_json(const RunSummary& s)
{
    return {
        {"avg_utility", s.avg_utility},
        {"avg_utility_windowed", s.avg_utility_windowed},
        {"avg_queue", s.avg_queue},
        {"avg_queue_windowed", s.avg_queue_windowed},
        {"per_bn_throughput", vector_json(s.per_bn_throughput)},
        {"per_bn_throughput_windowed", vector_json(s.per_bn_throughput_windowed)},
        {"per_bn_admitted", vector_json(s.per_bn_admitted)},
        {"per_bn_energy", vector_json(s.per_bn_energy)},
        {"max_queue_seen", s.max_queue_seen},
        {"max_rate_seen", s.max_rate_seen},
        {"b_constant", s.b_constant},
        {"mean_iterations", s.mean_iterations},
        {"converged_fraction", s.converged_fraction},
        {"total_admitted", s.total_admitted},
        {"total_served", s.total_served},
        {"final_backlog", s.final_backlog},
        {"distances", s.geometry.distances},
        {"angles", s.geometry.angles},
    };
}

} // namespace

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (x == 0.0)
        return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

const std::vector<std::string>& slots_csv_columns()
{
    static const std::vector<std::string> columns = {
        "point",        "replica",     "slot",        "bn",            "rate_bits",
        "admitted_bits", "served_bits", "queue_after_bits", "received_energy_w", "utility",
        "iterations",   "lyapunov",    "dpp_service", "dpp_admission", "dpp_penalty",
    };
    return columns;
}

void write_slots_csv(std::ostream& out, const std::vector<PointResult>& points)
{
    const auto& cols = slots_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t r = 0; r < points[p].runs.size(); ++r) {
            for (const SlotMetrics& m : points[p].runs[r].slots) {
                for (Eigen::Index n = 0; n < m.rates.size(); ++n) {
                    out << p << ',' << r << ',' << m.slot << ',' << n << ',' << format_number(m.rates(n)) << ','
                        << format_number(m.admissions(n)) << ',' << format_number(m.served(n)) << ','
                        << format_number(m.queues_after(n)) << ',' << format_number(m.received_energy(n)) << ','
                        << format_number(m.utility_value) << ',' << m.scheduler_iterations << ','
                        << format_number(m.lyapunov) << ',' << format_number(m.dpp_service) << ','
                        << format_number(m.dpp_admission) << ',' << format_number(m.dpp_penalty) << '\n';
                }
            }
        }
    }
}

void write_sweep_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<PointResult>& points)
{
    out << "point";
    for (const SweepAxis& axis : spec.sweep)
        out << ',' << axis.param;
    out << ",replicas,avg_utility_mean,avg_utility_se,avg_utility_windowed_mean,avg_utility_windowed_se"
           ",avg_queue_mean,avg_queue_se,sum_throughput_mean,sum_throughput_se"
           ",sum_throughput_windowed_mean,sum_throughput_windowed_se,mean_iterations_mean,mean_iterations_se"
           ",converged_fraction,max_queue_seen,per_bn_throughput,per_bn_throughput_windowed,per_bn_energy\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
        const AggregateSummary& a = points[p].aggregate;
        out << p;
        for (const auto& [param, value] : points[p].point.assignment)
            out << ',' << csv_value(value);
        auto stat = [&](const Stat& s) { out << ',' << format_number(s.mean) << ',' << format_number(s.se); };
        out << ',' << a.replicas;
        stat(a.avg_utility);
        stat(a.avg_utility_windowed);
        stat(a.avg_queue);
        stat(a.sum_throughput);
        stat(a.sum_throughput_windowed);
        stat(a.mean_iterations);
        out << ',' << format_number(a.converged_fraction) << ',' << format_number(a.max_queue_seen) << ','
            << join_vector(a.per_bn_throughput) << ',' << join_vector(a.per_bn_throughput_windowed) << ','
            << join_vector(a.per_bn_energy) << '\n';
    }
}

json summary_json(const ExperimentSpec& spec, const std::vector<PointResult>& points)
{
    json out = {{"name", spec.name}, {"points", json::array()}};
    for (std::size_t p = 0; p < points.size(); ++p) {
        const PointResult& pr = points[p];
        json assignment = json::object();
        for (const auto& [param, value] : pr.point.assignment)
            assignment[param] = value;
        const AggregateSummary& a = pr.aggregate;
        json replicas = json::array();
        for (const RunResult& r : pr.runs)
            replicas.push_back(run_summary_json(r.summary));
        out["points"].push_back({
            {"point", p},
            {"assignment", assignment},
            {"config", network_config_to_json(pr.point.config)},
            {"aggregate",
             {{"replicas", a.replicas},
              {"avg_utility", stat_json(a.avg_utility)},
              {"avg_utility_windowed", stat_json(a.avg_utility_windowed)},
              {"avg_queue", stat_json(a.avg_queue)},
              {"sum_throughput", stat_json(a.sum_throughput)},
              {"sum_throughput_windowed", stat_json(a.sum_throughput_windowed)},
              {"mean_iterations", stat_json(a.mean_iterations)},
              {"per_bn_throughput", vector_json(a.per_bn_throughput)},
              {"per_bn_throughput_windowed", vector_json(a.per_bn_throughput_windowed)},
              {"per_bn_energy", vector_json(a.per_bn_energy)},
              {"max_queue_seen", a.max_queue_seen},
              {"converged_fraction", a.converged_fraction}}},
            {"replica_summaries", replicas},
        });
    }
    return out;
}

std::vector<PointResult> simulate_experiment(const ExperimentSpec& spec)
{
    std::vector<PointResult> points;
    for (SweepPoint& sp : expand_sweep(spec)) {
        PointResult pr;
        pr.runs.resize(sp.config.replicas);
        pr.point = std::move(sp);
        points.push_back(std::move(pr));
    }
    const bool keep_slots = spec.emit.contains(EmitKind::SlotsCsv);

    std::vector<std::pair<std::size_t, int>> jobs;
    for (std::size_t p = 0; p < points.size(); ++p)
        for (int r = 0; r < points[p].point.config.replicas; ++r)
            jobs.emplace_back(p, r);

    int workers = spec.base.workers > 0 ? spec.base.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto [p, r] = jobs[j];
            try {
                points[p].runs[r] = run(points[p].point.config, r, keep_slots);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    for (PointResult& pr : points) {
        std::vector<RunSummary> summaries;
        for (const RunResult& r : pr.runs)
            summaries.push_back(r.summary);
        pr.aggregate = aggregate(summaries);
    }
    return points;
}

ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    ExperimentResult result;
    result.points = simulate_experiment(spec);

    const std::filesystem::path dir(spec.output_dir);
    std::filesystem::create_directories(dir);
    auto open = [&](const char* file) {
        const std::filesystem::path path = dir / file;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        result.files.push_back(path);
        return out;
    };
    if (spec.emit.contains(EmitKind::SummaryJson)) {
        std::ofstream out = open("summary.json");
        out << summary_json(spec, result.points).dump(2) << '\n';
    }
    if (spec.emit.contains(EmitKind::SlotsCsv)) {
        std::ofstream out = open("slots.csv");
        write_slots_csv(out, result.points);
    }
    if (spec.emit.contains(EmitKind::SweepCsv)) {
        std::ofstream out = open("sweep.csv");
        write_sweep_csv(out, spec, result.points);
    }
    return result;
}

} // namespace bsched
