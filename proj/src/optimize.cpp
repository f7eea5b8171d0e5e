/*
    Copyright (C) 2026 The streamcost Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <streamcost/error.hpp>
#include <streamcost/optimize.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace streamcost {

bool HardwareBin::matches(const HardwareNode& h) const {
    const bool cpu_ok = (!cpu_min || h.cpu >= *cpu_min) && (!cpu_max || h.cpu <= *cpu_max);
    const bool ram_ok = (!ram_min || h.ram >= *ram_min) && (!ram_max || h.ram <= *ram_max);
    if (!any) return cpu_ok && ram_ok;
    const bool cpu_set = cpu_min || cpu_max;
    const bool ram_set = ram_min || ram_max;
    return (cpu_set && cpu_ok) || (ram_set && ram_ok);
}

int BinConfig::rank(const HardwareNode& h) const {
    for (std::size_t i = bins.size(); i-- > 0;)
        if (bins[i].matches(h)) return static_cast<int>(i);
    return 0;
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

void to_json(json& j, const BinConfig& b) {
    j = json::array();
    for (const auto& bin : b.bins)
        j.push_back(json{{"name", bin.name},
                         {"cpu_min", opt_json(bin.cpu_min)},
                         {"cpu_max", opt_json(bin.cpu_max)},
                         {"ram_min", opt_json(bin.ram_min)},
                         {"ram_max", opt_json(bin.ram_max)},
                         {"any", bin.any}});
}

void from_json(const json& j, BinConfig& b) {
    b.bins.clear();
    for (const auto& e : j)
        b.bins.push_back(HardwareBin{e.value("name", std::string{}), opt_from(e, "cpu_min"), opt_from(e, "cpu_max"),
                                     opt_from(e, "ram_min"), opt_from(e, "ram_max"), e.value("any", false)});
    if (b.bins.empty()) throw Error(ErrorCode::InvalidArgument, "bin configuration needs at least one bin");
}

std::vector<Placement> enumerate_candidates(const QueryGraph& q, const std::vector<HardwareNode>& hw, std::size_t k,
                                            std::mt19937_64& rng, const BinConfig& bins, std::size_t attempts) {
    if (hw.empty()) throw Error(ErrorCode::InvalidArgument, "hardware inventory is empty");
    const auto problems = validate_query(q);
    if (!problems.empty()) throw Error(ErrorCode::InvalidQuery, problems.front());
    if (attempts == 0) attempts = std::max<std::size_t>(200, 20 * k);

    const auto order = topological_order(q);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::vector<std::vector<std::size_t>> preds(order.size());
    for (const auto& e : q.edges) preds[pos.at(e.to)].push_back(pos.at(e.from));

    const std::size_t n_hosts = hw.size();
    std::vector<int> rank(n_hosts);
    for (std::size_t h = 0; h < n_hosts; ++h) rank[h] = bins.rank(hw[h]);

    std::vector<Placement> out;
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> allowed;
    for (std::size_t attempt = 0; attempt < attempts && out.size() < k; ++attempt) {
        // reach[a][b]: data can flow from host a to host b.
        std::vector<std::vector<char>> reach(n_hosts, std::vector<char>(n_hosts, 0));
        std::vector<std::size_t> host(order.size());
        bool dead_end = false;
        for (std::size_t i = 0; i < order.size() && !dead_end; ++i) {
            int min_rank = 0;
            for (auto p : preds[i]) min_rank = std::max(min_rank, rank[host[p]]);
            allowed.clear();
            for (std::size_t c = 0; c < n_hosts; ++c) {
                if (rank[c] < min_rank) continue;
                bool cycle = false;
                for (auto p : preds[i])
                    if (host[p] != c && reach[c][host[p]]) cycle = true;
                if (!cycle) allowed.push_back(c);
            }
            if (allowed.empty()) {
                dead_end = true;
                break;
            }
            const std::size_t c = allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
            host[i] = c;
            for (auto p : preds[i]) {
                const std::size_t a = host[p];
                if (a == c) continue;
                for (std::size_t x = 0; x < n_hosts; ++x) {
                    if (x != a && !reach[x][a]) continue;
                    reach[x][c] = 1;
                    for (std::size_t y = 0; y < n_hosts; ++y)
                        if (reach[c][y]) reach[x][y] = 1;
                }
            }
        }
        if (dead_end || !seen.insert(host).second) continue;
        Placement p;
        for (std::size_t i = 0; i < order.size(); ++i) p.assignment[order[i]] = hw[host[i]].id;
        out.push_back(std::move(p));
    }
    if (out.empty()) throw Error(ErrorCode::NoFeasiblePlacement, "no rule-satisfying placement found");
    return out;
}

RuleReport check_rules(const QueryGraph& q, const std::vector<HardwareNode>& hw, const Placement& p,
                       const BinConfig& bins) {
    RuleReport r;
    std::map<std::string, const HardwareNode*> by_id;
    for (const auto& h : hw) by_id[h.id] = &h;
    std::map<std::string, std::string> host;
    for (const auto& op : q.operators) {
        auto it = p.assignment.find(op.id);
        if (it == p.assignment.end()) {
            r.complete = false;
            r.violations.push_back("operator " + op.id + " is not placed");
        } else if (!by_id.count(it->second)) {
            r.complete = false;
            r.violations.push_back("operator " + op.id + " is placed on unknown host " + it->second);
        } else {
            host[op.id] = it->second;
        }
    }
    if (!r.complete) return r;

    std::map<std::string, std::set<std::string>> flow;
    for (const auto& e : q.edges) {
        const auto& a = host.at(e.from);
        const auto& b = host.at(e.to);
        if (bins.rank(*by_id.at(b)) < bins.rank(*by_id.at(a))) {
            r.weak_to_strong = false;
            r.violations.push_back("edge " + e.from + "->" + e.to + " sends data from " + a + " to weaker host " + b);
        }
        if (a != b) flow[a].insert(b);
    }
    // Depth-first search for a back edge in the contracted host graph.
    std::map<std::string, int> colour;
    std::function<bool(const std::string&)> visit = [&](const std::string& u) {
        colour[u] = 1;
        for (const auto& v : flow[u]) {
            if (colour[v] == 1) return true;
            if (colour[v] == 0 && visit(v)) return true;
        }
        colour[u] = 2;
        return false;
    };
    for (const auto& [u, _] : host)
        if (colour[host[u]] == 0 && visit(host[u])) {
            r.no_return = false;
            r.violations.push_back("data returns to a host it already left");
            break;
        }
    return r;
}

std::map<Metric, double> aggregate_predictions(const std::map<Metric, std::vector<double>>& preds) {
    std::map<Metric, double> agg;
    for (const auto& [m, values] : preds) {
        if (values.empty()) continue;
        if (is_binary(m)) {
            std::size_t yes = 0;
            for (double v : values) yes += v >= 0.5 ? 1 : 0;
            agg[m] = 2 * yes > values.size() ? 1.0 : 0.0;
        } else {
            double sum = 0.0;
            for (double v : values) sum += v;
            agg[m] = sum / static_cast<double>(values.size());
        }
    }
    return agg;
}

PlacementCandidate predict_candidate(const Placement& p, const QueryGraph& q, const std::vector<HardwareNode>& hw,
                                     const Predictor& predictor) {
    PlacementCandidate c;
    c.placement = p;
    c.predictions = predictor(build_joint_graph(q, hw, p));
    c.aggregate = aggregate_predictions(c.predictions);
    return c;
}

void check_ensembles(const Ensembles& models) {
    for (const auto& [metric, members] : models) {
        if (members.empty()) throw Error(ErrorCode::SchemaMismatch, "empty ensemble for " + metric_name(metric));
        if (is_binary(metric) && members.size() % 2 == 0)
            throw Error(ErrorCode::SchemaMismatch, "binary ensemble for " + metric_name(metric) + " has even size");
        for (const auto& m : members) {
            if (m.metric != metric)
                throw Error(ErrorCode::SchemaMismatch,
                            "model for " + metric_name(m.metric) + " in the " + metric_name(metric) + " ensemble");
            if (m.format_version != kCheckpointVersion)
                throw Error(ErrorCode::SchemaMismatch, "checkpoint format version differs");
        }
    }
}

Predictor ensemble_predictor(const Ensembles& models) {
    check_ensembles(models);
    return [&models](const JointGraph& g) {
        std::map<Metric, std::vector<double>> out;
        for (const auto& [metric, members] : models)
            for (const auto& m : members) out[metric].push_back(predict(g, m));
        return out;
    };
}

PlacementCandidate predict_ensemble(const Placement& p, const QueryGraph& q, const std::vector<HardwareNode>& hw,
                                    const Ensembles& models) {
    return predict_candidate(p, q, hw, ensemble_predictor(models));
}

Predictor oracle_predictor(const SimConfig& cfg) {
    return [cfg](const JointGraph& g) {
        const auto c = simulate(g, cfg);
        std::map<Metric, std::vector<double>> out;
        for (auto m : kAllMetrics)
            if (auto v = metric_value(c, m)) out[m] = {*v};
        return out;
    };
}

Direction default_direction(Metric target) {
    return target == Metric::Throughput || target == Metric::Success ? Direction::Maximize : Direction::Minimize;
}

Selection select_placement(const std::vector<PlacementCandidate>& cands, Metric target, Direction direction) {
    if (cands.empty()) throw Error(ErrorCode::InvalidArgument, "no placement candidates");
    Selection s;
    std::optional<double> best;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const auto& agg = cands[i].aggregate;
        auto success = agg.find(Metric::Success);
        auto bp = agg.find(Metric::Backpressure);
        auto value = agg.find(target);
        if (success != agg.end() && success->second < 0.5) {
            s.decisions.push_back("predicted-failure");
            continue;
        }
        if (bp != agg.end() && bp->second >= 0.5) {
            s.decisions.push_back("predicted-backpressure");
            continue;
        }
        if (value == agg.end() || !std::isfinite(value->second)) {
            s.decisions.push_back("no-prediction");
            continue;
        }
        s.decisions.push_back("viable");
        const double v = value->second;
        const bool better = !best || (direction == Direction::Minimize ? v < *best : v > *best);
        if (better) {
            best = v;
            s.chosen = i;
        }
    }
    if (s.chosen) return s;

    s.none_viable = true;
    double best_success = -1.0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        double p = 0.0;
        auto it = cands[i].predictions.find(Metric::Success);
        if (it != cands[i].predictions.end() && !it->second.empty()) {
            for (double v : it->second) p += v;
            p /= static_cast<double>(it->second.size());
        }
        if (p > best_success) {
            best_success = p;
            s.fallback = i;
        }
    }
    return s;
}

double speedup(double baseline_cost, double chosen_cost) {
    if (!(baseline_cost > 0.0) || !(chosen_cost > 0.0))
        throw Error(ErrorCode::NonPositive, "speed-up needs two positive costs");
    return baseline_cost / chosen_cost;
}

}  // namespace streamcost
