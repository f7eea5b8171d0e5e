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
#include <streamcost/evaluate.hpp>
#include <streamcost/featurize.hpp>
#include <streamcost/generate.hpp>
#include <streamcost/optimize.hpp>
#include <streamcost/train.hpp>

#include <algorithm>
#include <cmath>

namespace streamcost {

double q_error(double c, double c_hat) {
    if (!(c > 0.0) || !(c_hat > 0.0)) throw Error(ErrorCode::NonPositive, "q-error needs positive costs");
    return std::max(c / c_hat, c_hat / c);
}

namespace {

std::vector<double> aggregate_members(Metric m, const std::vector<std::vector<double>>& per_member) {
    const std::size_t n = per_member.front().size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::map<Metric, std::vector<double>> preds;
        for (const auto& member : per_member) preds[m].push_back(member[i]);
        out[i] = aggregate_predictions(preds).at(m);
    }
    return out;
}

}  // namespace

BatchPredictor gnn_predictor(std::vector<ModelCheckpoint> members) {
    if (members.empty()) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
    return [members = std::move(members)](const std::vector<const JointGraph*>& graphs) {
        if (graphs.empty()) return std::vector<double>{};
        constexpr std::size_t kChunk = 256;
        std::vector<std::vector<double>> per_member;
        for (const auto& m : members) {
            std::vector<double> out;
            for (std::size_t start = 0; start < graphs.size(); start += kChunk) {
                const std::size_t end = std::min(graphs.size(), start + kChunk);
                std::vector<GraphInput> inputs;
                inputs.reserve(end - start);
                for (std::size_t i = start; i < end; ++i) inputs.push_back(compile(*graphs[i], m));
                std::vector<const GraphInput*> ptrs;
                for (const auto& in : inputs) ptrs.push_back(&in);
                for (double raw : batch_raw_outputs(m, ptrs)) out.push_back(decode(m.task, raw));
            }
            per_member.push_back(std::move(out));
        }
        return aggregate_members(members.front().metric, per_member);
    };
}

BatchPredictor flat_predictor(std::vector<FlatModel> members) {
    if (members.empty()) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
    return [members = std::move(members)](const std::vector<const JointGraph*>& graphs) {
        if (graphs.empty()) return std::vector<double>{};
        std::vector<std::vector<double>> per_member;
        for (const auto& m : members) {
            std::vector<double> out;
            for (const auto* g : graphs) out.push_back(predict(*g, m));
            per_member.push_back(std::move(out));
        }
        return aggregate_members(members.front().metric, per_member);
    };
}

Cell regression_cell(std::vector<double> q_errors) {
    Cell c;
    c.n = q_errors.size();
    if (q_errors.empty()) return c;
    c.q50 = percentile(q_errors, 0.5);
    c.q95 = percentile(std::move(q_errors), 0.95);
    return c;
}

Cell accuracy_cell(const std::vector<bool>& correct) {
    Cell c;
    c.n = correct.size();
    if (correct.empty()) return c;
    c.accuracy = static_cast<double>(std::count(correct.begin(), correct.end(), true)) / static_cast<double>(c.n);
    return c;
}

const std::vector<std::string>& groupings() {
    static const std::vector<std::string> g = {"family", "cpu", "ram", "bandwidth", "latency"};
    return g;
}

std::string bucket_of(const JointGraph& g, const std::string& grouping) {
    struct Buckets {
        std::vector<double> edges;
        std::vector<std::string> names;
    };
    static const std::map<std::string, Buckets> table = {
        {"cpu", {{200, 400, 600}, {"cpu<200", "cpu 200-400", "cpu 400-600", "cpu>=600"}}},
        {"ram", {{4000, 8000, 16000}, {"ram<4G", "ram 4-8G", "ram 8-16G", "ram>=16G"}}},
        {"bandwidth", {{200, 800, 3200}, {"bw<200", "bw 200-800", "bw 800-3200", "bw>=3200"}}},
        {"latency", {{5, 20, 80}, {"lat<5", "lat 5-20", "lat 20-80", "lat>=80"}}},
    };
    auto it = table.find(grouping);
    if (it == table.end()) throw Error(ErrorCode::InvalidArgument, "unknown grouping '" + grouping + "'");
    double mean = 0.0;
    for (const auto& h : g.hardware) {
        if (grouping == "cpu") mean += h.cpu;
        if (grouping == "ram") mean += h.ram;
        if (grouping == "bandwidth") mean += h.net_bandwidth;
        if (grouping == "latency") mean += h.net_latency;
    }
    mean /= static_cast<double>(std::max<std::size_t>(1, g.hardware.size()));
    const auto& b = it->second;
    std::size_t k = 0;
    while (k < b.edges.size() && mean >= b.edges[k]) ++k;
    return b.names[k];
}

namespace {

struct Scored {
    const Example* example;
    double q = 0.0;        // regression
    bool correct = false;  // binary
};

std::vector<Scored> score(const BatchPredictor& predictor, Metric m, const std::vector<Example>& examples,
                          const EvalOptions& opts) {
    std::vector<Example> pool;
    if (is_binary(m) && opts.balance) {
        pool = balanced_subset(examples, m, opts.balance_seed);
    } else {
        for (const auto* e : usable_examples(examples, m)) pool.push_back(*e);
    }
    // Keep pointers into the caller's examples for grouping.
    std::map<std::string, const Example*> by_id;
    for (const auto& e : examples) by_id[e.id] = &e;

    std::vector<const JointGraph*> graphs;
    for (const auto& e : pool) graphs.push_back(&e.graph);
    const auto preds = predictor(graphs);
    std::vector<Scored> out;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double truth = training_target(pool[i], m);
        Scored s{by_id.at(pool[i].id)};
        if (is_binary(m)) {
            s.correct = (preds[i] >= 0.5) == (truth >= 0.5);
        } else {
            if (!(truth > 0.0)) continue;
            s.q = q_error(truth, std::max(preds[i], kMinPrediction));
        }
        out.push_back(s);
    }
    return out;
}

Cell cell_of(Metric m, const std::vector<const Scored*>& items) {
    if (is_binary(m)) {
        std::vector<bool> c;
        for (const auto* s : items) c.push_back(s->correct);
        return accuracy_cell(c);
    }
    std::vector<double> q;
    for (const auto* s : items) q.push_back(s->q);
    return regression_cell(std::move(q));
}

json cell_json(const Cell& c) {
    json j{{"n", c.n}};
    if (c.q50) j["q50"] = *c.q50;
    if (c.q95) j["q95"] = *c.q95;
    if (c.accuracy) j["accuracy"] = *c.accuracy;
    return j;
}

}  // namespace

Cell evaluate_metric(const BatchPredictor& predictor, Metric m, const std::vector<Example>& examples,
                     const EvalOptions& opts) {
    const auto scored = score(predictor, m, examples, opts);
    std::vector<const Scored*> all;
    for (const auto& s : scored) all.push_back(&s);
    return cell_of(m, all);
}

EvalReport evaluate_models(const std::map<Metric, BatchPredictor>& predictors, const std::vector<Example>& examples,
                           const EvalOptions& opts) {
    EvalReport r;
    r.experiment = opts.experiment;
    r.config_hash = opts.config_hash;
    r.model_hashes = opts.model_hashes;
    r.notes.push_back("regression pools exclude failed executions (success = 0)");
    if (opts.balance) r.notes.push_back("binary metrics are scored on a label-balanced subset");
    for (const auto& [m, predictor] : predictors) {
        const auto scored = score(predictor, m, examples, opts);
        MetricEval me;
        std::vector<const Scored*> all;
        for (const auto& s : scored) all.push_back(&s);
        me.overall = cell_of(m, all);
        for (const auto& grouping : groupings()) {
            std::map<std::string, std::vector<const Scored*>> buckets;
            for (const auto& s : scored) {
                const auto key = grouping == "family" ? s.example->family : bucket_of(s.example->graph, grouping);
                buckets[key].push_back(&s);
            }
            for (const auto& [key, items] : buckets) me.groups[grouping][key] = cell_of(m, items);
        }
        r.metrics[m] = std::move(me);
    }
    return r;
}

json EvalReport::to_json() const {
    json metrics_json = json::object();
    for (const auto& [m, me] : metrics) {
        json groups_json = json::object();
        for (const auto& [g, buckets] : me.groups) {
            json b = json::object();
            for (const auto& [k, c] : buckets) b[k] = cell_json(c);
            groups_json[g] = b;
        }
        metrics_json[metric_name(m)] = json{{"overall", cell_json(me.overall)}, {"groups", groups_json}};
    }
    return json{{"v", kJsonlVersion},
                {"kind", "evaluation"},
                {"experiment", experiment},
                {"config_hash", config_hash},
                {"model_hashes", model_hashes},
                {"metrics", metrics_json},
                {"notes", notes}};
}

}  // namespace streamcost
