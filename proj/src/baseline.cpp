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

#include <streamcost/baseline.hpp>
#include <streamcost/checkpoint.hpp>
#include <streamcost/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace streamcost {

const std::vector<std::string>& flat_slots() {
    static const std::vector<std::string> slots = {
        "n_sources",        "n_filters",        "n_aggregations",   "n_joins",          "n_operators",
        "selectivity_min",  "selectivity_mean", "selectivity_max",  "window_size_min",  "window_size_mean",
        "window_size_max",  "total_event_rate", "mean_tuple_width", "cpu_min",          "cpu_mean",
        "cpu_max",          "ram_min",          "ram_mean",         "ram_max",          "bandwidth_min",
        "bandwidth_mean",   "bandwidth_max",    "latency_min",      "latency_mean",     "latency_max",
        "used_hosts",       "max_colocation",
    };
    return slots;
}

namespace {

struct Summary {
    double lo = 0.0, mean = 0.0, hi = 0.0;
};

Summary summarise(const std::vector<double>& v, double empty) {
    if (v.empty()) return {empty, empty, empty};
    Summary s{v.front(), 0.0, v.front()};
    for (double x : v) {
        s.lo = std::min(s.lo, x);
        s.hi = std::max(s.hi, x);
        s.mean += x;
    }
    s.mean /= static_cast<double>(v.size());
    return s;
}

}  // namespace

Vector flatten(const JointGraph& g) {
    std::map<OperatorKind, double> count;
    std::vector<double> sel, window, width;
    double rate = 0.0;
    for (const auto& op : g.query.operators) {
        count[op.kind] += 1.0;
        const auto& f = op.features;
        width.push_back(f.tuple_width_out);
        if (op.kind == OperatorKind::Source) rate += f.input_event_rate;
        if (op.kind == OperatorKind::Filter || op.kind == OperatorKind::WindowedAggregation ||
            op.kind == OperatorKind::WindowedJoin)
            sel.push_back(f.selectivity);
        if (f.window) window.push_back(std::log1p(f.window->size));
    }
    std::vector<double> cpu, ram, bw, lat;
    std::size_t colocation = 0;
    for (std::size_t h = 0; h < g.hardware_count(); ++h) {
        cpu.push_back(g.hardware[h].cpu);
        ram.push_back(std::log1p(g.hardware[h].ram));
        bw.push_back(std::log1p(g.hardware[h].net_bandwidth));
        lat.push_back(std::log1p(g.hardware[h].net_latency));
        colocation = std::max(colocation, g.operators_on[h].size());
    }
    const auto s = summarise(sel, 1.0);
    const auto w = summarise(window, 0.0);
    const auto c = summarise(cpu, 0.0);
    const auto r = summarise(ram, 0.0);
    const auto b = summarise(bw, 0.0);
    const auto l = summarise(lat, 0.0);
    const std::vector<double> values = {count[OperatorKind::Source],
                                        count[OperatorKind::Filter],
                                        count[OperatorKind::WindowedAggregation],
                                        count[OperatorKind::WindowedJoin],
                                        static_cast<double>(g.operator_count()),
                                        s.lo, s.mean, s.hi,
                                        w.lo, w.mean, w.hi,
                                        std::log1p(rate),
                                        summarise(width, 0.0).mean,
                                        c.lo, c.mean, c.hi,
                                        r.lo, r.mean, r.hi,
                                        b.lo, b.mean, b.hi,
                                        l.lo, l.mean, l.hi,
                                        static_cast<double>(g.hardware_count()),
                                        static_cast<double>(colocation)};
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vector FlatModel::standardise(const Vector& x) const {
    if (x.size() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "flat vector length differs from the model");
    return (x - mean).cwiseQuotient(scale);
}

double predict(const JointGraph& g, const FlatModel& m) {
    const Matrix out = m.network.forward(m.standardise(flatten(g)));
    return decode(m.task, out(0, 0));
}

namespace {

Matrix columns(const FlatModel& m, const std::vector<Vector>& xs, const std::vector<std::size_t>& idx, std::size_t b,
               std::size_t e) {
    Matrix x(m.mean.size(), static_cast<Eigen::Index>(e - b));
    for (std::size_t i = b; i < e; ++i) x.col(static_cast<Eigen::Index>(i - b)) = m.standardise(xs[idx[i]]);
    return x;
}

double loss_of(const FlatModel& m, const std::vector<Vector>& xs, const std::vector<double>& ys,
               const std::vector<double>& ws) {
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const Matrix out = m.network.forward(columns(m, xs, idx, 0, xs.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += ws[i] * example_loss(m.task, ys[i], out(0, static_cast<Eigen::Index>(i)));
    return sum / static_cast<double>(xs.size());
}

std::vector<double> flat_params(const Mlp& m) {
    std::vector<double> flat;
    for_each_block(m, [&](const double* p, std::size_t n) { flat.insert(flat.end(), p, p + n); });
    return flat;
}

void assign_params(Mlp& m, const std::vector<double>& flat) {
    std::size_t pos = 0;
    for_each_block(m, [&](double* p, std::size_t n) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos), flat.begin() + static_cast<std::ptrdiff_t>(pos + n), p);
        pos += n;
    });
}

}  // namespace

FlatTrainResult train_flat(const TrainConfig& cfg, const std::vector<Example>& train,
                           const std::vector<Example>& validation, std::uint64_t seed) {
    cfg.validate();
    const auto tr = usable_examples(train, cfg.metric);
    const auto va = usable_examples(validation, cfg.metric);
    if (tr.empty() || va.empty()) throw Error(ErrorCode::EmptyDataset, "flat baseline needs training and validation data");
    std::vector<Vector> xt, xv;
    std::vector<double> yt, yv;
    for (const auto* e : tr) {
        xt.push_back(flatten(e->graph));
        yt.push_back(training_target(*e, cfg.metric));
    }
    for (const auto* e : va) {
        xv.push_back(flatten(e->graph));
        yv.push_back(training_target(*e, cfg.metric));
    }

    FlatModel m;
    m.metric = cfg.metric;
    m.task = task_for(cfg.metric);
    const auto wt = class_weights(m.task, yt, cfg.balance_classes);
    const auto wv = class_weights(m.task, yv, cfg.balance_classes);
    m.seed = seed;
    const auto dim = static_cast<Eigen::Index>(flat_slots().size());
    m.mean = Vector::Zero(dim);
    m.scale = Vector::Zero(dim);
    for (const auto& x : xt) m.mean += x;
    m.mean /= static_cast<double>(xt.size());
    for (const auto& x : xt) m.scale += (x - m.mean).cwiseAbs2();
    m.scale = (m.scale / static_cast<double>(xt.size())).cwiseSqrt().cwiseMax(kIqrFloor);
    std::mt19937_64 init(seed);
    m.network = Mlp::make({static_cast<std::size_t>(dim), cfg.hidden_dim, cfg.hidden_dim, 1}, init);

    FlatTrainResult res;
    res.model = m;
    res.best_val_loss = loss_of(m, xv, yv, wv);
    Adam adam(m.network.parameter_count(), AdamConfig{cfg.learning_rate});
    std::vector<double> flat = flat_params(m.network);
    std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
    std::vector<std::size_t> order(xt.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i-- > 1;)
            std::swap(order[i], order[std::uniform_int_distribution<std::size_t>(0, i)(rng)]);
        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            const std::size_t e = std::min(order.size(), b + cfg.batch_size);
            const double n = static_cast<double>(e - b);
            MlpTape tape;
            const Matrix out = forward(m.network, columns(m, xt, order, b, e), tape);
            Matrix g(1, out.cols());
            for (std::size_t i = b; i < e; ++i) {
                const double raw = out(0, static_cast<Eigen::Index>(i - b));
                const double y = yt[order[i]];
                const double w = wt[order[i]];
                epoch_loss += w * example_loss(m.task, y, raw);
                g(0, static_cast<Eigen::Index>(i - b)) = w * example_loss_gradient(m.task, y, raw) / n;
            }
            Mlp grads = m.network.zeros_like();
            (void)backward(m.network, tape, g, grads);
            auto gflat = flat_params(grads);
            clip_by_norm(gflat, cfg.clip_norm);
            adam.step(flat, gflat);
            assign_params(m.network, flat);
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss)) throw Error(ErrorCode::Diverged, "non-finite flat-model loss in epoch " + std::to_string(epoch));
        const double val = loss_of(m, xv, yv, wv);
        res.log.push_back({epoch, epoch_loss, val});
        if (val < res.best_val_loss) {
            res.best_val_loss = val;
            res.best_epoch = epoch;
            res.model = m;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return res;
}

std::vector<FlatTrainResult> train_flat_ensemble(const TrainConfig& cfg, const std::vector<Example>& train,
                                                 const std::vector<Example>& validation) {
    std::vector<FlatTrainResult> out;
    for (auto seed : cfg.seeds) out.push_back(train_flat(cfg, train, validation, seed));
    return out;
}

json flat_to_json(const FlatModel& m) {
    return json{{"format_version", m.format_version},
                {"model", "flat"},
                {"slots", flat_slots()},
                {"metric", metric_name(m.metric)},
                {"seed", m.seed},
                {"mean", std::vector<double>(m.mean.data(), m.mean.data() + m.mean.size())},
                {"scale", std::vector<double>(m.scale.data(), m.scale.data() + m.scale.size())},
                {"network", m.network}};
}

FlatModel flat_from_json(const json& j) {
    try {
        FlatModel m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kFlatVectorVersion || j.at("slots").get<std::vector<std::string>>() != flat_slots())
            throw Error(ErrorCode::SchemaMismatch, "flat model was written for another slot layout");
        m.metric = parse_metric(j.at("metric").get<std::string>());
        m.task = task_for(m.metric);
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto mean = j.at("mean").get<std::vector<double>>();
        const auto scale = j.at("scale").get<std::vector<double>>();
        m.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        m.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
        m.network = j.at("network").get<Mlp>();
        if (m.mean.size() != static_cast<Eigen::Index>(flat_slots().size()) || m.scale.size() != m.mean.size() ||
            m.network.input_dim() != flat_slots().size() || m.network.output_dim() != 1)
            throw Error(ErrorCode::DimensionMismatch, "flat model dimensions do not match the slot layout");
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("malformed flat model: ") + e.what());
    }
}

}  // namespace streamcost
