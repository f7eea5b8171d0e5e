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
#include <streamcost/train.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace streamcost {

void TrainConfig::validate() const {
    if (batch_size == 0 || hidden_dim == 0) throw Error(ErrorCode::InvalidArgument, "batch size and width must be positive");
    if (!(learning_rate > 0.0) || !(clip_norm > 0.0) || !(fine_tune_lr_factor > 0.0))
        throw Error(ErrorCode::InvalidArgument, "learning rate, clip norm and fine-tune factor must be positive");
    if (patience == 0) throw Error(ErrorCode::InvalidArgument, "patience must be positive");
    if (seeds.empty() || seeds.size() % 2 == 0)
        throw Error(ErrorCode::InvalidArgument, "ensembles need an odd, non-zero number of seeds");
}

void to_json(json& j, const TrainConfig& c) {
    j = json{{"metric", metric_name(c.metric)},
             {"epochs", c.epochs},
             {"batch_size", c.batch_size},
             {"learning_rate", c.learning_rate},
             {"clip_norm", c.clip_norm},
             {"patience", c.patience},
             {"seeds", c.seeds},
             {"hidden_dim", c.hidden_dim},
             {"scheme", to_string(c.scheme)},
             {"featurization", to_string(c.featurization)},
             {"fine_tune_lr_factor", c.fine_tune_lr_factor},
             {"balance_classes", c.balance_classes}};
}

void from_json(const json& j, TrainConfig& c) {
    if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.patience = j.value("patience", c.patience);
    c.seeds = j.value("seeds", c.seeds);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    if (j.contains("scheme")) c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    if (j.contains("featurization")) c.featurization = parse_featurization(j.at("featurization").get<std::string>());
    c.fine_tune_lr_factor = j.value("fine_tune_lr_factor", c.fine_tune_lr_factor);
    c.balance_classes = j.value("balance_classes", c.balance_classes);
}

std::string TrainResult::log_csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "epoch,train_loss,val_loss\n";
    for (const auto& r : log) os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
    return os.str();
}

std::vector<const Example*> usable_examples(const std::vector<Example>& examples, Metric m) {
    std::vector<const Example*> out;
    for (const auto& e : examples) {
        if (!e.label) continue;
        if (!is_binary(m) && !e.label->success) continue;
        if (metric_value(*e.label, m)) out.push_back(&e);
    }
    return out;
}

double training_target(const Example& e, Metric m) {
    if (!e.label) throw Error(ErrorCode::InvalidArgument, "example " + e.id + " has no label");
    const auto v = metric_value(*e.label, m);
    if (!v) throw Error(ErrorCode::InvalidArgument, "example " + e.id + " has no " + metric_name(m) + " value");
    return *v;
}

std::vector<double> class_weights(TaskKind task, const std::vector<double>& targets, bool balance) {
    std::vector<double> w(targets.size(), 1.0);
    if (!balance || task != TaskKind::Binary) return w;
    std::size_t positives = 0;
    for (double t : targets) positives += t >= 0.5 ? 1 : 0;
    const std::size_t negatives = targets.size() - positives;
    if (positives == 0 || negatives == 0) return w;
    const double n = static_cast<double>(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        w[i] = n / (2.0 * static_cast<double>(targets[i] >= 0.5 ? positives : negatives));
    return w;
}

namespace {

struct Prepared {
    std::vector<GraphInput> inputs;
    std::vector<double> targets;
    std::vector<double> weights;
};

Prepared prepare(const ModelCheckpoint& model, const std::vector<const Example*>& examples, bool balance) {
    Prepared p;
    p.inputs.reserve(examples.size());
    for (const auto* e : examples) {
        p.inputs.push_back(compile(e->graph, model));
        p.targets.push_back(training_target(*e, model.metric));
    }
    p.weights = class_weights(model.task, p.targets, balance);
    return p;
}

double prepared_loss(const ModelCheckpoint& model, const Prepared& data) {
    constexpr std::size_t kChunk = 256;
    double sum = 0.0;
    std::vector<const GraphInput*> ptrs;
    for (std::size_t start = 0; start < data.inputs.size(); start += kChunk) {
        const std::size_t end = std::min(data.inputs.size(), start + kChunk);
        ptrs.clear();
        for (std::size_t i = start; i < end; ++i) ptrs.push_back(&data.inputs[i]);
        const auto raw = batch_raw_outputs(model, ptrs);
        for (std::size_t i = start; i < end; ++i) sum += data.weights[i] * example_loss(model.task, data.targets[i], raw[i - start]);
    }
    return sum / static_cast<double>(data.inputs.size());
}

TrainResult run(const TrainConfig& cfg, ModelCheckpoint model, const std::vector<Example>& train,
                const std::vector<Example>& validation, std::uint64_t seed, double learning_rate) {
    const auto train_set = usable_examples(train, model.metric);
    const auto val_set = usable_examples(validation, model.metric);
    if (train_set.empty()) throw Error(ErrorCode::EmptyDataset, "no usable training examples for " + metric_name(model.metric));
    if (val_set.empty()) throw Error(ErrorCode::EmptyDataset, "no usable validation examples for " + metric_name(model.metric));
    const auto tr = prepare(model, train_set, cfg.balance_classes);
    const auto va = prepare(model, val_set, cfg.balance_classes);

    TrainResult res;
    res.initial_val_loss = prepared_loss(model, va);
    res.best_val_loss = res.initial_val_loss;
    res.model = model;

    Adam adam(model.params.parameter_count(), AdamConfig{learning_rate});
    std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
    std::vector<std::size_t> order(tr.inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> flat = model.params.flatten();
    std::size_t since_best = 0;
    std::size_t batch_id = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i-- > 1;)
            std::swap(order[i], order[std::uniform_int_distribution<std::size_t>(0, i)(rng)]);
        double epoch_loss = 0.0;
        std::vector<const GraphInput*> ptrs;
        std::vector<double> targets, weights;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size, ++batch_id) {
            const std::size_t end = std::min(order.size(), b + cfg.batch_size);
            ptrs.clear();
            targets.clear();
            weights.clear();
            for (std::size_t i = b; i < end; ++i) {
                ptrs.push_back(&tr.inputs[order[i]]);
                targets.push_back(tr.targets[order[i]]);
                weights.push_back(tr.weights[order[i]]);
            }
            ModelParams grads = model.params.zeros_like();
            const auto br = batch_loss_and_gradient(model, ptrs, targets, &grads, weights);
            if (!std::isfinite(br.loss))
                throw Error(ErrorCode::Diverged, "non-finite loss in batch " + std::to_string(batch_id) + " (epoch " +
                                                     std::to_string(epoch) + ")");
            epoch_loss += br.loss * static_cast<double>(end - b);
            auto g = grads.flatten();
            clip_by_norm(g, cfg.clip_norm);
            adam.step(flat, g);
            model.params.assign(flat);
        }
        epoch_loss /= static_cast<double>(order.size());
        const double val = prepared_loss(model, va);
        if (!std::isfinite(val)) throw Error(ErrorCode::Diverged, "non-finite validation loss in epoch " + std::to_string(epoch));
        res.log.push_back({epoch, epoch_loss, val});
        if (val < res.best_val_loss) {
            res.best_val_loss = val;
            res.best_epoch = epoch;
            res.model = model;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return res;
}

}  // namespace

double mean_loss(const ModelCheckpoint& model, const std::vector<Example>& examples, bool balance) {
    const auto set = usable_examples(examples, model.metric);
    if (set.empty()) throw Error(ErrorCode::EmptyDataset, "no usable examples");
    return prepared_loss(model, prepare(model, set, balance));
}

TrainResult train_model(const TrainConfig& cfg, const std::vector<Example>& train,
                        const std::vector<Example>& validation, std::uint64_t seed) {
    cfg.validate();
    std::vector<JointGraph> graphs;
    for (const auto* e : usable_examples(train, cfg.metric)) graphs.push_back(e->graph);
    if (graphs.empty()) throw Error(ErrorCode::EmptyDataset, "no usable training examples for " + metric_name(cfg.metric));
    ModelSpec spec{cfg.hidden_dim, cfg.metric, cfg.scheme, cfg.featurization, seed};
    auto model = ModelCheckpoint::initialise(spec, fit_stats(graphs));
    return run(cfg, std::move(model), train, validation, seed, cfg.learning_rate);
}

std::vector<TrainResult> train_ensemble(const TrainConfig& cfg, const std::vector<Example>& train,
                                        const std::vector<Example>& validation) {
    cfg.validate();
    std::vector<TrainResult> out;
    for (auto seed : cfg.seeds) out.push_back(train_model(cfg, train, validation, seed));
    return out;
}

TrainResult fine_tune(const ModelCheckpoint& base, const std::vector<Example>& extra,
                      const std::vector<Example>& validation, const TrainConfig& cfg) {
    cfg.validate();
    if (base.format_version != kCheckpointVersion || base.metric != cfg.metric)
        throw Error(ErrorCode::SchemaMismatch, "base model does not match the fine-tuning configuration");
    if (cfg.epochs == 0) {
        TrainResult res;
        res.model = base;
        return res;
    }
    return run(cfg, base, extra, validation, base.seed, cfg.learning_rate * cfg.fine_tune_lr_factor);
}

}  // namespace streamcost
