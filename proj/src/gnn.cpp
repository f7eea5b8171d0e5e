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

#include <streamcost/dataset.hpp>
#include <streamcost/error.hpp>
#include <streamcost/gnn.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace streamcost {

std::string to_string(Scheme s) { return s == Scheme::Novel ? "novel" : "traditional"; }

Scheme parse_scheme(const std::string& s) {
    if (s == "novel") return Scheme::Novel;
    if (s == "traditional") return Scheme::Traditional;
    throw Error(ErrorCode::InvalidArgument, "unknown message-passing scheme '" + s + "'");
}

TaskKind task_for(Metric m) { return is_binary(m) ? TaskKind::Binary : TaskKind::Regression; }

ModelParams ModelParams::zeros_like() const {
    ModelParams z;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        z.encoders[t] = encoders[t].zeros_like();
        z.updates[t] = updates[t].zeros_like();
    }
    z.readout = readout.zeros_like();
    return z;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = readout.parameter_count();
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) n += encoders[t].parameter_count() + updates[t].parameter_count();
    return n;
}

std::vector<double> ModelParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    auto take = [&](const double* p, std::size_t n) { flat.insert(flat.end(), p, p + n); };
    for (const auto& m : encoders) for_each_block(m, take);
    for (const auto& m : updates) for_each_block(m, take);
    for_each_block(readout, take);
    return flat;
}

void ModelParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "parameter vector size mismatch");
    std::size_t pos = 0;
    auto put = [&](double* p, std::size_t n) {
        std::memcpy(p, flat.data() + pos, n * sizeof(double));
        pos += n;
    };
    for (auto& m : encoders) for_each_block(m, put);
    for (auto& m : updates) for_each_block(m, put);
    for_each_block(readout, put);
}

bool ModelParams::all_finite() const {
    for (std::size_t t = 0; t < kNodeTypeCount; ++t)
        if (!encoders[t].all_finite() || !updates[t].all_finite()) return false;
    return readout.all_finite();
}

ModelCheckpoint ModelCheckpoint::initialise(const ModelSpec& spec, NormalizationStats stats) {
    if (spec.hidden_dim == 0) throw Error(ErrorCode::InvalidArgument, "hidden_dim must be positive");
    ModelCheckpoint c;
    c.hidden_dim = spec.hidden_dim;
    c.metric = spec.metric;
    c.task = task_for(spec.metric);
    c.scheme = spec.scheme;
    c.featurization = spec.featurization;
    c.seed = spec.seed;
    c.stats = std::move(stats);
    std::mt19937_64 rng(spec.seed);
    const auto& schema = FeatureSchema::standard();
    const std::size_t h = spec.hidden_dim;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        c.params.encoders[t] = Mlp::make({schema.width(static_cast<NodeType>(t)), h, h}, rng);
        c.params.updates[t] = Mlp::make({2 * h, h, h}, rng);
    }
    c.params.readout = Mlp::make({h, h, 1}, rng);
    return c;
}

std::string ModelCheckpoint::parameter_hash() const {
    const auto flat = params.flatten();
    return hex64(fnv1a(std::string_view(reinterpret_cast<const char*>(flat.data()), flat.size() * sizeof(double))));
}

Vector HiddenStateMap::at(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return states.col(static_cast<Eigen::Index>(i));
    throw Error(ErrorCode::InvalidArgument, "no hidden state for node " + id);
}

GraphInput compile(const JointGraph& g, const ModelCheckpoint& ckpt) {
    GraphInput in;
    const std::size_t n_ops = g.operator_count();
    in.op_count = n_ops;
    for (std::size_t i = 0; i < n_ops; ++i) {
        const auto& op = g.query.operators[i];
        in.types.push_back(node_type(op.kind));
        in.features.push_back(encode_node(op, ckpt.stats));
        in.ids.push_back("op:" + op.id);
        in.preds.push_back(g.predecessors[i]);
        std::size_t lvl = 0;
        for (auto p : g.predecessors[i]) lvl = std::max(lvl, in.level[p] + 1);
        in.level.push_back(lvl);
    }
    if (ckpt.featurization == Featurization::OpsOnly) return in;

    const auto hw_width = static_cast<Eigen::Index>(FeatureSchema::standard().width(NodeType::Hardware));
    for (std::size_t h = 0; h < g.hardware_count(); ++h) {
        in.types.push_back(NodeType::Hardware);
        in.features.push_back(ckpt.featurization == Featurization::Full ? encode_node(g.hardware[h], ckpt.stats)
                                                                        : Vector(Vector::Zero(hw_width)));
        in.ids.push_back("hw:" + g.hardware[h].id);
    }
    in.host.resize(n_ops);
    for (std::size_t i = 0; i < n_ops; ++i) in.host[i] = n_ops + g.host_of[i];
    in.hosted.resize(in.types.size());
    for (std::size_t h = 0; h < g.hardware_count(); ++h) in.hosted[n_ops + h] = g.operators_on[h];
    return in;
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr int kTraditionalRounds = 3;

// Several graphs laid out in one node index space.
struct BatchGraph {
    std::vector<NodeType> type;
    std::vector<std::size_t> graph;
    std::vector<char> is_op;
    std::vector<std::vector<std::size_t>> preds;
    std::vector<std::size_t> level;
    std::vector<std::size_t> host;
    std::vector<std::vector<std::size_t>> hosted;
    std::vector<const Vector*> features;
    std::size_t graphs = 0;

    [[nodiscard]] std::size_t size() const { return type.size(); }
};

BatchGraph make_batch(std::span<const GraphInput* const> inputs) {
    BatchGraph b;
    b.graphs = inputs.size();
    for (std::size_t gi = 0; gi < inputs.size(); ++gi) {
        const auto& in = *inputs[gi];
        const std::size_t off = b.size();
        for (std::size_t v = 0; v < in.types.size(); ++v) {
            const bool op = v < in.op_count;
            b.type.push_back(in.types[v]);
            b.graph.push_back(gi);
            b.is_op.push_back(op);
            b.features.push_back(&in.features[v]);
            std::vector<std::size_t> pr, ho;
            if (op)
                for (auto p : in.preds[v]) pr.push_back(off + p);
            if (!op)
                for (auto o : in.hosted[v]) ho.push_back(off + o);
            b.preds.push_back(std::move(pr));
            b.hosted.push_back(std::move(ho));
            b.level.push_back(op ? in.level[v] : 0);
            b.host.push_back(op && !in.host.empty() ? off + in.host[v] : kNone);
        }
    }
    return b;
}

struct Group {
    NodeType type = NodeType::Source;
    std::vector<std::size_t> receivers;
    std::vector<std::vector<std::size_t>> senders;
};
using Step = std::vector<Group>;

// Groups receivers by node type; `senders_of` returns an empty list for nodes
// that should not be updated.
template <typename Senders>
Step make_step(const BatchGraph& b, const std::vector<std::size_t>& candidates, Senders senders_of,
               bool update_without_senders) {
    std::array<Group, kNodeTypeCount> by_type;
    for (auto v : candidates) {
        auto s = senders_of(v);
        if (s.empty() && !update_without_senders) continue;
        auto& grp = by_type[static_cast<std::size_t>(b.type[v])];
        grp.receivers.push_back(v);
        grp.senders.push_back(std::move(s));
    }
    Step step;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        if (by_type[t].receivers.empty()) continue;
        by_type[t].type = static_cast<NodeType>(t);
        step.push_back(std::move(by_type[t]));
    }
    return step;
}

std::vector<Step> novel_schedule(const BatchGraph& b) {
    std::vector<Step> steps;
    std::vector<std::size_t> ops, hws;
    std::size_t max_level = 0;
    for (std::size_t v = 0; v < b.size(); ++v) {
        (b.is_op[v] ? ops : hws).push_back(v);
        if (b.is_op[v]) max_level = std::max(max_level, b.level[v]);
    }
    if (!hws.empty()) {
        steps.push_back(make_step(b, hws, [&](std::size_t v) { return b.hosted[v]; }, false));
        steps.push_back(make_step(
            b, ops,
            [&](std::size_t v) { return b.host[v] == kNone ? std::vector<std::size_t>{} : std::vector{b.host[v]}; },
            false));
    }
    for (std::size_t lvl = 1; lvl <= max_level; ++lvl) {
        std::vector<std::size_t> at;
        for (auto v : ops)
            if (b.level[v] == lvl) at.push_back(v);
        steps.push_back(make_step(b, at, [&](std::size_t v) { return b.preds[v]; }, false));
    }
    std::erase_if(steps, [](const Step& s) { return s.empty(); });
    return steps;
}

std::vector<Step> traditional_schedule(const BatchGraph& b) {
    std::vector<std::size_t> all(b.size());
    for (std::size_t v = 0; v < b.size(); ++v) all[v] = v;
    auto neighbours = [&](std::size_t v) {
        if (!b.is_op[v]) return b.hosted[v];
        auto s = b.preds[v];
        if (b.host[v] != kNone) s.push_back(b.host[v]);
        std::sort(s.begin(), s.end());
        return s;
    };
    std::vector<Step> steps;
    for (int r = 0; r < kTraditionalRounds; ++r) steps.push_back(make_step(b, all, neighbours, true));
    return steps;
}

struct Tape {
    std::array<std::vector<std::size_t>, kNodeTypeCount> enc_nodes;
    std::array<MlpTape, kNodeTypeCount> enc;
    std::vector<std::vector<MlpTape>> steps;
    MlpTape readout;
};

void check_dim(const Mlp& mlp, Eigen::Index rows, const char* what) {
    if (static_cast<Eigen::Index>(mlp.input_dim()) != rows)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " input has " + std::to_string(rows) +
                                                      " rows, network expects " + std::to_string(mlp.input_dim()));
}

Matrix encode(const ModelParams& p, std::size_t hidden, const BatchGraph& b, Tape* tape) {
    Matrix states(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(b.size()));
    std::array<std::vector<std::size_t>, kNodeTypeCount> nodes;
    for (std::size_t v = 0; v < b.size(); ++v) nodes[static_cast<std::size_t>(b.type[v])].push_back(v);
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        if (nodes[t].empty()) continue;
        const auto width = b.features[nodes[t][0]]->size();
        Matrix x(width, static_cast<Eigen::Index>(nodes[t].size()));
        for (std::size_t k = 0; k < nodes[t].size(); ++k) {
            const auto& f = *b.features[nodes[t][k]];
            if (f.size() != width) throw Error(ErrorCode::DimensionMismatch, "inconsistent feature widths");
            x.col(static_cast<Eigen::Index>(k)) = f;
        }
        check_dim(p.encoders[t], width, "encoder");
        Matrix y = tape ? forward(p.encoders[t], x, tape->enc[t]) : p.encoders[t].forward(x);
        for (std::size_t k = 0; k < nodes[t].size(); ++k)
            states.col(static_cast<Eigen::Index>(nodes[t][k])) = y.col(static_cast<Eigen::Index>(k));
        if (tape) tape->enc_nodes[t] = std::move(nodes[t]);
    }
    return states;
}

void run_steps(const ModelParams& p, const std::vector<Step>& steps, Matrix& states, Tape* tape) {
    const Eigen::Index h = states.rows();
    if (tape) tape->steps.assign(steps.size(), std::vector<MlpTape>{});
    for (std::size_t si = 0; si < steps.size(); ++si) {
        const auto& step = steps[si];
        // All groups of a step read the states as they were before the step.
        std::vector<Matrix> outputs;
        if (tape) tape->steps[si].resize(step.size());
        for (std::size_t gi = 0; gi < step.size(); ++gi) {
            const auto& grp = step[gi];
            Matrix x = Matrix::Zero(2 * h, static_cast<Eigen::Index>(grp.receivers.size()));
            for (std::size_t k = 0; k < grp.receivers.size(); ++k) {
                const auto col = static_cast<Eigen::Index>(k);
                for (auto s : grp.senders[k]) x.col(col).head(h) += states.col(static_cast<Eigen::Index>(s));
                x.col(col).tail(h) = states.col(static_cast<Eigen::Index>(grp.receivers[k]));
            }
            const auto& mlp = p.updates[static_cast<std::size_t>(grp.type)];
            check_dim(mlp, 2 * h, "update");
            outputs.push_back(tape ? forward(mlp, x, tape->steps[si][gi]) : mlp.forward(x));
        }
        for (std::size_t gi = 0; gi < step.size(); ++gi)
            for (std::size_t k = 0; k < step[gi].receivers.size(); ++k)
                states.col(static_cast<Eigen::Index>(step[gi].receivers[k])) =
                    outputs[gi].col(static_cast<Eigen::Index>(k));
    }
}

Matrix pool(const BatchGraph& b, const Matrix& states) {
    Matrix pooled = Matrix::Zero(states.rows(), static_cast<Eigen::Index>(b.graphs));
    for (std::size_t v = 0; v < b.size(); ++v)
        pooled.col(static_cast<Eigen::Index>(b.graph[v])) += states.col(static_cast<Eigen::Index>(v));
    return pooled;
}

std::vector<Step> schedule_for(const ModelCheckpoint& ckpt, const BatchGraph& b) {
    return ckpt.scheme == Scheme::Novel ? novel_schedule(b) : traditional_schedule(b);
}

void backward_pass(const ModelParams& p, const BatchGraph& b, const std::vector<Step>& steps, const Tape& tape,
                   const Matrix& grad_out, std::size_t hidden, ModelParams& grads) {
    const auto h = static_cast<Eigen::Index>(hidden);
    Matrix g_pooled = backward(p.readout, tape.readout, grad_out, grads.readout);
    Matrix g(h, static_cast<Eigen::Index>(b.size()));
    for (std::size_t v = 0; v < b.size(); ++v)
        g.col(static_cast<Eigen::Index>(v)) = g_pooled.col(static_cast<Eigen::Index>(b.graph[v]));

    for (std::size_t si = steps.size(); si-- > 0;) {
        const auto& step = steps[si];
        std::vector<Matrix> g_out(step.size());
        for (std::size_t gi = 0; gi < step.size(); ++gi) {
            const auto& grp = step[gi];
            g_out[gi].resize(h, static_cast<Eigen::Index>(grp.receivers.size()));
            for (std::size_t k = 0; k < grp.receivers.size(); ++k)
                g_out[gi].col(static_cast<Eigen::Index>(k)) = g.col(static_cast<Eigen::Index>(grp.receivers[k]));
        }
        // Overwritten states only receive gradient through the step inputs.
        for (const auto& grp : step)
            for (auto r : grp.receivers) g.col(static_cast<Eigen::Index>(r)).setZero();
        for (std::size_t gi = 0; gi < step.size(); ++gi) {
            const auto& grp = step[gi];
            const auto t = static_cast<std::size_t>(grp.type);
            Matrix gx = backward(p.updates[t], tape.steps[si][gi], g_out[gi], grads.updates[t]);
            for (std::size_t k = 0; k < grp.receivers.size(); ++k) {
                const auto col = static_cast<Eigen::Index>(k);
                g.col(static_cast<Eigen::Index>(grp.receivers[k])) += gx.col(col).tail(h);
                for (auto s : grp.senders[k]) g.col(static_cast<Eigen::Index>(s)) += gx.col(col).head(h);
            }
        }
    }

    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        const auto& nodes = tape.enc_nodes[t];
        if (nodes.empty()) continue;
        Matrix gy(h, static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k)
            gy.col(static_cast<Eigen::Index>(k)) = g.col(static_cast<Eigen::Index>(nodes[k]));
        (void)backward(p.encoders[t], tape.enc[t], gy, grads.encoders[t]);
    }
}

HiddenStateMap to_map(const GraphInput& in, Matrix states) { return HiddenStateMap{in.ids, std::move(states)}; }

void check_states(const GraphInput& in, const HiddenStateMap& states, const ModelCheckpoint& ckpt) {
    if (states.states.cols() != static_cast<Eigen::Index>(in.types.size()) ||
        states.states.rows() != static_cast<Eigen::Index>(ckpt.hidden_dim))
        throw Error(ErrorCode::DimensionMismatch, "hidden state map does not match the graph");
}

}  // namespace

HiddenStateMap encode_all(const JointGraph& g, const ModelCheckpoint& ckpt) {
    const auto in = compile(g, ckpt);
    const GraphInput* ptr[] = {&in};
    const auto b = make_batch(ptr);
    return to_map(in, encode(ckpt.params, ckpt.hidden_dim, b, nullptr));
}

HiddenStateMap message_pass(const JointGraph& g, const HiddenStateMap& states, const ModelCheckpoint& ckpt) {
    const auto in = compile(g, ckpt);
    check_states(in, states, ckpt);
    const GraphInput* ptr[] = {&in};
    const auto b = make_batch(ptr);
    Matrix s = states.states;
    run_steps(ckpt.params, novel_schedule(b), s, nullptr);
    return to_map(in, std::move(s));
}

HiddenStateMap forward_traditional(const JointGraph& g, const HiddenStateMap& states, const ModelCheckpoint& ckpt) {
    const auto in = compile(g, ckpt);
    check_states(in, states, ckpt);
    const GraphInput* ptr[] = {&in};
    const auto b = make_batch(ptr);
    Matrix s = states.states;
    run_steps(ckpt.params, traditional_schedule(b), s, nullptr);
    return to_map(in, std::move(s));
}

double readout(const JointGraph& g, const HiddenStateMap& states, const ModelCheckpoint& ckpt) {
    const auto in = compile(g, ckpt);
    check_states(in, states, ckpt);
    const GraphInput* ptr[] = {&in};
    const auto b = make_batch(ptr);
    const Matrix out = ckpt.params.readout.forward(pool(b, states.states));
    return decode(ckpt.task, out(0, 0));
}

double decode(TaskKind task, double raw) { return task == TaskKind::Regression ? std::expm1(raw) : logistic(raw); }

double raw_output(const GraphInput& input, const ModelCheckpoint& ckpt) {
    const GraphInput* ptr[] = {&input};
    return batch_raw_outputs(ckpt, ptr).front();
}

double predict(const JointGraph& g, const ModelCheckpoint& ckpt) {
    return decode(ckpt.task, raw_output(compile(g, ckpt), ckpt));
}

double example_loss(TaskKind task, double target, double raw) {
    if (task == TaskKind::Binary) return bce_loss(target, raw);
    const double d = std::log1p(target) - raw;
    return d * d;
}

double example_loss_gradient(TaskKind task, double target, double raw) {
    if (task == TaskKind::Binary) return bce_gradient(target, raw);
    return -2.0 * (std::log1p(target) - raw);
}

std::vector<double> batch_raw_outputs(const ModelCheckpoint& ckpt, std::span<const GraphInput* const> inputs) {
    if (inputs.empty()) return {};
    const auto b = make_batch(inputs);
    Matrix states = encode(ckpt.params, ckpt.hidden_dim, b, nullptr);
    run_steps(ckpt.params, schedule_for(ckpt, b), states, nullptr);
    const Matrix out = ckpt.params.readout.forward(pool(b, states));
    return std::vector<double>(out.data(), out.data() + out.size());
}

BatchResult batch_loss_and_gradient(const ModelCheckpoint& ckpt, std::span<const GraphInput* const> inputs,
                                    std::span<const double> targets, ModelParams* grads,
                                    std::span<const double> weights) {
    if (inputs.size() != targets.size() || inputs.empty())
        throw Error(ErrorCode::DimensionMismatch, "batch inputs and targets differ in size");
    if (!weights.empty() && weights.size() != targets.size())
        throw Error(ErrorCode::DimensionMismatch, "batch weights and targets differ in size");
    const auto b = make_batch(inputs);
    const auto steps = schedule_for(ckpt, b);
    Tape tape;
    Matrix states = encode(ckpt.params, ckpt.hidden_dim, b, &tape);
    run_steps(ckpt.params, steps, states, &tape);
    const Matrix out = forward(ckpt.params.readout, pool(b, states), tape.readout);

    BatchResult res;
    const double n = static_cast<double>(inputs.size());
    Matrix grad_out(1, out.cols());
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double raw = out(0, i);
        const double w = weights.empty() ? 1.0 : weights[k];
        res.raw.push_back(raw);
        res.loss += w * example_loss(ckpt.task, targets[k], raw) / n;
        grad_out(0, i) = w * example_loss_gradient(ckpt.task, targets[k], raw) / n;
    }
    if (grads) backward_pass(ckpt.params, b, steps, tape, grad_out, ckpt.hidden_dim, *grads);
    return res;
}

}  // namespace streamcost
