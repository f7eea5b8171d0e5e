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
#include <streamcost/featurize.hpp>

#include <algorithm>
#include <cmath>

namespace streamcost {

double filter_selectivity(std::uint64_t out_count, std::uint64_t in_count) {
    if (in_count == 0) throw Error(ErrorCode::EmptyStream, "filter saw no input tuples");
    return std::clamp(static_cast<double>(out_count) / static_cast<double>(in_count), 0.0, 1.0);
}

double join_selectivity(std::uint64_t matches, std::uint64_t w1, std::uint64_t w2) {
    if (w1 == 0 || w2 == 0) throw Error(ErrorCode::EmptyWindow, "join window is empty");
    const double cross = static_cast<double>(w1) * static_cast<double>(w2);
    return std::clamp(static_cast<double>(matches) / cross, 0.0, 1.0);
}

double agg_selectivity(std::uint64_t distinct_groups, std::uint64_t window_len) {
    if (window_len == 0) throw Error(ErrorCode::EmptyWindow, "aggregation window is empty");
    return std::clamp(static_cast<double>(distinct_groups) / static_cast<double>(window_len), 0.0, 1.0);
}

NodeType node_type(OperatorKind k) {
    switch (k) {
        case OperatorKind::Source: return NodeType::Source;
        case OperatorKind::Filter: return NodeType::Filter;
        case OperatorKind::WindowedAggregation: return NodeType::Aggregation;
        case OperatorKind::WindowedJoin: return NodeType::Join;
        case OperatorKind::Sink: return NodeType::Sink;
    }
    return NodeType::Sink;
}

std::string to_string(NodeType t) {
    static const char* names[] = {"source", "filter", "aggregation", "join", "sink", "hardware"};
    return names[static_cast<std::size_t>(t)];
}

std::string to_string(Featurization f) {
    switch (f) {
        case Featurization::Full: return "full";
        case Featurization::NoHardware: return "no-hardware";
        case Featurization::OpsOnly: return "ops-only";
    }
    return "?";
}

Featurization parse_featurization(const std::string& s) {
    if (s == "full") return Featurization::Full;
    if (s == "no-hardware") return Featurization::NoHardware;
    if (s == "ops-only") return Featurization::OpsOnly;
    throw Error(ErrorCode::InvalidArgument, "unknown featurization '" + s + "'");
}

namespace {

const std::vector<std::string> kDataTypeVocab = {"int", "string", "double"};
const std::vector<std::string> kFilterVocab = {"<", ">", "<=", ">=", "!=", "startswith", "endswith"};
const std::vector<std::string> kAggVocab = {"min", "max", "mean", "sum"};
const std::vector<std::string> kGroupByVocab = {"int", "string", "double", "none"};
const std::vector<std::string> kWindowTypeVocab = {"sliding", "tumbling"};
const std::vector<std::string> kWindowPolicyVocab = {"count", "time"};

FeatureSlot numeric(std::string name, Transform t) { return FeatureSlot{std::move(name), t, {}}; }
FeatureSlot categorical(std::string name, const std::vector<std::string>& vocab) {
    return FeatureSlot{std::move(name), Transform::Linear, vocab};
}

FeatureSchema make_standard_schema() {
    FeatureSchema s;
    auto widths = [] {
        return std::vector<FeatureSlot>{numeric("tuple_width_in", Transform::Log1p),
                                        numeric("tuple_width_out", Transform::Log1p)};
    };
    auto window = [](std::vector<FeatureSlot>& v) {
        v.push_back(categorical("window_type", kWindowTypeVocab));
        v.push_back(categorical("window_policy", kWindowPolicyVocab));
        v.push_back(numeric("window_size", Transform::Log1p));
        v.push_back(numeric("slide_fraction", Transform::Linear));
    };

    auto& src = s.slots[static_cast<std::size_t>(NodeType::Source)];
    src = widths();
    src.push_back(numeric("input_event_rate", Transform::Log1p));
    src.push_back(numeric("fields_int", Transform::Linear));
    src.push_back(numeric("fields_string", Transform::Linear));
    src.push_back(numeric("fields_double", Transform::Linear));

    auto& flt = s.slots[static_cast<std::size_t>(NodeType::Filter)];
    flt = widths();
    flt.push_back(numeric("selectivity", Transform::Linear));
    flt.push_back(categorical("filter_function", kFilterVocab));
    flt.push_back(categorical("literal_data_type", kDataTypeVocab));

    auto& agg = s.slots[static_cast<std::size_t>(NodeType::Aggregation)];
    agg = widths();
    agg.push_back(numeric("selectivity", Transform::Linear));
    agg.push_back(categorical("agg_function", kAggVocab));
    agg.push_back(categorical("group_by_data_type", kGroupByVocab));
    agg.push_back(categorical("agg_data_type", kDataTypeVocab));
    window(agg);

    auto& join = s.slots[static_cast<std::size_t>(NodeType::Join)];
    join = widths();
    join.push_back(numeric("selectivity", Transform::Log));
    join.push_back(categorical("join_key_data_type", kDataTypeVocab));
    window(join);

    s.slots[static_cast<std::size_t>(NodeType::Sink)] = widths();

    s.slots[static_cast<std::size_t>(NodeType::Hardware)] = {
        numeric("cpu", Transform::Linear), numeric("ram", Transform::Log1p),
        numeric("net_bandwidth", Transform::Log1p), numeric("net_latency", Transform::Log1p)};
    return s;
}

double apply(Transform t, double x) {
    switch (t) {
        case Transform::Linear: return x;
        case Transform::Log1p: return std::log1p(x);
        case Transform::Log: return std::log(std::max(x, 1e-12));
    }
    return x;
}

std::string transform_name(Transform t) {
    switch (t) {
        case Transform::Linear: return "linear";
        case Transform::Log1p: return "log1p";
        case Transform::Log: return "log";
    }
    return "?";
}

// Index of the active category for every categorical slot of an operator, in
// schema order.
std::vector<std::size_t> categories(const OperatorNode& node) {
    const auto& f = node.features;
    auto idx = [](auto e) { return static_cast<std::size_t>(e); };
    std::vector<std::size_t> out;
    auto window = [&] {
        if (!f.window) throw Error(ErrorCode::InvalidQuery, "windowed operator " + node.id + " has no window");
        out.push_back(idx(f.window->type));
        out.push_back(idx(f.window->policy));
    };
    switch (node.kind) {
        case OperatorKind::Filter:
            out = {idx(f.filter_function), idx(f.literal_data_type)};
            break;
        case OperatorKind::WindowedAggregation:
            out = {idx(f.agg_function), idx(f.group_by_data_type), idx(f.agg_data_type)};
            window();
            break;
        case OperatorKind::WindowedJoin:
            out = {idx(f.join_key_data_type)};
            window();
            break;
        default: break;
    }
    return out;
}

Eigen::VectorXd assemble(NodeType type, const std::vector<double>& numeric_raw, const std::vector<std::size_t>& cats,
                         const NormalizationStats& stats) {
    const auto& schema = FeatureSchema::standard();
    const auto& slots = schema.slots[static_cast<std::size_t>(type)];
    const auto& st = stats.per_type[static_cast<std::size_t>(type)];
    if (!st) throw Error(ErrorCode::MissingStats, "no normalization statistics for " + to_string(type) + " nodes");
    if (st->size() != numeric_raw.size())
        throw Error(ErrorCode::DimensionMismatch, "statistics for " + to_string(type) + " have " +
                                                      std::to_string(st->size()) + " entries, expected " +
                                                      std::to_string(numeric_raw.size()));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schema.width(type)));
    Eigen::Index pos = 0;
    std::size_t ni = 0, ci = 0;
    for (const auto& slot : slots) {
        if (slot.categorical()) {
            const std::size_t c = cats.at(ci++);
            if (c >= slot.vocabulary.size())
                throw Error(ErrorCode::UnknownCategory, slot.name + " index " + std::to_string(c));
            v[pos + static_cast<Eigen::Index>(c)] = 1.0;
        } else {
            const auto& rs = (*st)[ni];
            v[pos] = (numeric_raw[ni] - rs.median) / rs.iqr;
            ++ni;
        }
        pos += static_cast<Eigen::Index>(slot.width());
    }
    return v;
}

}  // namespace

const FeatureSchema& FeatureSchema::standard() {
    static const FeatureSchema schema = make_standard_schema();
    return schema;
}

std::size_t FeatureSchema::width(NodeType t) const {
    std::size_t w = 0;
    for (const auto& s : slots[static_cast<std::size_t>(t)]) w += s.width();
    return w;
}

std::size_t FeatureSchema::numeric_count(NodeType t) const {
    std::size_t n = 0;
    for (const auto& s : slots[static_cast<std::size_t>(t)]) n += s.categorical() ? 0 : 1;
    return n;
}

json FeatureSchema::describe() const {
    json j{{"version", kFeatureSchemaVersion}, {"node_types", json::object()}};
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        json slots_j = json::array();
        for (const auto& s : slots[t]) {
            json sj{{"name", s.name}, {"width", s.width()}};
            if (s.categorical())
                sj["vocabulary"] = s.vocabulary;
            else
                sj["transform"] = transform_name(s.transform);
            slots_j.push_back(sj);
        }
        j["node_types"][to_string(static_cast<NodeType>(t))] = {{"width", width(static_cast<NodeType>(t))},
                                                                {"slots", slots_j}};
    }
    return j;
}

void to_json(json& j, const NormalizationStats& s) {
    j = json::object();
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        const auto name = to_string(static_cast<NodeType>(t));
        if (!s.per_type[t]) {
            j[name] = nullptr;
            continue;
        }
        json arr = json::array();
        for (const auto& rs : *s.per_type[t]) arr.push_back({rs.median, rs.iqr});
        j[name] = arr;
    }
}

void from_json(const json& j, NormalizationStats& s) {
    const auto& schema = FeatureSchema::standard();
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        const auto name = to_string(static_cast<NodeType>(t));
        if (!j.contains(name) || j.at(name).is_null()) {
            s.per_type[t].reset();
            continue;
        }
        std::vector<RobustStat> v;
        for (const auto& e : j.at(name)) v.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        if (v.size() != schema.numeric_count(static_cast<NodeType>(t)))
            throw Error(ErrorCode::DimensionMismatch, "statistics for " + name + " do not match the feature schema");
        s.per_type[t] = std::move(v);
    }
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::EmptyDataset, "percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

std::vector<double> numeric_values(const OperatorNode& node) {
    const auto& f = node.features;
    const auto& slots = FeatureSchema::standard().slots[static_cast<std::size_t>(node_type(node.kind))];
    std::vector<double> raw;
    for (const auto& slot : slots) {
        if (slot.categorical()) continue;
        double x = 0.0;
        if (slot.name == "tuple_width_in") x = f.tuple_width_in;
        else if (slot.name == "tuple_width_out") x = f.tuple_width_out;
        else if (slot.name == "input_event_rate") x = f.input_event_rate;
        else if (slot.name == "fields_int") x = f.tuple_data_types[0];
        else if (slot.name == "fields_string") x = f.tuple_data_types[1];
        else if (slot.name == "fields_double") x = f.tuple_data_types[2];
        else if (slot.name == "selectivity") x = f.selectivity;
        else if (slot.name == "window_size") x = f.window ? f.window->size : 0.0;
        else if (slot.name == "slide_fraction")
            x = (f.window && f.window->slide) ? *f.window->slide / f.window->size : 1.0;
        raw.push_back(apply(slot.transform, x));
    }
    return raw;
}

std::vector<double> numeric_values(const HardwareNode& node) {
    const auto& slots = FeatureSchema::standard().slots[static_cast<std::size_t>(NodeType::Hardware)];
    const double x[] = {node.cpu, node.ram, node.net_bandwidth, node.net_latency};
    std::vector<double> raw;
    for (std::size_t i = 0; i < slots.size(); ++i) raw.push_back(apply(slots[i].transform, x[i]));
    return raw;
}

NormalizationStats fit_stats(const std::vector<JointGraph>& dataset) {
    if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit statistics on an empty dataset");
    const auto& schema = FeatureSchema::standard();
    // samples[type][slot] -> values
    std::array<std::vector<std::vector<double>>, kNodeTypeCount> samples;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t)
        samples[t].resize(schema.numeric_count(static_cast<NodeType>(t)));
    auto add = [&](NodeType t, const std::vector<double>& raw) {
        auto& s = samples[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < raw.size(); ++i) s[i].push_back(raw[i]);
    };
    for (const auto& g : dataset) {
        for (const auto& op : g.query.operators) add(node_type(op.kind), numeric_values(op));
        for (const auto& h : g.hardware) add(NodeType::Hardware, numeric_values(h));
    }
    NormalizationStats stats;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
        if (samples[t].empty() || samples[t][0].empty()) continue;
        std::vector<RobustStat> v;
        for (const auto& values : samples[t]) {
            const double med = percentile(values, 0.5);
            double spread = percentile(values, 0.75) - percentile(values, 0.25);
            if (spread < kIqrFloor) {
                // Collapsed quartiles on a non-constant feature: mean absolute deviation instead.
                double mad = 0.0;
                for (double x : values) mad += std::abs(x - med);
                spread = mad / static_cast<double>(values.size());
            }
            v.push_back({med, std::max(spread, kIqrFloor)});
        }
        stats.per_type[t] = std::move(v);
    }
    return stats;
}

Eigen::VectorXd encode_node(const OperatorNode& node, const NormalizationStats& stats) {
    return assemble(node_type(node.kind), numeric_values(node), categories(node), stats);
}

Eigen::VectorXd encode_node(const HardwareNode& node, const NormalizationStats& stats) {
    return assemble(NodeType::Hardware, numeric_values(node), {}, stats);
}

}  // namespace streamcost
