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

#include <fstream>
#include <sstream>

namespace streamcost {

NLOHMANN_JSON_SERIALIZE_ENUM(OperatorKind, {{OperatorKind::Source, "source"},
                                            {OperatorKind::Filter, "filter"},
                                            {OperatorKind::WindowedAggregation, "aggregation"},
                                            {OperatorKind::WindowedJoin, "join"},
                                            {OperatorKind::Sink, "sink"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DataType,
                             {{DataType::Int, "int"}, {DataType::String, "string"}, {DataType::Double, "double"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FilterFunction, {{FilterFunction::Less, "<"},
                                              {FilterFunction::Greater, ">"},
                                              {FilterFunction::LessEqual, "<="},
                                              {FilterFunction::GreaterEqual, ">="},
                                              {FilterFunction::NotEqual, "!="},
                                              {FilterFunction::StartsWith, "startswith"},
                                              {FilterFunction::EndsWith, "endswith"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AggFunction, {{AggFunction::Min, "min"},
                                           {AggFunction::Max, "max"},
                                           {AggFunction::Mean, "mean"},
                                           {AggFunction::Sum, "sum"}})
NLOHMANN_JSON_SERIALIZE_ENUM(GroupByType, {{GroupByType::Int, "int"},
                                           {GroupByType::String, "string"},
                                           {GroupByType::Double, "double"},
                                           {GroupByType::None, "none"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WindowType, {{WindowType::Sliding, "sliding"}, {WindowType::Tumbling, "tumbling"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WindowPolicy, {{WindowPolicy::Count, "count"}, {WindowPolicy::Time, "time"}})

namespace {

// nlohmann's enum macro silently maps unknown strings to the first entry;
// closed vocabularies must reject them instead.
template <typename E>
E strict_enum(const json& j, const char* what) {
    E value = j.get<E>();
    if (json(value) != j) throw Error(ErrorCode::UnknownCategory, std::string(what) + " '" + j.dump() + "'");
    return value;
}

}  // namespace

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
        case Split::Extra: return "extra";
    }
    return "?";
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "validation" || s == "val") return Split::Validation;
    if (s == "test") return Split::Test;
    if (s == "extra") return Split::Extra;
    throw Error(ErrorCode::Format, "unknown split '" + s + "'");
}

void to_json(json& j, const WindowSpec& w) {
    j = json{{"type", w.type}, {"policy", w.policy}, {"size", w.size}};
    if (w.slide) j["slide"] = *w.slide;
}

void from_json(const json& j, WindowSpec& w) {
    w.type = strict_enum<WindowType>(j.at("type"), "window type");
    w.policy = strict_enum<WindowPolicy>(j.at("policy"), "window policy");
    w.size = j.at("size").get<double>();
    w.slide = j.contains("slide") ? std::optional<double>(j.at("slide").get<double>()) : std::nullopt;
}

void to_json(json& j, const OperatorNode& op) {
    const auto& f = op.features;
    j = json{{"id", op.id},
             {"kind", op.kind},
             {"tuple_width_in", f.tuple_width_in},
             {"tuple_width_out", f.tuple_width_out}};
    switch (op.kind) {
        case OperatorKind::Source:
            j["input_event_rate"] = f.input_event_rate;
            j["tuple_data_types"] = {{"int", f.tuple_data_types[0]},
                                     {"string", f.tuple_data_types[1]},
                                     {"double", f.tuple_data_types[2]}};
            break;
        case OperatorKind::Filter:
            j["filter_function"] = f.filter_function;
            j["literal_data_type"] = f.literal_data_type;
            j["selectivity"] = f.selectivity;
            break;
        case OperatorKind::WindowedJoin:
            j["join_key_data_type"] = f.join_key_data_type;
            j["selectivity"] = f.selectivity;
            break;
        case OperatorKind::WindowedAggregation:
            j["agg_function"] = f.agg_function;
            j["group_by_data_type"] = f.group_by_data_type;
            j["agg_data_type"] = f.agg_data_type;
            j["selectivity"] = f.selectivity;
            break;
        case OperatorKind::Sink: break;
    }
    if (f.window) j["window"] = *f.window;
}

void from_json(const json& j, OperatorNode& op) {
    op = OperatorNode{};
    op.id = j.at("id").get<std::string>();
    op.kind = strict_enum<OperatorKind>(j.at("kind"), "operator kind");
    auto& f = op.features;
    f.tuple_width_in = j.at("tuple_width_in").get<double>();
    f.tuple_width_out = j.at("tuple_width_out").get<double>();
    switch (op.kind) {
        case OperatorKind::Source: {
            f.input_event_rate = j.at("input_event_rate").get<double>();
            const auto& t = j.at("tuple_data_types");
            f.tuple_data_types = {t.at("int").get<int>(), t.at("string").get<int>(), t.at("double").get<int>()};
            break;
        }
        case OperatorKind::Filter:
            f.filter_function = strict_enum<FilterFunction>(j.at("filter_function"), "filter function");
            f.literal_data_type = strict_enum<DataType>(j.at("literal_data_type"), "data type");
            f.selectivity = j.at("selectivity").get<double>();
            break;
        case OperatorKind::WindowedJoin:
            f.join_key_data_type = strict_enum<DataType>(j.at("join_key_data_type"), "data type");
            f.selectivity = j.at("selectivity").get<double>();
            break;
        case OperatorKind::WindowedAggregation:
            f.agg_function = strict_enum<AggFunction>(j.at("agg_function"), "aggregation function");
            f.group_by_data_type = strict_enum<GroupByType>(j.at("group_by_data_type"), "group-by type");
            f.agg_data_type = strict_enum<DataType>(j.at("agg_data_type"), "data type");
            f.selectivity = j.at("selectivity").get<double>();
            break;
        case OperatorKind::Sink: break;
    }
    if (j.contains("window")) f.window = j.at("window").get<WindowSpec>();
}

void to_json(json& j, const QueryGraph& q) {
    j = json{{"operators", q.operators}, {"edges", json::array()}};
    for (const auto& e : q.edges) j["edges"].push_back(json::array({e.from, e.to}));
}

void from_json(const json& j, QueryGraph& q) {
    q.operators = j.at("operators").get<std::vector<OperatorNode>>();
    q.edges.clear();
    for (const auto& e : j.at("edges")) q.edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
}

void to_json(json& j, const HardwareNode& h) {
    j = json{{"id", h.id},
             {"cpu", h.cpu},
             {"ram", h.ram},
             {"net_bandwidth", h.net_bandwidth},
             {"net_latency", h.net_latency}};
}

void from_json(const json& j, HardwareNode& h) {
    h.id = j.at("id").get<std::string>();
    h.cpu = j.at("cpu").get<double>();
    h.ram = j.at("ram").get<double>();
    h.net_bandwidth = j.at("net_bandwidth").get<double>();
    h.net_latency = j.at("net_latency").get<double>();
}

void to_json(json& j, const Placement& p) { j = p.assignment; }
void from_json(const json& j, Placement& p) { p.assignment = j.get<std::map<std::string, std::string>>(); }

void to_json(json& j, const CostVector& c) {
    j = json{{"throughput", c.throughput}, {"backpressure", c.backpressure}, {"success", c.success}};
    j["proc_latency"] = c.proc_latency ? json(*c.proc_latency) : json(nullptr);
    j["e2e_latency"] = c.e2e_latency ? json(*c.e2e_latency) : json(nullptr);
}

void from_json(const json& j, CostVector& c) {
    c.throughput = j.at("throughput").get<double>();
    c.backpressure = j.at("backpressure").get<bool>();
    c.success = j.at("success").get<bool>();
    const auto& lp = j.at("proc_latency");
    const auto& le = j.at("e2e_latency");
    c.proc_latency = lp.is_null() ? std::nullopt : std::optional<double>(lp.get<double>());
    c.e2e_latency = le.is_null() ? std::nullopt : std::optional<double>(le.get<double>());
}

void to_json(json& j, const JointGraph& g) {
    j = json{{"query", g.query}, {"hardware", g.hardware}, {"placement", g.placement}};
}

void from_json(const json& j, JointGraph& g) {
    g = build_joint_graph(j.at("query").get<QueryGraph>(), j.at("hardware").get<std::vector<HardwareNode>>(),
                          j.at("placement").get<Placement>());
}

void to_json(json& j, const Example& e) {
    j = json{{"v", kJsonlVersion}, {"id", e.id},   {"query_id", e.query_id},
             {"family", e.family}, {"split", to_string(e.split)}};
    json g = e.graph;
    j.update(g);
    if (e.label) j["label"] = *e.label;
}

void from_json(const json& j, Example& e) {
    if (!j.contains("v") || j.at("v").get<int>() != kJsonlVersion)
        throw Error(ErrorCode::Format, "unsupported JSONL schema version");
    e.id = j.value("id", std::string{});
    e.query_id = j.value("query_id", e.id);
    e.family = j.value("family", std::string{});
    e.split = parse_split(j.value("split", std::string("train")));
    e.graph = j.get<JointGraph>();
    e.label = j.contains("label") && !j.at("label").is_null() ? std::optional<CostVector>(j.at("label").get<CostVector>())
                                                              : std::nullopt;
}

std::string to_jsonl_line(const Example& e) { return json(e).dump(); }

Example parse_jsonl_line(const std::string& line) {
    try {
        return json::parse(line).get<Example>();
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::Format, ex.what());
    }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& e : examples) out << to_jsonl_line(e) << '\n';
}

std::vector<Example> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::vector<Example> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(parse_jsonl_line(line));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::Format, path.string() + ": " + ex.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

std::string hash_json(const json& j) { return hex64(fnv1a(j.dump())); }

std::vector<Example> filter_split(const std::vector<Example>& all, Split s) {
    std::vector<Example> out;
    for (const auto& e : all)
        if (e.split == s) out.push_back(e);
    return out;
}

}  // namespace streamcost
