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

#include <streamcost/checkpoint.hpp>
#include <streamcost/error.hpp>

namespace streamcost {

namespace {

json matrix_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw Error(ErrorCode::DimensionMismatch, "matrix payload does not match its declared shape");
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

void expect_shape(const Mlp& got, const std::vector<std::size_t>& dims, const std::string& what) {
    bool ok = got.layers.size() + 1 == dims.size();
    for (std::size_t l = 0; ok && l < got.layers.size(); ++l) {
        ok = static_cast<std::size_t>(got.layers[l].weight.cols()) == dims[l] &&
             static_cast<std::size_t>(got.layers[l].weight.rows()) == dims[l + 1] &&
             got.layers[l].bias.size() == got.layers[l].weight.rows();
    }
    if (!ok) throw Error(ErrorCode::DimensionMismatch, what + " has unexpected layer shapes");
}

json mlps_json(const std::array<Mlp, kNodeTypeCount>& mlps) {
    json j = json::object();
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) j[to_string(static_cast<NodeType>(t))] = mlps[t];
    return j;
}

std::array<Mlp, kNodeTypeCount> mlps_from(const json& j) {
    std::array<Mlp, kNodeTypeCount> mlps;
    for (std::size_t t = 0; t < kNodeTypeCount; ++t) mlps[t] = j.at(to_string(static_cast<NodeType>(t))).get<Mlp>();
    return mlps;
}

}  // namespace

void to_json(json& j, const Mlp& m) {
    j = json::array();
    for (const auto& l : m.layers)
        j.push_back(json{{"weight", matrix_json(l.weight)}, {"bias", matrix_json(l.bias)}});
}

void from_json(const json& j, Mlp& m) {
    m.layers.clear();
    for (const auto& l : j) {
        Layer layer{matrix_from(l.at("weight")), Vector(matrix_from(l.at("bias")))};
        m.layers.push_back(std::move(layer));
    }
    if (m.layers.empty()) throw Error(ErrorCode::Format, "network without layers");
}

json checkpoint_to_json(const ModelCheckpoint& c) {
    const auto& schema = FeatureSchema::standard();
    json widths = json::object();
    for (std::size_t t = 0; t < kNodeTypeCount; ++t)
        widths[to_string(static_cast<NodeType>(t))] = schema.width(static_cast<NodeType>(t));
    return json{{"format_version", c.format_version},
                {"feature_schema_version", kFeatureSchemaVersion},
                {"hidden_dim", c.hidden_dim},
                {"metric", metric_name(c.metric)},
                {"task", c.task == TaskKind::Regression ? "regression" : "binary"},
                {"scheme", to_string(c.scheme)},
                {"featurization", to_string(c.featurization)},
                {"seed", c.seed},
                {"feature_widths", widths},
                {"feature_schema", schema.describe()},
                {"stats", c.stats},
                {"parameter_hash", c.parameter_hash()},
                {"encoders", mlps_json(c.params.encoders)},
                {"updates", mlps_json(c.params.updates)},
                {"readout", c.params.readout}};
}

ModelCheckpoint checkpoint_from_json(const json& j) {
    try {
        ModelCheckpoint c;
        c.format_version = j.at("format_version").get<int>();
        if (c.format_version != kCheckpointVersion)
            throw Error(ErrorCode::SchemaMismatch, "checkpoint format version " + std::to_string(c.format_version) +
                                                       ", this build reads version " +
                                                       std::to_string(kCheckpointVersion));
        if (j.at("feature_schema_version").get<int>() != kFeatureSchemaVersion)
            throw Error(ErrorCode::SchemaMismatch, "checkpoint was written for another feature schema version");
        const auto& schema = FeatureSchema::standard();
        for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
            const auto type = static_cast<NodeType>(t);
            if (j.at("feature_widths").at(to_string(type)).get<std::size_t>() != schema.width(type))
                throw Error(ErrorCode::DimensionMismatch, "feature width of " + to_string(type) + " nodes differs");
        }
        c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
        c.metric = parse_metric(j.at("metric").get<std::string>());
        const auto task = j.at("task").get<std::string>();
        if (task != "regression" && task != "binary") throw Error(ErrorCode::Format, "unknown task '" + task + "'");
        c.task = task == "regression" ? TaskKind::Regression : TaskKind::Binary;
        if (c.task != task_for(c.metric))
            throw Error(ErrorCode::Format, "task kind does not match metric " + metric_name(c.metric));
        c.scheme = parse_scheme(j.at("scheme").get<std::string>());
        c.featurization = parse_featurization(j.at("featurization").get<std::string>());
        c.seed = j.at("seed").get<std::uint64_t>();
        c.stats = j.at("stats").get<NormalizationStats>();
        c.params.encoders = mlps_from(j.at("encoders"));
        c.params.updates = mlps_from(j.at("updates"));
        c.params.readout = j.at("readout").get<Mlp>();

        const std::size_t h = c.hidden_dim;
        for (std::size_t t = 0; t < kNodeTypeCount; ++t) {
            const auto name = to_string(static_cast<NodeType>(t));
            expect_shape(c.params.encoders[t], {schema.width(static_cast<NodeType>(t)), h, h}, name + " encoder");
            expect_shape(c.params.updates[t], {2 * h, h, h}, name + " update network");
        }
        expect_shape(c.params.readout, {h, h, 1}, "readout");
        if (!c.params.all_finite()) throw Error(ErrorCode::Format, "checkpoint contains non-finite weights");
        if (j.contains("parameter_hash") && j.at("parameter_hash").get<std::string>() != c.parameter_hash())
            throw Error(ErrorCode::Format, "parameter hash does not match the stored weights");
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& c) {
    write_json_file(path, checkpoint_to_json(c));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_json_file(path)); }

}  // namespace streamcost
