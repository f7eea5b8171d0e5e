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

#pragma once

#include <streamcost/dataset.hpp>
#include <streamcost/gnn.hpp>

#include <filesystem>

namespace streamcost {

void to_json(json& j, const Mlp& m);
void from_json(const json& j, Mlp& m);

/// Self-describing checkpoint document: version, tags, dimensions, feature
/// schema, normalization statistics and weights. Loading rejects documents
/// whose version, schema widths or layer shapes disagree with this build.
[[nodiscard]] json checkpoint_to_json(const ModelCheckpoint& c);
[[nodiscard]] ModelCheckpoint checkpoint_from_json(const json& j);

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& c);
[[nodiscard]] ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace streamcost
