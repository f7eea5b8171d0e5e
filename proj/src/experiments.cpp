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
#include <streamcost/experiments.hpp>
#include <streamcost/featurize.hpp>

#include <algorithm>
#include <cmath>

namespace streamcost {

void ExperimentConfig::validate() const {
    gen.validate();
    train.validate();
    if (corpus_size < 10 || eval_size == 0 || extrapolation_corpus_size < 10 || chain_eval_size == 0 ||
        fine_tune_size < 10 || placement_queries == 0 || placement_k == 0)
        throw Error(ErrorCode::InvalidArgument, "experiment sizes are too small");
    if (extrapolation_seeds.empty() || ablation_seeds.empty())
        throw Error(ErrorCode::InvalidArgument, "experiment seed lists must be non-empty");
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"gen", c.gen},
             {"train", c.train},
             {"corpus_size", c.corpus_size},
             {"eval_size", c.eval_size},
             {"extrapolation_corpus_size", c.extrapolation_corpus_size},
             {"extrapolation_epochs", c.extrapolation_epochs},
             {"extrapolation_seeds", c.extrapolation_seeds},
             {"ablation_seeds", c.ablation_seeds},
             {"chain_eval_size", c.chain_eval_size},
             {"fine_tune_size", c.fine_tune_size},
             {"fine_tune_epochs", c.fine_tune_epochs},
             {"placement_queries", c.placement_queries},
             {"placement_k", c.placement_k},
             {"eval_seed", c.eval_seed}};
}

void from_json(const json& j, ExperimentConfig& c) {
    if (j.contains("gen")) from_json(j.at("gen"), c.gen);
    if (j.contains("train")) from_json(j.at("train"), c.train);
    c.corpus_size = j.value("corpus_size", c.corpus_size);
    c.eval_size = j.value("eval_size", c.eval_size);
    c.extrapolation_corpus_size = j.value("extrapolation_corpus_size", c.extrapolation_corpus_size);
    c.extrapolation_epochs = j.value("extrapolation_epochs", c.extrapolation_epochs);
    c.extrapolation_seeds = j.value("extrapolation_seeds", c.extrapolation_seeds);
    c.ablation_seeds = j.value("ablation_seeds", c.ablation_seeds);
    c.chain_eval_size = j.value("chain_eval_size", c.chain_eval_size);
    c.fine_tune_size = j.value("fine_tune_size", c.fine_tune_size);
    c.fine_tune_epochs = j.value("fine_tune_epochs", c.fine_tune_epochs);
    c.placement_queries = j.value("placement_queries", c.placement_queries);
    c.placement_k = j.value("placement_k", c.placement_k);
    c.eval_seed = j.value("eval_seed", c.eval_seed);
}

std::string config_hash(const ExperimentConfig& c) { return hash_json(json(c)); }

namespace {

void say(const Progress& p, const std::string& msg) {
    if (p) p(msg);
}

json cell_json(const Cell& c) {
    json j{{"n", c.n}};
    if (c.q50) j["q50"] = *c.q50;
    if (c.q95) j["q95"] = *c.q95;
    if (c.accuracy) j["accuracy"] = *c.accuracy;
    return j;
}

std::map<Metric, BatchPredictor> predictors_of(const std::map<Metric, std::vector<ModelCheckpoint>>& models) {
    std::map<Metric, BatchPredictor> out;
    for (const auto& [m, members] : models) out[m] = gnn_predictor(members);
    return out;
}

std::map<Metric, std::vector<ModelCheckpoint>> train_all(const TrainConfig& base, const std::vector<Metric>& metrics,
                                                         const std::vector<Example>& train,
                                                         const std::vector<Example>& val, const Progress& progress,
                                                         const std::string& tag) {
    std::map<Metric, std::vector<ModelCheckpoint>> out;
    for (auto m : metrics) {
        TrainConfig tc = base;
        tc.metric = m;
        for (auto seed : tc.seeds) {
            say(progress, tag + ": training " + metric_name(m) + " seed " + std::to_string(seed));
            out[m].push_back(train_model(tc, train, val, seed).model);
        }
    }
    return out;
}

std::vector<Metric> all_metrics() { return {kAllMetrics.begin(), kAllMetrics.end()}; }

json metric_cells(const std::map<Metric, BatchPredictor>& predictors, const std::vector<Example>& examples,
                  std::uint64_t balance_seed) {
    json j = json::object();
    EvalOptions opts;
    opts.balance_seed = balance_seed;
    for (const auto& [m, p] : predictors) j[metric_name(m)] = cell_json(evaluate_metric(p, m, examples, opts));
    return j;
}

}  // namespace

StandardModels train_standard(const ExperimentConfig& cfg, const std::vector<Metric>& metrics, bool with_flat,
                              const Progress& progress) {
    cfg.validate();
    StandardModels sm;
    say(progress, "generating corpus of " + std::to_string(cfg.corpus_size) + " queries");
    DatasetSpec spec;
    spec.count = cfg.corpus_size;
    sm.corpus = make_dataset(cfg.gen, spec);
    const auto train = filter_split(sm.corpus.examples, Split::Train);
    const auto val = filter_split(sm.corpus.examples, Split::Validation);
    for (auto m : metrics) {
        TrainConfig tc = cfg.train;
        tc.metric = m;
        for (auto seed : tc.seeds) {
            say(progress, "training " + metric_name(m) + " seed " + std::to_string(seed));
            auto run = train_model(tc, train, val, seed);
            sm.gnn[m].push_back(run.model);
            sm.gnn_runs[m].push_back(std::move(run));
        }
        if (with_flat) {
            say(progress, "training flat baseline for " + metric_name(m));
            for (auto& r : train_flat_ensemble(tc, train, val)) sm.flat[m].push_back(std::move(r.model));
        }
    }
    return sm;
}

void save_models(const std::filesystem::path& dir, const StandardModels& m) {
    std::filesystem::create_directories(dir);
    for (const auto& [metric, members] : m.gnn)
        for (const auto& c : members)
            save_checkpoint(dir / ("gnn_" + metric_tag(metric) + "_seed" + std::to_string(c.seed) + ".json"), c);
    for (const auto& [metric, members] : m.flat)
        for (const auto& f : members)
            write_json_file(dir / ("flat_" + metric_tag(metric) + "_seed" + std::to_string(f.seed) + ".json"),
                            flat_to_json(f));
}

StandardModels read_model_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw Error(ErrorCode::InvalidArgument, "model directory '" + dir.string() + "' does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    StandardModels m;
    for (const auto& f : files) {
        const auto j = read_json_file(f);
        if (!j.is_object() || !j.contains("format_version")) continue;
        if (j.value("model", std::string{}) == "flat") {
            auto fm = flat_from_json(j);
            m.flat[fm.metric].push_back(std::move(fm));
        } else {
            auto c = checkpoint_from_json(j);
            m.gnn[c.metric].push_back(std::move(c));
        }
    }
    if (m.gnn.empty() && m.flat.empty())
        throw Error(ErrorCode::InvalidArgument, "no models found in '" + dir.string() + "'");
    for (auto& [_, v] : m.gnn)
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    for (auto& [_, v] : m.flat)
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    return m;
}

StandardModels load_standard(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    auto m = read_model_dir(dir);
    DatasetSpec spec;
    spec.count = cfg.corpus_size;
    m.corpus = make_dataset(cfg.gen, spec);
    return m;
}

std::map<Metric, BatchPredictor> gnn_predictors(const StandardModels& m) { return predictors_of(m.gnn); }

std::map<Metric, BatchPredictor> flat_predictors(const StandardModels& m) {
    std::map<Metric, BatchPredictor> out;
    for (const auto& [metric, members] : m.flat) out[metric] = flat_predictor(members);
    return out;
}

std::vector<std::string> model_hashes(const StandardModels& m) {
    std::vector<std::string> out;
    for (const auto& [metric, members] : m.gnn)
        for (const auto& c : members) out.push_back(metric_tag(metric) + ":" + c.parameter_hash());
    return out;
}

EvalReport standard_report(const ExperimentConfig& cfg, const StandardModels& m, bool flat) {
    EvalOptions opts;
    opts.experiment = flat ? "test-flat" : "test";
    opts.config_hash = config_hash(cfg);
    opts.model_hashes = model_hashes(m);
    return evaluate_models(flat ? flat_predictors(m) : gnn_predictors(m), filter_split(m.corpus.examples, Split::Test),
                           opts);
}

std::vector<Example> evaluation_corpus(const ExperimentConfig& cfg, std::size_t count, std::uint64_t seed_offset,
                                       const std::string& override_block, std::optional<std::size_t> chain_length,
                                       std::optional<Family> family) {
    GenConfig g = override_block.empty() ? cfg.gen : with_override(cfg.gen, override_block);
    g.seed = cfg.eval_seed + seed_offset;
    DatasetSpec spec;
    spec.count = count;
    spec.split = false;
    spec.chain_length = chain_length;
    spec.family = family;
    return make_dataset(g, spec).examples;
}

json run_interpolation(const ExperimentConfig& cfg, const StandardModels& m) {
    const auto eval = evaluation_corpus(cfg, cfg.eval_size, 1, "interpolation");
    const auto test = filter_split(m.corpus.examples, Split::Test);
    const auto gnn = gnn_predictors(m);
    json out{{"experiment", "interpolation"},
             {"config_hash", config_hash(cfg)},
             {"model_hashes", model_hashes(m)},
             {"evaluation_ranges", json(with_override(cfg.gen, "interpolation"))["hardware"]},
             {"in_range", metric_cells(gnn, test, 7)},
             {"interpolation", metric_cells(gnn, eval, 7)}};
    if (!m.flat.empty()) out["interpolation_flat"] = metric_cells(flat_predictors(m), eval, 7);
    json ratio = json::object();
    for (auto metric : kRegressionMetrics) {
        const auto name = metric_name(metric);
        if (!out["in_range"].contains(name)) continue;
        const auto& a = out["interpolation"][name];
        const auto& b = out["in_range"][name];
        if (a.contains("q50") && b.contains("q50"))
            ratio[name] = a["q50"].get<double>() / b["q50"].get<double>();
    }
    out["q50_ratio"] = ratio;
    return out;
}

json run_extrapolation(const ExperimentConfig& cfg, const StandardModels& m, const Progress& progress) {
    json out{{"experiment", "extrapolation"}, {"config_hash", config_hash(cfg)}, {"settings", json::array()}};
    const auto standard_in_range = metric_cells(gnn_predictors(m), filter_split(m.corpus.examples, Split::Test), 7);
    out["standard_in_range"] = standard_in_range;
    std::uint64_t offset = 100;
    for (const std::string direction : {"strong", "weak"}) {
        for (auto dim : kHardwareDims) {
            const auto key = direction + "-" + to_string(dim);
            GenConfig g = with_override(cfg.gen, key + "-train");
            DatasetSpec spec;
            spec.count = cfg.extrapolation_corpus_size;
            say(progress, "extrapolation " + key + ": generating training corpus");
            const auto corpus = make_dataset(g, spec);
            const auto train = filter_split(corpus.examples, Split::Train);
            const auto val = filter_split(corpus.examples, Split::Validation);
            const auto test = filter_split(corpus.examples, Split::Test);
            TrainConfig tc = cfg.train;
            tc.seeds = cfg.extrapolation_seeds;
            tc.epochs = cfg.extrapolation_epochs;
            const auto models = train_all(tc, all_metrics(), train, val, progress, "extrapolation " + key);
            const auto preds = predictors_of(models);
            const auto eval = evaluation_corpus(cfg, cfg.eval_size, offset++, key + "-eval");
            json setting{{"setting", key},
                         {"direction", direction},
                         {"dimension", to_string(dim)},
                         {"train_range", g.hardware.list(dim)},
                         {"eval_range", with_override(cfg.gen, key + "-eval").hardware.list(dim)},
                         {"corpus_config_hash", config_hash(g)},
                         {"in_range", metric_cells(preds, test, 7)},
                         {"extrapolation", metric_cells(preds, eval, 7)}};
            json ratio = json::object();
            for (auto metric : kRegressionMetrics) {
                const auto name = metric_name(metric);
                const auto& a = setting["extrapolation"][name];
                const auto& b = setting["in_range"][name];
                if (a.contains("q50") && b.contains("q50"))
                    ratio[name] = a["q50"].get<double>() / b["q50"].get<double>();
            }
            setting["q50_ratio"] = ratio;
            out["settings"].push_back(std::move(setting));
        }
    }
    return out;
}

json run_patterns(const ExperimentConfig& cfg, const StandardModels& m) {
    if (m.flat.empty()) throw Error(ErrorCode::InvalidArgument, "pattern comparison needs the flat baseline");
    std::map<Metric, BatchPredictor> gnn, flat;
    for (auto metric : kRegressionMetrics) {
        if (!m.gnn.count(metric) || !m.flat.count(metric)) continue;
        gnn[metric] = gnn_predictor(m.gnn.at(metric));
        flat[metric] = flat_predictor(m.flat.at(metric));
    }
    json out{{"experiment", "patterns"}, {"config_hash", config_hash(cfg)}, {"sets", json::object()}};
    auto compare = [&](const std::string& name, const std::vector<Example>& examples) {
        out["sets"][name] = json{{"gnn", metric_cells(gnn, examples, 7)}, {"flat", metric_cells(flat, examples, 7)}};
    };
    compare("test", filter_split(m.corpus.examples, Split::Test));
    for (std::size_t k = 2; k <= 4; ++k)
        compare("filter_chain_" + std::to_string(k), evaluation_corpus(cfg, cfg.chain_eval_size, 200 + k, {}, k));
    return out;
}

json run_ablations(const ExperimentConfig& cfg, const StandardModels& m, const Progress& progress) {
    const auto train = filter_split(m.corpus.examples, Split::Train);
    const auto val = filter_split(m.corpus.examples, Split::Validation);
    const auto test = filter_split(m.corpus.examples, Split::Test);
    const std::vector<Metric> metrics(kRegressionMetrics.begin(), kRegressionMetrics.end());

    struct Variant {
        std::string name;
        Scheme scheme;
        Featurization featurization;
    };
    const std::vector<Variant> variants = {{"full", Scheme::Novel, Featurization::Full},
                                           {"no-hardware", Scheme::Novel, Featurization::NoHardware},
                                           {"ops-only", Scheme::Novel, Featurization::OpsOnly},
                                           {"traditional", Scheme::Traditional, Featurization::Full}};
    json out{{"experiment", "ablation"}, {"config_hash", config_hash(cfg)}, {"seeds", cfg.ablation_seeds}};
    json variants_json = json::object();
    for (const auto& v : variants) {
        std::map<Metric, std::vector<ModelCheckpoint>> models;
        for (auto metric : metrics) {
            for (auto seed : cfg.ablation_seeds) {
                // The full/novel variant is the standard configuration; reuse a matching member.
                const ModelCheckpoint* reuse = nullptr;
                if (v.scheme == cfg.train.scheme && v.featurization == cfg.train.featurization && m.gnn.count(metric))
                    for (const auto& c : m.gnn.at(metric))
                        if (c.seed == seed) reuse = &c;
                if (reuse) {
                    models[metric].push_back(*reuse);
                    continue;
                }
                TrainConfig tc = cfg.train;
                tc.metric = metric;
                tc.scheme = v.scheme;
                tc.featurization = v.featurization;
                say(progress, "ablation " + v.name + ": training " + metric_name(metric) + " seed " + std::to_string(seed));
                models[metric].push_back(train_model(tc, train, val, seed).model);
            }
        }
        variants_json[v.name] = json{{"scheme", to_string(v.scheme)},
                                     {"featurization", to_string(v.featurization)},
                                     {"test", metric_cells(predictors_of(models), test, 7)}};
    }
    out["variants"] = variants_json;
    return out;
}

json run_fine_tune(const ExperimentConfig& cfg, const StandardModels& m, const Progress& progress) {
    if (!m.gnn.count(Metric::Throughput)) throw Error(ErrorCode::InvalidArgument, "fine-tuning needs a throughput model");
    const auto& base = m.gnn.at(Metric::Throughput).front();
    std::vector<Example> extra;
    const std::size_t per_length = cfg.fine_tune_size / 3;
    for (std::size_t k = 2; k <= 4; ++k) {
        auto part = evaluation_corpus(cfg, per_length, 300 + k, {}, k);
        extra.insert(extra.end(), part.begin(), part.end());
    }
    std::vector<Example> tune, tune_val;
    for (std::size_t i = 0; i < extra.size(); ++i) (i % 10 == 9 ? tune_val : tune).push_back(extra[i]);

    TrainConfig tc = cfg.train;
    tc.metric = Metric::Throughput;
    tc.epochs = cfg.fine_tune_epochs;
    say(progress, "fine-tuning throughput model on " + std::to_string(tune.size()) + " filter chains");
    const auto tuned = fine_tune(base, tune, tune_val, tc);

    const auto before = gnn_predictor({base});
    const auto after = gnn_predictor({tuned.model});
    EvalOptions opts;
    json out{{"experiment", "fine-tune"},
             {"config_hash", config_hash(cfg)},
             {"base_hash", base.parameter_hash()},
             {"tuned_hash", tuned.model.parameter_hash()},
             {"extra_examples", tune.size()},
             {"best_epoch", tuned.best_epoch},
             {"sets", json::object()}};
    for (std::size_t k = 2; k <= 4; ++k) {
        const auto held = evaluation_corpus(cfg, cfg.chain_eval_size, 400 + k, {}, k);
        out["sets"]["filter_chain_" + std::to_string(k)] =
            json{{"base", cell_json(evaluate_metric(before, Metric::Throughput, held, opts))},
                 {"tuned", cell_json(evaluate_metric(after, Metric::Throughput, held, opts))}};
    }
    const auto test = filter_split(m.corpus.examples, Split::Test);
    out["sets"]["original_test"] = json{{"base", cell_json(evaluate_metric(before, Metric::Throughput, test, opts))},
                                        {"tuned", cell_json(evaluate_metric(after, Metric::Throughput, test, opts))}};
    return out;
}

namespace {

Predictor flat_member_predictor(const std::map<Metric, std::vector<FlatModel>>& models) {
    return [&models](const JointGraph& g) {
        std::map<Metric, std::vector<double>> out;
        for (const auto& [metric, members] : models)
            for (const auto& fm : members) out[metric].push_back(predict(g, fm));
        return out;
    };
}

double median(std::vector<double> v) { return v.empty() ? std::nan("") : percentile(std::move(v), 0.5); }

}  // namespace

json run_placement_study(const ExperimentConfig& cfg, const StandardModels& m, Metric target,
                         const Progress& progress) {
    if (is_binary(target)) throw Error(ErrorCode::InvalidArgument, "placement target must be a regression metric");
    const Direction dir = default_direction(target);
    std::map<std::string, Predictor> methods;
    methods["gnn"] = ensemble_predictor(m.gnn);
    if (!m.flat.empty()) methods["flat"] = flat_member_predictor(m.flat);

    json rows = json::array();
    std::map<std::string, std::map<std::string, std::vector<double>>> speedups;  // family -> method -> values
    for (auto family : {Family::Linear, Family::TwoWay, Family::ThreeWay}) {
        say(progress, "placement study: " + to_string(family));
        for (std::size_t i = 0; i < cfg.placement_queries; ++i) {
            auto rng = item_rng(cfg.eval_seed + 500, static_cast<std::uint64_t>(family) * 1000003ULL + i);
            const auto q = sample_query(cfg.gen, rng, family);
            const auto hw = sample_hardware(cfg.gen, rng, cfg.gen.hosts_per_query.value_or(q.operators.size()));
            const auto cands = enumerate_candidates(q, hw, cfg.placement_k, rng, cfg.gen.bins);
            const auto baseline_idx = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng);
            SimConfig sim = cfg.gen.sim;
            sim.rng_seed = rng();

            auto measure = [&](std::size_t idx) { return simulate(build_joint_graph(q, hw, cands[idx]), sim); };
            const auto base_cost = measure(baseline_idx);
            json row{{"family", to_string(family)},
                     {"query", i},
                     {"candidates", cands.size()},
                     {"baseline_index", baseline_idx},
                     {"baseline_success", base_cost.success}};
            const auto base_value = metric_value(base_cost, target);
            if (base_value) row["baseline_cost"] = *base_value;

            auto evaluate_method = [&](const std::string& name, const Predictor& predictor) {
                std::vector<PlacementCandidate> pcs;
                for (const auto& c : cands) pcs.push_back(predict_candidate(c, q, hw, predictor));
                const auto sel = select_placement(pcs, target, dir);
                const std::size_t idx = sel.chosen ? *sel.chosen : sel.fallback.value_or(0);
                const auto cost = measure(idx);
                json r{{"chosen_index", idx}, {"none_viable", sel.none_viable}, {"chosen_success", cost.success}};
                const auto value = metric_value(cost, target);
                if (value) r["chosen_cost"] = *value;
                if (base_value && *base_value > 0.0) {
                    // A chosen placement that fails yields no speed-up.
                    double s = 0.0;
                    if (value && *value > 0.0)
                        s = dir == Direction::Minimize ? speedup(*base_value, *value) : speedup(*value, *base_value);
                    r["speedup"] = s;
                    speedups[to_string(family)][name].push_back(s);
                }
                row[name] = r;
            };
            for (const auto& [name, predictor] : methods) evaluate_method(name, predictor);
            evaluate_method("oracle", oracle_predictor(sim));
            rows.push_back(std::move(row));
        }
    }
    json summary = json::object();
    for (const auto& [family, by_method] : speedups) {
        json f = json::object();
        for (const auto& [name, values] : by_method)
            f[name] = json{{"median_speedup", median(values)}, {"n", values.size()}};
        summary[family] = f;
    }
    return json{{"experiment", "placement-study"},
                {"config_hash", config_hash(cfg)},
                {"target", metric_name(target)},
                {"model_hashes", model_hashes(m)},
                {"notes", json::array({"queries whose random baseline fails are excluded from speed-up medians",
                                       "a selected placement that fails counts as speed-up 0",
                                       "oracle selects with the simulator itself and bounds the achievable speed-up"})},
                {"summary", summary},
                {"rows", rows}};
}

}  // namespace streamcost
