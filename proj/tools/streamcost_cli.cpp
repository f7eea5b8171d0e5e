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
#include <streamcost/report.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace streamcost;

namespace {

void log_line(const std::string& msg) { std::cerr << "[streamcost] " << msg << '\n'; }

/// A dataset argument is either a JSONL file or a directory holding examples.jsonl.
std::vector<Example> load_examples(const fs::path& p) {
    return read_jsonl(fs::is_directory(p) ? p / "examples.jsonl" : p);
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    if (!path.empty()) from_json(read_json_file(path), cfg);
    return cfg;
}

/// Train/validation examples; unsplit corpora use every tenth example for validation.
std::pair<std::vector<Example>, std::vector<Example>> train_val(const std::vector<Example>& all) {
    auto train = filter_split(all, Split::Train);
    auto val = filter_split(all, Split::Validation);
    if (train.empty()) {
        for (std::size_t i = 0; i < all.size(); ++i) (i % 10 == 9 ? val : train).push_back(all[i]);
    }
    if (train.empty() || val.empty()) throw Error(ErrorCode::EmptyDataset, "need training and validation examples");
    return {train, val};
}

std::vector<HardwareNode> read_inventory(const fs::path& p) {
    const auto j = read_json_file(p);
    const auto& hosts = j.is_object() ? j.at("hosts") : j;
    return hosts.get<std::vector<HardwareNode>>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learned cost model for stream-operator placement"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a labelled corpus (JSONL + manifest)");
    std::string gen_config, gen_family, gen_out;
    std::size_t gen_count = 1000, gen_chain = 0;
    std::optional<std::uint64_t> gen_seed;
    std::vector<std::string> gen_overrides;
    bool gen_no_split = false, gen_no_label = false;
    gen->add_option("--config", gen_config, "Experiment or generator config JSON");
    gen->add_option("--count", gen_count, "Number of queries");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--family", gen_family, "linear, two_way or three_way");
    gen->add_option("--chain", gen_chain, "Generate filter chains of this length");
    gen->add_option("--override", gen_overrides, "Range block, e.g. interpolation or strong-cpu-eval");
    gen->add_flag("--no-split", gen_no_split, "Mark every example as extra instead of 80/10/10");
    gen->add_flag("--no-label", gen_no_label, "Skip simulation");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Label joint graphs with the simulator");
    std::string sim_in, sim_out, sim_config;
    std::uint64_t sim_seed = 1;
    sim->add_option("--in", sim_in, "Input JSONL or dataset directory")->required();
    sim->add_option("--out", sim_out, "Output JSONL")->required();
    sim->add_option("--config", sim_config, "Experiment config JSON (gen.sim is used)");
    sim->add_option("--seed", sim_seed, "Noise seed");

    // train
    auto* tr = app.add_subcommand("train", "Train a seed ensemble for one metric");
    std::string tr_metric = "T", tr_data, tr_out, tr_config, tr_model = "gnn", tr_scheme, tr_feat, tr_fine;
    std::string tr_seeds;
    std::optional<std::size_t> tr_epochs;
    tr->add_option("--metric", tr_metric, "T, L_p, L_e, R_O or S");
    tr->add_option("--data", tr_data, "Dataset directory or JSONL")->required();
    tr->add_option("--out", tr_out, "Model directory")->required();
    tr->add_option("--seeds", tr_seeds, "Comma-separated seeds");
    tr->add_option("--config", tr_config, "Experiment config JSON (train block is used)");
    tr->add_option("--model", tr_model, "gnn or flat")->check(CLI::IsMember({"gnn", "flat"}));
    tr->add_option("--epochs", tr_epochs, "Maximum epochs");
    tr->add_option("--scheme", tr_scheme, "novel or traditional");
    tr->add_option("--featurization", tr_feat, "full, no-hardware or ops-only");
    tr->add_option("--fine-tune", tr_fine, "Continue training this checkpoint instead");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Evaluate every model of a directory on a dataset");
    std::string ev_models, ev_data, ev_out, ev_split = "test";
    ev->add_option("--models", ev_models, "Model directory")->required();
    ev->add_option("--data", ev_data, "Dataset directory or JSONL")->required();
    ev->add_option("--split", ev_split, "train, validation, test, extra or all");
    ev->add_option("--out", ev_out, "Report directory")->required();

    // optimize
    auto* op = app.add_subcommand("optimize", "Choose a placement with model ensembles");
    std::string op_query, op_inv, op_target = "proc_latency", op_models, op_out, op_bins;
    std::size_t op_k = 50;
    std::uint64_t op_seed = 1;
    op->add_option("--query", op_query, "Query graph JSON")->required();
    op->add_option("--inventory", op_inv, "Hardware inventory JSON")->required();
    op->add_option("--target", op_target, "Metric to optimise");
    op->add_option("--k", op_k, "Number of candidates");
    op->add_option("--models", op_models, "Model directory")->required();
    op->add_option("--seed", op_seed, "Candidate sampling seed");
    op->add_option("--bins", op_bins, "Hardware bin config JSON");
    op->add_option("--out", op_out, "Output JSON (stdout when omitted)");

    // suite
    auto* su = app.add_subcommand("suite", "Run an experiment suite");
    std::string su_kind, su_config, su_out, su_models, su_target = "proc_latency";
    su->add_option("kind", su_kind, "standard, interpolation, extrapolation, ablation, patterns, fine-tune, placement-study")
        ->required()
        ->check(CLI::IsMember(
            {"standard", "interpolation", "extrapolation", "ablation", "patterns", "fine-tune", "placement-study"}));
    su->add_option("--config", su_config, "Experiment config JSON");
    su->add_option("--out", su_out, "Output directory")->required();
    su->add_option("--models", su_models, "Reuse standard models from this directory");
    su->add_option("--target", su_target, "Placement study target metric");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            ExperimentConfig cfg = load_config(gen_config);
            GenConfig g = cfg.gen;
            for (const auto& o : gen_overrides) g = with_override(g, o);
            if (gen_seed) g.seed = *gen_seed;
            DatasetSpec spec;
            spec.count = gen_count;
            if (!gen_family.empty()) spec.family = parse_family(gen_family);
            if (gen_chain > 0) spec.chain_length = gen_chain;
            spec.split = !gen_no_split;
            spec.label = !gen_no_label;
            const auto ds = make_dataset(g, spec);
            fs::create_directories(gen_out);
            write_jsonl(fs::path(gen_out) / "examples.jsonl", ds.examples);
            auto manifest = ds.manifest;
            manifest["overrides"] = gen_overrides;
            write_json_file(fs::path(gen_out) / "manifest.json", manifest);
            log_line("wrote " + std::to_string(ds.examples.size()) + " examples, config hash " +
                     ds.manifest.at("config_hash").get<std::string>());
        } else if (*sim) {
            const auto cfg = load_config(sim_config);
            auto examples = load_examples(sim_in);
            for (std::size_t i = 0; i < examples.size(); ++i) {
                SimConfig sc = cfg.gen.sim;
                sc.rng_seed = item_rng(sim_seed, i)();
                examples[i].label = simulate(examples[i].graph, sc);
            }
            write_jsonl(sim_out, examples);
            log_line("labelled " + std::to_string(examples.size()) + " examples");
        } else if (*tr) {
            auto cfg = load_config(tr_config);
            TrainConfig tc = cfg.train;
            tc.metric = parse_metric(tr_metric);
            if (!tr_seeds.empty()) {
                tc.seeds.clear();
                std::size_t start = 0;
                while (start <= tr_seeds.size()) {
                    const auto end = std::min(tr_seeds.find(',', start), tr_seeds.size());
                    tc.seeds.push_back(std::stoull(tr_seeds.substr(start, end - start)));
                    start = end + 1;
                }
            }
            if (tr_epochs) tc.epochs = *tr_epochs;
            if (!tr_scheme.empty()) tc.scheme = parse_scheme(tr_scheme);
            if (!tr_feat.empty()) tc.featurization = parse_featurization(tr_feat);
            tc.validate();
            const auto [train, val] = train_val(load_examples(tr_data));
            const fs::path out = tr_out;
            fs::create_directories(out);
            const auto tag = metric_tag(tc.metric);
            if (!tr_fine.empty()) {
                const auto base = load_checkpoint(tr_fine);
                const auto r = fine_tune(base, train, val, tc);
                const auto stem = "gnn_" + tag + "_seed" + std::to_string(r.model.seed) + "_tuned";
                save_checkpoint(out / (stem + ".json"), r.model);
                write_text_file(out / (stem + "_log.csv"), r.log_csv());
                log_line("fine-tuned " + base.parameter_hash() + " -> " + r.model.parameter_hash());
            } else if (tr_model == "flat") {
                for (const auto& r : train_flat_ensemble(tc, train, val)) {
                    write_json_file(out / ("flat_" + tag + "_seed" + std::to_string(r.model.seed) + ".json"),
                                    flat_to_json(r.model));
                    TrainResult log_only;
                    log_only.log = r.log;
                    write_text_file(out / ("flat_" + tag + "_seed" + std::to_string(r.model.seed) + "_log.csv"),
                                    log_only.log_csv());
                    log_line("flat seed " + std::to_string(r.model.seed) + " best epoch " +
                             std::to_string(r.best_epoch));
                }
            } else {
                for (auto seed : tc.seeds) {
                    log_line("training " + metric_name(tc.metric) + " seed " + std::to_string(seed));
                    const auto r = train_model(tc, train, val, seed);
                    const auto stem = "gnn_" + tag + "_seed" + std::to_string(seed);
                    save_checkpoint(out / (stem + ".json"), r.model);
                    write_text_file(out / (stem + "_log.csv"), r.log_csv());
                    log_line("best epoch " + std::to_string(r.best_epoch) + ", hash " + r.model.parameter_hash());
                }
            }
        } else if (*ev) {
            const auto models = read_model_dir(ev_models);
            auto examples = load_examples(ev_data);
            if (ev_split != "all") examples = filter_split(examples, parse_split(ev_split));
            EvalOptions opts;
            opts.model_hashes = model_hashes(models);
            if (fs::is_directory(ev_data) && fs::exists(fs::path(ev_data) / "manifest.json"))
                opts.config_hash = read_json_file(fs::path(ev_data) / "manifest.json").value("config_hash", "");
            const fs::path out = ev_out;
            if (!models.gnn.empty()) {
                opts.experiment = "evaluate";
                write_report_bundle(out, "gnn", evaluate_models(gnn_predictors(models), examples, opts).to_json());
            }
            if (!models.flat.empty()) {
                opts.experiment = "evaluate-flat";
                write_report_bundle(out, "flat", evaluate_models(flat_predictors(models), examples, opts).to_json());
            }
        } else if (*op) {
            const auto q = read_json_file(op_query).get<QueryGraph>();
            const auto hw = read_inventory(op_inv);
            BinConfig bins;
            if (!op_bins.empty()) bins = read_json_file(op_bins).get<BinConfig>();
            const auto models = read_model_dir(op_models);
            check_ensembles(models.gnn);
            const auto target = parse_metric(op_target);
            std::mt19937_64 rng(op_seed);
            const auto cands = enumerate_candidates(q, hw, op_k, rng, bins);
            const auto predictor = ensemble_predictor(models.gnn);
            std::vector<PlacementCandidate> pcs;
            for (const auto& c : cands) pcs.push_back(predict_candidate(c, q, hw, predictor));
            const auto sel = select_placement(pcs, target, default_direction(target));
            json table = json::array();
            for (std::size_t i = 0; i < pcs.size(); ++i) {
                json preds = json::object(), agg = json::object();
                for (const auto& [m, v] : pcs[i].predictions) preds[metric_name(m)] = v;
                for (const auto& [m, v] : pcs[i].aggregate) agg[metric_name(m)] = v;
                table.push_back(json{{"index", i},
                                     {"placement", pcs[i].placement},
                                     {"predictions", preds},
                                     {"aggregate", agg},
                                     {"decision", sel.decisions.at(i)}});
            }
            json out{{"v", kJsonlVersion},
                     {"kind", "optimization"},
                     {"target", metric_name(target)},
                     {"model_hashes", model_hashes(models)},
                     {"none_viable", sel.none_viable},
                     {"chosen_index", sel.chosen ? json(*sel.chosen) : json(nullptr)},
                     {"fallback_index", sel.fallback ? json(*sel.fallback) : json(nullptr)},
                     {"candidates", table}};
            const std::size_t pick = sel.chosen ? *sel.chosen : sel.fallback.value_or(0);
            out["placement"] = pcs.at(pick).placement;
            if (op_out.empty())
                std::cout << out.dump(2) << '\n';
            else
                write_json_file(op_out, out);
        } else if (*su) {
            const auto cfg = load_config(su_config);
            cfg.validate();
            const fs::path out = su_out;
            fs::create_directories(out);
            write_json_file(out / "config.json", json{{"config", cfg}, {"config_hash", config_hash(cfg)}});
            const bool needs_flat = su_kind == "standard" || su_kind == "patterns" || su_kind == "placement-study";
            StandardModels m;
            if (!su_models.empty()) {
                m = load_standard(cfg, su_models);
            } else {
                const std::vector<Metric> metrics = su_kind == "fine-tune" ? std::vector<Metric>{Metric::Throughput}
                                                    : su_kind == "patterns"
                                                        ? std::vector<Metric>(kRegressionMetrics.begin(),
                                                                              kRegressionMetrics.end())
                                                        : std::vector<Metric>(kAllMetrics.begin(), kAllMetrics.end());
                m = train_standard(cfg, metrics, needs_flat, log_line);
                save_models(out / "models", m);
            }
            if (su_kind == "standard") {
                write_report_bundle(out, "test", standard_report(cfg, m, false).to_json());
                if (!m.flat.empty()) write_report_bundle(out, "test_flat", standard_report(cfg, m, true).to_json());
                for (const auto& [metric, runs] : m.gnn_runs)
                    for (const auto& r : runs)
                        write_text_file(out / ("log_" + metric_tag(metric) + "_seed" + std::to_string(r.model.seed) +
                                               ".csv"),
                                        r.log_csv());
            } else if (su_kind == "interpolation") {
                write_report_bundle(out, "interpolation", run_interpolation(cfg, m));
            } else if (su_kind == "extrapolation") {
                write_report_bundle(out, "extrapolation", run_extrapolation(cfg, m, log_line));
            } else if (su_kind == "ablation") {
                write_report_bundle(out, "ablation", run_ablations(cfg, m, log_line));
            } else if (su_kind == "patterns") {
                write_report_bundle(out, "patterns", run_patterns(cfg, m));
            } else if (su_kind == "fine-tune") {
                write_report_bundle(out, "fine_tune", run_fine_tune(cfg, m, log_line));
            } else {
                write_report_bundle(out, "placement_study", run_placement_study(cfg, m, parse_metric(su_target), log_line));
            }
            log_line("wrote " + out.string());
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
