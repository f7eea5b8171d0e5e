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
#include <streamcost/generate.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace streamcost {

std::string to_string(Family f) {
    switch (f) {
        case Family::Linear: return "linear";
        case Family::TwoWay: return "two_way";
        case Family::ThreeWay: return "three_way";
    }
    return "linear";
}

Family parse_family(const std::string& s) {
    if (s == "linear") return Family::Linear;
    if (s == "two_way" || s == "2-way") return Family::TwoWay;
    if (s == "three_way" || s == "3-way") return Family::ThreeWay;
    throw Error(ErrorCode::InvalidArgument, "unknown query family '" + s + "'");
}

std::string to_string(HardwareDim d) {
    switch (d) {
        case HardwareDim::Cpu: return "cpu";
        case HardwareDim::Ram: return "ram";
        case HardwareDim::Bandwidth: return "bandwidth";
        case HardwareDim::Latency: return "latency";
    }
    return "cpu";
}

std::vector<double>& HardwareRanges::list(HardwareDim d) {
    switch (d) {
        case HardwareDim::Cpu: return cpu;
        case HardwareDim::Ram: return ram;
        case HardwareDim::Bandwidth: return bandwidth;
        case HardwareDim::Latency: return latency;
    }
    return cpu;
}

const std::vector<double>& HardwareRanges::list(HardwareDim d) const {
    return const_cast<HardwareRanges*>(this)->list(d);
}

void GenConfig::validate() const {
    auto sums_to_one = [](auto first, auto last) { return std::abs(std::accumulate(first, last, 0.0) - 1.0) <= 1e-9; };
    if (!sums_to_one(family_mix.begin(), family_mix.end()))
        throw Error(ErrorCode::InvalidArgument, "family proportions must sum to 1");
    if (!(std::accumulate(filter_count_mix.begin(), filter_count_mix.end(), 0.0) > 0.0))
        throw Error(ErrorCode::InvalidArgument, "filter-count weights must have a positive sum");
    for (double p : family_mix)
        if (p < 0.0) throw Error(ErrorCode::InvalidArgument, "negative family proportion");
    for (double p : filter_count_mix)
        if (p < 0.0) throw Error(ErrorCode::InvalidArgument, "negative filter-count proportion");
    const std::vector<const std::vector<double>*> lists = {&rate_linear,  &rate_two_way,       &rate_three_way,
                                                           &window_count, &window_time,        &hardware.cpu,
                                                           &hardware.ram, &hardware.bandwidth, &hardware.latency};
    for (const auto* l : lists) {
        if (l->empty()) throw Error(ErrorCode::InvalidArgument, "every value list must be non-empty");
        for (double v : *l)
            if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "list values must be positive");
    }
    if (width_min < 1 || width_max < width_min) throw Error(ErrorCode::InvalidArgument, "invalid tuple width range");
    if (!(slide_min > 0.0) || slide_max > 1.0 || slide_max < slide_min)
        throw Error(ErrorCode::InvalidArgument, "slide fractions must satisfy 0 < min <= max <= 1");
    if (selectivity_min < 0.0 || selectivity_max > 1.0 || selectivity_max < selectivity_min)
        throw Error(ErrorCode::InvalidArgument, "selectivity range must lie in [0,1]");
    if (!(join_selectivity_min > 0.0) || join_selectivity_min > selectivity_max)
        throw Error(ErrorCode::InvalidArgument, "invalid log-uniform join selectivity bound");
    if (agg_probability < 0.0 || agg_probability > 1.0)
        throw Error(ErrorCode::InvalidArgument, "aggregation probability must lie in [0,1]");
    if (hosts_per_query && *hosts_per_query == 0) throw Error(ErrorCode::InvalidArgument, "hosts_per_query must be > 0");
    if (train_fraction <= 0.0 || validation_fraction < 0.0 || train_fraction + validation_fraction > 1.0)
        throw Error(ErrorCode::InvalidArgument, "invalid split fractions");
    sim.validate();
}

void to_json(json& j, const GenConfig& c) {
    j = json{{"family_mix", c.family_mix},
             {"rate_linear", c.rate_linear},
             {"rate_two_way", c.rate_two_way},
             {"rate_three_way", c.rate_three_way},
             {"width_min", c.width_min},
             {"width_max", c.width_max},
             {"window_count", c.window_count},
             {"window_time", c.window_time},
             {"slide_min", c.slide_min},
             {"slide_max", c.slide_max},
             {"filter_count_mix", c.filter_count_mix},
             {"agg_probability", c.agg_probability},
             {"selectivity_min", c.selectivity_min},
             {"selectivity_max", c.selectivity_max},
             {"join_selectivity_log_uniform", c.join_selectivity_log_uniform},
             {"join_selectivity_min", c.join_selectivity_min},
             {"hardware",
              {{"cpu", c.hardware.cpu},
               {"ram", c.hardware.ram},
               {"bandwidth", c.hardware.bandwidth},
               {"latency", c.hardware.latency}}},
             {"hosts_per_query", c.hosts_per_query ? json(*c.hosts_per_query) : json(nullptr)},
             {"bins", c.bins},
             {"sim", c.sim},
             {"seed", c.seed},
             {"train_fraction", c.train_fraction},
             {"validation_fraction", c.validation_fraction},
             {"overrides", c.overrides}};
}

void from_json(const json& j, GenConfig& c) {
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("family_mix", c.family_mix);
    get("rate_linear", c.rate_linear);
    get("rate_two_way", c.rate_two_way);
    get("rate_three_way", c.rate_three_way);
    get("width_min", c.width_min);
    get("width_max", c.width_max);
    get("window_count", c.window_count);
    get("window_time", c.window_time);
    get("slide_min", c.slide_min);
    get("slide_max", c.slide_max);
    get("filter_count_mix", c.filter_count_mix);
    get("agg_probability", c.agg_probability);
    get("selectivity_min", c.selectivity_min);
    get("selectivity_max", c.selectivity_max);
    get("join_selectivity_log_uniform", c.join_selectivity_log_uniform);
    get("join_selectivity_min", c.join_selectivity_min);
    if (j.contains("hardware")) {
        const auto& h = j.at("hardware");
        for (auto d : kHardwareDims)
            if (h.contains(to_string(d))) h.at(to_string(d)).get_to(c.hardware.list(d));
    }
    if (j.contains("hosts_per_query")) {
        const auto& h = j.at("hosts_per_query");
        c.hosts_per_query = h.is_null() ? std::nullopt : std::optional<std::size_t>(h.get<std::size_t>());
    }
    get("bins", c.bins);
    if (j.contains("sim")) from_json(j.at("sim"), c.sim);
    get("seed", c.seed);
    get("train_fraction", c.train_fraction);
    get("validation_fraction", c.validation_fraction);
    get("overrides", c.overrides);
}

std::string config_hash(const GenConfig& c) { return hash_json(json(c)); }

namespace {

struct Extrapolation {
    std::vector<double> train;
    std::vector<double> eval;
};

// Reduced training ranges and held-back evaluation values (ram in MB).
const std::map<std::string, Extrapolation>& extrapolation_table() {
    static const std::map<std::string, Extrapolation> table = {
        {"strong-ram", {{1000, 2000, 4000, 8000, 16000}, {24000, 32000}}},
        {"strong-cpu", {{50, 100, 200, 300, 400, 500, 600}, {700, 800}}},
        {"strong-bandwidth", {{25, 50, 100, 200, 300, 800, 1600, 3200}, {6400, 10000}}},
        {"strong-latency", {{5, 10, 20, 40, 80, 160}, {1, 2}}},
        {"weak-ram", {{4000, 8000, 16000, 24000, 32000}, {1000, 2000}}},
        {"weak-cpu", {{200, 300, 400, 500, 600, 700, 800}, {50, 100}}},
        {"weak-bandwidth", {{100, 200, 300, 800, 1600, 3200, 6400, 10000}, {25, 50}}},
        {"weak-latency", {{1, 2, 5, 10, 20, 40}, {80, 160}}},
    };
    return table;
}

}  // namespace

std::vector<std::string> override_names() {
    std::vector<std::string> names = {"interpolation"};
    for (const auto& [key, _] : extrapolation_table()) {
        names.push_back(key + "-train");
        names.push_back(key + "-eval");
    }
    return names;
}

GenConfig with_override(GenConfig c, const std::string& block) {
    if (block == "interpolation") {
        c.hardware.ram = {1500, 3000, 6000, 12000, 20000, 28000};
        c.hardware.cpu = {75, 150, 250, 350, 450, 550, 650, 750};
        c.hardware.bandwidth = {35, 75, 150, 250, 550, 1200, 1900, 4800, 8000};
        c.hardware.latency = {3, 7, 15, 30, 60, 120};
    } else {
        const auto dash = block.rfind('-');
        const auto key = dash == std::string::npos ? block : block.substr(0, dash);
        const auto which = dash == std::string::npos ? std::string{} : block.substr(dash + 1);
        auto it = extrapolation_table().find(key);
        if (it == extrapolation_table().end() || (which != "train" && which != "eval"))
            throw Error(ErrorCode::InvalidArgument, "unknown override block '" + block + "'");
        const auto dim_name = key.substr(key.find('-') + 1);
        for (auto d : kHardwareDims)
            if (to_string(d) == dim_name) c.hardware.list(d) = which == "train" ? it->second.train : it->second.eval;
    }
    c.overrides.push_back(block);
    return c;
}

std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finaliser over the pair
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return std::mt19937_64(z);
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& values, std::mt19937_64& rng) {
    return values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
}

template <std::size_t N>
std::size_t pick_weighted(const std::array<double, N>& weights, std::mt19937_64& rng) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return N - 1;
}

double uniform(double lo, double hi, std::mt19937_64& rng) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Builds a query one stream at a time; each stream is identified by its tail operator.
class Builder {
  public:
    Builder(const GenConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {}

    struct Stream {
        std::string tail;
        int width = 0;
        std::array<int, kDataTypeCount> types{};
    };

    Stream source(const std::vector<double>& rates) {
        OperatorNode op{next_id("source"), OperatorKind::Source, {}};
        const int width = std::uniform_int_distribution<int>(cfg_.width_min, cfg_.width_max)(rng_);
        std::array<int, kDataTypeCount> types{};
        for (int i = 0; i < width; ++i) ++types[std::uniform_int_distribution<std::size_t>(0, kDataTypeCount - 1)(rng_)];
        op.features.tuple_width_in = width;
        op.features.tuple_width_out = width;
        op.features.input_event_rate = pick(rates, rng_);
        op.features.tuple_data_types = types;
        return add(std::move(op), {}, width, types);
    }

    Stream filter(const Stream& in) {
        OperatorNode op{next_id("filter"), OperatorKind::Filter, {}};
        auto& f = op.features;
        f.tuple_width_in = f.tuple_width_out = in.width;
        f.filter_function = static_cast<FilterFunction>(
            std::uniform_int_distribution<std::size_t>(0, kFilterFunctionCount - 1)(rng_));
        if (f.filter_function == FilterFunction::StartsWith || f.filter_function == FilterFunction::EndsWith) {
            f.literal_data_type = DataType::String;
        } else {
            std::vector<DataType> present;
            for (std::size_t t = 0; t < kDataTypeCount; ++t)
                if (in.types[t] > 0) present.push_back(static_cast<DataType>(t));
            f.literal_data_type = pick(present, rng_);
        }
        f.selectivity = uniform(cfg_.selectivity_min, cfg_.selectivity_max, rng_);
        return add(std::move(op), {in.tail}, in.width, in.types);
    }

    Stream join(const Stream& a, const Stream& b) {
        OperatorNode op{next_id("join"), OperatorKind::WindowedJoin, {}};
        auto& f = op.features;
        f.tuple_width_in = 0.5 * (a.width + b.width);
        f.tuple_width_out = a.width + b.width;
        f.join_key_data_type =
            static_cast<DataType>(std::uniform_int_distribution<std::size_t>(0, kDataTypeCount - 1)(rng_));
        if (cfg_.join_selectivity_log_uniform) {
            f.selectivity = std::exp(uniform(std::log(cfg_.join_selectivity_min), std::log(cfg_.selectivity_max), rng_));
        } else {
            f.selectivity = uniform(cfg_.selectivity_min, cfg_.selectivity_max, rng_);
        }
        f.window = window();
        std::array<int, kDataTypeCount> types{};
        for (std::size_t t = 0; t < kDataTypeCount; ++t) types[t] = a.types[t] + b.types[t];
        return add(std::move(op), {a.tail, b.tail}, a.width + b.width, types);
    }

    Stream aggregation(const Stream& in) {
        OperatorNode op{next_id("agg"), OperatorKind::WindowedAggregation, {}};
        auto& f = op.features;
        f.agg_function =
            static_cast<AggFunction>(std::uniform_int_distribution<std::size_t>(0, kAggFunctionCount - 1)(rng_));
        f.group_by_data_type =
            static_cast<GroupByType>(std::uniform_int_distribution<std::size_t>(0, kGroupByTypeCount - 1)(rng_));
        f.agg_data_type = static_cast<DataType>(std::uniform_int_distribution<std::size_t>(0, kDataTypeCount - 1)(rng_));
        f.selectivity = uniform(cfg_.selectivity_min, cfg_.selectivity_max, rng_);
        f.window = window();
        std::array<int, kDataTypeCount> types{};
        ++types[static_cast<std::size_t>(f.agg_data_type)];
        if (f.group_by_data_type != GroupByType::None) ++types[static_cast<std::size_t>(f.group_by_data_type)];
        const int width = f.group_by_data_type == GroupByType::None ? 1 : 2;
        f.tuple_width_in = in.width;
        f.tuple_width_out = width;
        return add(std::move(op), {in.tail}, width, types);
    }

    void sink(const Stream& in) {
        OperatorNode op{"sink", OperatorKind::Sink, {}};
        op.features.tuple_width_in = op.features.tuple_width_out = in.width;
        add(std::move(op), {in.tail}, in.width, in.types);
    }

    QueryGraph take() { return std::move(q_); }

  private:
    WindowSpec window() {
        WindowSpec w;
        w.type = std::uniform_int_distribution<int>(0, 1)(rng_) == 0 ? WindowType::Sliding : WindowType::Tumbling;
        w.policy = std::uniform_int_distribution<int>(0, 1)(rng_) == 0 ? WindowPolicy::Count : WindowPolicy::Time;
        w.size = pick(w.policy == WindowPolicy::Count ? cfg_.window_count : cfg_.window_time, rng_);
        if (w.type == WindowType::Sliding) w.slide = uniform(cfg_.slide_min, cfg_.slide_max, rng_) * w.size;
        return w;
    }

    std::string next_id(const std::string& prefix) { return prefix + std::to_string(++counters_[prefix]); }

    Stream add(OperatorNode op, const std::vector<std::string>& inputs, int width,
               const std::array<int, kDataTypeCount>& types) {
        for (const auto& from : inputs) q_.edges.push_back({from, op.id});
        Stream s{op.id, width, types};
        q_.operators.push_back(std::move(op));
        return s;
    }

    const GenConfig& cfg_;
    std::mt19937_64& rng_;
    QueryGraph q_;
    std::map<std::string, int> counters_;
};

// Filter slots: at most one filter per slot, so filters never form a series.
std::vector<char> choose_slots(std::size_t slots, std::size_t filters, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(slots);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<char> chosen(slots, 0);
    filters = std::min(filters, slots);
    for (std::size_t i = 0; i < filters; ++i) {
        const auto j = std::uniform_int_distribution<std::size_t>(i, slots - 1)(rng);
        std::swap(idx[i], idx[j]);
        chosen[idx[i]] = 1;
    }
    return chosen;
}

}  // namespace

Family sample_family(const GenConfig& cfg, std::mt19937_64& rng) {
    return static_cast<Family>(pick_weighted(cfg.family_mix, rng));
}

QueryGraph sample_query(const GenConfig& cfg, std::mt19937_64& rng, Family family, const TemplateChoice& choice) {
    const std::size_t filters = choice.filters ? *choice.filters : pick_weighted(cfg.filter_count_mix, rng) + 1;
    const bool agg = choice.aggregation ? *choice.aggregation
                                        : std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.agg_probability;
    Builder b(cfg, rng);
    using Stream = Builder::Stream;
    auto maybe_filter = [&b](const Stream& s, bool yes) { return yes ? b.filter(s) : s; };

    Stream tail;
    std::vector<char> slots;
    switch (family) {
        case Family::Linear: {
            slots = choose_slots(agg ? 2 : 1, filters, rng);
            tail = maybe_filter(b.source(cfg.rate_linear), slots[0]);
            break;
        }
        case Family::TwoWay: {
            slots = choose_slots(agg ? 4 : 3, filters, rng);
            const Stream l = maybe_filter(b.source(cfg.rate_two_way), slots[0]);
            const Stream r = maybe_filter(b.source(cfg.rate_two_way), slots[1]);
            tail = maybe_filter(b.join(l, r), slots[2]);
            break;
        }
        case Family::ThreeWay: {
            slots = choose_slots(agg ? 6 : 5, filters, rng);
            const Stream s1 = maybe_filter(b.source(cfg.rate_three_way), slots[0]);
            const Stream s2 = maybe_filter(b.source(cfg.rate_three_way), slots[1]);
            const Stream j1 = maybe_filter(b.join(s1, s2), slots[2]);
            const Stream s3 = maybe_filter(b.source(cfg.rate_three_way), slots[3]);
            tail = maybe_filter(b.join(j1, s3), slots[4]);
            break;
        }
    }
    if (agg) tail = maybe_filter(b.aggregation(tail), slots.back());
    b.sink(tail);
    return b.take();
}

QueryGraph sample_query(const GenConfig& cfg, std::mt19937_64& rng) {
    const Family f = sample_family(cfg, rng);
    return sample_query(cfg, rng, f);
}

QueryGraph sample_filter_chain(const GenConfig& cfg, std::size_t k, std::mt19937_64& rng) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "a filter chain needs at least one filter");
    Builder b(cfg, rng);
    auto tail = b.source(cfg.rate_linear);
    for (std::size_t i = 0; i < k; ++i) tail = b.filter(tail);
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.agg_probability) tail = b.aggregation(tail);
    b.sink(tail);
    return b.take();
}

std::vector<HardwareNode> sample_hardware(const GenConfig& cfg, std::mt19937_64& rng, std::size_t count) {
    std::vector<HardwareNode> hw;
    for (std::size_t i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "host%02zu", i);
        HardwareNode h;
        h.id = id;
        h.cpu = pick(cfg.hardware.cpu, rng);
        h.ram = pick(cfg.hardware.ram, rng);
        h.net_bandwidth = pick(cfg.hardware.bandwidth, rng);
        h.net_latency = pick(cfg.hardware.latency, rng);
        hw.push_back(std::move(h));
    }
    return hw;
}

Dataset make_dataset(const GenConfig& cfg, const DatasetSpec& spec) {
    cfg.validate();
    if (spec.count == 0) throw Error(ErrorCode::InvalidArgument, "dataset count must be positive");

    // Split assignment: a seeded permutation of query indices.
    std::vector<Split> split(spec.count, Split::Extra);
    if (spec.split) {
        std::vector<std::size_t> perm(spec.count);
        std::iota(perm.begin(), perm.end(), 0);
        auto rng = item_rng(cfg.seed, 0xFFFFFFFFFFFFFFFFULL);
        for (std::size_t i = spec.count; i-- > 1;)
            std::swap(perm[i], perm[std::uniform_int_distribution<std::size_t>(0, i)(rng)]);
        const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * spec.count + 1e-9));
        const auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * spec.count + 1e-9));
        for (std::size_t r = 0; r < spec.count; ++r)
            split[perm[r]] = r < n_train ? Split::Train : (r < n_train + n_val ? Split::Validation : Split::Test);
    }

    Dataset ds;
    std::map<std::string, json> ids_by_split;
    std::map<std::string, std::size_t> families;
    for (std::size_t i = 0; i < spec.count; ++i) {
        auto rng = item_rng(cfg.seed, i);
        QueryGraph q;
        std::string family;
        if (spec.chain_length) {
            q = sample_filter_chain(cfg, *spec.chain_length, rng);
            family = "filter_chain_" + std::to_string(*spec.chain_length);
        } else {
            const Family f = spec.family ? *spec.family : sample_family(cfg, rng);
            q = sample_query(cfg, rng, f);
            family = to_string(f);
        }
        const auto hw = sample_hardware(cfg, rng, cfg.hosts_per_query.value_or(q.operators.size()));
        const auto placement = enumerate_candidates(q, hw, 1, rng, cfg.bins).front();

        Example e;
        char qid[32];
        std::snprintf(qid, sizeof qid, "q%06zu", i);
        e.query_id = qid;
        e.id = e.query_id + "/p0";
        e.family = family;
        e.split = split[i];
        e.graph = build_joint_graph(q, hw, placement);
        if (spec.label) {
            SimConfig sim = cfg.sim;
            sim.rng_seed = rng();
            e.label = simulate(e.graph, sim);
        }
        ids_by_split[to_string(e.split)].push_back(e.query_id);
        ++families[family];
        ds.examples.push_back(std::move(e));
    }

    json counts = json::object();
    for (const auto& [name, ids] : ids_by_split) counts[name] = ids.size();
    ds.manifest = json{{"v", kJsonlVersion},
                       {"kind", "dataset"},
                       {"config", cfg},
                       {"config_hash", config_hash(cfg)},
                       {"spec",
                        {{"count", spec.count},
                         {"family", spec.family ? json(to_string(*spec.family)) : json(nullptr)},
                         {"chain_length", spec.chain_length ? json(*spec.chain_length) : json(nullptr)},
                         {"split", spec.split},
                         {"label", spec.label}}},
                       {"families", families},
                       {"split_counts", counts},
                       {"split_query_ids", ids_by_split}};
    return ds;
}

std::vector<Example> balanced_subset(const std::vector<Example>& examples, Metric m, std::uint64_t seed) {
    if (!is_binary(m)) throw Error(ErrorCode::InvalidArgument, "balancing needs a binary metric");
    std::array<std::vector<std::size_t>, 2> cls;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (!examples[i].label) continue;
        const auto v = metric_value(*examples[i].label, m);
        if (v) cls[*v >= 0.5 ? 1 : 0].push_back(i);
    }
    const std::size_t minority = std::min(cls[0].size(), cls[1].size());
    auto& major = cls[0].size() > cls[1].size() ? cls[0] : cls[1];
    auto rng = item_rng(seed, 0xBA1A);
    for (std::size_t i = 0; i < minority; ++i)
        std::swap(major[i], major[std::uniform_int_distribution<std::size_t>(i, major.size() - 1)(rng)]);
    major.resize(minority);
    std::vector<std::size_t> keep = cls[0];
    keep.insert(keep.end(), cls[1].begin(), cls[1].end());
    std::sort(keep.begin(), keep.end());
    std::vector<Example> out;
    for (auto i : keep) out.push_back(examples[i]);
    return out;
}

}  // namespace streamcost
