#include "drm/config_io.hpp"

#include "drm/errors.hpp"

#include <fstream>
#include <random>
#include <set>

namespace drm {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known)
{
    for (const auto& [key, _] : obj.items())
        if (!known.contains(key))
            throw InvalidConfig(where.empty() ? key : where + "." + key, "unknown field");
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& path, T fallback)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidConfig(path, "has the wrong type");
    }
}

template <class T>
T require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.contains(key))
        throw InvalidConfig(path, "is required");
    return get<T>(obj, key, path, T{});
}

void require_number(const json& obj, const std::string& key, const std::string& path)
{
    if (obj.contains(key) && !obj.at(key).is_null() && !obj.at(key).is_number())
        throw InvalidConfig(path, "must be a number");
}

} // namespace

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InvalidConfig(assignment, "override must look like path.to.field=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw InvalidConfig(path, "empty path segment");
        json* child = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (const std::exception&) {
                throw InvalidConfig(path, "array segment must be an index");
            }
            if (idx >= node->size())
                throw InvalidConfig(path, "array index out of range");
            child = &(*node)[idx];
        } else {
            if (!node->is_object() && !node->is_null())
                throw InvalidConfig(path, "cannot descend into a scalar");
            child = &(*node)[key];
        }
        if (dot == std::string::npos) {
            *child = value;
            return;
        }
        node = child;
        start = dot + 1;
    }
}

std::vector<ConsumerParams> generate_population(int n, double a_lo, double a_hi, double d_lo, double d_hi,
                                                double noise_sd, std::uint64_t seed)
{
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> a_dist(a_lo, a_hi);
    std::uniform_real_distribution<double> d_dist(d_lo, d_hi);
    std::vector<ConsumerParams> out;
    for (int i = 0; i < n; ++i) {
        ConsumerParams p;
        p.a = a_dist(engine);
        p.d = d_dist(engine);
        p.noise_sd = noise_sd;
        p.id = i + 1;
        out.push_back(p);
    }
    return out;
}

SimulationConfig parse_config(const json& doc)
{
    if (!doc.is_object())
        throw InvalidConfig("(root)", "config must be a JSON object");
    reject_unknown(doc, "", {"schema_version", "market", "consumers", "population", "consumer_policy", "so_policy",
                             "seed", "n_replications", "counterfactual"});
    const int version = get<int>(doc, "schema_version", "schema_version", config_schema_version);
    if (version != config_schema_version)
        throw InvalidConfig("schema_version", "unsupported schema version " + std::to_string(version));

    SimulationConfig config;

    if (!doc.contains("market") || !doc.at("market").is_object())
        throw InvalidConfig("market", "is required and must be an object");
    const json& market = doc.at("market");
    reject_unknown(market, "market", {"p0", "c", "delta_p", "m", "T", "n_consumers", "b_init", "clamp_nonneg"});
    for (const char* key : {"p0", "c", "delta_p", "b_init"})
        require_number(market, key, std::string("market.") + key);
    config.market.p0 = get<double>(market, "p0", "market.p0", 1.0);
    config.market.c = require<double>(market, "c", "market.c");
    config.market.delta_p = require<double>(market, "delta_p", "market.delta_p");
    config.market.m = get<int>(market, "m", "market.m", 0);
    config.market.T = require<int>(market, "T", "market.T");
    config.market.b_init = get<double>(market, "b_init", "market.b_init", 0.0);
    config.market.clamp_nonneg = get<bool>(market, "clamp_nonneg", "market.clamp_nonneg", false);

    const bool explicit_consumers = doc.contains("consumers");
    if (explicit_consumers == doc.contains("population"))
        throw InvalidConfig("consumers", "give exactly one of consumers or population");
    if (explicit_consumers) {
        const json& list = doc.at("consumers");
        if (!list.is_array() || list.empty())
            throw InvalidConfig("consumers", "must be a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string prefix = "consumers[" + std::to_string(i) + "].";
            const json& item = list[i];
            if (!item.is_object())
                throw InvalidConfig("consumers[" + std::to_string(i) + "]", "must be an object");
            reject_unknown(item, "consumers[" + std::to_string(i) + "]", {"a", "d", "noise_sd"});
            for (const char* key : {"a", "d", "noise_sd"})
                require_number(item, key, prefix + key);
            ConsumerParams p;
            p.a = require<double>(item, "a", prefix + "a");
            p.d = require<double>(item, "d", prefix + "d");
            p.noise_sd = get<double>(item, "noise_sd", prefix + "noise_sd", 0.0);
            p.id = static_cast<int>(i) + 1;
            config.consumers.push_back(p);
        }
    } else {
        const json& pop = doc.at("population");
        reject_unknown(pop, "population", {"n", "a_range", "d_range", "noise_sd", "seed"});
        const int n = require<int>(pop, "n", "population.n");
        if (n < 1)
            throw InvalidConfig("population.n", "need at least one consumer");
        const auto a_range = require<std::vector<double>>(pop, "a_range", "population.a_range");
        const auto d_range = require<std::vector<double>>(pop, "d_range", "population.d_range");
        if (a_range.size() != 2 || !(a_range[0] <= a_range[1]))
            throw InvalidConfig("population.a_range", "must be [lo, hi] with lo <= hi");
        if (d_range.size() != 2 || !(d_range[0] <= d_range[1]))
            throw InvalidConfig("population.d_range", "must be [lo, hi] with lo <= hi");
        config.consumers = generate_population(n, a_range[0], a_range[1], d_range[0], d_range[1],
                                               get<double>(pop, "noise_sd", "population.noise_sd", 0.0),
                                               get<std::uint64_t>(pop, "seed", "population.seed", 42));
    }
    const int n_consumers = static_cast<int>(config.consumers.size());
    config.market.n_consumers = get<int>(market, "n_consumers", "market.n_consumers", n_consumers);

    const std::string consumer_policy = get<std::string>(doc, "consumer_policy", "consumer_policy", "strategic");
    if (consumer_policy == "strategic")
        config.consumer_policy = ConsumerKind::strategic;
    else if (consumer_policy == "myopic")
        config.consumer_policy = ConsumerKind::myopic;
    else
        throw InvalidConfig("consumer_policy", "must be strategic or myopic");

    if (doc.contains("so_policy")) {
        const json& so = doc.at("so_policy");
        reject_unknown(so, "so_policy", {"kind", "n_explore"});
        const std::string kind = get<std::string>(so, "kind", "so_policy.kind", "ol-drm");
        if (kind == "ol-drm")
            config.so_policy.kind = SoKind::ol_drm;
        else if (kind == "averaging-etc")
            config.so_policy.kind = SoKind::averaging_etc;
        else
            throw InvalidConfig("so_policy.kind", "must be ol-drm or averaging-etc");
        config.so_policy.n_explore = get<int>(so, "n_explore", "so_policy.n_explore", 0);
        if (config.so_policy.n_explore < 0)
            throw InvalidConfig("so_policy.n_explore", "must be >= 0 (0 selects the default)");
    }

    config.seed = get<std::uint64_t>(doc, "seed", "seed", 42);
    config.n_replications = get<int>(doc, "n_replications", "n_replications", 200);

    if (doc.contains("counterfactual")) {
        const json& cf = doc.at("counterfactual");
        reject_unknown(cf, "counterfactual", {"fixed_price", "oracle_baselines", "pay_upfront"});
        require_number(cf, "fixed_price", "counterfactual.fixed_price");
        if (cf.contains("fixed_price") && !cf.at("fixed_price").is_null())
            config.counterfactual.fixed_price = cf.at("fixed_price").get<double>();
        config.counterfactual.oracle_baselines =
            get<bool>(cf, "oracle_baselines", "counterfactual.oracle_baselines", false);
        config.counterfactual.pay_upfront = get<bool>(cf, "pay_upfront", "counterfactual.pay_upfront", true);
    }

    validate(config);
    return config;
}

SimulationConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("(file)", "cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidConfig("(file)", std::string("malformed JSON: ") + e.what());
    }
    for (const auto& o : overrides)
        apply_override(doc, o);
    return parse_config(doc);
}

json to_json(const SimulationConfig& config)
{
    json doc;
    doc["schema_version"] = config_schema_version;
    const MarketConfig& m = config.market;
    doc["market"] = {{"p0", m.p0},         {"c", m.c}, {"delta_p", m.delta_p},           {"m", m.m},
                     {"T", m.T},           {"n_consumers", m.n_consumers},
                     {"b_init", m.b_init}, {"clamp_nonneg", m.clamp_nonneg}};
    doc["consumers"] = json::array();
    for (const auto& p : config.consumers)
        doc["consumers"].push_back({{"a", p.a}, {"d", p.d}, {"noise_sd", p.noise_sd}});
    doc["consumer_policy"] = config.consumer_policy == ConsumerKind::strategic ? "strategic" : "myopic";
    doc["so_policy"] = {{"kind", to_string(config.so_policy.kind)}, {"n_explore", config.so_policy.n_explore}};
    doc["seed"] = config.seed;
    doc["n_replications"] = config.n_replications;
    doc["counterfactual"] = {{"fixed_price", config.counterfactual.fixed_price
                                                 ? json(*config.counterfactual.fixed_price)
                                                 : json(nullptr)},
                             {"oracle_baselines", config.counterfactual.oracle_baselines},
                             {"pay_upfront", config.counterfactual.pay_upfront}};
    return doc;
}

SimulationConfig standard_config(int T)
{
    SimulationConfig config;
    config.market.p0 = 1.0;
    config.market.c = 2.0;
    config.market.delta_p = 0.5;
    config.market.m = 3;
    config.market.T = T;
    config.market.n_consumers = 5;
    config.consumers = generate_population(5, 2.0, 4.0, 1.0, 3.0, 0.1, 42);
    config.consumer_policy = ConsumerKind::strategic;
    config.so_policy = {SoKind::ol_drm, 0};
    config.seed = 42;
    config.n_replications = 200;
    return config;
}

} // namespace drm
