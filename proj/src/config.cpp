#include "ida/config.hpp"

#include "ida/errors.hpp"

#include <fstream>
#include <set>

namespace ida {

using nlohmann::json;

namespace {

json pool_init_to_json(const PoolInit& p) {
    return json{{"symbol", p.symbol},
                {"inventory", p.inventory},
                {"lp_inventory", p.lp_inventory},
                {"collateral_long", p.collateral_long},
                {"collateral_short", p.collateral_short},
                {"coll_rate", p.coll_rate},
                {"price", p.price},
                {"depth_slope", p.depth_slope},
                {"drift", p.drift},
                {"volatility", p.volatility},
                {"jump_intensity", p.jump_intensity},
                {"jump_mean", p.jump_mean},
                {"jump_sigma", p.jump_sigma}};
}

json scripted_to_json(const ScriptedTrade& t) {
    return json{{"epoch", t.epoch},
                {"pool", t.pool},
                {"side", t.side == TradeSide::buy ? "buy" : "sell"},
                {"nominal", t.nominal}};
}

} // namespace

nlohmann::json config_to_json(const ScenarioConfig& c) {
    json assets = json::array();
    for (const auto& a : c.assets) assets.push_back(pool_init_to_json(a));
    json scripted = json::array();
    for (const auto& t : c.scripted) scripted.push_back(scripted_to_json(t));

    return json{
        {"seed", c.seed},
        {"horizon", c.horizon},
        {"assets", assets},
        {"policy",
         {{"target_util", c.policy.target_util},
          {"fee_treasury_share", c.policy.fee_treasury_share},
          {"collateral_scope",
           c.policy.collateral_scope == CollateralScope::all_pools ? "all_pools"
                                                                   : "positive_oi_only"},
          {"fee",
           {{"theta_0", c.policy.fee.theta_0},
            {"theta_floor", c.policy.fee.theta_floor},
            {"d_impact", c.policy.fee.d_impact},
            {"theta_cap", c.policy.fee.theta_cap}}},
          {"pmo",
           {{"m_threshold", c.policy.pmo.m_threshold},
            {"n_wait_epochs", c.policy.pmo.n_wait_epochs},
            {"t0_rounds", c.policy.pmo.t0_rounds},
            {"k_scale", c.policy.pmo.k_scale},
            {"variant",
             c.policy.pmo.variant == PMOParams::Variant::polynomial ? "polynomial" : "logistic"},
            {"logistic_a", c.policy.pmo.logistic_a},
            {"logistic_b", c.policy.pmo.logistic_b}}},
          {"lever",
           {{"delta_no_min", c.policy.lever.delta_no_min},
            {"delta_no_max", c.policy.lever.delta_no_max},
            {"delta_mn_min", c.policy.lever.delta_mn_min},
            {"delta_mn_max", c.policy.lever.delta_mn_max},
            {"l_gain", c.policy.lever.l_gain},
            {"k_exp", c.policy.lever.k_exp},
            {"j_gain", c.policy.lever.j_gain},
            {"d_exp", c.policy.lever.d_exp},
            {"beta_blend", c.policy.lever.beta_blend},
            {"variance_window", c.policy.lever.variance_window},
            {"mode", c.policy.lever.mode == LeverParams::Mode::verbatim ? "verbatim" : "distance"}}},
          {"corr_adjust",
           {{"alpha_pos_g0", c.policy.corr_adjust.alpha_pos_g0},
            {"alpha_pos_g1", c.policy.corr_adjust.alpha_pos_g1},
            {"alpha_neg_g0", c.policy.corr_adjust.alpha_neg_g0},
            {"alpha_neg_g1", c.policy.corr_adjust.alpha_neg_g1},
            {"corr_beta", c.policy.corr_adjust.corr_beta},
            {"corr_gamma", c.policy.corr_adjust.corr_gamma},
            {"corr_phi", c.policy.corr_adjust.corr_phi},
            {"tan_guard", c.policy.corr_adjust.tan_guard}}},
          {"es",
           {{"alpha_conf", c.policy.es.alpha_conf},
            {"es_cap", c.policy.es.es_cap},
            {"sample_count", c.policy.es.sample_count},
            {"horizon", c.policy.es.horizon},
            {"scale_es_lo", c.policy.es.scale_es_lo},
            {"scale_es_hi", c.policy.es.scale_es_hi},
            {"scale_max", c.policy.es.scale_max}}}}},
        {"agents",
         {{"traders",
           {{"enabled", c.traders.enabled},
            {"buy_volume", c.traders.buy_volume},
            {"sell_volume", c.traders.sell_volume},
            {"volume_sigma", c.traders.volume_sigma},
            {"elasticity", c.traders.elasticity}}},
          {"plp", {{"enabled", c.plp.enabled}, {"flow_scale", c.plp.flow_scale}}},
          {"slp",
           {{"enabled", c.slp.enabled},
            {"response_gain", c.slp.response_gain},
            {"vol_window", c.slp.vol_window},
            {"noise_scale", c.slp.noise_scale}}},
          {"hoarders",
           {{"population", c.hoarders.population},
            {"hold_utility", c.hoarders.hold_utility},
            {"hold_utility_spread", c.hoarders.hold_utility_spread},
            {"sell_utility", c.hoarders.sell_utility},
            {"cost_expectation_gain", c.hoarders.cost_expectation_gain},
            {"ida_share", c.hoarders.ida_share}}},
          {"scripted", scripted}}},
        {"auction",
         {{"enabled", c.auction.enabled},
          {"trigger_epochs", c.auction.trigger_epochs},
          {"premium_rate", c.auction.premium_rate},
          {"fill_fraction", c.auction.fill_fraction},
          {"gate_epochs", c.auction.gate_epochs}}},
        {"initial",
         {{"treasury_share", c.initial.treasury_share},
          {"rebalancer_share", c.initial.rebalancer_share}}},
        {"optimize_refresh", c.optimize_refresh},
        {"du_source", c.du_source == ScenarioConfig::DuSource::optimizer ? "optimizer"
                                                                         : "correlation"},
        {"corr_window", c.corr_window},
        {"corr_file", c.corr_file},
        {"search",
         {{"c_points", c.search.c_points},
          {"c_lo_mult", c.search.c_lo_mult},
          {"c_hi_mult", c.search.c_hi_mult},
          {"du_points", c.search.du_points},
          {"du_lo", c.search.du_lo},
          {"du_hi", c.search.du_hi},
          {"mode",
           c.search.mode == SearchConfig::Mode::automatic
               ? "auto"
               : (c.search.mode == SearchConfig::Mode::exhaustive ? "exhaustive" : "coordinate")},
          {"exhaustive_limit", c.search.exhaustive_limit},
          {"max_sweeps", c.search.max_sweeps}}}};
}

nlohmann::json config_defaults() { return config_to_json(ScenarioConfig{}); }

namespace {

// Schema templates for array elements.
const json& asset_schema() {
    static const json s = pool_init_to_json(PoolInit{});
    return s;
}
const json& scripted_schema() {
    static const json s = scripted_to_json(ScriptedTrade{});
    return s;
}

void merge_checked(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) {
        raise(ErrCode::config_error, "expected object at " + (path.empty() ? "<root>" : path));
    }
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) raise(ErrCode::config_error, "unknown config key: " + here);
        json& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_checked(slot, value, here);
        } else if (slot.is_array() && value.is_array()) {
            // Arrays replace wholesale; object elements are checked against
            // their schema template.
            const json* schema = nullptr;
            if (here == "assets") schema = &asset_schema();
            if (here == "agents.scripted") schema = &scripted_schema();
            json merged = json::array();
            for (size_t i = 0; i < value.size(); ++i) {
                if (schema) {
                    json element = *schema;
                    merge_checked(element, value[i], here + "." + std::to_string(i));
                    merged.push_back(element);
                } else {
                    merged.push_back(value[i]);
                }
            }
            slot = merged;
        } else if (slot.type() == value.type() ||
                   (slot.is_number() && value.is_number())) {
            slot = value;
        } else {
            raise(ErrCode::config_error, "type mismatch at " + here);
        }
    }
}

} // namespace

nlohmann::json merge_config(const nlohmann::json& user) {
    json resolved = config_defaults();
    merge_checked(resolved, user, "");
    return resolved;
}

void apply_override(nlohmann::json& resolved, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        raise(ErrCode::config_error, "override must look like key.path=value: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw; // plain string
    }

    json* node = &resolved;
    size_t start = 0;
    std::vector<std::string> segments;
    while (start <= path.size()) {
        const size_t dot = path.find('.', start);
        segments.push_back(path.substr(start, dot == std::string::npos ? dot : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (size_t i = 0; i < segments.size(); ++i) {
        const std::string& seg = segments[i];
        const bool last = i + 1 == segments.size();
        if (node->is_array()) {
            size_t index = 0;
            try {
                index = std::stoul(seg);
            } catch (const std::exception&) {
                raise(ErrCode::config_error, "expected array index at '" + seg + "' in " + path);
            }
            if (index >= node->size())
                raise(ErrCode::config_error, "array index out of range in override: " + path);
            node = &(*node)[index];
        } else if (node->is_object()) {
            if (!node->contains(seg))
                raise(ErrCode::config_error, "unknown config key in override: " + path);
            node = &(*node)[seg];
        } else {
            raise(ErrCode::config_error, "override path descends into a scalar: " + path);
        }
        if (last) {
            if (node->is_object() || node->is_array())
                raise(ErrCode::config_error, "override target is not a scalar: " + path);
            if (node->is_string() && !value.is_string()) value = raw;
            *node = value;
        }
    }
}

namespace {

TradeSide side_from_string(const std::string& s, const std::string& path) {
    if (s == "buy") return TradeSide::buy;
    if (s == "sell") return TradeSide::sell;
    raise(ErrCode::config_error, path + " must be buy or sell");
}

} // namespace

ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig c;
    c.seed = j.at("seed").get<uint64_t>();
    c.horizon = j.at("horizon").get<int64_t>();
    c.assets.clear();
    for (const auto& ja : j.at("assets")) {
        PoolInit p;
        p.symbol = ja.at("symbol").get<std::string>();
        p.inventory = ja.at("inventory").get<double>();
        p.lp_inventory = ja.at("lp_inventory").get<double>();
        p.collateral_long = ja.at("collateral_long").get<double>();
        p.collateral_short = ja.at("collateral_short").get<double>();
        p.coll_rate = ja.at("coll_rate").get<double>();
        p.price = ja.at("price").get<double>();
        p.depth_slope = ja.at("depth_slope").get<double>();
        p.drift = ja.at("drift").get<double>();
        p.volatility = ja.at("volatility").get<double>();
        p.jump_intensity = ja.at("jump_intensity").get<double>();
        p.jump_mean = ja.at("jump_mean").get<double>();
        p.jump_sigma = ja.at("jump_sigma").get<double>();
        c.assets.push_back(p);
    }

    const json& pol = j.at("policy");
    c.policy.target_util = pol.at("target_util").get<double>();
    c.policy.fee_treasury_share = pol.at("fee_treasury_share").get<double>();
    const std::string scope = pol.at("collateral_scope").get<std::string>();
    if (scope == "all_pools")
        c.policy.collateral_scope = CollateralScope::all_pools;
    else if (scope == "positive_oi_only")
        c.policy.collateral_scope = CollateralScope::positive_oi_only;
    else
        raise(ErrCode::config_error, "policy.collateral_scope must be all_pools|positive_oi_only");

    const json& fee = pol.at("fee");
    c.policy.fee.theta_0 = fee.at("theta_0").get<double>();
    c.policy.fee.theta_floor = fee.at("theta_floor").get<double>();
    c.policy.fee.d_impact = fee.at("d_impact").get<double>();
    c.policy.fee.theta_cap = fee.at("theta_cap").get<double>();

    const json& pmo = pol.at("pmo");
    c.policy.pmo.m_threshold = pmo.at("m_threshold").get<double>();
    c.policy.pmo.n_wait_epochs = pmo.at("n_wait_epochs").get<int>();
    c.policy.pmo.t0_rounds = pmo.at("t0_rounds").get<int>();
    c.policy.pmo.k_scale = pmo.at("k_scale").get<double>();
    const std::string variant = pmo.at("variant").get<std::string>();
    if (variant == "polynomial")
        c.policy.pmo.variant = PMOParams::Variant::polynomial;
    else if (variant == "logistic")
        c.policy.pmo.variant = PMOParams::Variant::logistic;
    else
        raise(ErrCode::config_error, "policy.pmo.variant must be polynomial|logistic");
    c.policy.pmo.logistic_a = pmo.at("logistic_a").get<double>();
    c.policy.pmo.logistic_b = pmo.at("logistic_b").get<double>();

    const json& lever = pol.at("lever");
    c.policy.lever.delta_no_min = lever.at("delta_no_min").get<double>();
    c.policy.lever.delta_no_max = lever.at("delta_no_max").get<double>();
    c.policy.lever.delta_mn_min = lever.at("delta_mn_min").get<double>();
    c.policy.lever.delta_mn_max = lever.at("delta_mn_max").get<double>();
    c.policy.lever.l_gain = lever.at("l_gain").get<double>();
    c.policy.lever.k_exp = lever.at("k_exp").get<double>();
    c.policy.lever.j_gain = lever.at("j_gain").get<double>();
    c.policy.lever.d_exp = lever.at("d_exp").get<double>();
    c.policy.lever.beta_blend = lever.at("beta_blend").get<double>();
    c.policy.lever.variance_window = lever.at("variance_window").get<int>();
    const std::string mode = lever.at("mode").get<std::string>();
    if (mode == "verbatim")
        c.policy.lever.mode = LeverParams::Mode::verbatim;
    else if (mode == "distance")
        c.policy.lever.mode = LeverParams::Mode::distance;
    else
        raise(ErrCode::config_error, "policy.lever.mode must be verbatim|distance");

    const json& ca = pol.at("corr_adjust");
    c.policy.corr_adjust.alpha_pos_g0 = ca.at("alpha_pos_g0").get<double>();
    c.policy.corr_adjust.alpha_pos_g1 = ca.at("alpha_pos_g1").get<double>();
    c.policy.corr_adjust.alpha_neg_g0 = ca.at("alpha_neg_g0").get<double>();
    c.policy.corr_adjust.alpha_neg_g1 = ca.at("alpha_neg_g1").get<double>();
    c.policy.corr_adjust.corr_beta = ca.at("corr_beta").get<double>();
    c.policy.corr_adjust.corr_gamma = ca.at("corr_gamma").get<double>();
    c.policy.corr_adjust.corr_phi = ca.at("corr_phi").get<double>();
    c.policy.corr_adjust.tan_guard = ca.at("tan_guard").get<double>();

    const json& es = pol.at("es");
    c.policy.es.alpha_conf = es.at("alpha_conf").get<double>();
    c.policy.es.es_cap = es.at("es_cap").get<double>();
    c.policy.es.sample_count = es.at("sample_count").get<int>();
    c.policy.es.horizon = es.at("horizon").get<int>();
    c.policy.es.scale_es_lo = es.at("scale_es_lo").get<double>();
    c.policy.es.scale_es_hi = es.at("scale_es_hi").get<double>();
    c.policy.es.scale_max = es.at("scale_max").get<double>();

    const json& agents = j.at("agents");
    const json& traders = agents.at("traders");
    c.traders.enabled = traders.at("enabled").get<bool>();
    c.traders.buy_volume = traders.at("buy_volume").get<double>();
    c.traders.sell_volume = traders.at("sell_volume").get<double>();
    c.traders.volume_sigma = traders.at("volume_sigma").get<double>();
    c.traders.elasticity = traders.at("elasticity").get<double>();
    c.plp.enabled = agents.at("plp").at("enabled").get<bool>();
    c.plp.flow_scale = agents.at("plp").at("flow_scale").get<double>();
    const json& slp = agents.at("slp");
    c.slp.enabled = slp.at("enabled").get<bool>();
    c.slp.response_gain = slp.at("response_gain").get<double>();
    c.slp.vol_window = slp.at("vol_window").get<int>();
    c.slp.noise_scale = slp.at("noise_scale").get<double>();
    const json& hoarders = agents.at("hoarders");
    c.hoarders.population = hoarders.at("population").get<int>();
    c.hoarders.hold_utility = hoarders.at("hold_utility").get<double>();
    c.hoarders.hold_utility_spread = hoarders.at("hold_utility_spread").get<double>();
    c.hoarders.sell_utility = hoarders.at("sell_utility").get<double>();
    c.hoarders.cost_expectation_gain = hoarders.at("cost_expectation_gain").get<double>();
    c.hoarders.ida_share = hoarders.at("ida_share").get<double>();
    c.scripted.clear();
    for (const auto& jt : agents.at("scripted")) {
        ScriptedTrade t;
        t.epoch = jt.at("epoch").get<int64_t>();
        t.pool = jt.at("pool").get<std::string>();
        t.side = side_from_string(jt.at("side").get<std::string>(), "agents.scripted.side");
        t.nominal = jt.at("nominal").get<double>();
        c.scripted.push_back(t);
    }

    const json& auction = j.at("auction");
    c.auction.enabled = auction.at("enabled").get<bool>();
    c.auction.trigger_epochs = auction.at("trigger_epochs").get<int>();
    c.auction.premium_rate = auction.at("premium_rate").get<double>();
    c.auction.fill_fraction = auction.at("fill_fraction").get<double>();
    c.auction.gate_epochs = auction.at("gate_epochs").get<int>();

    c.initial.treasury_share = j.at("initial").at("treasury_share").get<double>();
    c.initial.rebalancer_share = j.at("initial").at("rebalancer_share").get<double>();
    c.optimize_refresh = j.at("optimize_refresh").get<int>();
    const std::string du_source = j.at("du_source").get<std::string>();
    if (du_source == "optimizer")
        c.du_source = ScenarioConfig::DuSource::optimizer;
    else if (du_source == "correlation")
        c.du_source = ScenarioConfig::DuSource::correlation;
    else
        raise(ErrCode::config_error, "du_source must be optimizer|correlation");
    c.corr_window = j.at("corr_window").get<int>();
    c.corr_file = j.at("corr_file").get<std::string>();

    const json& search = j.at("search");
    c.search.c_points = search.at("c_points").get<int>();
    c.search.c_lo_mult = search.at("c_lo_mult").get<double>();
    c.search.c_hi_mult = search.at("c_hi_mult").get<double>();
    c.search.du_points = search.at("du_points").get<int>();
    c.search.du_lo = search.at("du_lo").get<double>();
    c.search.du_hi = search.at("du_hi").get<double>();
    const std::string smode = search.at("mode").get<std::string>();
    if (smode == "auto")
        c.search.mode = SearchConfig::Mode::automatic;
    else if (smode == "exhaustive")
        c.search.mode = SearchConfig::Mode::exhaustive;
    else if (smode == "coordinate")
        c.search.mode = SearchConfig::Mode::coordinate;
    else
        raise(ErrCode::config_error, "search.mode must be auto|exhaustive|coordinate");
    c.search.exhaustive_limit = search.at("exhaustive_limit").get<long>();
    c.search.max_sweeps = search.at("max_sweeps").get<int>();

    return c;
}

void ScenarioConfig::validate() const {
    if (horizon < 1) raise(ErrCode::config_error, "horizon must be >= 1");
    if (assets.empty()) raise(ErrCode::config_error, "assets must be nonempty");
    std::set<std::string> symbols;
    for (size_t i = 0; i < assets.size(); ++i) {
        const auto& a = assets[i];
        const std::string at = "assets." + std::to_string(i);
        if (a.symbol.empty()) raise(ErrCode::config_error, at + ".symbol must be nonempty");
        if (!symbols.insert(a.symbol).second)
            raise(ErrCode::config_error, at + ".symbol duplicates " + a.symbol);
        if (a.inventory < 0.0 || a.lp_inventory < 0.0)
            raise(ErrCode::config_error, at + " inventories must be >= 0");
        if (!(a.collateral_long > 0.0))
            raise(ErrCode::config_error, at + ".collateral_long must be positive");
        if (a.collateral_short < 0.0)
            raise(ErrCode::config_error, at + ".collateral_short must be >= 0");
        if (!(a.coll_rate > 0.0 && a.coll_rate <= 1.0))
            raise(ErrCode::config_error, at + ".coll_rate must be in (0, 1]");
        if (!(a.price > 0.0)) raise(ErrCode::config_error, at + ".price must be positive");
        if (a.depth_slope < 0.0)
            raise(ErrCode::config_error, at + ".depth_slope must be >= 0");
        if (a.volatility < 0.0 || a.jump_intensity < 0.0 || a.jump_sigma < 0.0)
            raise(ErrCode::config_error, at + " price dynamics must be >= 0");
    }
    if (!(policy.target_util > 0.0 && policy.target_util < 1.0))
        raise(ErrCode::config_error, "policy.target_util must be in (0, 1)");
    if (!(policy.fee_treasury_share >= 0.0 && policy.fee_treasury_share <= 1.0))
        raise(ErrCode::config_error, "policy.fee_treasury_share must be in [0, 1]");
    policy.fee.validate();
    policy.pmo.validate();
    policy.lever.validate();
    policy.corr_adjust.validate();
    policy.es.validate();
    search.validate();
    if (traders.volume_sigma < 0.0 || traders.buy_volume < 0.0 || traders.sell_volume < 0.0)
        raise(ErrCode::config_error, "agents.traders volumes must be >= 0");
    if (slp.enabled && slp.vol_window < 2)
        raise(ErrCode::config_error, "agents.slp.vol_window must be >= 2");
    if (hoarders.population < 0)
        raise(ErrCode::config_error, "agents.hoarders.population must be >= 0");
    if (hoarders.ida_share < 0.0 || initial.treasury_share < 0.0 ||
        initial.rebalancer_share < 0.0)
        raise(ErrCode::config_error, "initial shares must be >= 0");
    if (hoarders.ida_share + initial.treasury_share + initial.rebalancer_share > 1.0)
        raise(ErrCode::config_error, "initial shares must sum to <= 1");
    if (auction.trigger_epochs < 1)
        raise(ErrCode::config_error, "auction.trigger_epochs must be >= 1");
    if (auction.fill_fraction < 0.0 || auction.fill_fraction > 1.0)
        raise(ErrCode::config_error, "auction.fill_fraction must be in [0, 1]");
    if (optimize_refresh < 0)
        raise(ErrCode::config_error, "optimize_refresh must be >= 0");
    if (corr_window < 2) raise(ErrCode::config_error, "corr_window must be >= 2");
    for (size_t i = 0; i < scripted.size(); ++i) {
        if (!symbols.count(scripted[i].pool))
            raise(ErrCode::config_error,
                  "agents.scripted." + std::to_string(i) + " references unknown pool");
        if (scripted[i].nominal < 0.0)
            raise(ErrCode::config_error,
                  "agents.scripted." + std::to_string(i) + ".nominal must be >= 0");
    }
}

PriceModel ScenarioConfig::price_model() const {
    PriceModel m;
    for (const auto& a : assets)
        m.assets.push_back(
            AssetPriceModel{a.drift, a.volatility, a.jump_intensity, a.jump_mean, a.jump_sigma});
    return m;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) raise(ErrCode::config_error, "cannot open config file: " + path);
    json user;
    try {
        user = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrCode::config_error, "config parse failure in " + path + ": " + e.what());
    }
    json resolved = merge_config(user);
    for (const auto& o : overrides) apply_override(resolved, o);
    ScenarioConfig config = config_from_json(resolved);
    config.validate();
    return config;
}

} // namespace ida
