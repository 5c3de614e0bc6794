#include "oemarray/config_io.hpp"

#include <fstream>
#include <sstream>

#include "oemarray/errors.hpp"

namespace oem {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

LinewidthProfile linewidth_from_json(const json& j, const char* name) {
    if (j.is_number()) return LinewidthProfile::constant(j.get<double>());
    if (j.is_object()) return {j.at("start").get<double>(), j.at("end").get<double>()};
    throw ConfigError(std::string(name) + " must be a number or {\"start\", \"end\"}");
}

json linewidth_to_json(const LinewidthProfile& lw) {
    if (lw.start == lw.end) return lw.start;
    return {{"start", lw.start}, {"end", lw.end}};
}

ProfileKind kind_from_string(const std::string& s) {
    if (s == "linear") return ProfileKind::Linear;
    if (s == "tanh") return ProfileKind::Tanh;
    if (s == "explicit") return ProfileKind::Explicit;
    throw ConfigError("unknown profile kind '" + s + "'");
}

const char* kind_to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Linear: return "linear";
        case ProfileKind::Tanh: return "tanh";
        case ProfileKind::Explicit: return "explicit";
    }
    return "?";
}

}  // namespace

ArrayConfig config_from_json(const json& j) {
    ArrayConfig c;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        const auto version = j.value("schema_version", std::string(kSchemaVersion));
        if (version != kSchemaVersion)
            throw ConfigError("unsupported schema_version '" + version + "' (expected " +
                              std::string(kSchemaVersion) + ")");
        const auto n = j.at("n_sites").get<long long>();
        if (n < 1) throw ConfigError("n_sites must be >= 1");
        c.n_sites = static_cast<std::size_t>(n);
        c.kappa_ref = j.value("kappa_ref", 1.0);

        const json& p = j.at("profile");
        c.profile.kind = kind_from_string(p.at("kind").get<std::string>());
        if (c.profile.kind == ProfileKind::Explicit) {
            std::vector<std::pair<double, double>> vals;
            for (const auto& v : p.at("values")) vals.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            c.profile = CouplingProfile::explicit_sites(std::move(vals));
        } else {
            c.profile.g_bar1 = p.at("g_bar1").get<double>();
            c.profile.g_bar2 = p.value("g_bar2", c.profile.g_bar1);
            c.profile.beta = p.value("beta", 4.5);
        }
        if (j.contains("kappa1")) c.kappa1 = linewidth_from_json(j["kappa1"], "kappa1");
        if (j.contains("kappa2")) c.kappa2 = linewidth_from_json(j["kappa2"], "kappa2");
        c.gamma = j.value("gamma", 0.0);
        c.n_bar = j.value("n_bar", 0.0);
        if (j.contains("omega_m") && !j["omega_m"].is_null()) c.omega_m = j["omega_m"].get<double>();
        if (j.contains("loss")) {
            const json& l = j["loss"];
            c.loss.kappa_l_ratio = l.value("kappa_l_ratio", 0.0);
            c.loss.kappa_int = l.value("kappa_int", 0.0);
            c.loss.epsilon = l.value("epsilon", 0.0);
            c.loss.phase = l.value("phase", 0.0);
            c.loss.delay = l.value("delay", 0.0);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

json parse_json_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                          e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str());
}

ArrayConfig parse_config(std::string_view text) { return config_from_json(parse_json_text(text)); }

ArrayConfig load_config(const std::string& path) { return config_from_json(load_json_file(path)); }

json config_to_json(const ArrayConfig& c) {
    json p = {{"kind", kind_to_string(c.profile.kind)}};
    if (c.profile.kind == ProfileKind::Explicit) {
        json vals = json::array();
        for (const auto& [a, b] : c.profile.explicit_values) vals.push_back({a, b});
        p["values"] = vals;
    } else {
        p["g_bar1"] = c.profile.g_bar1;
        p["g_bar2"] = c.profile.g_bar2;
        p["beta"] = c.profile.beta;
    }
    json j = {
        {"schema_version", std::string(kSchemaVersion)},
        {"kappa_ref", c.kappa_ref},
        {"n_sites", c.n_sites},
        {"profile", p},
        {"kappa1", linewidth_to_json(c.kappa1)},
        {"kappa2", linewidth_to_json(c.kappa2)},
        {"gamma", c.gamma},
        {"n_bar", c.n_bar},
        {"loss",
         {{"kappa_l_ratio", c.loss.kappa_l_ratio},
          {"kappa_int", c.loss.kappa_int},
          {"epsilon", c.loss.epsilon},
          {"phase", c.loss.phase},
          {"delay", c.loss.delay}}},
    };
    if (c.omega_m) j["omega_m"] = *c.omega_m;
    return j;
}

}  // namespace oem
