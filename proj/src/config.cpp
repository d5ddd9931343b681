#include "sdn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sdn {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad(where, "unknown key '" + it.key() + "'");
}

Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) bad(where, "expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Directivity parse_directivity(const json& j, const std::string& where, Vec3& axis) {
    reject_unknown(j, where, {"kind", "a", "axis", "table"});
    Directivity d;
    const std::string kind = j.value("kind", "omni");
    if (kind == "omni") {
        d.kind = Directivity::Kind::Omni;
    } else if (kind == "cardioid") {
        d.kind = Directivity::Kind::Cardioid;
        d.cardioid_a = j.value("a", 0.5);
    } else if (kind == "tabulated") {
        d.kind = Directivity::Kind::Tabulated;
        if (!j.contains("table") || !j["table"].is_array() || j["table"].empty())
            bad(where, "tabulated directivity needs a table of [theta, gain] pairs");
        for (const auto& row : j["table"]) {
            if (!row.is_array() || row.size() != 2) bad(where, "table rows are [theta, gain]");
            d.table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    } else {
        bad(where, "kind must be omni, cardioid or tabulated");
    }
    if (j.contains("axis")) axis = parse_vec3(j["axis"], where + ".axis").normalized();
    return d;
}

json directivity_json(const Directivity& d, const Vec3& axis) {
    json j;
    switch (d.kind) {
        case Directivity::Kind::Omni:
            j["kind"] = "omni";
            break;
        case Directivity::Kind::Cardioid:
            j["kind"] = "cardioid";
            j["a"] = d.cardioid_a;
            break;
        case Directivity::Kind::Tabulated: {
            j["kind"] = "tabulated";
            json table = json::array();
            for (const auto& [theta, gain] : d.table) table.push_back({theta, gain});
            j["table"] = table;
            break;
        }
    }
    j["axis"] = vec3_json(axis);
    return j;
}

} // namespace

ToolkitConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown(root, "top level",
                   {"scene", "matrix", "render", "analysis"});

    ToolkitConfig cfg;

    if (root.contains("scene")) {
        const json& s = root["scene"];
        reject_unknown(s, "scene",
                       {"room", "source", "mic", "absorption", "sample_rate", "sound_speed",
                        "direct_path"});
        if (s.contains("room")) cfg.scene.room_dims = parse_vec3(s["room"], "scene.room");
        if (s.contains("source")) {
            const json& src = s["source"];
            reject_unknown(src, "scene.source", {"position", "directivity"});
            if (src.contains("position"))
                cfg.scene.source_pos = parse_vec3(src["position"], "scene.source.position");
            if (src.contains("directivity"))
                cfg.scene.source_dir = parse_directivity(src["directivity"],
                                                         "scene.source.directivity",
                                                         cfg.scene.source_axis);
        }
        if (s.contains("mic")) {
            const json& mic = s["mic"];
            reject_unknown(mic, "scene.mic", {"position", "directivity"});
            if (mic.contains("position"))
                cfg.scene.mic_pos = parse_vec3(mic["position"], "scene.mic.position");
            if (mic.contains("directivity"))
                cfg.scene.mic_dir = parse_directivity(mic["directivity"],
                                                      "scene.mic.directivity",
                                                      cfg.scene.mic_axis);
        }
        if (s.contains("absorption")) {
            const json& ab = s["absorption"];
            reject_unknown(ab, "scene.absorption", {"alpha", "filter", "negative_beta"});
            if (ab.contains("alpha")) {
                const json& a = ab["alpha"];
                if (a.is_number()) {
                    cfg.scene.wall_alpha.fill(a.get<double>());
                } else if (a.is_array() && a.size() == kNumWalls) {
                    for (int w = 0; w < kNumWalls; ++w)
                        cfg.scene.wall_alpha[w] = a[w].get<double>();
                } else {
                    bad("scene.absorption.alpha", "expected a number or an array of 6");
                }
            }
            if (ab.contains("filter")) {
                const json& f = ab["filter"];
                reject_unknown(f, "scene.absorption.filter", {"b", "a"});
                IirCoeffs c;
                c.b = f.value("b", std::vector<double>{1.0});
                c.a = f.value("a", std::vector<double>{1.0});
                if (c.b.empty() || c.a.empty() || c.a[0] == 0.0)
                    bad("scene.absorption.filter", "b and a must be nonempty, a[0] nonzero");
                cfg.scene.wall_filter = std::move(c);
            }
            cfg.scene.negative_beta = ab.value("negative_beta", false);
        }
        cfg.scene.sample_rate = s.value("sample_rate", cfg.scene.sample_rate);
        cfg.scene.sound_speed = s.value("sound_speed", cfg.scene.sound_speed);
        cfg.scene.direct_path_enabled = s.value("direct_path", cfg.scene.direct_path_enabled);
    }

    if (root.contains("matrix")) {
        const json& m = root["matrix"];
        reject_unknown(m, "matrix", {"kind", "seed", "admittance"});
        if (m.contains("kind")) {
            auto kind = parse_matrix_kind(m["kind"].get<std::string>());
            if (!kind)
                bad("matrix.kind",
                    "must be isotropic, householder, orthogonal, permutation or circulant");
            cfg.matrix_kind = *kind;
        }
        cfg.seed = m.value("seed", cfg.seed);
        if (m.contains("admittance")) {
            const json& y = m["admittance"];
            if (!y.is_array() || y.empty()) bad("matrix.admittance", "expected an array");
            Eigen::VectorXd v(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) v[static_cast<Eigen::Index>(i)] =
                y[i].get<double>();
            cfg.admittance = std::move(v);
        }
    }

    if (root.contains("render")) {
        const json& r = root["render"];
        reject_unknown(r, "render", {"duration_s", "air_absorption"});
        cfg.duration_s = r.value("duration_s", cfg.duration_s);
        if (r.contains("air_absorption")) {
            const json& a = r["air_absorption"];
            reject_unknown(a, "render.air_absorption", {"enabled", "coeff"});
            cfg.air.enabled = a.value("enabled", false);
            cfg.air.coeff = a.value("coeff", 0.0);
            if (cfg.air.coeff < 0.0 || cfg.air.coeff >= 1.0)
                bad("render.air_absorption.coeff", "must be in [0, 1)");
        }
    }

    if (root.contains("analysis")) {
        const json& a = root["analysis"];
        reject_unknown(a, "analysis", {"ned_window_s", "ned_hop_s", "t60_fit_hi_db",
                                       "t60_fit_lo_db"});
        cfg.ned_window_s = a.value("ned_window_s", cfg.ned_window_s);
        cfg.ned_hop_s = a.value("ned_hop_s", cfg.ned_hop_s);
        cfg.t60_fit_hi_db = a.value("t60_fit_hi_db", cfg.t60_fit_hi_db);
        cfg.t60_fit_lo_db = a.value("t60_fit_lo_db", cfg.t60_fit_lo_db);
    }

    return cfg;
}

ToolkitConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ToolkitConfig& cfg) {
    json root;
    json scene;
    scene["room"] = vec3_json(cfg.scene.room_dims);
    scene["source"] = {{"position", vec3_json(cfg.scene.source_pos)},
                       {"directivity", directivity_json(cfg.scene.source_dir,
                                                        cfg.scene.source_axis)}};
    scene["mic"] = {{"position", vec3_json(cfg.scene.mic_pos)},
                    {"directivity", directivity_json(cfg.scene.mic_dir, cfg.scene.mic_axis)}};
    json absorption;
    bool uniform = true;
    for (int w = 1; w < kNumWalls; ++w)
        uniform &= cfg.scene.wall_alpha[w] == cfg.scene.wall_alpha[0];
    if (uniform)
        absorption["alpha"] = cfg.scene.wall_alpha[0];
    else
        absorption["alpha"] = cfg.scene.wall_alpha;
    if (cfg.scene.wall_filter)
        absorption["filter"] = {{"b", cfg.scene.wall_filter->b}, {"a", cfg.scene.wall_filter->a}};
    absorption["negative_beta"] = cfg.scene.negative_beta;
    scene["absorption"] = absorption;
    scene["sample_rate"] = cfg.scene.sample_rate;
    scene["sound_speed"] = cfg.scene.sound_speed;
    scene["direct_path"] = cfg.scene.direct_path_enabled;
    root["scene"] = scene;

    json matrix;
    matrix["kind"] = matrix_kind_name(cfg.matrix_kind);
    matrix["seed"] = cfg.seed;
    if (cfg.admittance) {
        std::vector<double> y(cfg.admittance->data(),
                              cfg.admittance->data() + cfg.admittance->size());
        matrix["admittance"] = y;
    }
    root["matrix"] = matrix;

    root["render"] = {{"duration_s", cfg.duration_s},
                      {"air_absorption", {{"enabled", cfg.air.enabled}, {"coeff", cfg.air.coeff}}}};
    root["analysis"] = {{"ned_window_s", cfg.ned_window_s},
                        {"ned_hop_s", cfg.ned_hop_s},
                        {"t60_fit_hi_db", cfg.t60_fit_hi_db},
                        {"t60_fit_lo_db", cfg.t60_fit_lo_db}};
    return root.dump(2) + "\n";
}

void save_config(const std::string& path, const ToolkitConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << serialize_config(cfg);
}

bool config_equal(const ToolkitConfig& a, const ToolkitConfig& b) {
    auto dir_equal = [](const Directivity& x, const Directivity& y) {
        return x.kind == y.kind && x.cardioid_a == y.cardioid_a && x.table == y.table;
    };
    auto filt_equal = [](const std::optional<IirCoeffs>& x, const std::optional<IirCoeffs>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x || (x->b == y->b && x->a == y->a);
    };
    auto adm_equal = [](const std::optional<Eigen::VectorXd>& x,
                        const std::optional<Eigen::VectorXd>& y) {
        if (x.has_value() != y.has_value()) return false;
        return !x || (x->size() == y->size() && *x == *y);
    };
    return a.scene.room_dims == b.scene.room_dims && a.scene.source_pos == b.scene.source_pos &&
           a.scene.mic_pos == b.scene.mic_pos && a.scene.source_axis == b.scene.source_axis &&
           a.scene.mic_axis == b.scene.mic_axis &&
           dir_equal(a.scene.source_dir, b.scene.source_dir) &&
           dir_equal(a.scene.mic_dir, b.scene.mic_dir) &&
           a.scene.wall_alpha == b.scene.wall_alpha &&
           filt_equal(a.scene.wall_filter, b.scene.wall_filter) &&
           a.scene.negative_beta == b.scene.negative_beta &&
           a.scene.sample_rate == b.scene.sample_rate &&
           a.scene.sound_speed == b.scene.sound_speed &&
           a.scene.direct_path_enabled == b.scene.direct_path_enabled &&
           a.matrix_kind == b.matrix_kind && a.seed == b.seed &&
           adm_equal(a.admittance, b.admittance) && a.air.enabled == b.air.enabled &&
           a.air.coeff == b.air.coeff && a.duration_s == b.duration_s &&
           a.ned_window_s == b.ned_window_s && a.ned_hop_s == b.ned_hop_s &&
           a.t60_fit_hi_db == b.t60_fit_hi_db && a.t60_fit_lo_db == b.t60_fit_lo_db;
}

} // namespace sdn
