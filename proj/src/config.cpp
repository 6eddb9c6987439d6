#include "smw/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <type_traits>

#include "smw/error.hpp"
#include "smw/io.hpp"

namespace smw {

namespace {

using nlohmann::json;

// Reads the fields of one JSON object and rejects any key nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(ErrorCode::kConfig, where() + " must be an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) fail(ErrorCode::kConfig, "unknown key " + child(key));
        }
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
            if (!j_.at(key).is_number_unsigned()) {
                fail(ErrorCode::kConfig, child(key) + " must be a non-negative integer");
            }
        }
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(ErrorCode::kConfig, child(key) + " has the wrong type");
        }
    }

    void get(const char* key, Point2& out) {
        std::vector<double> v{out.x, out.y};
        get(key, v);
        if (v.size() != 2) fail(ErrorCode::kConfig, child(key) + " must be [x, y]");
        out = {v[0], v[1]};
    }

    void get(const char* key, Interval& out) {
        std::vector<double> v{out.lower, out.upper};
        get(key, v);
        if (v.size() != 2) fail(ErrorCode::kConfig, child(key) + " must be [lower, upper]");
        out = {v[0], v[1]};
    }

    template <class F>
    void section(const char* key, F&& read) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        Section sub(j_.at(key), child(key));
        read(sub);
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::kConfig, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    {
        Section root(j, "");
        root.get("seed", cfg.seed);
        root.section("geometry", [&](Section& s) {
            std::vector<double> links{cfg.geometry.link_lengths[0], cfg.geometry.link_lengths[1]};
            s.get("link_lengths", links);
            check(links.size() == 2, "geometry.link_lengths must have two entries");
            cfg.geometry.link_lengths = {links[0], links[1]};
            s.get("base", cfg.geometry.base);
            if (const json* limits = s.raw("joint_limits")) {
                check(limits->is_array() && limits->size() == 2,
                      "geometry.joint_limits must be [[lo, hi], [lo, hi]]");
                for (std::size_t i = 0; i < 2; ++i) {
                    const auto& pair = (*limits)[i];
                    check(pair.is_array() && pair.size() == 2 && pair[0].is_number() && pair[1].is_number(),
                          "geometry.joint_limits must be [[lo, hi], [lo, hi]]");
                    cfg.geometry.joint_limits[i] = {pair[0].get<double>(), pair[1].get<double>()};
                }
            }
        });
        root.section("retina", [&](Section& s) {
            s.get("resolution", cfg.retina.resolution);
            s.get("window", cfg.retina.window);
            s.get("blob_sigma", cfg.retina.blob_sigma);
            s.get("sensor_noise_std", cfg.retina.sensor_noise_std);
        });
        root.section("basis", [&](Section& s) {
            s.get("theta1", cfg.basis.theta1);
            s.get("theta2", cfg.basis.theta2);
            s.get("n1", cfg.basis.n1);
            s.get("n2", cfg.basis.n2);
            s.get("stiffness", cfg.basis.stiffness);
        });
        if (const json* rest = root.raw("rest_posture")) {
            check(rest->is_array() && rest->size() == 2 && (*rest)[0].is_number() && (*rest)[1].is_number(),
                  "rest_posture must be [theta1, theta2]");
            cfg.rest_posture = {{(*rest)[0].get<double>(), (*rest)[1].get<double>()}};
        }
        if (const json* objects = root.raw("objects")) {
            check(objects->is_array(), "objects must be an array");
            for (std::size_t i = 0; i < objects->size(); ++i) {
                SceneObject obj;
                Section s((*objects)[i], "objects[" + std::to_string(i) + "]");
                s.get("position", obj.position);
                s.get("radius", obj.radius);
                s.get("intensity", obj.intensity);
                cfg.objects.push_back(obj);
            }
        }
        root.section("settle", [&](Section& s) {
            s.get("dt", cfg.settle_dt);
            s.get("horizon", cfg.settle_horizon);
        });
        root.section("babble", [&](Section& s) {
            s.get("arm_commands", cfg.babble.arm_commands);
            s.get("arm_count", cfg.babble.arm_count);
            s.get("fixation_center", cfg.babble.fixation_center);
            s.get("fixation_spacing", cfg.babble.fixation_spacing);
            s.get("fixation_nx", cfg.babble.fixation_nx);
            s.get("fixation_ny", cfg.babble.fixation_ny);
        });
        root.section("scaling", [&](Section& s) {
            s.get("resolutions", cfg.scaling.resolutions);
            s.get("full_displacement_set", cfg.scaling.full_displacement_set);
            s.get("toroidal", cfg.scaling.toroidal);
            s.get("coverage", cfg.scaling.coverage);
        });
        root.section("reach", [&](Section& s) {
            auto& r = cfg.reach;
            s.get("controller", r.controller);
            s.get("gain_scale", r.gain_scale);
            s.get("tilt", r.tilt);
            s.get("motor_noise_std", r.motor_noise_std);
            s.get("trials", r.trials);
            s.get("target", r.target);
            s.get("cerebellar", r.cerebellar);
            s.get("learning_rate", r.learning_rate);
            s.get("damping", r.damping);
            s.get("dt", r.dt);
            s.get("ballistic_steps", r.ballistic_steps);
            s.get("displacement_steps", r.displacement_steps);
            s.get("controller_gain", r.controller_gain);
            s.get("max_step", r.max_step);
        });
        root.section("em", [&](Section& s) {
            auto& e = cfg.em;
            s.get("states", e.states);
            s.get("episodes", e.episodes);
            s.get("episode_length", e.episode_length);
            s.get("iters", e.iters);
            s.get("alpha", e.alpha);
            s.get("switch_prob", e.switch_prob);
            s.get("observation_accuracy", e.observation_accuracy);
            s.get("init_observation_diag", e.init_observation_diag);
        });
        root.section("active", [&](Section& s) {
            s.get("policy", cfg.active.policy);
            s.get("steps", cfg.active.steps);
            s.get("accuracy", cfg.active.accuracy);
            s.get("certain_initial", cfg.active.certain_initial);
        });
    }
    return cfg;
}

void RunConfig::validate() const {
    auto wrap = [](const char* field, auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kConfig) throw;
            fail(ErrorCode::kConfig, std::string(field) + ": " + e.what());
        }
    };
    wrap("geometry", [&] { geometry.validate(); });
    wrap("retina", [&] { retina.validate(); });
    for (const auto& obj : objects) wrap("objects", [&] { obj.validate(); });

    check(basis.n1 >= 2 && basis.n2 >= 2, "basis.n1 and basis.n2 must be at least 2");
    check(basis.stiffness > 0.0 && finite(basis.stiffness), "basis.stiffness must be positive");
    check(basis.theta1.lower < basis.theta1.upper && basis.theta2.lower < basis.theta2.upper,
          "basis ranges must have lower < upper");
    check(settle_dt > 0.0 && finite(settle_dt), "settle.dt must be positive");
    check(settle_horizon >= settle_dt && finite(settle_horizon), "settle.horizon must be at least settle.dt");
    check(basis.stiffness * settle_dt < 2.0, "basis.stiffness * settle.dt must be below 2");

    check(babble.arm_commands == "vertices" || babble.arm_commands == "centroids",
          "babble.arm_commands must be vertices or centroids");
    check(babble.fixation_nx >= 1 && babble.fixation_ny >= 1, "babble fixation grid must be non-empty");
    check(babble.fixation_spacing >= 0.0 && finite(babble.fixation_spacing),
          "babble.fixation_spacing must be non-negative");

    check(scaling.resolutions.size() >= 3, "scaling.resolutions needs at least 3 entries");
    for (std::size_t n : scaling.resolutions) {
        check(n >= 4 && n <= 1024, "scaling.resolutions entries must lie in [4, 1024]");
    }
    check(scaling.coverage > 0.0 && scaling.coverage <= 1.0, "scaling.coverage must lie in (0, 1]");

    check(reach.controller == "ballistic" || reach.controller == "displacement",
          "reach.controller must be ballistic or displacement");
    check(reach.gain_scale > 0.0 && finite(reach.gain_scale), "reach.gain_scale must be positive");
    check(finite(reach.tilt), "reach.tilt must be finite");
    check(reach.motor_noise_std >= 0.0, "reach.motor_noise_std must be non-negative");
    check(reach.learning_rate > 0.0, "reach.learning_rate must be positive");
    check(reach.damping >= 0.0, "reach.damping must be non-negative");
    check(reach.dt > 0.0 && finite(reach.dt), "reach.dt must be positive");
    check(reach.controller_gain > 0.0, "reach.controller_gain must be positive");
    check(reach.max_step >= 0.0, "reach.max_step must be non-negative");
    check(basis.stiffness * reach.dt < 2.0, "basis.stiffness * reach.dt must be below 2");

    check(em.states >= 2, "em.states must be at least 2");
    check(em.episodes >= 1 && em.episode_length >= 1 && em.iters >= 1,
          "em.episodes, em.episode_length and em.iters must be positive");
    check(em.alpha >= 0.0, "em.alpha must be non-negative");
    check(em.switch_prob >= 0.0 && em.switch_prob <= 1.0, "em.switch_prob must lie in [0, 1]");
    check(em.observation_accuracy >= 0.0 && em.observation_accuracy <= 1.0,
          "em.observation_accuracy must lie in [0, 1]");
    check(em.init_observation_diag > 0.0 && em.init_observation_diag < 1.0,
          "em.init_observation_diag must lie in (0, 1)");

    check(active.policy == "infogain" || active.policy == "random", "active.policy must be infogain or random");
    check(active.accuracy >= 0.0 && active.accuracy <= 1.0, "active.accuracy must lie in [0, 1]");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        fail(ErrorCode::kConfig, "cannot read config file " + path.string());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kConfig, "config file " + path.string() + " is not valid JSON: " + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const Error& e) {
        fail(ErrorCode::kConfig, path.string() + ": " + e.what());
    }
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::size_t value = 0;
        const char* first = text.data() + start;
        const char* last = text.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || first == last) {
            fail(ErrorCode::kConfig, "expected a comma-separated list of integers, got '" + text + "'");
        }
        out.push_back(value);
        start = end + 1;
    }
    return out;
}

}  // namespace smw
