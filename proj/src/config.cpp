#include "pursuit/config.hpp"

#include <fstream>
#include <stdexcept>

namespace pursuit {

nlohmann::json to_json(const RunConfig& cfg) {
    const auto& e = cfg.env;
    const auto& t = cfg.train;
    return {
        {"rl_speeds", e.rl_speeds},
        {"rl_turns", e.rl_turns},
        {"gs_speed", e.gs_speed},
        {"gs_turn_limit", e.gs_turn_limit},
        {"targeting_range", e.targeting.range},
        {"targeting_angle", e.targeting.angle},
        {"dt", e.dt},
        {"max_steps", e.max_steps},
        {"init_pos_stddev", e.init_pos_stddev},
        {"gamma", t.gamma},
        {"batch_size", t.batch_size},
        {"learning_rate", t.learning_rate},
        {"weight_decay", t.weight_decay},
        {"final_epsilon", t.final_epsilon},
        {"epsilon_decay_frames", t.epsilon_decay_frames},
        {"warmup_frames", t.warmup_frames},
        {"target_sync_frames", t.target_sync_frames},
        {"test_every_frames", t.test_every_frames},
        {"max_frames", t.max_frames},
        {"buffer_size", t.buffer_capacity},
        {"seed", t.seed},
        {"stop_on_perfect", t.stop_on_perfect},
        {"out_dir", cfg.out_dir},
        {"checkpoint", cfg.checkpoint},
        {"export_trajectories", cfg.export_trajectories},
    };
}

void apply_json(RunConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("config: top level must be a JSON object");
    }
    auto& e = cfg.env;
    auto& t = cfg.train;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "rl_speeds") value.get_to(e.rl_speeds);
            else if (key == "rl_turns") value.get_to(e.rl_turns);
            else if (key == "gs_speed") value.get_to(e.gs_speed);
            else if (key == "gs_turn_limit") value.get_to(e.gs_turn_limit);
            else if (key == "targeting_range") value.get_to(e.targeting.range);
            else if (key == "targeting_angle") value.get_to(e.targeting.angle);
            else if (key == "dt") value.get_to(e.dt);
            else if (key == "max_steps") value.get_to(e.max_steps);
            else if (key == "init_pos_stddev") value.get_to(e.init_pos_stddev);
            else if (key == "gamma") value.get_to(t.gamma);
            else if (key == "batch_size") value.get_to(t.batch_size);
            else if (key == "learning_rate") value.get_to(t.learning_rate);
            else if (key == "weight_decay") value.get_to(t.weight_decay);
            else if (key == "final_epsilon") value.get_to(t.final_epsilon);
            else if (key == "epsilon_decay_frames") value.get_to(t.epsilon_decay_frames);
            else if (key == "warmup_frames") value.get_to(t.warmup_frames);
            else if (key == "target_sync_frames") value.get_to(t.target_sync_frames);
            else if (key == "test_every_frames") value.get_to(t.test_every_frames);
            else if (key == "max_frames") value.get_to(t.max_frames);
            else if (key == "buffer_size") value.get_to(t.buffer_capacity);
            else if (key == "seed") value.get_to(t.seed);
            else if (key == "stop_on_perfect") value.get_to(t.stop_on_perfect);
            else if (key == "out_dir") value.get_to(cfg.out_dir);
            else if (key == "checkpoint") value.get_to(cfg.checkpoint);
            else if (key == "export_trajectories") value.get_to(cfg.export_trajectories);
            else throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& ex) {
            throw std::invalid_argument("config: bad value for '" + key + "': " + ex.what());
        }
    }
}

nlohmann::json read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot read config file " + path);
    }
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error("config file " + path + " is not valid JSON: " + ex.what());
    }
}

}  // namespace pursuit
