#include "pursuit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "pursuit/config.hpp"
#include "pursuit/dqn.hpp"
#include "pursuit/eval.hpp"
#include "pursuit/nn.hpp"

namespace pursuit::cli {

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> max_frames;
    std::optional<std::int64_t> test_every;
    std::optional<std::int64_t> epsilon_decay_frames;
    std::optional<double> lr;
    std::optional<double> gamma;
    std::optional<int> batch_size;
    std::optional<std::size_t> buffer_size;
    std::optional<double> weight_decay;
    std::optional<std::int64_t> target_sync;
    std::optional<std::int64_t> warmup;
    std::optional<std::string> checkpoint;
    std::optional<int> case_id;
    std::optional<std::string> cases;
    std::optional<std::string> init;
    bool export_trajectories{false};
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file (flat keys)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Run seed");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (o.config) {
        apply_json(cfg, read_config_file(*o.config));
    }
    auto& t = cfg.train;
    if (o.out) cfg.out_dir = *o.out;
    if (o.seed) t.seed = *o.seed;
    if (o.max_frames) t.max_frames = *o.max_frames;
    if (o.test_every) t.test_every_frames = *o.test_every;
    if (o.epsilon_decay_frames) t.epsilon_decay_frames = *o.epsilon_decay_frames;
    if (o.lr) t.learning_rate = *o.lr;
    if (o.gamma) t.gamma = *o.gamma;
    if (o.batch_size) t.batch_size = *o.batch_size;
    if (o.buffer_size) t.buffer_capacity = *o.buffer_size;
    if (o.weight_decay) t.weight_decay = *o.weight_decay;
    if (o.target_sync) t.target_sync_frames = *o.target_sync;
    if (o.warmup) t.warmup_frames = *o.warmup;
    if (o.checkpoint) cfg.checkpoint = *o.checkpoint;
    if (o.export_trajectories) cfg.export_trajectories = true;
    cfg.env.validate();
    t.validate();
    return cfg;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + cfg.out_dir);
    }
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return os;
}

void echo_config(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const auto doc = to_json(cfg);
    out << "effective config: " << doc.dump() << '\n';
    open_out(dir / "effective_config.json") << doc.dump(2) << '\n';
}

std::string checkpoint_name(std::int64_t frame) {
    return "checkpoint_" + std::to_string(frame) + ".json";
}

int cmd_train(const Overrides& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    const fs::path dir = prepare_out_dir(cfg);
    echo_config(cfg, dir, out);

    dqn::Trainer trainer(cfg.env, cfg.train);
    trainer.set_test_callback([&](const dqn::TestRecord& rec, const eval::EvalReport&, const nn::QNetwork& net) {
        out << "frame " << rec.frame << ": wins " << rec.wins << '/' << rec.suite_size << std::endl;
        nn::save_checkpoint((dir / checkpoint_name(rec.frame)).string(), net, cfg.train.seed, rec.frame);
    });
    trainer.run();

    nn::save_checkpoint((dir / checkpoint_name(trainer.frame())).string(), trainer.online_net(), cfg.train.seed,
                        trainer.frame());
    nn::save_checkpoint((dir / "checkpoint_final.json").string(), trainer.online_net(), cfg.train.seed,
                        trainer.frame());
    {
        auto os = open_out(dir / "train_log.csv");
        dqn::write_train_log_csv(os, trainer.log());
    }
    {
        auto os = open_out(dir / "test_log.csv");
        dqn::write_test_log_csv(os, trainer.log());
    }
    out << "frames: " << trainer.frame() << ", episodes: " << trainer.log().episodes.size()
        << (trainer.reached_perfect() ? ", reached 80/80" : ", did not reach 80/80") << '\n';
    return trainer.reached_perfect() ? kExitOk : kExitNotPerfect;
}

std::vector<int> parse_case_list(const std::string& list) {
    std::vector<int> ids;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int id = std::stoi(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument("bad case id '" + item + "'");
        }
        ids.push_back(id);
    }
    return ids;
}

eval::TestCase lookup_case(const std::vector<eval::TestCase>& suite, int id) {
    if (id < 0 || id >= static_cast<int>(suite.size())) {
        throw std::out_of_range("case id " + std::to_string(id) + " outside 0.." + std::to_string(suite.size() - 1));
    }
    return suite[static_cast<std::size_t>(id)];
}

void write_trajectory(const fs::path& path, const std::vector<TrajectoryRow>& rows) {
    auto os = open_out(path);
    write_trajectory_csv(os, rows);
}

nn::QNetwork load_net(const RunConfig& cfg) {
    if (cfg.checkpoint.empty()) {
        throw std::invalid_argument("--checkpoint is required");
    }
    return nn::load_checkpoint(cfg.checkpoint).net;
}

int cmd_evaluate(const Overrides& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    const nn::QNetwork net = load_net(cfg);
    const auto full = eval::build_suite();
    std::vector<eval::TestCase> suite;
    if (o.cases) {
        for (int id : parse_case_list(*o.cases)) suite.push_back(lookup_case(full, id));
    } else if (o.case_id) {
        suite.push_back(lookup_case(full, *o.case_id));
    } else {
        suite = full;
    }
    const fs::path dir = prepare_out_dir(cfg);

    const eval::EvalReport report = eval::evaluate(net, suite, cfg.env);
    open_out(dir / "eval_report.json") << eval::to_json(report).dump(2) << '\n';
    if (cfg.export_trajectories) {
        for (const auto& tc : suite) {
            write_trajectory(dir / ("traj_" + std::to_string(tc.id) + ".csv"),
                             eval::run_greedy_episode(net, tc.init, cfg.env, tc.id).rows);
        }
    }
    out << "wins: " << report.wins << '/' << suite.size() << '\n'
        << "losses: " << report.losses << ", mutual: " << report.mutual << ", timeouts: " << report.timeouts << '\n'
        << "mean win length: " << report.mean_win_length << '\n';
    return kExitOk;
}

WorldState parse_init(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        v.push_back(std::stod(item));
    }
    if (v.size() != 3 && v.size() != 6) {
        throw std::invalid_argument("--init expects rl_x,rl_y,rl_heading[,gs_x,gs_y,gs_heading]");
    }
    WorldState s{make_pose(v[0], v[1], v[2]), Pose{}, 0};
    if (v.size() == 6) {
        s.gs = make_pose(v[3], v[4], v[5]);
    }
    return s;
}

int cmd_rollout(const Overrides& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    const nn::QNetwork net = load_net(cfg);
    WorldState init;
    std::string name;
    std::int64_t episode_id = 0;
    if (o.init) {
        init = parse_init(*o.init);
        name = "custom";
    } else if (o.case_id) {
        init = lookup_case(eval::build_suite(), *o.case_id).init;
        name = std::to_string(*o.case_id);
        episode_id = *o.case_id;
    } else {
        throw std::invalid_argument("rollout needs --case N or --init");
    }
    const fs::path dir = prepare_out_dir(cfg);
    const eval::Episode ep = eval::run_greedy_episode(net, init, cfg.env, episode_id);
    write_trajectory(dir / ("traj_" + name + ".csv"), ep.rows);
    out << "verdict: " << to_string(ep.verdict) << '\n' << "length: " << ep.length << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pursuit-evasion deep Q-learning against a greedy shooter", "pursuit"};
    app.require_subcommand(1);
    Overrides o;

    auto* train = app.add_subcommand("train", "Train a Q-network, testing every --test-every frames");
    add_common(train, o);
    train->add_option("--max-frames", o.max_frames);
    train->add_option("--test-every", o.test_every);
    train->add_option("--epsilon-decay-frames", o.epsilon_decay_frames);
    train->add_option("--lr", o.lr);
    train->add_option("--gamma", o.gamma);
    train->add_option("--batch-size", o.batch_size);
    train->add_option("--buffer-size", o.buffer_size);
    train->add_option("--weight-decay", o.weight_decay);
    train->add_option("--target-sync", o.target_sync);
    train->add_option("--warmup", o.warmup);

    auto* evaluate = app.add_subcommand("evaluate", "Greedy evaluation on the fixed test suite");
    add_common(evaluate, o);
    evaluate->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON");
    evaluate->add_option("--case", o.case_id, "Single case id");
    evaluate->add_option("--cases", o.cases, "Comma-separated case ids");
    evaluate->add_flag("--export-trajectories", o.export_trajectories, "Write traj_<id>.csv per case");

    auto* rollout = app.add_subcommand("rollout", "Play one greedy episode and export its trajectory");
    add_common(rollout, o);
    rollout->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON");
    rollout->add_option("--case", o.case_id, "Suite case id");
    rollout->add_option("--init", o.init, "Custom start: rl_x,rl_y,rl_heading[,gs_x,gs_y,gs_heading]");
    rollout->add_flag("--export-trajectories", o.export_trajectories, "Accepted for symmetry with evaluate");

    std::vector<const char*> argv{"pursuit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (train->parsed()) return cmd_train(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (rollout->parsed()) return cmd_rollout(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace pursuit::cli
