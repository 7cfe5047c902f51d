#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "rwre/errors.hpp"
#include "rwre/sweep.hpp"

namespace rwre::cli
{
namespace
{

using nlohmann::json;

[[noreturn]] void field_error(const std::string& key, const std::string& what)
{
    throw DomainError("config field '" + key + "': " + what);
}

template<class T>
T get_as(const json& j, const std::string& key, const char* expected)
{
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        field_error(key, std::string("expected ") + expected);
    }
}

template<class T>
void read_opt(const json& j, const std::string& key, T& dst, const char* expected)
{
    if (j.contains(key) && !j.at(key).is_null())
        dst = get_as<T>(j, key, expected);
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        "command",     "dim",         "n",           "replicas",   "seed",
        "epsilon",     "epsilon_grid", "alpha",      "xi",         "iid_support",
        "face",        "kappa",       "y",           "y_grid",     "grid_points",
        "seeds",       "out",         "memory_budget", "common_noise", "theta",
        "resamples",   "extrapolate", "threads"};
    return keys;
}

void require_positive(const std::string& key, long long v, long long lo)
{
    if (v < lo)
        field_error(key, "must be >= " + std::to_string(lo));
}

}  // namespace

RunConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw DomainError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known_keys().count(key))
            field_error(key, "unknown key");

    RunConfig cfg;
    if (!j.contains("command"))
        field_error("command", "missing");
    cfg.command = get_as<std::string>(j, "command", "a string");
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
        field_error("command", "unknown command '" + cfg.command + "'");

    // No wall-clock fallback exists for the seed.
    if (!j.contains("seed"))
        field_error("seed", "missing (seeds are mandatory)");
    cfg.seed = get_as<std::uint64_t>(j, "seed", "a nonnegative integer");

    read_opt(j, "dim", cfg.dim, "an integer");
    if (cfg.dim < 1 || cfg.dim > kMaxDim)
        field_error("dim", "must be in [1, " + std::to_string(kMaxDim) + "]");
    read_opt(j, "n", cfg.n, "an integer");
    read_opt(j, "replicas", cfg.replicas, "an integer");
    read_opt(j, "epsilon", cfg.epsilon, "a number");
    if (!(cfg.epsilon >= 0 && cfg.epsilon < 1))
        field_error("epsilon", "must lie in [0, 1)");

    if (j.contains("epsilon_grid"))
    {
        const auto& g = j.at("epsilon_grid");
        if (g.is_string())
        {
            try
            {
                cfg.epsilon_grid = parse_grid(g.get<std::string>());
            }
            catch (const DomainError& e)
            {
                field_error("epsilon_grid", e.what());
            }
        }
        else
        {
            cfg.epsilon_grid = get_as<std::vector<double>>(
                j, "epsilon_grid", "a number list or 'a:b:step'");
        }
    }

    read_opt(j, "alpha", cfg.alpha, "a number list");
    if (cfg.alpha.empty())
        cfg.alpha = uniform_alpha(cfg.dim);
    if (cfg.alpha.size() != 2 * static_cast<std::size_t>(cfg.dim))
        field_error("alpha", "must have length 2*dim");

    if (j.contains("xi"))
    {
        const auto& x = j.at("xi");
        if (x.is_string())
        {
            if (x.get<std::string>() != "shared_sign")
                field_error("xi", "string form must be \"shared_sign\"");
        }
        else if (!x.is_object() || !x.contains("table") || !x.at("table").is_array())
        {
            field_error("xi", "expected \"shared_sign\" or {\"table\": [{\"r\": [...], \"p\": ...}]}");
        }
        cfg.xi = x;
    }

    if (j.contains("iid_support"))
    {
        const auto& s = j.at("iid_support");
        if (!s.is_array() || s.empty())
            field_error("iid_support", "expected a non-empty list of {\"w\": [...], \"p\": ...}");
        for (const auto& row : s)
        {
            if (!row.is_object() || !row.contains("w") || !row.contains("p"))
                field_error("iid_support", "each entry needs \"w\" and \"p\"");
            try
            {
                cfg.iid_weights.push_back(row.at("w").get<std::vector<double>>());
                cfg.iid_p.push_back(row.at("p").get<double>());
            }
            catch (const json::exception&)
            {
                field_error("iid_support", "w must be a number list and p a number");
            }
        }
    }

    read_opt(j, "face", cfg.face, "a list of +1/-1");
    if (!cfg.face.empty())
    {
        if (cfg.face.size() != static_cast<std::size_t>(cfg.dim))
            field_error("face", "must have length dim");
        for (int s : cfg.face)
            if (s != 1 && s != -1)
                field_error("face", "entries must be +1 or -1");
    }

    if (j.contains("kappa") && !j.at("kappa").is_null())
    {
        double k = get_as<double>(j, "kappa", "a number");
        if (!(k > 0))
            field_error("kappa", "must be > 0");
        cfg.kappa = k;
    }

    read_opt(j, "y", cfg.y, "a number list");
    read_opt(j, "y_grid", cfg.y_grid, "a list of number lists");
    read_opt(j, "grid_points", cfg.grid_points, "an integer");
    read_opt(j, "seeds", cfg.seeds, "an integer");
    read_opt(j, "out", cfg.out, "a path string");
    if (cfg.out.empty())
        field_error("out", "must be non-empty");
    read_opt(j, "memory_budget", cfg.memory_budget, "a byte count");
    if (cfg.memory_budget == 0)
        field_error("memory_budget", "must be > 0");
    read_opt(j, "common_noise", cfg.common_noise, "a boolean");
    read_opt(j, "theta", cfg.theta, "a number");
    if (!(cfg.theta > 0 && cfg.theta <= 1))
        field_error("theta", "must lie in (0, 1]");
    read_opt(j, "resamples", cfg.resamples, "an integer");
    if (cfg.resamples != 0 && cfg.resamples < 16)
        field_error("resamples", "must be 0 (off) or >= 16");
    read_opt(j, "extrapolate", cfg.extrapolate, "a boolean");
    read_opt(j, "threads", cfg.threads, "an integer");
    if (cfg.threads < 0)
        field_error("threads", "must be >= 0");

    // Per-command domains
    const std::string& c = cfg.command;
    if (c == "localize")
    {
        require_positive("n", cfg.n, 1);
        require_positive("replicas", cfg.replicas, 2);
    }
    else if (c == "sweep")
    {
        require_positive("n", cfg.n, 1);
        require_positive("replicas", cfg.replicas, 50);
        if (cfg.epsilon_grid.empty())
            field_error("epsilon_grid", "required for sweep");
    }
    else if (c == "second-moment")
    {
        require_positive("n", cfg.n, 1);
    }
    else if (c == "rates")
    {
        require_positive("n", cfg.n, 10);
        require_positive("replicas", cfg.replicas, 2);
        if (cfg.y_grid.empty() && cfg.grid_points < 1)
            field_error("grid_points", "rates needs y_grid or grid_points >= 1");
    }
    else if (c == "example-d4")
    {
        require_positive("n", cfg.n, 1);
        require_positive("seeds", cfg.seeds, 1);
        if (cfg.y.empty())
            cfg.y = {0.97, 0.01, 0.01, 0.01};
        if (cfg.y.size() != static_cast<std::size_t>(cfg.dim))
            field_error("y", "must have length dim");
    }
    return cfg;
}

json config_to_json(const RunConfig& cfg)
{
    json j;
    j["command"] = cfg.command;
    j["dim"] = cfg.dim;
    j["n"] = cfg.n;
    j["replicas"] = cfg.replicas;
    j["seed"] = cfg.seed;
    j["epsilon"] = cfg.epsilon;
    if (!cfg.epsilon_grid.empty())
        j["epsilon_grid"] = cfg.epsilon_grid;
    j["alpha"] = cfg.alpha;
    j["xi"] = cfg.xi;
    if (!cfg.iid_weights.empty())
    {
        json s = json::array();
        for (std::size_t k = 0; k < cfg.iid_weights.size(); ++k)
            s.push_back({{"w", cfg.iid_weights[k]}, {"p", cfg.iid_p[k]}});
        j["iid_support"] = s;
    }
    if (!cfg.face.empty())
        j["face"] = cfg.face;
    if (cfg.kappa)
        j["kappa"] = *cfg.kappa;
    if (!cfg.y.empty())
        j["y"] = cfg.y;
    if (!cfg.y_grid.empty())
        j["y_grid"] = cfg.y_grid;
    if (cfg.grid_points > 0)
        j["grid_points"] = cfg.grid_points;
    j["seeds"] = cfg.seeds;
    j["out"] = cfg.out;
    j["memory_budget"] = cfg.memory_budget;
    j["common_noise"] = cfg.common_noise;
    j["theta"] = cfg.theta;
    j["resamples"] = cfg.resamples;
    j["extrapolate"] = cfg.extrapolate;
    return j;
}

EnvironmentModel build_model(const RunConfig& cfg)
{
    EnvironmentModel model = [&] {
        if (!cfg.iid_weights.empty())
            return EnvironmentModel::finite_iid(cfg.dim, cfg.iid_weights, cfg.iid_p,
                                                cfg.seed);
        XiLaw xi = SharedSign{};
        if (cfg.xi.is_object())
        {
            FiniteTable t;
            try
            {
                for (const auto& row : cfg.xi.at("table"))
                {
                    t.r.push_back(row.at("r").get<std::vector<double>>());
                    t.p.push_back(row.at("p").get<double>());
                }
            }
            catch (const nlohmann::json::exception&)
            {
                field_error("xi", "table rows need \"r\" (number list) and \"p\" (number)");
            }
            xi = std::move(t);
        }
        return EnvironmentModel::perturbed(cfg.dim, cfg.alpha, cfg.epsilon, xi, cfg.seed);
    }();
    if (!cfg.face.empty())
        model = model.on_face(cfg.face);
    return model;
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv)
{
    CLI::App app{"Boundary localization experiments for random walks in random environments"};
    app.set_config();  // disable CLI11's own config handling; --config is ours

    std::string command, config_path, eps_grid, out;
    std::optional<int> dim, n, replicas, resamples, threads;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps, theta;
    std::optional<std::size_t> budget;
    std::optional<bool> common_noise;

    app.add_option("command", command, "localize | sweep | second-moment | rates | example-d4");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--dim", dim);
    app.add_option("--n", n);
    app.add_option("--replicas", replicas);
    app.add_option("--seed", seed);
    app.add_option("--eps", eps);
    app.add_option("--eps-grid", eps_grid, "a:b:step");
    app.add_option("--out", out, "output directory");
    app.add_option("--theta", theta);
    app.add_option("--resamples", resamples);
    app.add_flag("--common-noise", common_noise, "same seed at every grid point (=false to disable)");
    app.add_option("--memory-budget", budget, "bytes");
    app.add_option("--threads", threads, "OpenMP threads (does not change results)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        app.exit(e);
        return std::nullopt;
    }
    catch (const CLI::ParseError& e)
    {
        throw DomainError(std::string("command line: ") + e.what());
    }

    json j = json::object();
    if (!config_path.empty())
    {
        std::ifstream in(config_path);
        if (!in)
            throw DomainError("cannot read config file '" + config_path + "'");
        try
        {
            j = json::parse(in);
        }
        catch (const json::parse_error& e)
        {
            throw DomainError("config file '" + config_path + "': " + e.what());
        }
    }
    if (!command.empty())
        j["command"] = command;
    if (dim)
        j["dim"] = *dim;
    if (n)
        j["n"] = *n;
    if (replicas)
        j["replicas"] = *replicas;
    if (seed)
        j["seed"] = *seed;
    if (eps)
        j["epsilon"] = *eps;
    if (!eps_grid.empty())
        j["epsilon_grid"] = eps_grid;
    if (!out.empty())
        j["out"] = out;
    if (theta)
        j["theta"] = *theta;
    if (resamples)
        j["resamples"] = *resamples;
    if (common_noise)
        j["common_noise"] = *common_noise;
    if (budget)
        j["memory_budget"] = *budget;
    if (threads)
        j["threads"] = *threads;
    return config_from_json(j);
}

}  // namespace rwre::cli
