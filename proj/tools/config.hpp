#pragma once

//! \file config.hpp
//! Run configuration: JSON file keys, overridden by command-line flags.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/env.hpp"

namespace rwre::cli
{

inline const std::vector<std::string> kCommands = {
    "localize", "sweep", "second-moment", "rates", "example-d4"};

struct RunConfig
{
    std::string command;
    int dim{2};
    int n{0};
    int replicas{0};
    std::uint64_t seed{0};
    double epsilon{0};
    std::vector<double> epsilon_grid;
    std::vector<double> alpha;  //!< length 2d; uniform when absent
    nlohmann::json xi = "shared_sign";
    //! Optional general i.i.d. law replacing the perturbed family.
    std::vector<std::vector<double>> iid_weights;
    std::vector<double> iid_p;
    std::vector<int> face;  //!< sign vector, empty = standard face
    std::optional<double> kappa;
    std::vector<double> y;  //!< example-d4 direction
    std::vector<std::vector<double>> y_grid;
    int grid_points{0};  //!< boundary grid resolution for rates
    int seeds{50};
    std::string out{"out"};
    std::size_t memory_budget{std::size_t(1) << 30};
    bool common_noise{true};
    double theta{0.5};
    int resamples{0};
    bool extrapolate{false};
    int threads{0};  //!< 0 = OpenMP default; not part of the result identity
};

//! Validate and convert. Throws DomainError naming the offending field.
RunConfig config_from_json(const nlohmann::json& j);

//! Resolved form written into the manifest; replays to identical outputs.
nlohmann::json config_to_json(const RunConfig& cfg);

//! Model described by the config (perturbed family or explicit i.i.d. law).
EnvironmentModel build_model(const RunConfig& cfg);

/*!
 * Parse argv: optional positional command, --config PATH, and overrides.
 * Returns nullopt after printing help.
 */
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv);

}  // namespace rwre::cli
