#pragma once

#include "fogcolony/sim.hpp"

#include <string>
#include <vector>

namespace fogcolony {

struct ScenarioFile {
    Scenario scenario;
    std::string output_dir; // from the config; may be overridden by the caller
};

/// Search directory for bundled policies: $FOGCOLONY_POLICY_DIR when set,
/// otherwise the repository's policies/ directory.
std::string default_policy_dir();

/// Resolves a policy reference: a bare name looks up <name>.fp in the policy
/// directory; anything with a path separator or .fp suffix is a file path
/// (relative paths resolve against base_dir).
std::string resolve_policy_path(const std::string& name_or_path,
                                const std::string& base_dir);

/// Loads and fully validates a scenario config. Throws std::runtime_error
/// with a list of located problems on invalid input.
ScenarioFile load_scenario_file(const std::string& path);

} // namespace fogcolony
