#pragma once

// The zjsc subcommands as library functions. Each returns the process exit
// code: 0 ok, 1 domain error, 2 environment error.

#include "zjsc/composer.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace zjsc {

enum ExitCode : int { exit_ok = 0, exit_domain = 1, exit_environment = 2 };

enum class GraphFormat { Edges, Dot };

/// Entry argument to locator: http(s) URLs as given, anything else as a path.
Locator entry_locator(const std::string& entry);

int cmd_validate(const std::vector<std::filesystem::path>& paths, bool strict, std::ostream& out, std::ostream& err);

int cmd_flatten(const std::string& entry, const std::filesystem::path& output, const FlattenOptions& options,
                std::ostream& out, std::ostream& err);

int cmd_graph(const std::string& entry, GraphFormat format, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

} // namespace zjsc
