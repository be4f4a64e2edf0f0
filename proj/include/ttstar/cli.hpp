#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace ttstar::cli {

/// Per-invocation report: parameters, emitted files, diagnostics, timing.
/// Serialized as JSON to stdout or to the --report path.
struct RunReport {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> outputs;
    nlohmann::json diagnostics = nlohmann::json::object();
    double wall_time = 0.0;

    nlohmann::json to_json() const;
};

/// Entry point shared by the binary and the tests.  Exit codes: 0 success
/// (mesh gaps included), 1 usage error, 2 numerical failure at a requested
/// single point.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ttstar::cli
