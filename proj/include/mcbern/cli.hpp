#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcbern/chain.hpp"

namespace mcbern {

/// Contents of a chain spec file, before validation.
struct ChainSpec {
    std::vector<std::vector<double>> rows;
    Vector f;
    std::optional<double> c;
    std::optional<Vector> pi;
    std::size_t pi_line = 0;
};

struct ParsedChain {
    ChainSpec spec;
    FiniteChain chain;
    StationaryDist pi;
    Observable f;
};

/// Line-oriented format:
///   states <n>
///   row <p1> ... <pn>     (exactly n of these)
///   f <v1> ... <vn>
///   c <bound>             (optional)
///   pi <p1> ... <pn>      (optional, checked against the solve within 1e-8)
/// '#' starts a comment; blank lines are ignored. Throws ParseError with the
/// line number, or the validation error of the chain/observable.
ChainSpec read_chain_spec(std::string_view text);
ParsedChain parse_chain_spec(std::string_view text);
ParsedChain load_chain_spec(const std::string& path);

/// Serializes with 17 significant digits so parsing it back is exact.
std::string emit_chain_spec(const ChainSpec& spec);

std::string format_double(double v);

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitNumerical = 2,
    kExitVerifyFail = 3,
};

struct CommandResult {
    int exit_code = kExitOk;
    std::string out;
    std::string err;
};

/// Runs one invocation; args excludes the program name.
CommandResult run_command(const std::vector<std::string>& args);

}  // namespace mcbern
