#ifndef XCOREF_TOOLS_COMMANDS_H_
#define XCOREF_TOOLS_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

#include "run_config.h"

namespace xcoref::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUser = 2;

// Each command throws InputError for bad user input. Reports go to `out`,
// progress to `log`.
void RunProject(const RunConfig& config, std::ostream& out, std::ostream& log);
void RunTrain(const RunConfig& config, std::ostream& out, std::ostream& log);
void RunDecode(const RunConfig& config, std::ostream& out, std::ostream& log);
void RunScore(const RunConfig& config, std::ostream& out, std::ostream& log);

// Full command line: argument parsing, config file, dispatch, error mapping.
// args[0] is the program name.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xcoref::cli

#endif  // XCOREF_TOOLS_COMMANDS_H_
