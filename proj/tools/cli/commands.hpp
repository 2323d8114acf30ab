#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lmipole::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitInfeasible = 2,
  kExitPersistency = 3,
  kExitIo = 4,
};

/// Relative output paths are placed under this directory when set.
inline constexpr const char* kOutputDirEnv = "LMIPOLE_OUTPUT_DIR";

struct SimulateArgs {
  std::string system;
  std::string excitation;
  std::string out;
};

struct CheckPeArgs {
  std::string trajectory;
  std::optional<int> n, m;
};

struct DesignArgs {
  std::string spec;
  std::string out;
  std::optional<std::string> trajectory;
  std::optional<std::string> system;
  std::optional<std::string> mode;
  std::optional<double> gamma_bar;
  std::optional<double> epsilon;
  bool no_pole_constraint = false;
  bool literal_paper_lmis = false;
  std::optional<std::string> dump_sdp;
};

struct VerifyArgs {
  std::string system;
  std::string result;
  std::optional<std::string> out;
  std::optional<std::string> step_response;
};

struct ReproduceArgs {
  std::string outdir = "reference_run";
  std::uint64_t seed = 1;
  int sweep = 0;
  bool no_pole_constraint = false;
};

struct PlotDataArgs {
  std::string result;
  std::string out;
  std::optional<double> alpha;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_check_pe(const CheckPeArgs& args, std::ostream& out, std::ostream& err);
int cmd_design(const DesignArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_reproduce_paper(const ReproduceArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot_data(const PlotDataArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace lmipole::cli
