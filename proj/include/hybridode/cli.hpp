#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hybridode/solvers.hpp"
#include "hybridode/training.hpp"

namespace hybridode::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

/// Runs one subcommand (solve | train | rollout | hybrid | compare).
/// `args` excludes the program name. Artifacts go to --out (stdout when
/// absent or "-"); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

using Provenance = std::vector<std::pair<std::string, std::string>>;

/// "# key=value, key=value, ..." in the given order.
std::string provenance_line(const Provenance& fields);

/// Comment line, header t,y_1..y_m, one row per time.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Provenance& prov);
/// Comment line, header t,mean_1..m,std_1..m.
void write_ensemble_csv(std::ostream& os, const EnsembleMoments& moments, const Provenance& prov);
/// Comment line, header iteration,best_mse.
void write_history_csv(std::ostream& os, const std::vector<double>& history, const Provenance& prov);
/// Comment line, header t,ref_1..m,pred_1..m,abs_err, rows, then
/// "# summary mse=..., max_err=...".
void write_report_csv(std::ostream& os, const StepReport& report, const Provenance& prov);

}  // namespace hybridode::cli
