#ifndef DIABNET_PIPELINE_HPP
#define DIABNET_PIPELINE_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/preprocess.hpp"
#include "diabnet/run_config.hpp"

#include <string>
#include <vector>

namespace diabnet {

/// Output of the preprocessing chain: undersample -> stratified holdout
/// split -> impute -> standardize, the latter two fitted on the training
/// split only so no test statistic leaks into the model inputs. Each step
/// runs on its own seed stream derived from the run seed, so any command
/// can rebuild identical splits from the config alone.
struct PreparedData {
    Dataset train;
    Dataset test;
    ImputeParams impute; // empty when imputation is off or nothing to impute
    ScalerParams scaler; // empty when standardization is off
    std::size_t raw_rows = 0;
    std::size_t balanced_rows = 0;
};

PreparedData prepare(const RunConfig& config);

/// The unsplit variant (undersample -> impute fitted on the balanced set),
/// on the same undersample seed stream as prepare(); used by cmd_visualize.
Dataset prepare_balanced(const RunConfig& config);

struct CommandOutcome {
    std::string summary;              // human-readable result, printed verbatim
    std::vector<std::string> written; // files created, in write order
};

CommandOutcome cmd_inspect(const RunConfig& config);
CommandOutcome cmd_preprocess(const RunConfig& config);
CommandOutcome cmd_tune(const RunConfig& config);
CommandOutcome cmd_train(const RunConfig& config);

/// model_path "" defaults to <output_dir>/model.json.
CommandOutcome cmd_evaluate(const RunConfig& config, const std::string& model_path = "");
CommandOutcome cmd_visualize(const RunConfig& config);

/// Re-renders the comparison report from <output_dir>/metrics.json (written
/// by cmd_evaluate); with no metrics file it emits the reference rows alone.
CommandOutcome cmd_report(const RunConfig& config);

} // namespace diabnet

#endif // DIABNET_PIPELINE_HPP
