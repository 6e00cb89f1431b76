#pragma once

#include <iosfwd>

#include "vulnprio/cli/run_config.hpp"

namespace vulnprio::cli {

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

void cmd_ingest(const RunConfig& config, Streams io);
int cmd_train(const RunConfig& config, triage::Task task, bool allow_degenerate, Streams io);
void cmd_predict(const RunConfig& config, triage::Task task, Streams io);
void cmd_score(const RunConfig& config, Streams io);
void cmd_rank(const RunConfig& config, Streams io);
void cmd_report(const RunConfig& config, Streams io);
void cmd_label(const RunConfig& config, Streams io);

}  // namespace vulnprio::cli
