#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vfts/config.hpp"
#include "vfts/synth.hpp"

namespace vfts::cli {

/// Runs one subcommand with its arguments (flags only, no program or
/// subcommand name). Returns the process exit status; errors are written to
/// `err` as a single JSON object.
int run_subcommand(std::string_view name, const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err);

/// argv-style entry point.
int main(int argc, char** argv);

const std::vector<std::string_view>& subcommands();

/// The two-process scenario `synth` emits when no ground-truth config is given.
SynthConfig default_synth_config(const PipelineConfig& config);

}  // namespace vfts::cli
