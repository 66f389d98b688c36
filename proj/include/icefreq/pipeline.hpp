#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "icefreq/config.hpp"

namespace icefreq {

enum class Stage { features, select, fit, bootstrap, project, report };

std::string stage_name(Stage s);
std::vector<Stage> parse_stages(const std::string& comma_list);

// Executes the requested stages in dependency order. A stage that is not
// requested but whose outputs are needed is satisfied from artifacts already
// present in out_dir (or paths named in the config); otherwise the run
// aborts naming the stage and cause. Identical config + seed produce a
// byte-identical output bundle for any thread count.
void run_pipeline(const RunConfig& cfg, std::vector<Stage> stages,
                  const std::filesystem::path& out_dir);

inline const char* kVersion = "icefreq 1.0.0";

}  // namespace icefreq
