#pragma once

#include "gpps/io.hpp"

namespace gpps {

struct RunResult {
    int exit_code = 0; // 0 ok, 2 validation error, 3 numerical alarm, 4 internal error
    std::string manifest_path;
    std::string message;
};

/* Dispatches the configured task, writes its artifacts under cfg.out_dir and
 * finishes with an atomically renamed manifest.json.  Failures keep partial
 * outputs on disk and are flagged in the manifest. */
RunResult run(const RunConfig& cfg);

} // namespace gpps
