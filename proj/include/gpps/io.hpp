#pragma once

#include "gpps/dynamics.hpp"
#include "gpps/ground_state.hpp"
#include "gpps/reduction.hpp"

#include <map>
#include <string>
#include <vector>

namespace gpps {

inline constexpr const char* version_string = "0.1.0";

/* Snapshot file: 8-byte magic "GPPSNAP1", then little-endian u32 version,
 * u32 dtype (1 = complex128), u32 dim, u32 pad, 3 x u64 points, 3 x f64 half
 * extents, then the payload in grid order (last axis fastest).  Round trips
 * bit-exactly. */
void write_snapshot(const std::string& path, const ComplexField& f);
ComplexField read_snapshot(const std::string& path);

/* Time-series CSVs, every number printed with %.17g so rereads are
 * bit-faithful.  The observables header is part of the format contract. */
void write_observables_csv(const std::string& path, const ObservableSeries& s);
void write_iterations_csv(const std::string& path,
                          const std::vector<std::array<double, 4>>& history);
void write_reduction_error_csv(const std::string& path, const ErrorSeries& e);

struct KernelCheckRow {
    std::string kernel;
    double xi = 0.0;
    double eps = 0.0;
    double closed_form = 0.0;
    double quadrature = 0.0;
    double rel_err = 0.0;
};
void write_kernel_check_csv(const std::string& path, const std::vector<KernelCheckRow>& rows);

// 20x20 log lattice of (|xi|, eps) in [1e-2, 1e2]^2 for both effective kernels
std::vector<KernelCheckRow> kernel_check_rows();

/* Config text: INI-style sections of key = value lines, '#' or ';' comments.
 * Parsing collects every key; consumers mark keys as read and anything left
 * over is an error, so typos cannot pass silently. */
class ConfigText {
public:
    explicit ConfigText(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    // typed getters mark the key consumed; throw on type mismatch
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    double get_double(const std::string& section, const std::string& key, double fallback);
    long get_long(const std::string& section, const std::string& key, long fallback);
    bool get_bool(const std::string& section, const std::string& key, bool fallback);
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback);
    // present sections (for task gating) and the leftover-key audit
    bool has_section(const std::string& section) const;
    std::vector<std::string> unread_keys() const;

private:
    struct Entry {
        std::string value;
        bool read = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    Entry* find(const std::string& section, const std::string& key);
};

enum class Task { GroundState, Evolve, Regime, Reduce, KernelCheck };
std::string task_name(Task t);

// accepts model_name output and the underscore-free spellings quasi2dI/quasi2dII
ModelKind parse_model_kind(const std::string& s);

struct GroundStateTask {
    GradientFlowOptions options;
    std::string init = "gaussian"; // gaussian | random
    std::array<double, 3> width{1.0, 1.0, 1.0};
};

struct EvolveTask {
    double T = 1.0;
    double dt = 1e-3;
    int record_every = 10;
    bool blowup_check = false;
    std::string init = "gaussian"; // gaussian | random | file
    std::array<double, 3> width{1.0, 1.0, 1.0};
    std::string init_file;
};

struct RegimeTask {
    bool probe = false;                         // run the scaling-family witness
    std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
    double kappa = 8.0;                         // 2dII anisotropic aspect
};

struct ReduceTask {
    ReductionStudy study;
};

struct RunConfig {
    Task task = Task::GroundState;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    ModelParams model;
    Grid grid;
    GroundStateTask ground;
    EvolveTask evolve;
    RegimeTask regime;
    ReduceTask reduce;
};

/* Full validation at parse time: axis within 1e-6 of unit length is
 * renormalized (with a stderr note), anything further off is rejected;
 * unknown keys and sections are errors. */
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// the effective config with defaults filled, echoed into the manifest
std::string config_echo_json(const RunConfig& cfg);

} // namespace gpps
