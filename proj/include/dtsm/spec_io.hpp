#pragma once

#include <cstdint>
#include <string>

#include "dtsm/discrete_pmf.hpp"
#include "dtsm/markov.hpp"
#include "dtsm/semi_markov.hpp"

namespace dtsm {

// On-disk model description: the transition matrix plus the sojourn family.
// Exactly one of {alpha, step_pmf} is present; alpha selects Sibuya steps.
struct ModelSpec {
    MarkovSpec markov;
    DmlKind kind = DmlKind::type_a;
    bool has_alpha = true;
    double alpha = 0.5;
    DiscretePmf step_pmf;
    std::uint64_t seed = 0;

    StepDist step_dist() const;
};

ModelSpec parse_model_spec(const std::string& json_text);
ModelSpec load_model_spec(const std::string& path);
std::string model_spec_to_json(const ModelSpec& spec);
void save_model_spec(const ModelSpec& spec, const std::string& path);

// Shortest exact decimal form (17 significant digits), for byte-stable CSV.
std::string format_double(double v);

// Writes through a temp file in the same directory, then renames over the
// target, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace dtsm
