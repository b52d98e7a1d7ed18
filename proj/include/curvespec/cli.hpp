#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvespec/calculus.hpp"
#include "curvespec/io.hpp"

namespace curvespec {

struct PipelineConfig {
    int depth = 4;
    std::vector<int> degrees{8, 16, 32};
    std::vector<double> delta{0.05};
    std::uint64_t seed = 1;
    std::string vector = "ones";  // "ones", "random", or comma-separated reals
    std::string input;
    std::string out = ".";

    // 1 <= depth <= 6, degrees strictly ascending and non-negative, δ > 0
    void validate() const;
    AssemblyOptions assembly_options() const;
    Json to_json() const;
};

// "ones" -> normalized all-ones, "random" -> seeded Gaussian unit vector,
// otherwise a comma-separated list of n reals, normalized.
Vector parse_cyclic_vector(const std::string& spec, Eigen::Index n, std::uint64_t seed);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Full command line, argv[0] excluded.  Exit codes: 0 success, 2 usage or
// validation error, 3 mathematical precondition failure, 1 anything unexpected.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvespec
