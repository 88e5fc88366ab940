#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kgscatter::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kComputationError = 3,
    kValidationBreach = 4,
};

struct GridSpec {
    double min;
    double max;
    int n;
};

struct RunConfig {
    double mass = 1.0;
    std::vector<double> alpha{1.0};
    std::vector<double> q{1.0};
    std::optional<std::vector<double>> lambda;
    std::optional<std::vector<double>> v0;
    GridSpec energy{1.001, 4.0, 200};
    GridSpec x{-5.0, 5.0, 201};
    int grid_n = 512;
    std::optional<int> figure;
    std::string out;  // empty: the stream passed to run()
    std::string format = "csv";
    bool keep_going = false;
    bool no_oracle = false;
};

/// Entry point shared by the executable and the tests. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Uniform grid with both endpoints; n == 1 yields {min}.
std::vector<double> make_grid(const GridSpec& g);

}  // namespace kgscatter::cli
