#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prfcli {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string run_id = "run";
    bool force = false;
    std::vector<double> thetas; // empty: take from config / default grid
    std::string backend;        // "", "fd", "spectral", "both"
    std::optional<unsigned long long> seed;
};

// Exit code 1: configuration problem. Exit code 2: computation failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_stationary(const Options& opt);
int cmd_evolve(const Options& opt);
int cmd_eigenflow(const Options& opt);
int cmd_ferus(unsigned long long p, unsigned long long n);
int cmd_sweep(const Options& opt);
int cmd_verify(const Options& opt);

} // namespace prfcli
