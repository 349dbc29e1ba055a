#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgbasin/domain.hpp"
#include "qgbasin/dynamics.hpp"
#include "qgbasin/spectral_field.hpp"
#include "qgbasin/timestepper.hpp"

namespace qgbasin {

/// A configuration problem tied to a key and, when it came from the file, a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, int line, const std::string& message);

    const std::string& key() const { return key_; }
    /// 0 when the key is missing or came from an override.
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

struct InitialCondition {
    enum class Kind { zero, single_mode, file, random };

    Kind kind = Kind::zero;
    int m = 1;
    int n = 1;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path path;
};

struct RunConfig {
    Domain domain = Domain::unit_square(1, 1);
    ModelParams params;
    ForcingSpec forcing;
    StepConfig stepping;
    InitialCondition initial;

    std::filesystem::path diagnostics_path = "diagnostics.csv";
    std::filesystem::path checkpoint_path = "final.qgf";
    std::optional<std::filesystem::path> summary_path;

    double tol = 1e-8;
    int max_iter = 200;
    int krylov_dim = 20;
    int power_iters = 50;
    std::optional<double> epsilon;

    int mode_m = 1;
    int mode_n = 1;
    int steps_per_period = 2000;
};

/// `key = value` lines; `#` starts a comment. `force = m n a_cos a_sin a_const`
/// may repeat, every other key appears at most once. Overrides replace file
/// values for any key except `force`.
RunConfig parse_config(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Builds omega0 for the configured domain. File checkpoints must match its geometry.
SpectralField make_initial_field(const RunConfig& config);

}  // namespace qgbasin
