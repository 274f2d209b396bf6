#ifndef ORIGAMI_NETCONFIG_HPP
#define ORIGAMI_NETCONFIG_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "origami/chip.hpp"
#include "origami/perf.hpp"
#include "origami/tensor.hpp"

// Network/chip configuration: a line-oriented `key = value` document
// with one `layer { ... }` block per stage. The layer chain is derived
// from the input dims; see the README for the field reference.

namespace origami {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LayerConfig {
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    Activation activation = Activation::none;
    std::optional<PoolSpec> pool;
    std::string weights = "random";  // "random" or a tensor file path
    std::string bias = "random";
};

struct NetworkConfig {
    ChipParams chip;
    int in_channels = 0;
    int input_h = 0;
    int input_w = 0;
    std::vector<LayerConfig> layers;
    std::optional<SystemConfig> system;

    // chained LayerSpecs; throws ConfigError naming the first stage whose
    // geometry breaks
    std::vector<LayerSpec> layer_specs() const;
};

NetworkConfig parse_network_config(std::istream& is, const std::string& source_name);
NetworkConfig load_network_config(const std::filesystem::path& path);

}  // namespace origami

#endif
