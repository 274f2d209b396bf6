#include "origami/netconfig.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace origami {

namespace {

struct Parser {
    std::string source;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
    }

    std::string strip(const std::string& raw) const {
        std::string s = raw;
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::pair<std::string, std::string> key_value(const std::string& s) const {
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail("expected `key = value`, got `" + s + "`");
        const std::string key = strip(s.substr(0, eq));
        const std::string val = strip(s.substr(eq + 1));
        if (key.empty() || val.empty()) fail("empty key or value in `" + s + "`");
        return {key, val};
    }

    long to_int(const std::string& key, const std::string& v, long lo, long hi) const {
        std::size_t used = 0;
        long x = 0;
        try {
            x = std::stol(v, &used);
        } catch (...) {
            fail("field `" + key + "`: `" + v + "` is not an integer");
        }
        if (used != v.size()) fail("field `" + key + "`: `" + v + "` is not an integer");
        if (x < lo || x > hi)
            fail("field `" + key + "`: " + std::to_string(x) + " outside [" +
                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    double to_real(const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(v, &used);
        } catch (...) {
            fail("field `" + key + "`: `" + v + "` is not a number");
        }
        if (used != v.size()) fail("field `" + key + "`: `" + v + "` is not a number");
        return x;
    }

    bool to_bool(const std::string& key, const std::string& v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("field `" + key + "`: expected a boolean, got `" + v + "`");
    }

    PoolSpec to_pool(const std::string& key, const std::string& v) const {
        const auto x = v.find('x');
        if (x == std::string::npos) fail("field `" + key + "`: expected `PHxPW`, got `" + v + "`");
        PoolSpec p;
        p.ph = static_cast<int>(to_int(key, v.substr(0, x), 1, 16));
        p.pw = static_cast<int>(to_int(key, v.substr(x + 1), 1, 16));
        return p;
    }
};

}  // namespace

std::vector<LayerSpec> NetworkConfig::layer_specs() const {
    std::vector<LayerSpec> specs;
    int c = in_channels, h = input_h, w = input_w;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerConfig& lc = layers[l];
        LayerSpec spec;
        spec.in_channels = c;
        spec.out_channels = lc.out_channels;
        spec.kernel_h = lc.kernel_h;
        spec.kernel_w = lc.kernel_w;
        spec.input_h = h;
        spec.input_w = w;
        spec.activation = lc.activation;
        spec.pool = lc.pool;
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError("layer " + std::to_string(l + 1) + ": " + e.what());
        }
        c = spec.out_channels;
        h = spec.out_h();
        w = spec.out_w();
        specs.push_back(spec);
    }
    return specs;
}

NetworkConfig parse_network_config(std::istream& is, const std::string& source_name) {
    Parser p{source_name};
    NetworkConfig cfg;
    bool have_system = false;
    SystemConfig sys;
    LayerConfig* open_layer = nullptr;
    std::vector<LayerConfig> layers;

    std::string raw;
    while (std::getline(is, raw)) {
        ++p.line_no;
        const std::string s = p.strip(raw);
        if (s.empty()) continue;

        if (s == "layer {") {
            if (open_layer) p.fail("nested `layer {` block");
            layers.emplace_back();
            open_layer = &layers.back();
            continue;
        }
        if (s == "}") {
            if (!open_layer) p.fail("unmatched `}`");
            if (open_layer->out_channels < 1) p.fail("layer block missing `out_channels`");
            if (open_layer->kernel_h < 1) p.fail("layer block missing `kernel_h`/`kernel_w`");
            open_layer = nullptr;
            continue;
        }

        const auto [key, val] = p.key_value(s);
        if (open_layer) {
            LayerConfig& lc = *open_layer;
            if (key == "out_channels")
                lc.out_channels = static_cast<int>(p.to_int(key, val, 1, 1 << 16));
            else if (key == "kernel_h")
                lc.kernel_h = static_cast<int>(p.to_int(key, val, 1, 255));
            else if (key == "kernel_w")
                lc.kernel_w = static_cast<int>(p.to_int(key, val, 1, 255));
            else if (key == "kernel") {
                const PoolSpec k = p.to_pool(key, val);
                lc.kernel_h = k.ph;
                lc.kernel_w = k.pw;
            } else if (key == "activation") {
                if (val == "relu")
                    lc.activation = Activation::relu;
                else if (val == "none")
                    lc.activation = Activation::none;
                else
                    p.fail("field `activation`: expected relu|none, got `" + val + "`");
            } else if (key == "pool")
                lc.pool = val == "none" ? std::optional<PoolSpec>{} : p.to_pool(key, val);
            else if (key == "weights")
                lc.weights = val;
            else if (key == "bias")
                lc.bias = val;
            else
                p.fail("unknown layer field `" + key + "`");
            continue;
        }

        if (key == "chip.n_ch")
            cfg.chip.n_ch = static_cast<int>(p.to_int(key, val, 2, 256));
        else if (key == "chip.kernel_h")
            cfg.chip.h_k = static_cast<int>(p.to_int(key, val, 1, 255));
        else if (key == "chip.kernel_w")
            cfg.chip.w_k = static_cast<int>(p.to_int(key, val, 1, 255));
        else if (key == "chip.h_in_max")
            cfg.chip.h_in_max = static_cast<int>(p.to_int(key, val, 1, 1 << 20));
        else if (key == "chip.f_mhz")
            cfg.chip.f_mhz = p.to_real(key, val);
        else if (key == "chip.total_bits")
            cfg.chip.fmt.total_bits = static_cast<int>(p.to_int(key, val, 2, 32));
        else if (key == "chip.frac_bits")
            cfg.chip.fmt.frac_bits = static_cast<int>(p.to_int(key, val, 1, 31));
        else if (key == "chip.overflow") {
            if (val == "wrap")
                cfg.chip.fmt.overflow = Overflow::wrap;
            else if (val == "saturate")
                cfg.chip.fmt.overflow = Overflow::saturate;
            else
                p.fail("field `chip.overflow`: expected wrap|saturate, got `" + val + "`");
        } else if (key == "input.channels")
            cfg.in_channels = static_cast<int>(p.to_int(key, val, 1, 1 << 16));
        else if (key == "input.height")
            cfg.input_h = static_cast<int>(p.to_int(key, val, 1, 1 << 20));
        else if (key == "input.width")
            cfg.input_w = static_cast<int>(p.to_int(key, val, 1, 1 << 20));
        else if (key == "system.n_chips") {
            sys.n_chips = static_cast<int>(p.to_int(key, val, 1, 1024));
            have_system = true;
        } else if (key == "system.pairing") {
            sys.pairing = p.to_bool(key, val);
            have_system = true;
        } else if (key == "system.bus_bits") {
            sys.bus_bits = static_cast<int>(p.to_int(key, val, 1, 64));
            have_system = true;
        } else if (key == "system.bus_mhz") {
            sys.bus_mhz = p.to_real(key, val);
            have_system = true;
        } else if (key == "system.pool") {
            sys.pool = val == "none" ? std::optional<PoolSpec>{} : p.to_pool(key, val);
            have_system = true;
        } else
            p.fail("unknown field `" + key + "`");
    }
    if (open_layer) {
        p.fail("unterminated `layer {` block");
    }

    p.line_no = 0;  // post-parse diagnostics carry no single line
    if (cfg.in_channels < 1 || cfg.input_h < 1 || cfg.input_w < 1)
        throw ConfigError(source_name + ": missing input.channels/height/width");
    try {
        cfg.chip.validate();
    } catch (const std::exception& e) {
        throw ConfigError(source_name + ": chip: " + e.what());
    }
    cfg.layers = std::move(layers);
    if (have_system) cfg.system = sys;
    cfg.layer_specs();  // validate the chain
    return cfg;
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    return parse_network_config(is, path.filename().string());
}

}  // namespace origami
