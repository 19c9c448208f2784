#include "resdiff/config.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "resdiff/error.hpp"

namespace resdiff {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* begin = value.data();
    const auto* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("config: bad value '{}' for key '{}'", value, key));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError(fmt::format("config: bad boolean '{}' for key '{}'", value, key));
}

ShapeFamily parse_family(std::string_view key, std::string_view value) {
    if (value == "disc") return ShapeFamily::disc;
    if (value == "rectangle") return ShapeFamily::rectangle;
    if (value == "mixed") return ShapeFamily::mixed;
    throw ConfigError(fmt::format("config: bad shape family '{}' for key '{}'", value, key));
}

StubKind parse_kind(std::string_view key, std::string_view value) {
    if (value == "identity") return StubKind::identity;
    if (value == "affine_blur") return StubKind::affine_blur;
    throw ConfigError(fmt::format("config: bad stub kind '{}' for key '{}'", value, key));
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const auto item = trim(value.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        out.push_back(parse_number<int>(key, item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

const char* family_name(ShapeFamily f) {
    switch (f) {
        case ShapeFamily::disc: return "disc";
        case ShapeFamily::rectangle: return "rectangle";
        case ShapeFamily::mixed: return "mixed";
    }
    throw ConfigError("config: unknown shape family");
}

const char* kind_name(StubKind k) {
    switch (k) {
        case StubKind::identity: return "identity";
        case StubKind::affine_blur: return "affine_blur";
    }
    throw ConfigError("config: unknown stub kind");
}

std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"seed", [](auto& c, auto k, auto v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"out_dir", [](auto& c, auto, auto v) { c.out_dir = std::string(v); }},
        {"schedule.steps", [](auto& c, auto k, auto v) { c.schedule_steps = parse_number<int>(k, v); }},
        {"dataset.height", [](auto& c, auto k, auto v) { c.dataset.height = parse_number<int>(k, v); }},
        {"dataset.width", [](auto& c, auto k, auto v) { c.dataset.width = parse_number<int>(k, v); }},
        {"dataset.family", [](auto& c, auto k, auto v) { c.dataset.family = parse_family(k, v); }},
        {"dataset.noise_sigma", [](auto& c, auto k, auto v) { c.dataset.noise_sigma = parse_number<double>(k, v); }},
        {"dataset.gradient", [](auto& c, auto k, auto v) { c.dataset.gradient = parse_number<double>(k, v); }},
        {"dataset.seed", [](auto& c, auto k, auto v) { c.dataset.seed = parse_number<std::uint64_t>(k, v); }},
        {"dataset.train_count", [](auto& c, auto k, auto v) { c.train_count = parse_number<int>(k, v); }},
        {"dataset.eval_count", [](auto& c, auto k, auto v) { c.eval_count = parse_number<int>(k, v); }},
        {"stub.kind", [](auto& c, auto k, auto v) { c.stub.kind = parse_kind(k, v); }},
        {"stub.gain", [](auto& c, auto k, auto v) { c.stub.gain = parse_number<double>(k, v); }},
        {"stub.bias", [](auto& c, auto k, auto v) { c.stub.bias = parse_number<double>(k, v); }},
        {"stub.kernel", [](auto& c, auto k, auto v) { c.stub.kernel = parse_number<int>(k, v); }},
        {"model.hidden", [](auto& c, auto k, auto v) { c.hidden = parse_int_list(k, v); }},
        {"model.time_dim", [](auto& c, auto k, auto v) { c.time_dim = parse_number<int>(k, v); }},
        {"train.batch_size", [](auto& c, auto k, auto v) { c.train.batch_size = parse_number<int>(k, v); }},
        {"train.iterations", [](auto& c, auto k, auto v) { c.train.iterations = parse_number<int>(k, v); }},
        {"train.learning_rate", [](auto& c, auto k, auto v) { c.train.learning_rate = parse_number<double>(k, v); }},
        {"train.restrict_t_to_t_prime", [](auto& c, auto k, auto v) { c.train.restrict_t_to_t_prime = parse_bool(k, v); }},
        {"eval.sample_seed", [](auto& c, auto k, auto v) { c.eval.sample_seed = parse_number<std::uint64_t>(k, v); }},
        {"eval.bootstrap_resamples", [](auto& c, auto k, auto v) { c.eval.bootstrap_resamples = parse_number<int>(k, v); }},
        {"eval.snapshot_stride", [](auto& c, auto k, auto v) { c.eval.snapshot_stride = parse_number<int>(k, v); }},
    };
    return table;
}

} // namespace

ExperimentConfig::ExperimentConfig() {
    stub.kind = StubKind::affine_blur;
    stub.gain = 0.8;
    stub.bias = 0.1;
    stub.kernel = 3;
    train.batch_size = 16;
    train.iterations = 20000;
    train.learning_rate = 1e-3;
}

void EvalConfig::validate() const {
    if (bootstrap_resamples < 1) throw ConfigError("config: eval.bootstrap_resamples must be positive");
    if (snapshot_stride < 0) throw ConfigError("config: eval.snapshot_stride must be non-negative");
}

void ExperimentConfig::validate() const {
    if (schedule_steps < 2) throw ConfigError("config: schedule.steps must be at least 2");
    if (train_count < 1) throw ConfigError("config: dataset.train_count must be positive");
    if (eval_count < 1) throw ConfigError("config: dataset.eval_count must be positive");
    if (hidden.empty()) throw ConfigError("config: model.hidden must be nonempty");
    for (int h : hidden) {
        if (h < 1) throw ConfigError("config: model.hidden entries must be positive");
    }
    if (time_dim < 2 || time_dim % 2 != 0) {
        throw ConfigError("config: model.time_dim must be even and positive");
    }
    dataset_spec().validate();
    stub.validate();
    train_config().validate();
    eval.validate();
}

DenoiserConfig ExperimentConfig::model_config() const {
    DenoiserConfig mc;
    mc.x_dim = dataset.height * dataset.width;
    mc.cond_dim = dataset.height * dataset.width;
    mc.hidden = hidden;
    mc.time_emb.dim = time_dim;
    return mc;
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig tc = train;
    tc.seed = seed;
    tc.stub = stub;
    return tc;
}

DatasetSpec ExperimentConfig::dataset_spec() const {
    DatasetSpec ds = dataset;
    ds.count = train_count + eval_count;
    return ds;
}

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig config;
    std::map<std::string, bool, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = trim(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(fmt::format("config: line {} has no '='", line_no));
            }
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            const auto it = setters().find(key);
            if (it == setters().end()) {
                throw ConfigError(fmt::format("config: unknown key '{}'", key));
            }
            if (!seen.emplace(std::string(key), true).second) {
                throw ConfigError(fmt::format("config: duplicate key '{}'", key));
            }
            it->second(config, key, value);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("config: cannot open '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string canonical_config(const ExperimentConfig& config) {
    std::string out;
    const auto real = [](double v) { return fmt::format("{:.17g}", v); };
    out += fmt::format("dataset.eval_count = {}\n", config.eval_count);
    out += fmt::format("dataset.family = {}\n", family_name(config.dataset.family));
    out += fmt::format("dataset.gradient = {}\n", real(config.dataset.gradient));
    out += fmt::format("dataset.height = {}\n", config.dataset.height);
    out += fmt::format("dataset.noise_sigma = {}\n", real(config.dataset.noise_sigma));
    out += fmt::format("dataset.seed = {}\n", config.dataset.seed);
    out += fmt::format("dataset.train_count = {}\n", config.train_count);
    out += fmt::format("dataset.width = {}\n", config.dataset.width);
    out += fmt::format("eval.bootstrap_resamples = {}\n", config.eval.bootstrap_resamples);
    out += fmt::format("eval.sample_seed = {}\n", config.eval.sample_seed);
    out += fmt::format("eval.snapshot_stride = {}\n", config.eval.snapshot_stride);
    out += fmt::format("model.hidden = {}\n", join_ints(config.hidden));
    out += fmt::format("model.time_dim = {}\n", config.time_dim);
    out += fmt::format("schedule.steps = {}\n", config.schedule_steps);
    out += fmt::format("seed = {}\n", config.seed);
    out += fmt::format("stub.bias = {}\n", real(config.stub.bias));
    out += fmt::format("stub.gain = {}\n", real(config.stub.gain));
    out += fmt::format("stub.kernel = {}\n", config.stub.kernel);
    out += fmt::format("stub.kind = {}\n", kind_name(config.stub.kind));
    out += fmt::format("train.batch_size = {}\n", config.train.batch_size);
    out += fmt::format("train.iterations = {}\n", config.train.iterations);
    out += fmt::format("train.learning_rate = {}\n", real(config.train.learning_rate));
    out += fmt::format("train.restrict_t_to_t_prime = {}\n",
                       config.train.restrict_t_to_t_prime ? "true" : "false");
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    // FNV-1a 64
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string run_dir_name(const ExperimentConfig& config) {
    return fmt::format("{:016x}-s{}", config_hash(config), config.seed);
}

} // namespace resdiff
