#include "doctest.h"

#include <cctype>
#include <filesystem>
#include <fstream>

#include "resdiff/config.hpp"
#include "resdiff/error.hpp"

using namespace resdiff;

TEST_CASE("the empty config is the documented default run") {
    const ExperimentConfig c = parse_config_text("");
    CHECK(c.seed == 0);
    CHECK(c.out_dir == "runs");
    CHECK(c.schedule_steps == 1000);
    CHECK(c.dataset.height == 16);
    CHECK(c.dataset.width == 16);
    CHECK(c.dataset.family == ShapeFamily::mixed);
    CHECK(c.dataset.noise_sigma == 0.5);
    CHECK(c.dataset.gradient == 0.4);
    CHECK(c.train_count == 512);
    CHECK(c.eval_count == 128);
    CHECK(c.stub.kind == StubKind::affine_blur);
    CHECK(c.stub.gain == 0.8);
    CHECK(c.stub.bias == 0.1);
    CHECK(c.stub.kernel == 3);
    CHECK(c.hidden == std::vector<int>{256, 256, 256});
    CHECK(c.time_dim == 32);
    CHECK(c.train.batch_size == 16);
    CHECK(c.train.iterations == 20000);
    CHECK(c.train.learning_rate == 1e-3);
    CHECK(c.train.restrict_t_to_t_prime);
    CHECK(c.eval.sample_seed == 1);
    CHECK(c.eval.bootstrap_resamples == 1000);
    CHECK(c.eval.snapshot_stride == 0);
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
    const ExperimentConfig c = parse_config_text(
        "# full-line comment\n"
        "\n"
        "  seed=42   \n"
        "train.batch_size = 8 # trailing comment\n"
        "\tmodel.hidden = 64, 32\n");
    CHECK(c.seed == 42);
    CHECK(c.train.batch_size == 8);
    CHECK(c.hidden == std::vector<int>{64, 32});
}

TEST_CASE("unknown, duplicate, and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("schedule.step = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("seed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just some words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("schedule.steps = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("schedule.steps = 10x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("stub.gain = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("train.restrict_t_to_t_prime = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.family = blob\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("stub.kind = oracle\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("model.hidden = 64,\n"), ConfigError);
}

TEST_CASE("boolean keys accept both spellings") {
    CHECK_FALSE(parse_config_text("train.restrict_t_to_t_prime = false\n").train.restrict_t_to_t_prime);
    CHECK_FALSE(parse_config_text("train.restrict_t_to_t_prime = 0\n").train.restrict_t_to_t_prime);
    CHECK(parse_config_text("train.restrict_t_to_t_prime = true\n").train.restrict_t_to_t_prime);
    CHECK(parse_config_text("train.restrict_t_to_t_prime = 1\n").train.restrict_t_to_t_prime);
}

TEST_CASE("validation rejects out-of-range values after parsing") {
    CHECK_THROWS_AS(parse_config_text("schedule.steps = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.train_count = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dataset.height = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("model.hidden = 64,0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("model.time_dim = 7\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("stub.kernel = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("stub.gain = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("train.batch_size = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("train.learning_rate = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eval.bootstrap_resamples = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eval.snapshot_stride = -1\n"), ConfigError);
}

TEST_CASE("derived configs share the master seed and stub") {
    const ExperimentConfig c = parse_config_text("seed = 7\ndataset.height = 8\ndataset.width = 4\n");
    const TrainConfig tc = c.train_config();
    CHECK(tc.seed == 7);
    CHECK(tc.stub.kind == StubKind::affine_blur);
    const DenoiserConfig mc = c.model_config();
    CHECK(mc.x_dim == 32);
    CHECK(mc.cond_dim == 32);
    CHECK(mc.time_emb.dim == 32);
    CHECK(c.dataset_spec().count == 512 + 128);
}

TEST_CASE("the canonical dump is a fixed point of the parser") {
    const ExperimentConfig c = parse_config_text(
        "seed = 3\n"
        "model.hidden = 48,24\n"
        "stub.gain = 0.65\n"
        "dataset.family = disc\n"
        "train.restrict_t_to_t_prime = false\n");
    const std::string canon = canonical_config(c);
    CHECK(canonical_config(parse_config_text(canon)) == canon);
    CHECK(canon.find("model.hidden = 48,24\n") != std::string::npos);
    CHECK(canon.find("dataset.family = disc\n") != std::string::npos);
    CHECK(canon.find("out_dir") == std::string::npos);
}

TEST_CASE("the run directory name hashes everything but the output root") {
    const ExperimentConfig base = parse_config_text("");
    const ExperimentConfig moved = parse_config_text("out_dir = elsewhere\n");
    const ExperimentConfig reseeded = parse_config_text("seed = 1\n");
    const ExperimentConfig widened = parse_config_text("model.time_dim = 16\n");
    CHECK(config_hash(base) == config_hash(moved));
    CHECK(config_hash(base) != config_hash(reseeded));
    CHECK(config_hash(base) != config_hash(widened));

    const std::string name = run_dir_name(base);
    REQUIRE(name.size() == 16 + 3);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(std::isxdigit(static_cast<unsigned char>(name[i])));
    }
    CHECK(name.substr(16) == "-s0");
    CHECK(run_dir_name(reseeded).substr(16) == "-s1");
    CHECK(run_dir_name(moved) == name);
}

TEST_CASE("configs load from disk and missing files are reported") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "resdiff_config_test.cfg";
    {
        std::ofstream out(path);
        out << "seed = 11\nschedule.steps = 50\n";
    }
    const ExperimentConfig c = load_config(path);
    CHECK(c.seed == 11);
    CHECK(c.schedule_steps == 50);
    fs::remove(path);
    CHECK_THROWS_AS(load_config(path), IoError);
}
