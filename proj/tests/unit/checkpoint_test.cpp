#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "resdiff/checkpoint.hpp"

using namespace resdiff;

namespace {
Checkpoint make_checkpoint() {
    DenoiserConfig cfg;
    cfg.x_dim = 4;
    cfg.cond_dim = 3;
    cfg.hidden = {6, 5};
    cfg.time_emb.dim = 4;
    Rng rng(55);
    Checkpoint ck;
    ck.params = DenoiserParams::init(cfg, rng);
    ck.schedule_steps = 1000;
    ck.seed = 99;
    ck.iterations = 1234;
    return ck;
}
} // namespace

TEST_CASE("round trip preserves everything bitwise") {
    const auto dir = std::filesystem::temp_directory_path() / "resdiff_ck_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "model.rdk";
    const Checkpoint ck = make_checkpoint();
    save_checkpoint(path, ck);
    const Checkpoint back = load_checkpoint(path);
    CHECK(back.schedule_steps == ck.schedule_steps);
    CHECK(back.seed == ck.seed);
    CHECK(back.iterations == ck.iterations);
    CHECK(back.params.config.x_dim == 4);
    CHECK(back.params.config.cond_dim == 3);
    CHECK(back.params.config.hidden == std::vector<int>{6, 5});
    CHECK(back.params.config.time_emb.dim == 4);
    REQUIRE(back.params.layers.size() == ck.params.layers.size());
    for (std::size_t l = 0; l < ck.params.layers.size(); ++l) {
        CHECK(back.params.layers[l].in == ck.params.layers[l].in);
        CHECK(back.params.layers[l].out == ck.params.layers[l].out);
        for (std::size_t i = 0; i < ck.params.layers[l].w.size(); ++i) {
            CHECK(back.params.layers[l].w[i] == ck.params.layers[l].w[i]);
        }
        for (std::size_t i = 0; i < ck.params.layers[l].b.size(); ++i) {
            CHECK(back.params.layers[l].b[i] == ck.params.layers[l].b[i]);
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("missing and corrupt files are rejected") {
    const auto dir = std::filesystem::temp_directory_path() / "resdiff_ck_bad";
    std::filesystem::create_directories(dir);
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.rdk"), IoError);

    const auto garbage = dir / "garbage.rdk";
    {
        std::ofstream out(garbage, std::ios::binary);
        out << "not a checkpoint at all";
    }
    CHECK_THROWS_AS(load_checkpoint(garbage), IoError);

    const auto truncated = dir / "truncated.rdk";
    save_checkpoint(truncated, make_checkpoint());
    const auto full_size = std::filesystem::file_size(truncated);
    std::filesystem::resize_file(truncated, full_size / 2);
    CHECK_THROWS_AS(load_checkpoint(truncated), IoError);
    std::filesystem::remove_all(dir);
}
