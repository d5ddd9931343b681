#include <doctest.h>

#include <cmath>

#include "sdn/ism.hpp"
#include "sdn/network.hpp"
#include "test_helpers.hpp"

using namespace sdn;

TEST_CASE("enumerate_images basics") {
    auto scene = sdn::test::desk_scene();

    SUBCASE("below the first reflection only the source remains") {
        // Closest wall to the pair is z at 1.3/1.5 m; direct distance ~2.2 m.
        const double direct = distance(scene.source_pos, scene.mic_pos);
        const double t = (direct + 0.05) / scene.sound_speed;
        auto images = enumerate_images(scene, t);
        REQUIRE(images.size() == 1);
        CHECK(images[0].order == 0);
        CHECK(distance(images[0].position, scene.source_pos) == 0.0);
    }
    SUBCASE("first-order images mirror the source") {
        auto images = enumerate_images(scene, 0.05);
        int first_order = 0;
        for (const auto& img : images) {
            if (img.order != 1) continue;
            ++first_order;
            // Mirrored in exactly one coordinate.
            int mirrored = 0;
            for (int d = 0; d < 3; ++d) {
                const double lo = -scene.source_pos[d];
                const double hi = 2.0 * scene.room_dims[d] - scene.source_pos[d];
                if (img.position[d] == doctest::Approx(lo) ||
                    img.position[d] == doctest::Approx(hi))
                    ++mirrored;
                else
                    CHECK(img.position[d] == doctest::Approx(scene.source_pos[d]));
            }
            CHECK(mirrored == 1);
        }
        CHECK(first_order == 6);
    }
    SUBCASE("image count tracks the sphere-volume estimate") {
        SceneConfig cube;
        cube.room_dims = {5.0, 5.0, 5.0};
        cube.source_pos = {2.2, 2.6, 2.4};
        cube.mic_pos = {2.8, 2.3, 2.6};
        const double t_max = 0.1;
        auto images = enumerate_images(cube, t_max);
        const double radius = cube.sound_speed * t_max;
        const double estimate =
            4.0 / 3.0 * 3.14159265358979323846 * radius * radius * radius / cube.volume();
        CHECK(std::abs(static_cast<double>(images.size()) - estimate) < 0.25 * estimate);

        // Doubling the horizon multiplies the count by ~8.
        auto doubled = enumerate_images(cube, 2.0 * t_max);
        const double ratio = static_cast<double>(doubled.size()) / images.size();
        CHECK(ratio > 8.0 * 0.8);
        CHECK(ratio < 8.0 * 1.2);
    }
    SUBCASE("deterministic ordering") {
        auto a = enumerate_images(scene, 0.05);
        auto b = enumerate_images(scene, 0.05);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].lattice == b[i].lattice);
            CHECK(a[i].parity == b[i].parity);
        }
    }
}

TEST_CASE("render_rir_ism") {
    auto scene = sdn::test::desk_scene();

    SUBCASE("rigid walls give 1/r at the direct bin") {
        scene.wall_alpha.fill(0.0);
        auto rir = render_rir_ism(scene, 0.02);
        const double d = distance(scene.source_pos, scene.mic_pos);
        const long bin = delay_samples(d, scene.sample_rate, scene.sound_speed);
        CHECK(rir.samples[static_cast<std::size_t>(bin)] == doctest::Approx(1.0 / d));
    }
    SUBCASE("beta = 0 keeps only the direct path") {
        scene.wall_alpha.fill(1.0);
        auto rir = render_rir_ism(scene, 0.1);
        const long bin = delay_samples(distance(scene.source_pos, scene.mic_pos),
                                       scene.sample_rate, scene.sound_speed);
        for (std::size_t n = 0; n < rir.samples.size(); ++n)
            if (static_cast<long>(n) != bin) CHECK(rir.samples[n] == 0.0);
    }
    SUBCASE("finite energy for |beta| < 1") {
        scene.wall_alpha.fill(0.3);
        auto rir = render_rir_ism(scene, 0.6);
        CHECK(std::isfinite(rir.energy()));
        CHECK(rir.energy() > 0.0);
    }
    SUBCASE("negative per-wall beta is honored") {
        scene.wall_alpha.fill(0.1);
        scene.negative_beta = true;
        int first_order = 0;
        for (const auto& img : enumerate_images(scene, 0.05)) {
            if (img.order == 1) {
                ++first_order;
                CHECK(img.amplitude < 0.0); // one bounce of beta = -sqrt(0.9)
            }
            if (img.order == 2) CHECK(img.amplitude > 0.0);
        }
        CHECK(first_order == 6);
    }
}

TEST_CASE("SDN and ISM agree on direct path and first-order reflections") {
    auto scene = sdn::test::desk_scene();
    scene.sample_rate = 24000.0;
    auto net = SdnNetwork::build(scene, MatrixKind::Isotropic, 0);
    auto sdn_rir = net.render_rir(0.03);
    auto ism_rir = render_rir_ism(scene, 0.03);

    const long direct = net.direct_delay();
    CHECK(sdn_rir.samples[static_cast<std::size_t>(direct)] ==
          doctest::Approx(ism_rir.samples[static_cast<std::size_t>(direct)]).epsilon(1e-12));

    for (int wall = 0; wall < kNumWalls; ++wall) {
        const long bin = net.source_delay(wall) + net.mic_delay(wall);
        CHECK(std::abs(sdn_rir.samples[static_cast<std::size_t>(bin)] -
                       ism_rir.samples[static_cast<std::size_t>(bin)]) < 1e-9);
    }
}
