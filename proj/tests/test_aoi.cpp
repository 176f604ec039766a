#include "doctest.h"

#include <cmath>
#include <set>

#include "v2v/aoi.hpp"

using namespace v2v;

TEST_SUITE("aoi")
{
    TEST_CASE("exact multiples and zero never move")
    {
        Rng rng(1);
        for (int k = 0; k < 1000; ++k) {
            const auto a = probabilistic_round(0.2, 0.1, rng);
            REQUIRE(a.offset == 2);
            REQUIRE(a.age_s == doctest::Approx(0.2).epsilon(1e-15));
            const auto z = probabilistic_round(0.0, 0.1, rng);
            REQUIRE(z.offset == 0);
            REQUIRE(z.age_s == 0.0);
        }
    }

    TEST_CASE("half-way delay splits evenly between neighbours")
    {
        Rng rng(2);
        const int draws = 100000;
        double sum = 0.0;
        std::set<std::int64_t> seen;
        for (int k = 0; k < draws; ++k) {
            const auto s = probabilistic_round(0.25, 0.1, rng);
            seen.insert(s.offset);
            sum += s.age_s;
        }
        CHECK(seen == std::set<std::int64_t>{2, 3});
        CHECK(std::abs(sum / draws - 0.25) < 0.001);
    }

    TEST_CASE("expectation is preserved within three standard errors on random delays")
    {
        Rng pick(3);
        for (int trial = 0; trial < 10; ++trial) {
            const double delay = 2.0 * uniform01(pick);
            Rng rng(100 + static_cast<std::uint64_t>(trial));
            const int draws = 100000;
            double sum = 0.0;
            for (int k = 0; k < draws; ++k) {
                const auto s = probabilistic_round(delay, 0.1, rng);
                REQUIRE(std::abs(s.age_s - delay) < 0.1);
                REQUIRE(s.offset >= 0);
                sum += s.age_s;
            }
            CHECK(std::abs(sum / draws - delay) < 3.0 * 0.1 * std::sqrt(0.25 / draws));
        }
    }

    TEST_CASE("rounding rejects bad input")
    {
        Rng rng(0);
        CHECK_THROWS_AS(probabilistic_round(-0.1, 0.1, rng), DomainError);
        CHECK_THROWS_AS(probabilistic_round(0.1, 0.0, rng), DomainError);
        CHECK_THROWS_AS(probabilistic_round(NAN, 0.1, rng), DomainError);
    }

    TEST_CASE("records: one per ordered link plus ego, with exact decomposition")
    {
        MatrixXr delay(3, 3);
        delay << 0, 0.05, 0.31, 0.12, 0, 0.7, 0.2, 0.01, 0;
        AoiConfig cfg;
        cfg.compute_delay_s = 0.03;
        cfg.compute_delay_overrides_s = {0.03, 0.08, 0.0};
        Rng rng(4);
        const auto records = build_aoi_records(delay, cfg, rng);
        REQUIRE(records.size() == 9);
        std::size_t ego = 0;
        for (const auto& r : records) {
            CHECK(r.total_delay_s == r.comm_delay_s + r.compute_delay_s);
            CHECK(r.compute_delay_s == cfg.compute_delay_for(r.sender));
            CHECK(r.snapped_age_s == doctest::Approx(static_cast<double>(r.timestamp_offset) * 0.1).epsilon(1e-15));
            CHECK(std::abs(r.snapped_age_s - r.total_delay_s) < 0.1);
            if (r.is_ego()) {
                ++ego;
                CHECK(r.comm_delay_s == 0.0);
            } else {
                CHECK(r.comm_delay_s == delay(r.sender, r.receiver));
            }
        }
        CHECK(ego == 3);

        cfg.include_ego = false;
        Rng again(4);
        CHECK(build_aoi_records(delay, cfg, again).size() == 6);
    }

    TEST_CASE("records are deterministic given the seed")
    {
        MatrixXr delay = MatrixXr::Constant(4, 4, 0.137);
        delay.diagonal().setZero();
        AoiConfig cfg;
        Rng a(9);
        Rng b(9);
        const auto ra = build_aoi_records(delay, cfg, a);
        const auto rb = build_aoi_records(delay, cfg, b);
        REQUIRE(ra.size() == rb.size());
        for (std::size_t k = 0; k < ra.size(); ++k)
            CHECK(ra[k].timestamp_offset == rb[k].timestamp_offset);
    }

    TEST_CASE("comm 0.05 with no compute snaps to 0 or 0.1 about equally")
    {
        MatrixXr delay(2, 2);
        delay << 0, 0.05, 0.05, 0;
        AoiConfig cfg;
        cfg.include_ego = false;
        Rng rng(5);
        int ups = 0;
        const int runs = 20000;
        for (int k = 0; k < runs; ++k)
            for (const auto& r : build_aoi_records(delay, cfg, rng)) {
                REQUIRE((r.timestamp_offset == 0 || r.timestamp_offset == 1));
                ups += static_cast<int>(r.timestamp_offset);
            }
        CHECK(static_cast<double>(ups) / (2.0 * runs) == doctest::Approx(0.5).epsilon(0.02));
    }

    TEST_CASE("compute 0.1 with no comm always snaps to 0.1; all-zero snaps to 0")
    {
        MatrixXr zero = MatrixXr::Zero(3, 3);
        AoiConfig cfg;
        cfg.compute_delay_s = 0.1;
        Rng rng(6);
        for (const auto& r : build_aoi_records(zero, cfg, rng)) {
            CHECK(r.timestamp_offset == 1);
            CHECK(r.snapped_age_s == doctest::Approx(0.1).epsilon(1e-15));
        }
        cfg.compute_delay_s = 0.0;
        for (const auto& r : build_aoi_records(zero, cfg, rng)) {
            CHECK(r.timestamp_offset == 0);
            CHECK(r.snapped_age_s == 0.0);
        }
    }

    TEST_CASE("summary examples")
    {
        auto record = [](double age) {
            AoiRecord r;
            r.sender = 0;
            r.receiver = 1;
            r.snapped_age_s = age;
            return r;
        };

        SUBCASE("single record")
        {
            const auto s = aoi_summary({record(0.1)}, 0.1);
            CHECK(s.max_age_s == 0.1);
            CHECK(s.mean_age_s == 0.1);
            CHECK(s.age_variance_s2 == 0.0);
            CHECK(s.stale_count == 0);
            CHECK(s.record_count == 1);
        }
        SUBCASE("two ages against looptime 0.2")
        {
            const auto s = aoi_summary({record(0.1), record(0.3)}, 0.2);
            CHECK(s.max_age_s == 0.3);
            CHECK(s.mean_age_s == doctest::Approx(0.2).epsilon(1e-15));
            CHECK(s.min_age_s == 0.1);
            CHECK(s.stale_count == 1);
            CHECK(s.mean_effective_age_s == doctest::Approx(0.4).epsilon(1e-15));
            CHECK(s.max_effective_age_s == doctest::Approx(0.5).epsilon(1e-15));
        }
        SUBCASE("equal ages have zero variance")
        {
            const auto s = aoi_summary({record(0.7), record(0.7), record(0.7)}, 0.1);
            CHECK(s.age_variance_s2 == 0.0);
            CHECK(s.stale_count == 3);
        }
        SUBCASE("empty input")
        {
            CHECK_THROWS_AS(aoi_summary({}, 0.1), DomainError);
        }
    }

    TEST_CASE("config validation")
    {
        AoiConfig cfg;
        cfg.sample_period_s = 0.0;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
        cfg = {};
        cfg.compute_delay_s = -1.0;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
        cfg = {};
        cfg.looptime_s = 0.05;
        CHECK_THROWS_AS(cfg.validate(), DomainError);
    }
}
