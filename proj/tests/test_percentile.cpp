#include <catch2/catch.hpp>

#include <cmath>

#include "impactrank/mathutil.hpp"
#include "impactrank/percentile.hpp"

#include "fixtures.hpp"

using namespace impactrank;
using namespace impactrank::testing;

namespace {

/// O(N^2) pairwise-comparison rank: 1 + #smaller + (#equal - 1)/2.
std::vector<double> pairwise_hazen(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double smaller = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i]) smaller += 1.0;
            else if (v[j] == v[i]) equal += 1.0;
        }
        const double rank = 1.0 + smaller + 0.5 * (equal - 1.0);
        out[i] = (rank - 0.5) / static_cast<double>(n);
    }
    return out;
}

std::vector<double> random_values_with_ties(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
        if (uniform01(rng) < 0.5) x = static_cast<double>(uniform_below(rng, 20));
        else x = std::round(uniform01(rng) * 1e6) / 1e6 * 40.0 - 20.0;
    }
    return v;
}

}  // namespace

TEST_CASE("hazen percentiles on the basic cases") {
    SECTION("distinct values") {
        const auto p = hazen_percentiles({3.0, 1.0, 2.0});
        REQUIRE(p.size() == 3);
        CHECK(p[0] == Approx(2.5 / 3.0));
        CHECK(p[1] == Approx(0.5 / 3.0));
        CHECK(p[2] == Approx(1.5 / 3.0));
    }
    SECTION("tied pair shares the average rank") {
        const auto p = hazen_percentiles({5.0, 5.0});
        CHECK(p[0] == 0.5);
        CHECK(p[1] == 0.5);
    }
    SECTION("a single entity is the median") {
        CHECK(hazen_percentiles({7.0}) == std::vector<double>{0.5});
    }
    SECTION("empty and non-finite inputs are rejected") {
        CHECK_THROWS_AS(hazen_percentiles({}), DomainError);
        CHECK_THROWS_AS(hazen_percentiles({1.0, std::nan("")}), DomainError);
        CHECK_THROWS_AS(hazen_percentiles({1.0, std::numeric_limits<double>::infinity()}),
                        DomainError);
    }
}

TEST_CASE("hazen matches the pairwise oracle exhaustively") {
    // all value vectors of length 1..8 over {0,1,2}
    for (std::size_t len = 1; len <= 8; ++len) {
        std::vector<std::size_t> digits(len, 0);
        while (true) {
            std::vector<double> v(len);
            for (std::size_t i = 0; i < len; ++i) v[i] = static_cast<double>(digits[i]);
            REQUIRE(hazen_percentiles(v) == pairwise_hazen(v));
            std::size_t pos = 0;
            while (pos < len && digits[pos] == 2) digits[pos++] = 0;
            if (pos == len) break;
            ++digits[pos];
        }
    }
}

TEST_CASE("hazen properties on random vectors") {
    Rng rng = make_rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 500);
        const auto v = random_values_with_ties(rng, n);
        const auto ranks = hazen_average_ranks(v);
        const auto pct = hazen_percentiles(v);

        // ties preserve the rank sum n(n+1)/2 exactly (ranks are dyadic)
        double rank_sum = 0.0;
        for (double r : ranks) rank_sum += r;
        REQUIRE(rank_sum == 0.5 * static_cast<double>(n) * static_cast<double>(n + 1));

        const double lo = 0.5 / static_cast<double>(n);
        const double hi = (static_cast<double>(n) - 0.5) / static_cast<double>(n);
        for (double p : pct) {
            REQUIRE(p >= lo);
            REQUIRE(p <= hi);
        }

        // order preservation
        for (std::size_t i = 0; i + 1 < std::min<std::size_t>(n, 40); ++i)
            for (std::size_t j = i + 1; j < std::min<std::size_t>(n, 40); ++j) {
                if (v[i] < v[j]) REQUIRE(pct[i] < pct[j]);
                if (v[i] == v[j]) REQUIRE(pct[i] == pct[j]);
            }

        // invariance under strictly increasing transforms
        std::vector<double> affine(n), cubed(n), exped(n);
        for (std::size_t i = 0; i < n; ++i) {
            affine[i] = 2.5 * v[i] + 17.0;
            cubed[i] = v[i] * v[i] * v[i];
            exped[i] = std::exp(v[i] * 0.5);
        }
        REQUIRE(hazen_percentiles(affine) == pct);
        REQUIRE(hazen_percentiles(cubed) == pct);
        REQUIRE(hazen_percentiles(exped) == pct);
    }
}

TEST_CASE("publication percentiles rank by citations at age") {
    std::vector<Publication> pubs = {
        make_pub("A", {"s"}, 2000, {{2000, 50}}),
        make_pub("B", {"s"}, 2000, {{2000, 10}}),
        make_pub("C", {"s"}, 2000, {{2000, 30}}),
    };
    const Corpus c = Corpus::build({make_scholar("s")}, std::move(pubs), 2016);
    const auto pct = publication_percentile(c, BenchmarkSpec::all(), 5);
    CHECK(pct.at("A") == Approx(2.5 / 3.0));
    CHECK(pct.at("B") == Approx(0.5 / 3.0));
    CHECK(pct.at("C") == Approx(0.5));

    SECTION("full tie puts everyone at the median") {
        std::vector<Publication> tied = {
            make_pub("A", {"s"}, 2000, {{2000, 5}}),
            make_pub("B", {"s"}, 2001, {{2001, 5}}),
        };
        const Corpus c2 = Corpus::build({make_scholar("s")}, std::move(tied), 2016);
        for (const auto& [id, p] : publication_percentile(c2, BenchmarkSpec::all(), 3))
            CHECK(p == 0.5);
    }
    SECTION("empty eligible pool is an eligibility error") {
        CHECK_THROWS_AS(publication_percentile(c, BenchmarkSpec::all(), 18), EligibilityError);
    }
    SECTION("deterministic across equivalent corpora orderings") {
        std::vector<Publication> reversed = {
            make_pub("C", {"s"}, 2000, {{2000, 30}}),
            make_pub("B", {"s"}, 2000, {{2000, 10}}),
            make_pub("A", {"s"}, 2000, {{2000, 50}}),
        };
        const Corpus c3 = Corpus::build({make_scholar("s")}, std::move(reversed), 2016);
        CHECK(publication_percentile(c3, BenchmarkSpec::all(), 5) == pct);
    }
}

TEST_CASE("scholar percentiles") {
    SECTION("single-scholar benchmark sits at 0.5 for every age") {
        std::vector<Publication> pubs = {make_pub("p", {"s"}, 2000, {{2000, 3}})};
        const Corpus c = Corpus::build({make_scholar("s")}, std::move(pubs), 2016);
        for (int t = 1; t <= 12; ++t) {
            const auto pct = scholar_percentile(c, BenchmarkSpec::all(), MetricSpec::p5_sum(), t);
            REQUIRE(pct.size() == 1);
            CHECK(pct.at("s") == 0.5);
        }
    }
    SECTION("two scholars rank by their aggregates") {
        // a's two pubs hold 30 and 20 citations at age 5, b's single pub 10;
        // with N=3 pubs the P5 values are 5/6, 3/6, 1/6, so a sums to 8/6
        std::vector<Publication> pubs = {
            make_pub("a1", {"a"}, 2000, {{2000, 30}}),
            make_pub("a2", {"a"}, 2001, {{2001, 20}}),
            make_pub("b1", {"b"}, 2000, {{2000, 10}}),
        };
        const Corpus c =
            Corpus::build({make_scholar("a"), make_scholar("b")}, std::move(pubs), 2016);
        const auto pct = scholar_percentile(c, BenchmarkSpec::all(), MetricSpec::p5_sum(), 10);
        CHECK(pct.at("a") == 0.75);
        CHECK(pct.at("b") == 0.25);
    }
    SECTION("scholars with no rankable publications are excluded") {
        // b's only pub lacks a 5-year history at the corpus end
        std::vector<Publication> pubs = {
            make_pub("a1", {"a"}, 2000, {{2000, 3}}),
            make_pub("b1", {"b"}, 2015, {{2015, 9}}),
        };
        const Corpus c =
            Corpus::build({make_scholar("a"), make_scholar("b")}, std::move(pubs), 2016);
        const auto pct = scholar_percentile(c, BenchmarkSpec::all(), MetricSpec::p5_sum(), 1);
        CHECK(pct.size() == 1);
        CHECK(pct.count("a") == 1);
    }
}

TEST_CASE("future-works percentiles restrict to the (t1, t2] window") {
    // a publishes in the window, b does not
    std::vector<Publication> pubs = {
        make_pub("a1", {"a"}, 2000, {{2000, 3}}),
        make_pub("a2", {"a"}, 2006, {{2006, 8}}),
        make_pub("b1", {"b"}, 2000, {{2000, 5}}),
    };
    const Corpus c = Corpus::build({make_scholar("a"), make_scholar("b")}, std::move(pubs), 2016);
    const auto pct = future_works_percentile(c, BenchmarkSpec::all(), 5, 10);
    CHECK(pct.size() == 1);
    CHECK(pct.count("a") == 1);
    SECTION("t2 must exceed t1") {
        CHECK_THROWS_AS(future_works_percentile(c, BenchmarkSpec::all(), 5, 5), DomainError);
    }
    SECTION("empty window over all scholars is an eligibility error") {
        CHECK_THROWS_AS(future_works_percentile(c, BenchmarkSpec::all(), 11, 15),
                        EligibilityError);
    }
}

TEST_CASE("cohort distribution groups by career start") {
    std::vector<Publication> pubs = {
        make_pub("a1", {"a"}, 2000, {{2000, 3}}),
        make_pub("b1", {"b"}, 2000, {{2000, 5}}),
        make_pub("c1", {"c"}, 2001, {{2001, 4}}),
    };
    const Corpus c = Corpus::build(
        {make_scholar("a"), make_scholar("b"), make_scholar("c")}, std::move(pubs), 2016);
    const auto buckets =
        cohort_distribution(c, BenchmarkSpec::all(), MetricSpec::p5_sum(), 5);
    REQUIRE(buckets.size() == 2);
    CHECK(buckets.at(2000).size() == 2);
    CHECK(buckets.at(2001).size() == 1);
    SECTION("single cohort year keeps everyone in one bucket") {
        const auto one = cohort_distribution(
            c, BenchmarkSpec::all().with_cohort(CohortFilter::Key::career_start, 2000),
            MetricSpec::p5_sum(), 5);
        REQUIRE(one.size() == 1);
        CHECK(one.at(2000).size() == 2);
    }
}

TEST_CASE("series builders collect values and benchmark sizes per age") {
    const Corpus c = small_corpus();
    std::vector<int> ages;
    for (int t = 1; t <= 30; ++t) ages.push_back(t);
    const SeriesSet pubs = publication_percentile_series(c, BenchmarkSpec::all(), ages);
    REQUIRE(pubs.by_entity.count("p1") == 1);
    const auto& s = pubs.by_entity.at("p1");
    // p1 (2000) is observed 17 years
    CHECK(s.values.size() == 17);
    CHECK(s.benchmark_size.at(1) == 4);
    CHECK(s.benchmark_size.at(17) == 1);
    // p4 (2010, 7 observed years) leaves the pool after age 7,
    // p2 (2005) after age 12
    CHECK(s.benchmark_size.at(7) == 4);
    CHECK(s.benchmark_size.at(8) == 3);
    CHECK(s.benchmark_size.at(13) == 2);

    const SeriesSet sch =
        scholar_percentile_series(c, BenchmarkSpec::all(), MetricSpec::scholar_citations(), ages, 2);
    CHECK(sch.by_entity.at("s1").values.size() == 17);
    CHECK(sch.by_entity.at("s3").values.size() == 7);

    SECTION("every value respects the Hazen bounds of its age's pool size") {
        for (const SeriesSet* set : {&pubs, &sch}) {
            for (const auto& [id, series] : set->by_entity) {
                for (const auto& [age, v] : series.values) {
                    const double n = series.benchmark_size.at(age);
                    CHECK(v >= 0.5 / n);
                    CHECK(v <= (n - 0.5) / n);
                }
            }
        }
    }
}

TEST_CASE("mean percentile is one half by construction") {
    Rng rng = make_rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 200);
        const auto v = random_values_with_ties(rng, n);
        const auto pct = hazen_percentiles(v);
        double s = 0.0;
        for (double p : pct) s += p;
        CHECK(std::fabs(s / static_cast<double>(n) - 0.5) < 1e-12);
    }
}
