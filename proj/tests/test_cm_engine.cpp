#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "traceforge/cm_engine.hpp"
#include "traceforge/primes.hpp"
#include "traceforge/trace_engine.hpp"

using namespace traceforge;

namespace {

std::vector<NormSolution> exhaustive(std::uint64_t p, CmDisc disc)
{
    std::vector<NormSolution> out;
    const std::uint64_t d = abs_disc(disc);
    for (std::uint64_t t = static_cast<std::uint64_t>(std::floor(2 * std::sqrt(static_cast<double>(p)))); t >= 1; --t) {
        const std::uint64_t t2 = t * t;
        if (t2 >= 4 * p || (4 * p - t2) % d != 0)
            continue;
        const std::uint64_t v2 = (4 * p - t2) / d;
        const auto v = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(v2))));
        if (v > 0 && v * v == v2)
            out.push_back({t, v});
    }
    return out;
}

WeierstrassQ curve(long a4, long a6)
{
    return WeierstrassQ(oracle::coeffs(0, 0, 0, a4, a6));
}

} // namespace

TEST(Split, Examples)
{
    EXPECT_TRUE(is_split(13, CmDisc::MinusThree));
    EXPECT_FALSE(is_split(5, CmDisc::MinusThree));
    EXPECT_TRUE(is_split(13, CmDisc::MinusFour));
    EXPECT_FALSE(is_split(7, CmDisc::MinusFour));
    EXPECT_THROW(is_split(2, CmDisc::MinusFour), Error);
    EXPECT_THROW(is_split(3, CmDisc::MinusThree), Error);
}

TEST(Cornacchia, Examples)
{
    EXPECT_EQ(cornacchia(13, CmDisc::MinusFour).solutions, (std::vector<NormSolution>{{6, 2}, {4, 3}}));
    EXPECT_EQ(cornacchia(13, CmDisc::MinusThree).solutions, (std::vector<NormSolution>{{7, 1}, {5, 3}, {2, 4}}));
    EXPECT_EQ(cornacchia(5, CmDisc::MinusFour).solutions, (std::vector<NormSolution>{{4, 1}, {2, 2}}));
    EXPECT_EQ(cornacchia(7, CmDisc::MinusThree).solutions, (std::vector<NormSolution>{{5, 1}, {4, 2}, {1, 3}}));
}

TEST(Cornacchia, InertPrimeRejected)
{
    try {
        cornacchia(7, CmDisc::MinusFour);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotSplit);
    }
}

TEST(Cornacchia, MatchesExhaustiveSearch)
{
    for (std::uint64_t p : sieve_primes(20000)) {
        for (CmDisc disc : {CmDisc::MinusThree, CmDisc::MinusFour}) {
            if (p == 2 || (p == 3 && disc == CmDisc::MinusThree) || !is_split(p, disc))
                continue;
            const NormSolutionSet s = cornacchia(p, disc);
            EXPECT_EQ(s.solutions, exhaustive(p, disc)) << "p=" << p << " disc=" << static_cast<int>(disc);
            if (disc == CmDisc::MinusFour) {
                for (const auto& sol : s.solutions)
                    EXPECT_EQ(sol.t % 2, 0U);
            }
        }
    }
}

TEST(CmTrace, Examples)
{
    EXPECT_EQ(cm_trace(reduce_mod_p(curve(0, 1), 5), CmDisc::MinusThree), 0);
    const std::int64_t a13 = cm_trace(reduce_mod_p(curve(-1, 0), 13), CmDisc::MinusFour);
    EXPECT_EQ(a13, trace_naive(reduce_mod_p(curve(-1, 0), 13)));
    EXPECT_EQ(std::abs(a13) == 6 || std::abs(a13) == 4, true);
    const std::int64_t a7 = cm_trace(reduce_mod_p(curve(0, 1), 7), CmDisc::MinusThree);
    EXPECT_EQ(a7, trace_naive(reduce_mod_p(curve(0, 1), 7)));
    EXPECT_TRUE(std::abs(a7) == 1 || std::abs(a7) == 4 || std::abs(a7) == 5);
}

TEST(CmTrace, EqualsNaiveOnCmCorpus)
{
    const std::vector<std::pair<WeierstrassQ, CmDisc>> curves = {
        {curve(0, 1), CmDisc::MinusThree},
        {curve(0, -11), CmDisc::MinusThree},
        {curve(-1, 0), CmDisc::MinusFour},
        {curve(-25, 0), CmDisc::MinusFour},
    };
    for (const auto& [e, disc] : curves) {
        for (std::uint64_t p : sieve_primes(10000)) {
            if (p <= 3 || !e.is_good(p))
                continue;
            const ReducedCurve rc = reduce_mod_p(e, p);
            const std::int64_t naive = trace_naive(rc);
            ASSERT_EQ(cm_trace(rc, disc), naive) << e.canonical_string() << " p=" << p;
            if (is_split(p, disc)) {
                // the true trace is among the Cornacchia candidates
                bool found = false;
                for (const auto& s : cornacchia(p, disc).solutions)
                    found = found || static_cast<std::int64_t>(s.t) == std::abs(naive);
                EXPECT_TRUE(found) << p;
            }
        }
    }
}

TEST(CmTrace, SeedIndependent)
{
    const ReducedCurve rc = reduce_mod_p(curve(0, -11), 1000003);
    const std::int64_t a = cm_trace(rc, CmDisc::MinusThree);
    for (std::uint64_t seed = 1; seed < 10; ++seed)
        EXPECT_EQ(cm_trace(rc, CmDisc::MinusThree, {.seed = seed}), a);
}

TEST(CmTrace, InertVanishing)
{
    for (std::uint64_t p : sieve_primes(100000)) {
        if (p <= 3)
            continue;
        if (p % 3 == 2) {
            EXPECT_EQ(cm_trace(reduce_mod_p(curve(0, 1), p), CmDisc::MinusThree), 0);
        }
        if (p % 4 == 3 && p != 5) {
            EXPECT_EQ(cm_trace(reduce_mod_p(curve(-25, 0), p), CmDisc::MinusFour), 0);
        }
    }
}

TEST(CmTrace, PerPrimeSeedsDiffer)
{
    EXPECT_NE(per_prime_seed(0, 5), per_prime_seed(0, 7));
    EXPECT_NE(per_prime_seed(1, 5), per_prime_seed(0, 5));
    EXPECT_EQ(per_prime_seed(3, 11), per_prime_seed(3, 11));
}
