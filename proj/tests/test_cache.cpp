#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "traceforge/cache.hpp"
#include "traceforge/trace_engine.hpp"

using namespace traceforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("traceforge_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string bytes_of(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

WeierstrassQ e37() { return WeierstrassQ(oracle::coeffs(0, 0, 1, -1, 0), "37a1"); }

} // namespace

TEST(CacheFormat, Sha256KnownVector)
{
    EXPECT_EQ(cache::to_hex(cache::sha256("abc")),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CacheFormat, EncodeDecodeRoundTrip)
{
    cache::Contents c{cache::sha256("[0,0,1,-1,0]"), 100, {{2, -2}, {3, -3}, {5, -2}, {37, -1}}};
    const std::string bytes = cache::encode(c);
    EXPECT_EQ(bytes.size(), cache::kHeaderSize + 4 * cache::kRecordSize);
    EXPECT_EQ(bytes.substr(0, 8), "APCACHE1");
    EXPECT_EQ(cache::decode(bytes), c);
    // a torn final record is dropped
    EXPECT_EQ(cache::decode(bytes.substr(0, bytes.size() - 5)).entries.size(), 3U);
}

TEST(CacheFormat, LittleEndianLayout)
{
    cache::Contents c{{}, 0x0102030405060708ULL, {{0x11, -1}}};
    const std::string b = cache::encode(c);
    EXPECT_EQ(static_cast<unsigned char>(b[40]), 0x08);
    EXPECT_EQ(static_cast<unsigned char>(b[47]), 0x01);
    EXPECT_EQ(static_cast<unsigned char>(b[48]), 0x11);
    EXPECT_EQ(static_cast<unsigned char>(b[56]), 0xFF);
    EXPECT_EQ(static_cast<unsigned char>(b[59]), 0xFF);
}

TEST(CacheFormat, BadMagic)
{
    std::string bytes = cache::encode({});
    bytes[0] = 'X';
    try {
        cache::decode(bytes);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CacheMismatch);
    }
}

TEST(CacheFile, RoundTripIsBitExact)
{
    const fs::path dir = scratch_dir("roundtrip");
    const fs::path file = dir / "e.apcache";
    const TraceTable cold = trace_range(e37(), 50000, {}, file);
    const std::string first = bytes_of(file);
    const cache::Contents c = cache::read_file(file);
    EXPECT_EQ(c.x_max, 50000U);
    EXPECT_EQ(c.entries.size(), cold.records.size());
    cache::write_file(dir / "copy.apcache", c);
    EXPECT_EQ(bytes_of(dir / "copy.apcache"), first);
    // reading through the cache yields an identical table
    EXPECT_EQ(trace_range(e37(), 50000, {}, file), cold);
    EXPECT_EQ(bytes_of(file), first);
}

TEST(CacheFile, ResumeAfterTruncationEqualsColdRun)
{
    const fs::path dir = scratch_dir("resume");
    const fs::path cold_file = dir / "cold.apcache";
    const fs::path warm_file = dir / "warm.apcache";
    const TraceTable cold = trace_range(e37(), 60000, {}, cold_file);
    const std::string cold_bytes = bytes_of(cold_file);

    // keep the header and 1000 and a half records, as if a write was interrupted
    {
        std::ofstream out(warm_file, std::ios::binary);
        const std::string partial = cold_bytes.substr(0, cache::kHeaderSize + 1000 * cache::kRecordSize + 7);
        out.write(partial.data(), static_cast<std::streamsize>(partial.size()));
    }
    const TraceTable resumed = trace_range(e37(), 60000, {}, warm_file);
    EXPECT_EQ(resumed, cold);
    EXPECT_EQ(bytes_of(warm_file), cold_bytes);
}

TEST(CacheFile, ExtendsSmallerRun)
{
    const fs::path dir = scratch_dir("extend");
    const fs::path file = dir / "e.apcache";
    trace_range(e37(), 1000, {}, file);
    const TraceTable big = trace_range(e37(), 20000, {}, file);
    EXPECT_EQ(big, trace_range(e37(), 20000));
    EXPECT_EQ(cache::read_file(file).x_max, 20000U);
}

TEST(CacheFile, ForeignCurveMismatch)
{
    const fs::path dir = scratch_dir("mismatch");
    const fs::path file = dir / "e.apcache";
    trace_range(e37(), 1000, {}, file);
    const WeierstrassQ other(oracle::coeffs(0, -1, 1, 0, 0), "11a3");
    try {
        trace_range(other, 1000, {}, file);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CacheMismatch);
    }
    ThresholdPolicy flipped;
    flipped.sign = BadPrimeSign::Flipped;
    EXPECT_THROW(trace_range(e37(), 1000, flipped, file), Error);
}

TEST(CacheFile, NonConsecutiveRecordsRejected)
{
    const fs::path dir = scratch_dir("gaps");
    const fs::path file = dir / "e.apcache";
    cache::write_file(file, {curve_hash(e37()), 100, {{2, -2}, {5, -2}}});
    EXPECT_THROW(trace_range(e37(), 100, {}, file), Error);
}
