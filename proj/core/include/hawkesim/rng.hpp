#pragma once

#include <array>
#include <cstdint>

namespace hawkes {

// Philox4x32-10 counter-based generator.  Each (key, stream, block) triple
// maps to 128 independent output bits, so replications can be assigned
// disjoint streams up front and produce identical results regardless of
// how work is scheduled across threads.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

// Stable stream identifiers.  A stream is (purpose, context, index):
// purpose separates estimator stages, context is typically a horizon or
// stratum slot, index is the replication number.
enum class StreamPurpose : std::uint64_t {
    simulate = 1,
    debias = 2,
    bootstrap = 3,
    coupled = 4,
    cluster = 5,
    generic = 6,
};

std::uint64_t make_stream_id(StreamPurpose purpose, std::uint64_t context, std::uint64_t index);

// One independent random stream.  Cheap to construct; all state is local,
// so streams never contend and draws are reproducible per (seed, stream id).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t context, std::uint64_t index);

    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform01();
    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_left();
    // Uniform strictly inside (0, 1); 52 random bits.
    double uniform01_open();
    double exponential(double rate);
    // Standard normal via Marsaglia polar with a cached spare.
    double normal();
    double normal(double mean, double stddev);
    // Exact Poisson sample for any mean >= 0.
    std::uint64_t poisson(double mean);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffer_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

}  // namespace hawkes
