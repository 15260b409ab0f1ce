#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace ppc {

// Counter-based generator (Philox 4x64, 10 rounds).  A stream is identified
// by (seed, stream_id); substreams occupy the upper counter words, so a
// stream, its substreams and their sub-substreams can never collide and the
// whole family is cheap to construct -- no jump-ahead needed.
//
// Every draw is a pure function of (seed, stream_id, substream path, draw
// index).  This is what makes parallel replicate loops reproducible: worker
// count cannot change the numbers any task sees.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_{seed, stream_id}, seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Independent child stream; `k` may range over the full 64-bit space.
    RngStream substream(std::uint64_t k) const {
        RngStream child(seed_, stream_id_);
        child.depth_ = depth_ + 1;
        if (child.depth_ > 2)
            throw std::logic_error("RngStream: substream nesting deeper than 2 is unsupported");
        child.ctr_ = {0, 0, depth_ == 0 ? k + 1 : ctr_[2], depth_ == 0 ? 0 : k + 1};
        return child;
    }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            block_ = philox(ctr_, key_);
            if (++ctr_[0] == 0) ++ctr_[1];  // 128-bit draw counter
            pos_ = 0;
        }
        return block_[pos_++];
    }

    // Uniform on the open interval (0,1); 53 significant bits.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

  private:
    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static std::array<std::uint64_t, 4> philox(std::array<std::uint64_t, 4> x,
                                               std::array<std::uint64_t, 2> k) {
        constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(kM0, x[0], hi0, lo0);
            mulhilo(kM1, x[2], hi1, lo1);
            x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
            k[0] += kW0;
            k[1] += kW1;
        }
        return x;
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
    std::array<std::uint64_t, 4> block_{};
    int pos_ = 4;
    int depth_ = 0;
    std::uint64_t seed_, stream_id_;
};

}  // namespace ppc
