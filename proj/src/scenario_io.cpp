// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

// Binary scenario files. Fixed little-endian layout:
//   magic "GFMUDSC1", kind u32 (1 = slot, 2 = stream), then the fields in
//   declaration order. Matrices are row-major f64 pairs (re, im); payloads
//   are one byte per bit.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfmud/airsim.hpp"

namespace gfmud {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'M', 'U', 'D', 'S', 'C', '1'};
constexpr std::uint32_t kKindSlot = 1;
constexpr std::uint32_t kKindStream = 2;

class Writer {
  public:
    explicit Writer(const std::string& path) : f_(path, std::ios::binary) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void raw(const void* p, std::size_t n) { f_.write(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void cmat(const CMat& m) {
        u64(m.rows);
        u64(m.cols);
        for (const cplx& z : m.v) {
            f64(z.real());
            f64(z.imag());
        }
    }
    void bits(const Bits& b) {
        u64(b.size());
        if (!b.empty()) raw(b.data(), b.size());
    }
    void cvec(const std::vector<cplx>& v) {
        u64(v.size());
        for (const cplx& z : v) {
            f64(z.real());
            f64(z.imag());
        }
    }
    void packet(const PacketRecord& p) {
        u32(p.user_id);
        i64(p.start_time);
        bits(p.payload);
        cvec(p.symbols);
    }
    void done() {
        f_.flush();
        if (!f_) throw std::runtime_error("scenario write failed");
    }

  private:
    std::ofstream f_;
};

class Reader {
  public:
    explicit Reader(const std::string& path) : f_(path, std::ios::binary) {
        if (!f_) throw std::runtime_error("cannot open for reading: " + path);
    }
    void raw(void* p, std::size_t n) {
        f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (f_.gcount() != static_cast<std::streamsize>(n))
            throw std::runtime_error("scenario file truncated");
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    CMat cmat() {
        const std::uint64_t r = u64(), c = u64();
        if (r > (1u << 20) || c > (1u << 26)) throw std::runtime_error("scenario: bad matrix size");
        CMat m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        for (cplx& z : m.v) {
            const double re = f64();
            const double im = f64();
            z = {re, im};
        }
        return m;
    }
    Bits bits() {
        const std::uint64_t n = u64();
        if (n > (1u << 24)) throw std::runtime_error("scenario: bad payload size");
        Bits b(static_cast<std::size_t>(n));
        if (n) raw(b.data(), static_cast<std::size_t>(n));
        return b;
    }
    std::vector<cplx> cvec() {
        const std::uint64_t n = u64();
        if (n > (1u << 24)) throw std::runtime_error("scenario: bad symbol count");
        std::vector<cplx> v(static_cast<std::size_t>(n));
        for (cplx& z : v) {
            const double re = f64();
            const double im = f64();
            z = {re, im};
        }
        return v;
    }
    PacketRecord packet() {
        PacketRecord p;
        p.user_id = u32();
        p.start_time = i64();
        p.payload = bits();
        p.symbols = cvec();
        return p;
    }
    void expect_magic(std::uint32_t kind) {
        char m[8];
        raw(m, 8);
        if (std::memcmp(m, kMagic, 8) != 0) throw std::runtime_error("not a scenario file");
        if (u32() != kind) throw std::runtime_error("scenario kind mismatch");
    }

  private:
    std::ifstream f_;
};

} // namespace

std::uint32_t stored_scenario_kind(const std::string& path) {
    Reader r(path);
    char m[8];
    r.raw(m, 8);
    if (std::memcmp(m, kMagic, 8) != 0) throw std::runtime_error("not a scenario file");
    const std::uint32_t kind = r.u32();
    if (kind != kKindSlot && kind != kKindStream)
        throw std::runtime_error("scenario: unknown kind");
    return kind;
}

void save_slot_scenario(const std::string& path, const SlotScenario& scn) {
    Writer w(path);
    w.raw(kMagic, 8);
    w.u32(kKindSlot);
    w.u32(scn.slot_len);
    w.u64(scn.seed);
    w.u64(scn.packets.size());
    for (const auto& p : scn.packets) w.packet(p);
    w.cmat(scn.channels);
    w.cmat(scn.signals);
    w.cmat(scn.noise);
    w.cmat(scn.observation);
    w.done();
}

SlotScenario load_slot_scenario(const std::string& path) {
    Reader r(path);
    r.expect_magic(kKindSlot);
    SlotScenario scn;
    scn.slot_len = r.u32();
    scn.seed = r.u64();
    const std::uint64_t np = r.u64();
    for (std::uint64_t i = 0; i < np; ++i) scn.packets.push_back(r.packet());
    scn.channels = r.cmat();
    scn.signals = r.cmat();
    scn.noise = r.cmat();
    scn.observation = r.cmat();
    return scn;
}

void save_stream_scenario(const std::string& path, const StreamScenario& scn) {
    Writer w(path);
    w.raw(kMagic, 8);
    w.u32(kKindStream);
    w.u32(scn.num_antennas);
    w.i64(scn.duration);
    w.u32(scn.packet_len);
    w.f64(scn.lambda);
    w.u32(scn.guard);
    w.f64(scn.sigma2);
    w.u64(scn.seed);
    w.u64(scn.packets.size());
    for (const auto& p : scn.packets) w.packet(p);
    w.cmat(scn.packet_channels);
    w.cmat(scn.noise);
    w.cmat(scn.samples);
    w.done();
}

StreamScenario load_stream_scenario(const std::string& path) {
    Reader r(path);
    r.expect_magic(kKindStream);
    StreamScenario scn;
    scn.num_antennas = r.u32();
    scn.duration = r.i64();
    scn.packet_len = r.u32();
    scn.lambda = r.f64();
    scn.guard = r.u32();
    scn.sigma2 = r.f64();
    scn.seed = r.u64();
    const std::uint64_t np = r.u64();
    for (std::uint64_t i = 0; i < np; ++i) scn.packets.push_back(r.packet());
    scn.packet_channels = r.cmat();
    scn.noise = r.cmat();
    scn.samples = r.cmat();
    return scn;
}

} // namespace gfmud
