// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include <cstdlib>
#include <cstring>

#include "gfmud/kernels.hpp"

namespace gfmud::kernels {

#if defined(GFMUD_HAVE_AVX2)
const Ops* avx2_ops_table();
#endif

const Ops* avx2_ops() {
#if defined(GFMUD_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_ops_table();
#endif
    return nullptr;
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return avx2_ops() != nullptr;
    }
    return false;
}

Backend best_backend() { return avx2_ops() ? Backend::avx2 : Backend::scalar; }

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

namespace {

Backend initial_backend() {
    if (const char* env = std::getenv("GFMUD_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2))
            return Backend::avx2;
    }
    return best_backend();
}

Backend& active_slot() {
    static Backend b = initial_backend();
    return b;
}

} // namespace

Backend active_backend() { return active_slot(); }

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    active_slot() = b;
    return true;
}

const Ops& ops() {
    if (active_slot() == Backend::avx2) return *avx2_ops();
    return scalar_ops();
}

} // namespace gfmud::kernels
