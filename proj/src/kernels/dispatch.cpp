// Copyright (c) 2026 The msvbx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "msvbx/error.hpp"
#include "msvbx/kernels.hpp"

namespace msvbx::kernels {

namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::squared_distance, &scalar::axpy};
#if defined(MSVBX_KERNELS_AVX2)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::squared_distance, &avx2::axpy};
#endif
#if defined(MSVBX_KERNELS_NEON)
constexpr KernelTable kNeonTable{&neon::dot, &neon::squared_distance, &neon::axpy};
#endif

Isa detect_best() noexcept {
#if defined(MSVBX_KERNELS_AVX2)
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
#endif
#if defined(MSVBX_KERNELS_NEON)
  return Isa::kNeon;
#endif
  return Isa::kScalar;
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("MSVBX_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (v == "neon" && isa_available(Isa::kNeon)) return Isa::kNeon;
  }
  return detect_best();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> ptr{&table(initial_isa())};
  return ptr;
}

std::atomic<Isa>& current_isa() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(MSVBX_KERNELS_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(MSVBX_KERNELS_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel variant " + std::string(isa_name(isa)) + " is not available");
  }
  switch (isa) {
#if defined(MSVBX_KERNELS_AVX2)
    case Isa::kAvx2: return kAvx2Table;
#endif
#if defined(MSVBX_KERNELS_NEON)
    case Isa::kNeon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

Isa active_isa() noexcept { return current_isa().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable& t = table(isa);
  current().store(&t, std::memory_order_relaxed);
  current_isa().store(isa, std::memory_order_relaxed);
}

const KernelTable& active_table() noexcept { return *current().load(std::memory_order_relaxed); }

}  // namespace msvbx::kernels
