// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>

#include "triarm/kernels.hpp"

namespace triarm::kern {

#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();

static bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}
#else
static bool cpu_has_avx2() { return false; }
#endif

namespace {

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* lookup(const std::string& name) {
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && cpu_has_avx2()) return &avx2_kernels();
#endif
  if (name == "scalar") return &scalar_kernels();
  return nullptr;
}

const Kernels* resolve_default() {
  if (const char* env = std::getenv("TRIARM_KERNEL")) {
    if (const Kernels* k = lookup(env)) return k;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = resolve_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

bool select_kernels(const std::string& name) {
  const Kernels* k = lookup(name);
  if (!k) return false;
  g_active.store(k, std::memory_order_release);
  return true;
}

std::vector<std::string> available_kernels() {
  std::vector<std::string> names{"scalar"};
  if (cpu_has_avx2()) names.emplace_back("avx2");
  return names;
}

}  // namespace triarm::kern
