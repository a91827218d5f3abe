// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace dbm {

/// Allocator returning storage aligned to Align bytes. Vectorized kernels
/// choose their scalar prologue from the pointer alignment, so fixing it
/// makes floating-point results independent of where buffers land.
template <class T, std::size_t Align = 64>
struct AlignedAllocator {
  using value_type = T;

  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}  // NOLINT(google-explicit-constructor)

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Align}); }

  template <class U>
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U, Align>&) noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

}  // namespace dbm
