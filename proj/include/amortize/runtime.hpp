#pragma once

namespace amortize {

/// Raises glibc's mmap and trim thresholds. No-op elsewhere.
void tune_allocator() noexcept;

}  // namespace amortize
