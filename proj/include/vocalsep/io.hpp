#pragma once

#include "vocalsep/masks.hpp"
#include "vocalsep/rpca.hpp"
#include "vocalsep/saliency.hpp"
#include "vocalsep/tracking.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace vocalsep {

/// `time_seconds,f0_hz` rows, 0 Hz meaning unvoiced. An optional header line is skipped.
F0Contour read_f0_csv(const std::filesystem::path& path);
void write_f0_csv(std::ostream& out, const F0Contour& contour);
void write_f0_csv(const std::filesystem::path& path, const F0Contour& contour);

/// `iteration,residual,rank,nnz`.
void write_rpca_trace_csv(const std::filesystem::path& path, const std::vector<RpcaTraceEntry>& trace);

/// Binary 8-bit PGM, one row per frequency bin (highest first), one column per frame.
void write_mask_pgm(const std::filesystem::path& path, const TimeFrequencyMask& mask);
/// One line per frame, comma-separated bin values.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& values);
/// Header row of bin centre frequencies, then `time_seconds,values...` per frame.
void write_saliency_csv(const std::filesystem::path& path, const SaliencySpectrogram& saliency);

}  // namespace vocalsep
