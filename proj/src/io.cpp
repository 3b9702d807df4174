#include "vocalsep/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace vocalsep {

namespace {

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  require(out.good(), "cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

}  // namespace

F0Contour read_f0_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open F0 file: " + path.string());
  std::vector<double> times, hz;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t = 0, f = 0;
    if (!(fields >> t >> f)) {
      require(times.empty(), path.string() + ":" + std::to_string(line_no) + ": expected time_seconds,f0_hz");
      continue;  // header
    }
    times.push_back(t);
    hz.push_back(f);
  }
  require(!times.empty(), "F0 file has no rows: " + path.string());
  double hop = kCommonFrameSeconds;
  if (times.size() >= 2) {
    hop = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    require(hop > 0, "F0 file times must increase: " + path.string());
    for (std::size_t i = 1; i < times.size(); ++i)
      require(std::abs(times[i] - times[0] - static_cast<double>(i) * hop) < 0.5 * hop,
              "F0 file times are not uniformly spaced: " + path.string());
  }
  return F0Contour::from_hz(std::move(hz), hop, times.front());
}

void write_f0_csv(std::ostream& out, const F0Contour& contour) {
  std::ostringstream buf;
  buf << std::fixed;
  for (std::size_t i = 0; i < contour.frames(); ++i) {
    buf << std::setprecision(6) << contour.time_of(i) << ',' << std::setprecision(4)
        << (contour.voiced[i] ? contour.f0_hz[i] : 0.0) << '\n';
  }
  out << buf.str();
}

void write_f0_csv(const std::filesystem::path& path, const F0Contour& contour) {
  auto out = open_output(path);
  write_f0_csv(out, contour);
}

void write_rpca_trace_csv(const std::filesystem::path& path, const std::vector<RpcaTraceEntry>& trace) {
  auto out = open_output(path);
  out << "iteration,residual,rank,nnz\n";
  for (const auto& e : trace) out << e.iteration << ',' << e.residual << ',' << e.rank << ',' << e.nonzeros << '\n';
}

void write_mask_pgm(const std::filesystem::path& path, const TimeFrequencyMask& mask) {
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << mask.frames() << ' ' << mask.bins() << "\n255\n";
  std::string row(static_cast<std::size_t>(mask.frames()), '\0');
  for (Eigen::Index f = mask.bins() - 1; f >= 0; --f) {
    for (Eigen::Index t = 0; t < mask.frames(); ++t)
      row[static_cast<std::size_t>(t)] =
          static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(mask.values(t, f), 0.0, 1.0) * 255.0)));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values) {
  auto out = open_output(path);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << values(r, c);
    out << '\n';
  }
}

void write_saliency_csv(const std::filesystem::path& path, const SaliencySpectrogram& saliency) {
  auto out = open_output(path);
  out << "time_seconds";
  for (Eigen::Index c = 0; c < saliency.bins(); ++c) out << ',' << saliency.grid.center_hz(c);
  out << '\n';
  for (Eigen::Index t = 0; t < saliency.frames(); ++t) {
    out << static_cast<double>(t) * saliency.hop_seconds;
    for (Eigen::Index c = 0; c < saliency.bins(); ++c) out << ',' << saliency.values(t, c);
    out << '\n';
  }
}

}  // namespace vocalsep
