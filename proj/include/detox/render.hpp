#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "detox/campaign.hpp"
#include "detox/configuration.hpp"
#include "detox/interval.hpp"
#include "detox/predictor.hpp"

namespace detox {

namespace detail {

struct KeptInterval {
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint64_t compressed_lo = 0;
};

inline std::vector<KeptInterval> compressed_timeline(uint64_t total_steps,
                                                     const std::vector<Interval>& excluded) {
  std::vector<KeptInterval> kept;
  uint64_t cum = 0;
  for (const Interval& v : subtract({0, total_steps}, excluded)) {
    kept.push_back({v.lo, v.hi, cum});
    cum += v.length();
  }
  return kept;
}

// piece must lie inside one kept interval
inline uint64_t compress_time(const std::vector<KeptInterval>& kept, uint64_t t) {
  auto it = std::upper_bound(kept.begin(), kept.end(), t,
                             [](uint64_t v, const KeptInterval& k) { return v < k.lo; });
  const KeptInterval& k = *(it - 1);
  return k.compressed_lo + (t - k.lo);
}

inline const char* cell_fill(const FaultRecord& r, const Configuration& c) {
  size_t det = enabled_detector_count(r, c);
  if (det >= 2) return "#8fd18f";
  if (det == 1) return "#1a7a1a";
  switch (r.outcome) {
    case Outcome::Sdc: return "#808080";
    case Outcome::Benign: return "#ffffff";
    case Outcome::Trap: return "#e6c229";
    case Outcome::Timeout: return "#e07a2f";
  }
  return "#ffffff";
}

}  // namespace detail

// Fault-space diagram for one configuration: X is the variant's compressed
// timeline, Y is every memory bit grouped by variable. Cell colors follow the
// predictor's classification; greens split single- vs multi-detector cells.
inline std::string render_svg(const CampaignResult& campaign, const Configuration& c) {
  check_config(campaign, c);

  constexpr int kCellW = 12;
  constexpr int kCellH = 6;
  constexpr int kPlotX = 70;
  constexpr int kPlotY = 30;
  constexpr int kGroupGap = 6;

  std::vector<Interval> excluded = excluded_times(campaign, c);
  std::vector<detail::KeptInterval> kept =
      detail::compressed_timeline(campaign.total_steps, excluded);
  uint64_t runtime = campaign.total_steps - total_length(excluded);

  std::vector<MemorySpan> spans = campaign.memory.spans;
  if (spans.empty() && campaign.total_bits > 0)
    spans.push_back({"mem", 0, campaign.total_bits, 1});

  // bit -> pixel y
  std::vector<int> row_y(campaign.total_bits, 0);
  int y = kPlotY;
  for (size_t s = 0; s < spans.size(); ++s) {
    if (s > 0) y += kGroupGap;
    for (uint32_t b = 0; b < spans[s].bit_count(); ++b) {
      uint32_t bit = spans[s].first_bit + b;
      if (bit < campaign.total_bits) row_y[bit] = y;
      y += kCellH;
    }
  }
  int plot_bottom = y;
  int width = kPlotX + static_cast<int>(runtime) * kCellW + 12;
  int height = plot_bottom + 24;

  std::string svg;
  auto line = [&svg](const std::string& s) {
    svg += s;
    svg += '\n';
  };

  line("<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
  line("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
       " " + std::to_string(height) + "\" font-family=\"monospace\">");
  line("<title>fault space " + campaign.program_digest + " config " + c.to_string() +
       "</title>");
  line("<metadata>{\"config\":\"" + c.to_string() + "\",\"program_digest\":\"" +
       campaign.program_digest + "\",\"cell_w\":" + std::to_string(kCellW) +
       ",\"cell_h\":" + std::to_string(kCellH) + ",\"runtime\":" + std::to_string(runtime) +
       ",\"total_bits\":" + std::to_string(campaign.total_bits) + "}</metadata>");

  struct Piece {
    uint64_t lo;
    uint64_t hi;
    std::string fill;
  };
  std::vector<Piece> row;
  uint32_t row_bit = 0;

  auto flush_row = [&]() {
    if (row.empty()) return;
    std::sort(row.begin(), row.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    std::vector<Piece> merged;
    for (const Piece& p : row) {
      if (!merged.empty() && merged.back().hi == p.lo && merged.back().fill == p.fill)
        merged.back().hi = p.hi;
      else
        merged.push_back(p);
    }
    for (const Piece& p : merged) {
      line("<rect class=\"cell\" x=\"" +
           std::to_string(kPlotX + static_cast<int>(p.lo) * kCellW) + "\" y=\"" +
           std::to_string(row_y[row_bit]) + "\" width=\"" +
           std::to_string(static_cast<int>(p.hi - p.lo) * kCellW) + "\" height=\"" +
           std::to_string(kCellH) + "\" fill=\"" + p.fill + "\"/>");
    }
    row.clear();
  };

  for (const FaultRecord& r : campaign.records) {
    if (r.bit != row_bit) {
      flush_row();
      row_bit = r.bit;
    }
    std::string fill = detail::cell_fill(r, c);
    for (const Interval& piece : subtract({r.lo, r.hi}, excluded)) {
      uint64_t clo = detail::compress_time(kept, piece.lo);
      row.push_back({clo, clo + piece.length(), fill});
    }
  }
  flush_row();

  // variable gutters
  for (const MemorySpan& s : spans) {
    if (s.first_bit >= campaign.total_bits) continue;
    int top = row_y[s.first_bit];
    int mid = top + static_cast<int>(s.bit_count()) * kCellH / 2;
    line("<text class=\"var-label\" x=\"" + std::to_string(kPlotX - 6) + "\" y=\"" +
         std::to_string(mid + 3) + "\" text-anchor=\"end\" font-size=\"10\">" + s.name +
         "</text>");
  }

  // enabled assertion windows along the time axis
  for (const AssertionMeta& a : campaign.assertions) {
    if (!c.enabled(a.index)) continue;
    for (const Interval& w : a.windows) {
      uint64_t clo = detail::compress_time(kept, w.lo);
      int x0 = kPlotX + static_cast<int>(clo) * kCellW;
      int wpx = static_cast<int>(w.length()) * kCellW;
      line("<rect class=\"window\" x=\"" + std::to_string(x0) + "\" y=\"" +
           std::to_string(kPlotY - 8) + "\" width=\"" + std::to_string(wpx) +
           "\" height=\"4\" fill=\"#1a7a1a\"/>");
      line("<text class=\"window-label\" x=\"" + std::to_string(x0) + "\" y=\"" +
           std::to_string(kPlotY - 11) + "\" font-size=\"8\">" + a.id + "</text>");
    }
  }

  if (campaign.total_bits > 0 && runtime > 0)
    line("<rect class=\"frame\" x=\"" + std::to_string(kPlotX) + "\" y=\"" +
         std::to_string(kPlotY) + "\" width=\"" + std::to_string(static_cast<int>(runtime) * kCellW) +
         "\" height=\"" + std::to_string(plot_bottom - kPlotY) +
         "\" fill=\"none\" stroke=\"#333333\"/>");

  line("<text class=\"axis-label\" x=\"" + std::to_string(kPlotX) + "\" y=\"" +
       std::to_string(plot_bottom + 14) + "\" font-size=\"10\">0</text>");
  line("<text class=\"axis-label\" x=\"" +
       std::to_string(kPlotX + static_cast<int>(runtime) * kCellW) + "\" y=\"" +
       std::to_string(plot_bottom + 14) + "\" text-anchor=\"end\" font-size=\"10\">" +
       std::to_string(runtime) + "</text>");
  line("</svg>");
  return svg;
}

}  // namespace detox
