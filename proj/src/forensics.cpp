#include "nandguard/forensics.hpp"

#include <algorithm>

namespace nandguard {

std::vector<BlockDump> dump_unmanaged(const Ftl& ftl) {
  const Device& device = ftl.device();
  std::vector<BlockDump> out;
  for (std::uint32_t b = 0; b < device.geometry().blocks_per_device; ++b) {
    const Block& blk = device.block(b);
    const auto reason = ftl.unmanaged().reason(b);
    if (!reason && !blk.bad) continue;
    BlockDump d;
    d.block = b;
    d.reason = reason.value_or(UnmanagedReason::Bad);
    d.pe_cycles = blk.pe_cycles;
    for (const auto& p : blk.pages) d.pages.push_back(p.cells);
    out.push_back(std::move(d));
  }
  return out;
}

std::string dump_to_hex(const BlockDump& dump) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string text;
  for (std::size_t p = 0; p < dump.pages.size(); ++p) {
    text += std::to_string(dump.block) + ":" + std::to_string(p) + " ";
    for (CellState s : dump.pages[p]) text.push_back(kDigits[static_cast<unsigned>(s) & 0xF]);
    text.push_back('\n');
  }
  return text;
}

std::vector<Recovery> recover(const Ftl& ftl, std::string_view target_text,
                              const AttackerContext& context) {
  const Device& device = ftl.device();
  const PageCodec& codec = ftl.codec();
  const Geometry& g = device.geometry();
  const BitVector target = encode_text(target_text);
  std::vector<Recovery> out;
  if (target.empty() || target.size() > codec.capacity_bits()) return out;

  const std::size_t radius = context.ecc_capability_known.value_or(codec.config().ecc.t);
  const std::size_t span = codec.content_sectors(target.size()) * g.bits_per_sector;
  const std::vector<std::size_t> evidence = codec.evidence_sectors(target.size());
  BitVector expected = target;
  expected.resize(span, false);

  // Priority order: bad blocks, then unmanaged, then stale pages in the
  // managed area. The reported set does not depend on it.
  auto priority = [&](std::uint32_t b) {
    if (context.has_bad_block_list && device.block(b).bad) return 0;
    if (context.has_map_table && ftl.unmanaged().contains(b)) return 1;
    return 2;
  };
  std::vector<std::uint32_t> order(g.blocks_per_device);
  for (std::uint32_t b = 0; b < g.blocks_per_device; ++b) order[b] = b;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return priority(a) < priority(b); });

  for (std::uint32_t b : order) {
    const bool hidden = device.block(b).bad || ftl.unmanaged().contains(b);
    for (std::uint32_t p = 0; p < g.pages_per_block; ++p) {
      const PageAddress addr{b, p};
      const PhysicalPage& page = device.page(addr);
      if (!hidden && page.validity != Validity::Invalid) continue;
      const std::size_t index = device.global_page_index(addr);
      const BitVector codeword = codec.codeword_from_sensed(device.read_page(addr));
      const BitVector payload = codec.payload_from_codeword(codeword, index).slice(0, span);
      Recovery r;
      r.location = addr;
      r.sector_distances = sector_distances(payload, expected, g.bits_per_sector);
      r.distance = min_over(r.sector_distances, evidence);
      if (r.distance > radius) continue;
      r.recovered_text = std::string(target_text);
      std::string raw;
      for (std::size_t i = 0; i + 8 <= target.size(); i += 8) {
        unsigned c = 0;
        for (std::size_t j = 0; j < 8; ++j) c = (c << 1) | (payload[i + j] ? 1u : 0u);
        raw.push_back(static_cast<char>(c));
      }
      r.raw_text = std::move(raw);
      r.validity = page.validity;
      r.unmanaged = hidden;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace nandguard
