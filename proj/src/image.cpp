#include "nandguard/image.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "nandguard/error.hpp"

namespace nandguard {

namespace {

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  bool at_end() const noexcept { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::CorruptImage, "truncated image");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

constexpr std::uint8_t kFlagBad = 1;
constexpr std::uint8_t kFlagManaged = 2;

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptImage, what); }

}  // namespace

std::vector<std::uint8_t> serialize_image(const Ftl& ftl) {
  const Device& device = ftl.device();
  const Geometry& g = device.geometry();
  Writer w;
  w.bytes(kImageMagic, 4);
  w.u32(g.blocks_per_device);
  w.u32(g.pages_per_block);
  w.u32(g.cells_per_page);
  w.u32(g.sectors_per_page);
  w.u32(g.bits_per_sector);
  w.u32(g.endurance_limit);
  for (std::uint32_t b = 0; b < g.blocks_per_device; ++b) {
    const Block& blk = device.block(b);
    w.u32(blk.pe_cycles);
    w.u8(static_cast<std::uint8_t>((blk.bad ? kFlagBad : 0) | (blk.managed ? kFlagManaged : 0)));
    for (const PhysicalPage& p : blk.pages) {
      w.u8(static_cast<std::uint8_t>(p.validity));
      w.i64(p.logical_owner.value_or(-1));
      w.u32(p.disturb_count);
      for (std::size_t c = 0; c < p.cells.size(); c += 2) {
        const auto hi = static_cast<std::uint8_t>(p.cells[c]);
        const auto lo = c + 1 < p.cells.size() ? static_cast<std::uint8_t>(p.cells[c + 1])
                                               : std::uint8_t{0xF};
        w.u8(static_cast<std::uint8_t>((hi << 4) | (lo & 0xF)));
      }
    }
  }

  w.u32(static_cast<std::uint32_t>(ftl.map().size()));
  for (const auto& [lpn, addr] : ftl.map().entries()) {
    w.i64(lpn);
    w.u32(addr.block);
    w.u32(addr.page);
  }
  w.u32(static_cast<std::uint32_t>(ftl.unmanaged().size()));
  for (const UnmanagedEntry& e : ftl.unmanaged().entries()) {
    w.u32(e.block);
    w.u8(static_cast<std::uint8_t>(e.reason));
  }
  const auto& queue = ftl.trim_policy().deferred_queue;
  w.u32(static_cast<std::uint32_t>(queue.size()));
  for (const TrimEntry& t : queue) {
    w.i64(t.lpn);
    w.u32(t.addr.block);
    w.u32(t.addr.page);
  }

  const CodecConfig& codec = ftl.codec().config();
  w.u16(codec.scrambler.seed_base);
  w.u16(codec.scrambler.tap_mask());
  for (CellState s : codec.mapping.forward()) w.u8(static_cast<std::uint8_t>(s));
  w.u32(codec.ecc.t);
  w.u8(static_cast<std::uint8_t>(ftl.config().trim_mode));
  w.u8(ftl.config().wear_defer_erase ? 1 : 0);
  w.f64(ftl.config().over_provision);
  w.f64(ftl.config().deferred_trim_pressure);
  return w.take();
}

Ftl parse_image(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4) corrupt("file shorter than magic");
  const auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kImageMagic, 4) != 0) {
    if (std::memcmp(magic.data(), kImageMagic, 3) == 0) {
      throw Error(ErrorCode::VersionMismatch,
                  std::string("image revision '") + static_cast<char>(magic[3]) +
                      "', expected '1'");
    }
    corrupt("bad magic");
  }

  Geometry g;
  g.blocks_per_device = r.u32();
  g.pages_per_block = r.u32();
  g.cells_per_page = r.u32();
  g.sectors_per_page = r.u32();
  g.bits_per_sector = r.u32();
  g.endurance_limit = r.u32();
  try {
    g.validate();
  } catch (const Error& e) {
    corrupt(std::string("geometry: ") + e.what());
  }
  // Reject geometries that could not possibly fit in the remaining bytes
  // before allocating the device.
  const std::size_t page_bytes = 1 + 8 + 4 + (g.cells_per_page + 1) / 2;
  const std::size_t min_body = static_cast<std::size_t>(g.blocks_per_device) *
                               (5 + static_cast<std::size_t>(g.pages_per_block) * page_bytes);
  if (min_body > bytes.size()) corrupt("geometry larger than file");

  Device device(g);
  for (std::uint32_t b = 0; b < g.blocks_per_device; ++b) {
    const std::uint32_t pe = r.u32();
    const std::uint8_t flags = r.u8();
    if ((flags & ~(kFlagBad | kFlagManaged)) != 0) corrupt("unknown block flags");
    if ((flags & kFlagBad) && (flags & kFlagManaged)) corrupt("bad block marked managed");
    device.restore_block(b, pe, (flags & kFlagBad) != 0, (flags & kFlagManaged) != 0);
    for (std::uint32_t p = 0; p < g.pages_per_block; ++p) {
      PhysicalPage page;
      const std::uint8_t validity = r.u8();
      if (validity > 2) corrupt("validity code " + std::to_string(validity));
      page.validity = static_cast<Validity>(validity);
      const std::int64_t owner = r.i64();
      if (owner < -1) corrupt("negative logical owner");
      if (owner >= 0) page.logical_owner = owner;
      page.disturb_count = r.u32();
      const auto packed = r.bytes((g.cells_per_page + 1) / 2);
      page.cells.reserve(g.cells_per_page);
      for (std::size_t c = 0; c < g.cells_per_page; ++c) {
        const std::uint8_t byte = packed[c / 2];
        const std::uint8_t code = c % 2 == 0 ? byte >> 4 : byte & 0xF;
        const auto state = cell_state_from_code(code);
        if (!state) corrupt("state code " + std::to_string(code));
        page.cells.push_back(*state);
      }
      if (g.cells_per_page % 2 == 1 && (packed.back() & 0xF) != 0xF) corrupt("padding nibble");
      device.restore_page({b, p}, std::move(page));
    }
  }

  auto read_addr = [&]() {
    PageAddress a;
    a.block = r.u32();
    a.page = r.u32();
    if (a.block >= g.blocks_per_device || a.page >= g.pages_per_block) corrupt("address out of range");
    return a;
  };

  MapTable map;
  const std::uint32_t map_count = r.u32();
  for (std::uint32_t i = 0; i < map_count; ++i) {
    const std::int64_t lpn = r.i64();
    if (map.find(lpn)) corrupt("duplicate lpn in map");
    map.set(lpn, read_addr());
  }
  UnmanagedSet unmanaged;
  const std::uint32_t unmanaged_count = r.u32();
  for (std::uint32_t i = 0; i < unmanaged_count; ++i) {
    const std::uint32_t block = r.u32();
    const std::uint8_t reason = r.u8();
    if (block >= g.blocks_per_device || reason > 3) corrupt("unmanaged entry");
    if (unmanaged.contains(block)) corrupt("duplicate unmanaged block");
    unmanaged.add(block, static_cast<UnmanagedReason>(reason));
  }
  std::vector<TrimEntry> queue;
  const std::uint32_t queue_count = r.u32();
  for (std::uint32_t i = 0; i < queue_count; ++i) {
    TrimEntry t;
    t.lpn = r.i64();
    t.addr = read_addr();
    queue.push_back(t);
  }

  CodecConfig codec;
  codec.scrambler.seed_base = r.u16();
  codec.scrambler.taps = taps_from_mask(r.u16());
  std::array<CellState, 8> forward{};
  for (auto& s : forward) {
    const auto state = cell_state_from_code(r.u8());
    if (!state) corrupt("mapping table code");
    s = *state;
  }
  codec.ecc.sector_bits = g.bits_per_sector;
  codec.ecc.t = r.u32();
  FtlConfig config;
  const std::uint8_t trim_mode = r.u8();
  const std::uint8_t defer = r.u8();
  if (trim_mode > 1 || defer > 1) corrupt("ftl settings");
  config.trim_mode = static_cast<TrimMode>(trim_mode);
  config.wear_defer_erase = defer == 1;
  config.over_provision = r.f64();
  config.deferred_trim_pressure = r.f64();
  if (!r.at_end()) corrupt("trailing bytes");

  try {
    codec.mapping = MappingTable::from_forward(forward);
    return Ftl(std::move(device), std::move(codec), config, std::move(map), std::move(unmanaged),
               std::move(queue));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptImage) throw;
    corrupt(e.what());
  }
}

void image_save(const Ftl& ftl, const std::filesystem::path& path) {
  const auto bytes = serialize_image(ftl);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

Ftl image_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_image(bytes);
}

std::uint64_t state_hash(const Ftl& ftl) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t byte : serialize_image(ftl)) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace nandguard
