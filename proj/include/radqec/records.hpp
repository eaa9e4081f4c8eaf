#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radqec {

// Per-shot syndrome history in flip representation: every bit is the XOR of
// the measured outcome with the noise-free quiescent reference for the same
// shot. The decoder works on differences of these, so the convention is
// shared by the Pauli-frame and the statevector simulators.
struct SyndromeRecord {
  uint32_t shot_id = 0;
  uint8_t protocol = 1;                 // 1 = state-chained, 2 = unlinked
  std::vector<uint8_t> z_syndromes;     // one nibble per cycle, stabilizers 0..3
  std::vector<uint8_t> x_syndromes;     // one nibble per cycle
  uint16_t data_bits = 0;               // 9-bit Z-basis data readout

  std::size_t n_cycles() const { return z_syndromes.size(); }

  bool operator==(const SyndromeRecord&) const = default;
};

// FNV-1a 64-bit, used for run-manifest hashes of circuits and schedules.
inline uint64_t fnv1a(const void* data, std::size_t len, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Binary batch layout: 16-byte header ("QSR1", record count, cycle count,
// protocol, flags), then per record: shot id (u32 LE), bit-packed Z nibbles,
// bit-packed X nibbles (two cycles per byte), data bits (u16 LE).
namespace detail {

inline void pack_nibbles(const std::vector<uint8_t>& nib, std::string& out) {
  for (std::size_t i = 0; i < nib.size(); i += 2) {
    uint8_t b = nib[i] & 0x0F;
    if (i + 1 < nib.size()) b |= uint8_t(nib[i + 1] & 0x0F) << 4;
    out.push_back(char(b));
  }
}

inline std::vector<uint8_t> unpack_nibbles(const char* p, std::size_t n_cycles) {
  std::vector<uint8_t> nib(n_cycles);
  for (std::size_t i = 0; i < n_cycles; ++i) {
    const uint8_t b = uint8_t(p[i / 2]);
    nib[i] = (i % 2 == 0) ? (b & 0x0F) : (b >> 4);
  }
  return nib;
}

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

inline uint32_t get_u32(const char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(p[i])) << (8 * i);
  return v;
}

} // namespace detail

inline std::string serialize_records(const std::vector<SyndromeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("serialize_records: empty batch");
  const std::size_t n_cycles = records[0].n_cycles();
  for (const auto& r : records) {
    if (r.n_cycles() != n_cycles || r.x_syndromes.size() != n_cycles) {
      throw std::invalid_argument("serialize_records: inconsistent cycle counts");
    }
  }
  std::string out;
  out.reserve(16 + records.size() * (6 + (n_cycles + 1)));
  out += "QSR1";
  detail::put_u32(out, uint32_t(records.size()));
  detail::put_u32(out, uint32_t(n_cycles));
  out.push_back(char(records[0].protocol));
  out.append(3, '\0');
  for (const auto& r : records) {
    detail::put_u32(out, r.shot_id);
    detail::pack_nibbles(r.z_syndromes, out);
    detail::pack_nibbles(r.x_syndromes, out);
    out.push_back(char(r.data_bits & 0xFF));
    out.push_back(char((r.data_bits >> 8) & 0xFF));
  }
  return out;
}

inline std::vector<SyndromeRecord> deserialize_records(const std::string& blob) {
  if (blob.size() < 16 || blob.compare(0, 4, "QSR1") != 0) {
    throw std::runtime_error("deserialize_records: bad magic");
  }
  const uint32_t n_records = detail::get_u32(blob.data() + 4);
  const uint32_t n_cycles = detail::get_u32(blob.data() + 8);
  const uint8_t protocol = uint8_t(blob[12]);
  const std::size_t nib_bytes = (n_cycles + 1) / 2;
  const std::size_t rec_bytes = 4 + 2 * nib_bytes + 2;
  if (blob.size() != 16 + std::size_t(n_records) * rec_bytes) {
    throw std::runtime_error("deserialize_records: truncated batch");
  }
  std::vector<SyndromeRecord> records(n_records);
  const char* p = blob.data() + 16;
  for (auto& r : records) {
    r.shot_id = detail::get_u32(p);
    p += 4;
    r.protocol = protocol;
    r.z_syndromes = detail::unpack_nibbles(p, n_cycles);
    p += nib_bytes;
    r.x_syndromes = detail::unpack_nibbles(p, n_cycles);
    p += nib_bytes;
    r.data_bits = uint16_t(uint8_t(p[0])) | (uint16_t(uint8_t(p[1])) << 8);
    p += 2;
  }
  return records;
}

inline void save_records(const std::vector<SyndromeRecord>& records,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_records: cannot open " + path);
  const std::string blob = serialize_records(records);
  out.write(blob.data(), std::streamsize(blob.size()));
}

inline std::vector<SyndromeRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_records: cannot open " + path);
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_records(blob);
}

} // namespace radqec
