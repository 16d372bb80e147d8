#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dfsqec/codes.hpp"
#include "dfsqec/engine.hpp"

namespace dfsqec {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One QEC cycle's syndrome information. Bit i of `r` is r_i, bit j of `s` is s_j.
struct SyndromeRecord {
  std::uint8_t r = 0;
  std::uint8_t s = 0;
  std::uint8_t flags = 0;      // bit order: flagged round 1 flags, then round 2 flags
  int flag_count = 0;
  bool unflagged_taken = false;
  std::uint16_t leak_detected = 0;

  int sp() const { return __builtin_parity(s & 0xFu); }
  // 9-bit syndrome in generator order (r0..r4, s0..s3)
  std::uint16_t syndrome9() const { return static_cast<std::uint16_t>((r & 0x1Fu) | ((s & 0xFu) << 5)); }
  static SyndromeRecord from_syndrome9(std::uint16_t syn);
  // "r=10000 s=1001 flags=0000", bit 0 leftmost; flags optional
  static SyndromeRecord parse(const std::string& text);
  std::string str() const;
};

// Five nodes s0, s1, s2, s3, sp on a cycle; edge i is the logical Z of pair i (Z_{2i}).
struct DecodingGraph {
  static constexpr int kNodes = 5;  // indices 0..3 = s0..s3, 4 = sp
  std::array<std::array<int, 2>, 5> edge_nodes{};
  std::array<int, 5> cycle{};        // node order around the cycle
  std::array<int, 5> cycle_edges{};  // edge between cycle[k] and cycle[k+1]
  std::array<std::uint8_t, 5> edge_node_mask{};
};

DecodingGraph build_decoding_graph(const CodeSpec& code);

// Minimum-weight edge sets (5-bit masks) matching the s-bits; both S and its complement on a tie.
std::vector<std::uint8_t> decode_z(const DecodingGraph& graph, std::uint8_t s_bits);
// Both S and its complement, the two edge sets compatible with the s-bits.
std::array<std::uint8_t, 2> compatible_edge_sets(const DecodingGraph& graph, std::uint8_t s_bits);

enum class DecodeMode { Correct, PostSelect };
DecodeMode parse_decode_mode(const std::string& s);
const char* decode_mode_name(DecodeMode m);

struct DecodeOutcome {
  PauliString correction;
  bool ambiguous = false;
  bool rejected = false;
  bool from_hook_table = false;
  int candidates_considered = 0;
  int rng_draws = 0;
};

// (flags, syndrome) -> data correction for single faults inside flagged rounds.
class HookTable {
 public:
  static constexpr int kMaxFlagBits = 6;
  HookTable();

  struct Insert {
    bool inserted = false;
    bool conflict = false;
  };
  // Adds an entry; a logically inequivalent duplicate is a conflict (the entry is kept unchanged).
  Insert add(std::uint8_t flags, std::uint16_t syndrome9, const PauliString& correction, const CodeSpec& code);
  const PauliString* find(std::uint8_t flags, std::uint16_t syndrome9) const;
  std::size_t size() const { return size_; }
  std::size_t conflicts() const { return conflicts_; }
  std::vector<std::pair<std::uint32_t, PauliString>> entries() const;

 private:
  std::vector<std::int16_t> index_;
  std::vector<PauliString> values_;
  std::size_t size_ = 0;
  std::size_t conflicts_ = 0;
};

class Decoder {
 public:
  explicit Decoder(const CodeSpec& code, std::shared_ptr<const HookTable> hooks = nullptr);

  const DecodingGraph& graph() const { return graph_; }
  const CodeSpec& code() const { return code_; }
  const HookTable* hooks() const { return hooks_.get(); }

  DecodeOutcome decode_full(const SyndromeRecord& record, DecodeMode mode, Rng& rng) const;
  // Syndrome-only decoding without flags.
  DecodeOutcome decode_syndrome(std::uint8_t r, std::uint8_t s, DecodeMode mode, Rng& rng) const;

 private:
  CodeSpec code_;
  DecodingGraph graph_;
  std::shared_ptr<const HookTable> hooks_;
  std::array<std::uint8_t, 10> x_syn_{};   // s-bits flipped by X_q
  std::array<std::uint8_t, 16> z_edges_{};  // minimal edge set per s-value
  std::uint64_t lx_z_ = 0, lz_x_ = 0, lz_z_ = 0, lx_x_ = 0;
};

}  // namespace dfsqec
