#include "dfsqec/decoder.hpp"

#include <set>
#include <sstream>

#include "dfsqec/circuit.hpp"

namespace dfsqec {

SyndromeRecord SyndromeRecord::from_syndrome9(std::uint16_t syn) {
  SyndromeRecord rec;
  rec.r = syn & 0x1Fu;
  rec.s = (syn >> 5) & 0xFu;
  rec.unflagged_taken = syn != 0;
  return rec;
}

SyndromeRecord SyndromeRecord::parse(const std::string& text) {
  SyndromeRecord rec;
  std::istringstream is(text);
  std::string tok;
  bool have_r = false, have_s = false;
  std::set<std::string> seen;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad record token '" + tok + "'");
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (!seen.insert(key).second) throw std::invalid_argument("duplicate record key '" + key + "'");
    std::uint64_t bits = 0;
    try {
      bits = bits_from_string(val);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad bits in record token '" + tok + "'");
    }
    if (key == "r") {
      if (val.size() != 5) throw std::invalid_argument("r needs 5 bits");
      rec.r = static_cast<std::uint8_t>(bits);
      have_r = true;
    } else if (key == "s") {
      if (val.size() != 4) throw std::invalid_argument("s needs 4 bits");
      rec.s = static_cast<std::uint8_t>(bits);
      have_s = true;
    } else if (key == "flags") {
      if (static_cast<int>(val.size()) > HookTable::kMaxFlagBits) throw std::invalid_argument("too many flag bits");
      rec.flags = static_cast<std::uint8_t>(bits);
      rec.flag_count = static_cast<int>(val.size());
    } else {
      throw std::invalid_argument("unknown record key '" + key + "'");
    }
  }
  if (!have_r || !have_s) throw std::invalid_argument("record needs r=..... and s=....");
  rec.unflagged_taken = true;
  return rec;
}

std::string SyndromeRecord::str() const {
  std::string out = "r=" + bits_to_string(r, 5) + " s=" + bits_to_string(s, 4);
  if (flag_count > 0) out += " flags=" + bits_to_string(flags, flag_count);
  return out;
}

// ------------------------------------------------------------------ graph

DecodingGraph build_decoding_graph(const CodeSpec& code) {
  if (code.name != "[[10,1,4]]" || code.stabilizers.size() != 9)
    throw std::invalid_argument("decoding graph needs the [[10,1,4]] code");
  DecodingGraph g;
  for (int i = 0; i < 5; ++i) {
    PauliString zi = PauliString::single(10, 2 * i, 'Z');
    std::uint8_t mask = 0;
    for (int j = 0; j < 4; ++j)
      if (!commutes(zi, code.stabilizers[5 + j])) mask |= 1u << j;
    if (__builtin_parity(mask)) mask |= 1u << 4;
    if (__builtin_popcount(mask) != 2)
      throw ProtocolError("Z" + std::to_string(2 * i) + " does not flip exactly two checks");
    g.edge_node_mask[i] = mask;
    g.edge_nodes[i] = {__builtin_ctz(mask), 31 - __builtin_clz(mask)};
  }
  // walk the cycle starting from s2, leaving along its lowest-index edge
  std::uint8_t used = 0;
  int node = 2;
  for (int k = 0; k < 5; ++k) {
    g.cycle[k] = node;
    int next_edge = -1;
    for (int e = 0; e < 5; ++e) {
      if ((used >> e) & 1u) continue;
      if (g.edge_nodes[e][0] == node || g.edge_nodes[e][1] == node) {
        next_edge = e;
        break;
      }
    }
    if (next_edge < 0) throw ProtocolError("decoding graph is not a cycle");
    used |= 1u << next_edge;
    g.cycle_edges[k] = next_edge;
    node = g.edge_nodes[next_edge][0] == node ? g.edge_nodes[next_edge][1] : g.edge_nodes[next_edge][0];
  }
  if (node != g.cycle[0] || used != 0x1F) throw ProtocolError("decoding graph is not a single 5-cycle");
  return g;
}

std::array<std::uint8_t, 2> compatible_edge_sets(const DecodingGraph& g, std::uint8_t s_bits) {
  std::uint8_t nodes = s_bits & 0xFu;
  if (__builtin_parity(nodes)) nodes |= 1u << 4;
  // pair nonzero nodes in clockwise order, collecting the edges walked between partners
  std::uint8_t S = 0;
  bool open = false;
  for (int k = 0; k < 5; ++k) {
    if ((nodes >> g.cycle[k]) & 1u) open = !open;
    if (open) S |= 1u << g.cycle_edges[k];
  }
  return {S, static_cast<std::uint8_t>(S ^ 0x1Fu)};
}

std::vector<std::uint8_t> decode_z(const DecodingGraph& g, std::uint8_t s_bits) {
  auto [S, Sc] = compatible_edge_sets(g, s_bits);
  int a = __builtin_popcount(S), b = __builtin_popcount(Sc);
  if (a < b) return {S};
  if (b < a) return {Sc};
  return {S, Sc};
}

DecodeMode parse_decode_mode(const std::string& s) {
  if (s == "correct") return DecodeMode::Correct;
  if (s == "post-select" || s == "postselect") return DecodeMode::PostSelect;
  throw std::invalid_argument("unknown mode '" + s + "' (expected correct or post-select)");
}

const char* decode_mode_name(DecodeMode m) { return m == DecodeMode::Correct ? "correct" : "post-select"; }

// ------------------------------------------------------------- hook table

HookTable::HookTable() : index_(std::size_t{1} << (kMaxFlagBits + 9), -1) {}

HookTable::Insert HookTable::add(std::uint8_t flags, std::uint16_t syn, const PauliString& correction,
                                 const CodeSpec& code) {
  if (flags >> kMaxFlagBits) throw std::out_of_range("too many flag bits");
  std::uint32_t key = (static_cast<std::uint32_t>(flags) << 9) | (syn & 0x1FFu);
  Insert res;
  if (index_[key] >= 0) {
    const PauliString& have = values_[index_[key]];
    if (!in_stabilizer_group(multiply(have, correction), code)) {
      res.conflict = true;
      ++conflicts_;
    }
    return res;
  }
  index_[key] = static_cast<std::int16_t>(values_.size());
  values_.push_back(correction.unsigned_copy());
  ++size_;
  res.inserted = true;
  return res;
}

const PauliString* HookTable::find(std::uint8_t flags, std::uint16_t syn) const {
  if (flags >> kMaxFlagBits) return nullptr;
  std::int16_t i = index_[(static_cast<std::uint32_t>(flags) << 9) | (syn & 0x1FFu)];
  return i < 0 ? nullptr : &values_[i];
}

std::vector<std::pair<std::uint32_t, PauliString>> HookTable::entries() const {
  std::vector<std::pair<std::uint32_t, PauliString>> out;
  for (std::uint32_t k = 0; k < index_.size(); ++k)
    if (index_[k] >= 0) out.emplace_back(k, values_[index_[k]]);
  return out;
}

// ---------------------------------------------------------------- decoder

Decoder::Decoder(const CodeSpec& code, std::shared_ptr<const HookTable> hooks)
    : code_(code), graph_(build_decoding_graph(code)), hooks_(std::move(hooks)) {
  for (int q = 0; q < 10; ++q) {
    PauliString xq = PauliString::single(10, q, 'X');
    std::uint8_t m = 0;
    for (int j = 0; j < 4; ++j)
      if (!commutes(xq, code_.stabilizers[5 + j])) m |= 1u << j;
    x_syn_[q] = m;
  }
  for (int s = 0; s < 16; ++s) z_edges_[s] = decode_z(graph_, static_cast<std::uint8_t>(s)).front();
  lx_x_ = code_.logical_x.x();
  lx_z_ = code_.logical_x.z();
  lz_x_ = code_.logical_z.x();
  lz_z_ = code_.logical_z.z();
}

DecodeOutcome Decoder::decode_syndrome(std::uint8_t r, std::uint8_t s, DecodeMode mode, Rng& rng) const {
  r &= 0x1Fu;
  s &= 0xFu;
  int pairs[5];
  int m = 0;
  for (int i = 0; i < 5; ++i)
    if ((r >> i) & 1u) pairs[m++] = i;
  const int count = 1 << m;

  struct Cand {
    std::uint64_t x, z;
    int cls;
  };
  Cand best[32];
  int nbest = 0;
  int best_w = 1 << 20, best_e = 1 << 20;
  for (int c = 0; c < count; ++c) {
    std::uint64_t x = 0;
    std::uint8_t sx = 0;
    for (int j = 0; j < m; ++j) {
      int q = 2 * pairs[j] + ((c >> j) & 1);
      x |= std::uint64_t{1} << q;
      sx ^= x_syn_[q];
    }
    std::uint8_t edges = z_edges_[s ^ sx];
    int w = __builtin_popcount(r | edges), e = __builtin_popcount(edges);
    if (w > best_w || (w == best_w && e > best_e)) continue;
    if (w < best_w || e < best_e) {
      nbest = 0;
      best_w = w;
      best_e = e;
    }
    std::uint64_t z = 0;
    for (int i = 0; i < 5; ++i) {
      if (!((edges >> i) & 1u)) continue;
      // Z on the pair's X-carrying qubit makes a Y; the DFS stabilizer relates the two placements
      int q = ((x >> (2 * i + 1)) & 1u) ? 2 * i + 1 : 2 * i;
      z |= std::uint64_t{1} << q;
    }
    int cls = parity64((x & lz_z_) ^ (z & lz_x_)) | (parity64((x & lx_z_) ^ (z & lx_x_)) << 1);
    best[nbest++] = {x, z, cls};
  }

  DecodeOutcome out;
  out.candidates_considered = count;
  int classes[4], nclasses = 0, first_of[4] = {-1, -1, -1, -1};
  for (int i = 0; i < nbest; ++i) {
    if (first_of[best[i].cls] < 0) {
      first_of[best[i].cls] = i;
      classes[nclasses++] = best[i].cls;
    }
  }
  int pick = 0;
  if (nclasses > 1) {
    out.ambiguous = true;
    if (mode == DecodeMode::PostSelect) {
      out.rejected = true;
      out.correction = PauliString(10);
      return out;
    }
    int k = static_cast<int>(std::uniform_int_distribution<int>(0, nclasses - 1)(rng));
    out.rng_draws = 1;
    pick = first_of[classes[k]];
  }
  out.correction = PauliString(10, best[pick].x, best[pick].z, 0);
  if (mode == DecodeMode::PostSelect) {
    int w = out.correction.weight();
    if (w >= 3 || (w == 2 && best[pick].x == 0)) out.rejected = true;
  }
  return out;
}

DecodeOutcome Decoder::decode_full(const SyndromeRecord& rec, DecodeMode mode, Rng& rng) const {
  if (!rec.unflagged_taken && (rec.flags || rec.r || rec.s))
    throw ProtocolError("record has nontrivial flagged data but no unflagged extraction");
  if (rec.flags != 0 && hooks_) {
    if (const PauliString* c = hooks_->find(rec.flags, rec.syndrome9())) {
      DecodeOutcome out;
      out.correction = *c;
      out.from_hook_table = true;
      out.candidates_considered = 1;
      return out;
    }
    if (mode == DecodeMode::PostSelect) {
      DecodeOutcome out;
      out.correction = PauliString(10);
      out.rejected = true;
      return out;
    }
  }
  return decode_syndrome(rec.r, rec.s, mode, rng);
}

}  // namespace dfsqec
