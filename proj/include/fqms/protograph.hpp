#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fqms {

struct DegreeProfile {
  std::vector<int> d_v;  // per protograph column
  std::vector<int> d_c;  // per protograph row
  int max_dv = 0;
  int max_dc = 0;
  int q_s = 0;  // guard bits so a posterior accumulator never saturates
};

// Base matrix of edge multiplicities, m rows (check classes) by n columns
// (variable classes).
struct Protograph {
  std::string name = "custom";
  int m = 0, n = 0;
  std::vector<int> s;  // row-major

  int at(int j, int i) const { return s[static_cast<std::size_t>(j) * n + i]; }
  double rate() const { return static_cast<double>(n - m) / n; }
  DegreeProfile degrees() const;
  // Stable serialization used for hashing and cache keys.
  std::string canonical() const;
};

// Whitespace-delimited integer rows, uniform length, split on newlines or
// semicolons.  Throws config_error on
// ragged rows, negative entries, empty input, zero columns, or rate <= 0.
Protograph parse_protograph(const std::string& text, const std::string& name = "custom");

Protograph protograph_preset(const std::string& name);
std::vector<std::string> protograph_preset_names();

// Two-level quasi-cyclic lifting.  Z factors as blocks * Zb: every
// protograph edge instance first fans out across the `blocks` block columns
// of its variable class, parallel edges of one cell taking distinct
// block-row offsets whenever `blocks` allows it, and each resulting block
// edge then carries its own circulant shift of size Zb.  Shifts are chosen
// by seeded greedy search that avoids length-4 cycles, and restarts keep the
// plan with the fewest 4-cycles and the heaviest codewords along degree-2
// variable chains.  The spreading step matters: when two parallel edges stay
// inside one cell of a plain circulant lift they act as a single repeated
// algebraic factor that other columns can cancel, which pins low-weight
// codewords into the code no matter which shifts are picked.
struct LiftedCode {
  Protograph proto;
  int Z = 0;
  int N = 0, M = 0;
  int blocks = 1;  // parallel-edge spreading factor
  int Zb = 0;      // circulant size of one block edge; Z = blocks * Zb
  // Smallest codeword weight found along chains of degree-2 variable blocks,
  // capped at 32; lift() restarts drive this up.
  int min_chain_weight = 0;

  // One circulant block edge: for r in [0, Zb), CN j*Z + row*Zb + r connects
  // to VN i*Z + col*Zb + (r + shift) % Zb.  copy numbers the parallel edges
  // of protograph cell (j, i); col runs over [0, blocks) and row stays at
  // (col + off) % blocks for the copy's fixed block-row offset off.
  struct EdgeClass {
    int j, i, copy;
    int col, row, shift;
  };
  std::vector<EdgeClass> classes;

  // CSR over lifted check nodes; edge ids follow this layout.  Layer j
  // (for layered scheduling) is the CN range [j*Z, (j+1)*Z).
  std::vector<int> cn_offset;  // size M+1
  std::vector<int> cn_vn;      // VN index per edge slot

  // CSR over lifted variable nodes (edge ids into cn_vn order).
  std::vector<int> vn_offset;  // size N+1
  std::vector<int> vn_cn;      // CN index
  std::vector<int> vn_edge;    // edge id

  int num_edges() const { return static_cast<int>(cn_vn.size()); }
};

LiftedCode lift(const Protograph& proto, int Z, uint64_t seed);

// True if two check nodes share two or more variable nodes.
bool has_length4_cycle(const LiftedCode& code);

std::string export_alist(const LiftedCode& code);

// Minimal alist reader, used to verify the export round-trips.
struct AlistGraph {
  int N = 0, M = 0;
  std::vector<std::vector<int>> vn_adj;  // 1-indexed CN ids per VN
  std::vector<std::vector<int>> cn_adj;  // 1-indexed VN ids per CN
};
AlistGraph parse_alist(const std::string& text);

}  // namespace fqms
