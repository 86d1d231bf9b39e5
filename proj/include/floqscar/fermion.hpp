#pragma once

// Second-quantized operator strings acting on occupation bit patterns.
//
// Modes are numbered spin-major: (site s, up) -> s-1, (site s, down) -> L+s-1.
// A pattern with modes m_1 < m_2 < ... stands for c+_{m_1} c+_{m_2} ... |0>,
// which is exactly the (alpha, beta) ordering used by the Fock bases.

#include "floqscar/basis.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <span>

namespace floqscar {

using ModeMask = std::uint64_t;

enum class Spin : std::uint8_t { Up, Down };

inline Spin opposite(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }

struct LadderOp {
  int mode;
  bool create;
};

inline int mode_index(int site, Spin spin, int L) { return (spin == Spin::Up ? 0 : L) + site - 1; }

inline LadderOp cdag(int site, Spin spin, int L) { return {mode_index(site, spin, L), true}; }
inline LadderOp c(int site, Spin spin, int L) { return {mode_index(site, spin, L), false}; }

inline ModeMask mode_mask(Mask up, Mask down, int L) {
  return static_cast<ModeMask>(up) | (static_cast<ModeMask>(down) << L);
}
inline Mask up_part(ModeMask m, int L) { return static_cast<Mask>(m & ((ModeMask{1} << L) - 1)); }
inline Mask down_part(ModeMask m, int L) { return static_cast<Mask>(m >> L); }

struct SignedPattern {
  ModeMask pattern;
  int sign;
};

/// Applies ops[0] ops[1] ... ops[n-1] (rightmost acts first) to a pattern.
/// Returns nullopt when the string annihilates the state.
inline std::optional<SignedPattern> apply_string(std::span<const LadderOp> ops, ModeMask state) {
  int sign = 1;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const ModeMask bit = ModeMask{1} << it->mode;
    const bool occupied = (state & bit) != 0;
    if (occupied == it->create) return std::nullopt;
    if (std::popcount(state & (bit - 1)) % 2 != 0) sign = -sign;
    state ^= bit;
  }
  return SignedPattern{state, sign};
}

inline bool occupied(ModeMask state, int site, Spin spin, int L) {
  return (state >> mode_index(site, spin, L)) & 1u;
}

} // namespace floqscar
