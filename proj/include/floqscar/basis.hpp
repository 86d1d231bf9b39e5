#pragma once

// Spin-resolved Fock bases for the 1D chain.
//
// A many-body basis state is a pair of site tuples (alpha, beta) listing the
// 1-indexed sites occupied by spin-up and spin-down fermions. The state is
//   c+_{alpha_1,up} ... c+_{alpha_N,up} c+_{beta_1,dn} ... c+_{beta_M,dn} |0>
// i.e. creation operators ordered by ascending site, all up before all down.
// Every fermionic sign in the library follows from this ordering.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace floqscar {

using SiteTuple = std::vector<int>;
/// Bit (s-1) set <=> site s occupied.
using Mask = std::uint32_t;

inline constexpr int kMaxSites = 16;

Mask mask_of(const SiteTuple& sites);
SiteTuple tuple_of(Mask mask, int L);

/// All strictly increasing N-tuples over sites [1, L] in lexicographic order.
class SpinSectorBasis {
public:
  SpinSectorBasis(int L, int N);

  int sites() const { return L_; }
  int particles() const { return N_; }
  std::size_t size() const { return tuples_.size(); }

  const SiteTuple& tuple(std::size_t i) const { return tuples_[i]; }
  Mask mask(std::size_t i) const { return masks_[i]; }
  const std::vector<SiteTuple>& tuples() const { return tuples_; }

  std::optional<std::size_t> index_of(const SiteTuple& t) const;
  std::optional<std::size_t> index_of(Mask m) const;

  /// Sum of occupied site indices (1-indexed).
  int site_sum(std::size_t i) const { return site_sums_[i]; }

private:
  int L_;
  int N_;
  std::vector<SiteTuple> tuples_;
  std::vector<Mask> masks_;
  std::vector<int> site_sums_;
  std::vector<std::int32_t> lookup_; // mask -> index or -1
};

SpinSectorBasis enumerate_sector(int L, int N);

/// Product of the two spin sectors. Flat index = a * d_down + b.
class FockSpace {
public:
  FockSpace(int L, int n_up, int n_down);

  int sites() const { return up_.sites(); }
  int n_up() const { return up_.particles(); }
  int n_down() const { return down_.particles(); }
  const SpinSectorBasis& up() const { return up_; }
  const SpinSectorBasis& down() const { return down_; }
  std::size_t dim_up() const { return up_.size(); }
  std::size_t dim_down() const { return down_.size(); }
  std::size_t dim() const { return up_.size() * down_.size(); }

  std::size_t flat(std::size_t a, std::size_t b) const { return a * down_.size() + b; }
  std::size_t up_index(std::size_t flat_index) const { return flat_index / down_.size(); }
  std::size_t down_index(std::size_t flat_index) const { return flat_index % down_.size(); }

  int site_sum(std::size_t flat_index) const;
  int doublons(std::size_t flat_index) const;

  /// Flat index of a labelled state; throws ParameterError if the label is
  /// not in this space.
  std::size_t index_of_label(std::string_view label) const;
  std::string label(std::size_t flat_index, bool ascii = false) const;

private:
  SpinSectorBasis up_;
  SpinSectorBasis down_;
};

/// Half filling (nu = 1) with equal spin populations.
FockSpace half_filled_space(int L);

// ---------------------------------------------------------------- labels

enum class SiteSymbol : std::uint8_t { Empty, Up, Down, Doublon };

struct FockLabel {
  std::vector<SiteSymbol> sites;
  int size() const { return static_cast<int>(sites.size()); }
  bool operator==(const FockLabel&) const = default;
};

struct Occupations {
  SiteTuple up;
  SiteTuple down;
};

/// Accepts the arrows (U+2191, U+2193, U+2195) and '0', or the ASCII
/// aliases u, d, X and 0.
FockLabel parse_label(std::string_view text);
std::string format_label(const FockLabel& label, bool ascii = false);

Occupations occupations_of(const FockLabel& label);
FockLabel label_of(const SiteTuple& up, const SiteTuple& down, int L);

/// Convenience: parse straight to (alpha, beta).
Occupations parse_occupations(std::string_view text);

int doublon_count(const SiteTuple& up, const SiteTuple& down);

struct NamedState {
  std::string name;
  FockLabel label;
};

/// Scar patterns, their spin reversals and the thermal reference state for
/// even L at half filling.
std::vector<NamedState> special_states(int L);

/// Resolves "s", "s-flip", "doublon", "doublon-flip", "th" or a literal label.
FockLabel resolve_state(std::string_view name_or_label, int L);

} // namespace floqscar
