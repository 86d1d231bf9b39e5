#include "floqscar/basis.hpp"

#include "floqscar/errors.hpp"

#include <algorithm>
#include <bit>

namespace floqscar {

namespace {

void enumerate(int L, int N, int start, SiteTuple& current, std::vector<SiteTuple>& out) {
  if (static_cast<int>(current.size()) == N) {
    out.push_back(current);
    return;
  }
  const int remaining = N - static_cast<int>(current.size());
  for (int s = start; s <= L - remaining + 1; ++s) {
    current.push_back(s);
    enumerate(L, N, s + 1, current, out);
    current.pop_back();
  }
}

// UTF-8 encodings of the arrow symbols.
constexpr std::string_view kUp = "\xE2\x86\x91";
constexpr std::string_view kDown = "\xE2\x86\x93";
constexpr std::string_view kDoublon = "\xE2\x86\x95";

} // namespace

Mask mask_of(const SiteTuple& sites) {
  Mask m = 0;
  for (int s : sites) m |= Mask{1} << (s - 1);
  return m;
}

SiteTuple tuple_of(Mask mask, int L) {
  SiteTuple t;
  for (int s = 1; s <= L; ++s)
    if (mask & (Mask{1} << (s - 1))) t.push_back(s);
  return t;
}

SpinSectorBasis::SpinSectorBasis(int L, int N) : L_(L), N_(N) {
  if (L < 1 || L > kMaxSites)
    throw ParameterError("sector: L must lie in [1, " + std::to_string(kMaxSites) + "], got " +
                         std::to_string(L));
  if (N < 0 || N > L)
    throw ParameterError("sector: N must lie in [0, L], got N=" + std::to_string(N) +
                         " for L=" + std::to_string(L));
  SiteTuple current;
  enumerate(L, N, 1, current, tuples_);
  masks_.reserve(tuples_.size());
  site_sums_.reserve(tuples_.size());
  lookup_.assign(std::size_t{1} << L, -1);
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    const Mask m = mask_of(tuples_[i]);
    masks_.push_back(m);
    int sum = 0;
    for (int s : tuples_[i]) sum += s;
    site_sums_.push_back(sum);
    lookup_[m] = static_cast<std::int32_t>(i);
  }
}

std::optional<std::size_t> SpinSectorBasis::index_of(const SiteTuple& t) const {
  if (static_cast<int>(t.size()) != N_) return std::nullopt;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < 1 || t[k] > L_) return std::nullopt;
    if (k > 0 && t[k] <= t[k - 1]) return std::nullopt;
  }
  return index_of(mask_of(t));
}

std::optional<std::size_t> SpinSectorBasis::index_of(Mask m) const {
  if (m >= lookup_.size() || lookup_[m] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[m]);
}

SpinSectorBasis enumerate_sector(int L, int N) { return SpinSectorBasis(L, N); }

FockSpace::FockSpace(int L, int n_up, int n_down) : up_(L, n_up), down_(L, n_down) {}

int FockSpace::site_sum(std::size_t flat_index) const {
  return up_.site_sum(up_index(flat_index)) + down_.site_sum(down_index(flat_index));
}

int FockSpace::doublons(std::size_t flat_index) const {
  return std::popcount(up_.mask(up_index(flat_index)) & down_.mask(down_index(flat_index)));
}

std::size_t FockSpace::index_of_label(std::string_view label) const {
  const FockLabel parsed = parse_label(label);
  if (parsed.size() != sites())
    throw ParameterError("label '" + std::string(label) + "' has " + std::to_string(parsed.size()) +
                         " sites, space has " + std::to_string(sites()));
  const Occupations occ = occupations_of(parsed);
  const auto a = up_.index_of(occ.up);
  const auto b = down_.index_of(occ.down);
  if (!a || !b)
    throw ParameterError("label '" + std::string(label) + "' is outside the (N_up, N_down) = (" +
                         std::to_string(up_.particles()) + ", " +
                         std::to_string(down_.particles()) + ") sector");
  return flat(*a, *b);
}

std::string FockSpace::label(std::size_t flat_index, bool ascii) const {
  return format_label(
      label_of(up_.tuple(up_index(flat_index)), down_.tuple(down_index(flat_index)), sites()), ascii);
}

FockSpace half_filled_space(int L) {
  if (L < 2 || L % 2 != 0) throw ParameterError("half filling needs an even L >= 2");
  return FockSpace(L, L / 2, L / 2);
}

FockLabel parse_label(std::string_view text) {
  FockLabel label;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::string_view rest = text.substr(pos);
    if (rest.starts_with(kUp)) {
      label.sites.push_back(SiteSymbol::Up);
      pos += kUp.size();
    } else if (rest.starts_with(kDown)) {
      label.sites.push_back(SiteSymbol::Down);
      pos += kDown.size();
    } else if (rest.starts_with(kDoublon)) {
      label.sites.push_back(SiteSymbol::Doublon);
      pos += kDoublon.size();
    } else {
      switch (rest.front()) {
      case 'u': label.sites.push_back(SiteSymbol::Up); break;
      case 'd': label.sites.push_back(SiteSymbol::Down); break;
      case 'X': label.sites.push_back(SiteSymbol::Doublon); break;
      case '0': label.sites.push_back(SiteSymbol::Empty); break;
      default:
        throw ParseError("bad site symbol at byte " + std::to_string(pos) + " of label '" +
                         std::string(text) + "'");
      }
      ++pos;
    }
  }
  if (label.sites.empty()) throw ParseError("empty Fock label");
  if (label.size() > kMaxSites) throw ParseError("Fock label longer than " + std::to_string(kMaxSites));
  return label;
}

std::string format_label(const FockLabel& label, bool ascii) {
  std::string out;
  for (SiteSymbol s : label.sites) {
    switch (s) {
    case SiteSymbol::Empty: out += '0'; break;
    case SiteSymbol::Up: out += ascii ? std::string_view("u") : kUp; break;
    case SiteSymbol::Down: out += ascii ? std::string_view("d") : kDown; break;
    case SiteSymbol::Doublon: out += ascii ? std::string_view("X") : kDoublon; break;
    }
  }
  return out;
}

Occupations occupations_of(const FockLabel& label) {
  Occupations occ;
  for (int s = 1; s <= label.size(); ++s) {
    const SiteSymbol sym = label.sites[s - 1];
    if (sym == SiteSymbol::Up || sym == SiteSymbol::Doublon) occ.up.push_back(s);
    if (sym == SiteSymbol::Down || sym == SiteSymbol::Doublon) occ.down.push_back(s);
  }
  return occ;
}

FockLabel label_of(const SiteTuple& up, const SiteTuple& down, int L) {
  FockLabel label;
  label.sites.assign(L, SiteSymbol::Empty);
  auto place = [&](const SiteTuple& t, SiteSymbol sym) {
    for (int s : t) {
      if (s < 1 || s > L) throw ParameterError("site index out of range in label_of");
      SiteSymbol& slot = label.sites[s - 1];
      slot = (slot == SiteSymbol::Empty) ? sym : SiteSymbol::Doublon;
    }
  };
  place(up, SiteSymbol::Up);
  place(down, SiteSymbol::Down);
  return label;
}

Occupations parse_occupations(std::string_view text) { return occupations_of(parse_label(text)); }

int doublon_count(const SiteTuple& up, const SiteTuple& down) {
  return std::popcount(mask_of(up) & mask_of(down));
}

std::vector<NamedState> special_states(int L) {
  if (L < 2 || L % 2 != 0) throw ParameterError("special states need an even L >= 2");
  auto flip = [](FockLabel l) {
    for (SiteSymbol& s : l.sites) {
      if (s == SiteSymbol::Up) s = SiteSymbol::Down;
      else if (s == SiteSymbol::Down) s = SiteSymbol::Up;
    }
    return l;
  };

  FockLabel scar;
  constexpr SiteSymbol kPattern[4] = {SiteSymbol::Down, SiteSymbol::Up, SiteSymbol::Up,
                                      SiteSymbol::Down};
  for (int s = 0; s < L; ++s) scar.sites.push_back(kPattern[s % 4]);

  FockLabel doublon;
  for (int s = 0; s < L / 2 - 1; ++s) doublon.sites.push_back(SiteSymbol::Down);
  doublon.sites.push_back(SiteSymbol::Doublon);
  doublon.sites.push_back(SiteSymbol::Empty);
  for (int s = 0; s < L / 2 - 1; ++s) doublon.sites.push_back(SiteSymbol::Up);

  FockLabel thermal;
  for (int s = 0; s < L; ++s) thermal.sites.push_back(s % 2 == 0 ? SiteSymbol::Up : SiteSymbol::Down);

  return {{"s", scar},
          {"s-flip", flip(scar)},
          {"doublon", doublon},
          {"doublon-flip", flip(doublon)},
          {"th", thermal}};
}

FockLabel resolve_state(std::string_view name_or_label, int L) {
  for (const NamedState& st : special_states(L))
    if (st.name == name_or_label) return st.label;
  FockLabel label = parse_label(name_or_label);
  if (label.size() != L)
    throw ParameterError("state label '" + std::string(name_or_label) + "' does not have L = " +
                         std::to_string(L) + " sites");
  return label;
}

} // namespace floqscar
