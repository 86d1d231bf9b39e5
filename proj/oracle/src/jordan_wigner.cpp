#include "oracle/jordan_wigner.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <stdexcept>

namespace oracle {

namespace {

SpMat small(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m.sparseView();
}

} // namespace

JordanWigner::JordanWigner(int L, ModeOrder order) : L_(L), order_(order) {
  if (L < 1 || L > 5) throw std::invalid_argument("oracle supports 1 <= L <= 5");
  if (order == ModeOrder::SideMajor && L % 2 != 0) throw std::invalid_argument("side-major order needs even L");
  const int modes = 2 * L;
  const SpMat z = small(1, 0, 0, -1);
  const SpMat lower = small(0, 1, 0, 0); // |empty><occupied|
  const SpMat id = small(1, 0, 0, 1);
  ops_.resize(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    // Mode 0 is the least significant factor, so it sits rightmost.
    SpMat acc = (k == 0) ? lower : z;
    for (int j = 1; j < modes; ++j) {
      const SpMat& f = (j < k) ? z : (j == k ? lower : id);
      SpMat next = Eigen::kroneckerProduct(f, acc);
      acc = next;
    }
    ops_[static_cast<std::size_t>(k)] = acc;
  }
}

int JordanWigner::position(int site, int spin) const {
  if (order_ == ModeOrder::SpinMajor) return spin * L_ + site - 1;
  const int half = L_ / 2;
  const bool right = site > half;
  const int local = right ? site - half : site;
  return (right ? L_ : 0) + spin * half + local - 1;
}

const SpMat& JordanWigner::annihilate(int site, int spin) const {
  return ops_[static_cast<std::size_t>(position(site, spin))];
}

SpMat JordanWigner::create(int site, int spin) const { return annihilate(site, spin).transpose(); }

SpMat JordanWigner::number(int site, int spin) const { return create(site, spin) * annihilate(site, spin); }

Eigen::MatrixXd JordanWigner::sector_embedding(const floqscar::FockSpace& space) const {
  if (space.sites() != L_) throw std::invalid_argument("sector has a different L");
  Eigen::MatrixXd out(dim(), static_cast<Eigen::Index>(space.dim()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto& up = space.up().tuple(space.up_index(i));
    const auto& dn = space.down().tuple(space.down_index(i));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
    v(0) = 1.0;
    // Rightmost operator acts first: apply the down string in reverse, then up.
    for (auto it = dn.rbegin(); it != dn.rend(); ++it) v = create(*it, 1) * v;
    for (auto it = up.rbegin(); it != up.rend(); ++it) v = create(*it, 0) * v;
    out.col(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

SpMat hubbard_ring(const JordanWigner& jw, double J, double delta, double U) {
  const int L = jw.sites();
  SpMat h(jw.dim(), jw.dim());
  for (int spin = 0; spin < 2; ++spin)
    for (int j = 1; j <= L; ++j) {
      const int next = j % L + 1;
      const SpMat hop = jw.create(j, spin) * jw.annihilate(next, spin);
      const SpMat back = hop.transpose();
      h += -J * (hop + back);
      h += (delta * j) * jw.number(j, spin);
    }
  for (int j = 1; j <= L; ++j) h += U * (jw.number(j, 0) * jw.number(j, 1));
  return h;
}

SpMat effective_plus(const JordanWigner& jw, double J, double delta, double U) {
  const int L = jw.sites();
  SpMat h(jw.dim(), jw.dim());
  SpMat id(jw.dim(), jw.dim());
  id.setIdentity();
  for (int j = 1; j < L; ++j)
    for (int s = 0; s < 2; ++s) {
      const int o = 1 - s;
      const SpMat term = jw.create(j, s) * jw.annihilate(j + 1, s) * jw.number(j, o) * (id - jw.number(j + 1, o));
      const SpMat adj = term.transpose();
      h += -J * (term + adj);
    }
  for (int j = 1; j <= L; ++j) h += (U - delta) * (jw.number(j, 0) * jw.number(j, 1));
  return h;
}

SpMat effective_minus(const JordanWigner& jw, double J, double delta, double U) {
  const int L = jw.sites();
  const double j3 = U * J * J / (delta * delta);
  SpMat h(jw.dim(), jw.dim());
  for (int s = 0; s < 2; ++s) {
    const int o = 1 - s;
    for (int j = 1; j + 2 <= L; ++j) {
      const SpMat t3 = jw.annihilate(j, s) * jw.create(j + 1, s) * jw.create(j + 1, o) * jw.annihilate(j + 2, o);
      const SpMat adj = t3.transpose();
      h += j3 * (t3 + adj);
    }
    for (int j = 1; j + 1 <= L; ++j) {
      const SpMat xy = jw.create(j, o) * jw.annihilate(j + 1, o) * jw.create(j + 1, s) * jw.annihilate(j, s);
      h += 2.0 * j3 * xy;
      h += 2.0 * j3 * (jw.number(j, s) * jw.number(j + 1, o));
    }
  }
  for (int j = 1; j <= L; ++j)
    h += U * (1.0 - 4.0 * J * J / (delta * delta)) * (jw.number(j, 0) * jw.number(j, 1));
  return h;
}

Eigen::MatrixXd project(const SpMat& full, const Eigen::MatrixXd& embedding) {
  return embedding.transpose() * (full * embedding);
}

} // namespace oracle
