#include "qpns/reference.hpp"

#include <stdexcept>

namespace qpns {

namespace {

void require_compatible(const GridSpec& u, const GridSpec& v) {
  if (!u.same_lattice(v)) detail::throw_grid_mismatch(u, v);
  if (u.ncomp != u.d) throw std::invalid_argument("reference_advect: u must have d components");
}

}  // namespace

SpaceField reference_advect(const SpaceField& u, const SpaceField& v) {
  require_compatible(u.grid(), v.grid());
  const GridSpec& g = u.grid();
  const Lattice& lat = u.lattice();
  const std::size_t n = lat.size();
  const int d = g.d;
  SpaceField out(v.grid());
  std::vector<int> p(d), q(d), k(d);
  for (std::size_t ik = 0; ik < n; ++ik) {
    lat.unravel(ik, k);
    for (std::size_t ip = 0; ip < n; ++ip) {
      lat.unravel(ip, p);
      for (int a = 0; a < d; ++a) q[a] = k[a] - p[a];
      if (!lat.contains(q)) continue;
      const std::size_t iq = lat.index(q);
      Complex udotq{};
      for (int a = 0; a < d; ++a) udotq += u(a, ip) * static_cast<double>(q[a]);
      udotq *= Complex(0.0, 1.0);
      for (int c = 0; c < v.ncomp(); ++c) out(c, ik) += udotq * v(c, iq);
    }
  }
  return out;
}

SpaceTimeField reference_advect(const SpaceTimeField& U, const SpaceTimeField& V) {
  require_compatible(U.grid(), V.grid());
  const GridSpec& g = U.grid();
  const Lattice& al = U.angle_lattice();
  const Lattice& xl = U.space_lattice();
  const int d = g.d;
  const int nu = g.nu;
  SpaceTimeField out(V.grid());
  std::vector<int> lk(nu), lp(nu), lq(nu), k(d), p(d), q(d);
  for (std::size_t ak = 0; ak < al.size(); ++ak) {
    al.unravel(ak, lk);
    for (std::size_t ap = 0; ap < al.size(); ++ap) {
      al.unravel(ap, lp);
      for (int i = 0; i < nu; ++i) lq[i] = lk[i] - lp[i];
      if (!al.contains(lq)) continue;
      const std::size_t aq = al.index(lq);
      for (std::size_t ik = 0; ik < xl.size(); ++ik) {
        xl.unravel(ik, k);
        const std::size_t mk = U.mode_index(ak, ik);
        for (std::size_t ip = 0; ip < xl.size(); ++ip) {
          xl.unravel(ip, p);
          for (int a = 0; a < d; ++a) q[a] = k[a] - p[a];
          if (!xl.contains(q)) continue;
          const std::size_t mp = U.mode_index(ap, ip);
          const std::size_t mq = U.mode_index(aq, xl.index(q));
          Complex udotq{};
          for (int a = 0; a < d; ++a) udotq += U(a, mp) * static_cast<double>(q[a]);
          udotq *= Complex(0.0, 1.0);
          for (int c = 0; c < V.ncomp(); ++c) out(c, mk) += udotq * V(c, mq);
        }
      }
    }
  }
  return out;
}

}  // namespace qpns
