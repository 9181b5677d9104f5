#include "hmlab/ops.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hmlab/kernels.hpp"
#include "hmlab/transforms.hpp"

namespace hmlab {
namespace {

constexpr double pi = std::numbers::pi;

int freq(int j, int N) { return j <= N / 2 - 1 ? j : j - N; }

enum class MulKind { Dz, Dzbar, Lap };

// Spectral multiplier tables for the lattice Z + tau Z; mode exp(2 pi i (m s + n t)).
struct TorusTables {
  std::vector<cplx> dz, dzbar, lap;
};

const TorusTables& torus_tables(const SurfaceDomain& d) {
  static std::map<std::pair<int, std::pair<double, double>>, TorusTables> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(d.N, std::make_pair(d.tau.real(), d.tau.imag()));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int N = d.N;
  TorusTables t;
  t.dz.resize(static_cast<std::size_t>(N) * N);
  t.dzbar.resize(t.dz.size());
  t.lap.resize(t.dz.size());
  const cplx tau = d.tau;
  const cplx denom = tau - std::conj(tau);
  for (int k0 = 0; k0 < N; ++k0) {
    const int n = freq(k0, N);
    for (int k1 = 0; k1 < N; ++k1) {
      const int m = freq(k1, N);
      const std::size_t idx = static_cast<std::size_t>(k0) * N + k1;
      if (std::abs(m) == N / 2 || std::abs(n) == N / 2) {
        t.dz[idx] = t.dzbar[idx] = t.lap[idx] = 0.0;
        continue;
      }
      const cplx i2pi(0.0, 2.0 * pi);
      t.dz[idx] = i2pi * (cplx(n) - std::conj(tau) * cplx(m)) / denom;
      t.dzbar[idx] = i2pi * (tau * cplx(m) - cplx(n)) / denom;
      t.lap[idx] = 4.0 * t.dz[idx] * t.dzbar[idx];
    }
  }
  return cache.emplace(key, std::move(t)).first->second;
}

ScalarField spectral_apply(const ScalarField& f, MulKind kind) {
  const int N = f.dom.N;
  const TorusTables& t = torus_tables(f.dom);
  const std::vector<cplx>& mult =
      kind == MulKind::Dz ? t.dz : (kind == MulKind::Dzbar ? t.dzbar : t.lap);
  ScalarField out(f.dom);
  std::vector<cplx> hat(f.v.size());
  fft2(N, f.v.data(), hat.data(), true);
  kern::cmul(hat.data(), hat.data(), mult.data(), hat.size());
  fft2(N, hat.data(), out.v.data(), false);
  const double inv = 1.0 / (static_cast<double>(N) * N);
  kern::scale(reinterpret_cast<double*>(out.v.data()),
              reinterpret_cast<const double*>(out.v.data()), inv, 2 * out.v.size());
  return out;
}

// Finite-difference weights for arbitrary nodes (Fornberg's algorithm).
std::vector<double> fd_weights(double x0, const std::vector<double>& a, int m) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0, c4 = a[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = a[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = a[i] - a[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

struct FdTable {
  std::vector<int> start;
  std::vector<int> count;
  std::vector<std::size_t> off;
  std::vector<double> w;
};

FdTable build_fd_table(int axis, double h, int order) {
  if (axis < 6) throw std::invalid_argument("patch stencil: resolution too small");
  FdTable t;
  t.start.resize(axis);
  t.count.resize(axis);
  t.off.resize(axis);
  for (int i = 0; i < axis; ++i) {
    int start, count;
    if (order == 1) {
      count = 5;
      start = std::clamp(i - 2, 0, axis - 5);
    } else {
      if (i >= 2 && i <= axis - 3) {
        count = 5;
        start = i - 2;
      } else {
        count = 6;
        start = i < 2 ? 0 : axis - 6;
      }
    }
    std::vector<double> nodes(count);
    for (int k = 0; k < count; ++k) nodes[k] = (start + k) * h;
    const std::vector<double> wi = fd_weights(i * h, nodes, order);
    t.start[i] = start;
    t.count[i] = count;
    t.off[i] = t.w.size();
    t.w.insert(t.w.end(), wi.begin(), wi.end());
  }
  return t;
}

const FdTable& patch_table(const SurfaceDomain& d, int order) {
  static std::map<std::tuple<int, double, int>, FdTable> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(d.axis_nodes(), d.step_x(), order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, build_fd_table(d.axis_nodes(), d.step_x(), order)).first->second;
}

template <class T>
void fd_apply_x(const SurfaceDomain& dom, const FdTable& t, const T* in, T* out) {
  const int a = dom.axis_nodes();
  for (int iy = 0; iy < a; ++iy) {
    const T* row = in + static_cast<std::size_t>(iy) * a;
    T* orow = out + static_cast<std::size_t>(iy) * a;
    for (int ix = 0; ix < a; ++ix) {
      T acc{};
      const double* w = &t.w[t.off[ix]];
      const int s = t.start[ix];
      for (int k = 0; k < t.count[ix]; ++k) acc += w[k] * row[s + k];
      orow[ix] = acc;
    }
  }
}

template <class T>
void fd_apply_y(const SurfaceDomain& dom, const FdTable& t, const T* in, T* out) {
  const int a = dom.axis_nodes();
  for (int iy = 0; iy < a; ++iy) {
    const double* w = &t.w[t.off[iy]];
    const int s = t.start[iy];
    const int cnt = t.count[iy];
    for (int ix = 0; ix < a; ++ix) {
      T acc{};
      for (int k = 0; k < cnt; ++k) acc += w[k] * in[static_cast<std::size_t>(s + k) * a + ix];
      out[static_cast<std::size_t>(iy) * a + ix] = acc;
    }
  }
}

ScalarField patch_dx(const ScalarField& f) {
  ScalarField out(f.dom);
  fd_apply_x(f.dom, patch_table(f.dom, 1), f.v.data(), out.v.data());
  return out;
}

ScalarField patch_dy(const ScalarField& f) {
  ScalarField out(f.dom);
  fd_apply_y(f.dom, patch_table(f.dom, 1), f.v.data(), out.v.data());
  return out;
}

}  // namespace

ScalarField d_dz(const ScalarField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Torus) return spectral_apply(f, MulKind::Dz);
  // (dx - i dy) / 2
  ScalarField gx = patch_dx(f), gy = patch_dy(f);
  ScalarField out(f.dom);
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = 0.5 * (gx.v[i] - cplx(0.0, 1.0) * gy.v[i]);
  return out;
}

ScalarField d_dzbar(const ScalarField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Torus) return spectral_apply(f, MulKind::Dzbar);
  ScalarField gx = patch_dx(f), gy = patch_dy(f);
  ScalarField out(f.dom);
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = 0.5 * (gx.v[i] + cplx(0.0, 1.0) * gy.v[i]);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Torus) return spectral_apply(f, MulKind::Lap);
  const FdTable& t2 = patch_table(f.dom, 2);
  ScalarField xx(f.dom), yy(f.dom);
  fd_apply_x(f.dom, t2, f.v.data(), xx.v.data());
  fd_apply_y(f.dom, t2, f.v.data(), yy.v.data());
  kern::add(reinterpret_cast<double*>(xx.v.data()), reinterpret_cast<const double*>(xx.v.data()),
            reinterpret_cast<const double*>(yy.v.data()), 2 * xx.v.size());
  return xx;
}

RealField laplacian(const RealField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Patch) {
    const FdTable& t2 = patch_table(f.dom, 2);
    RealField xx(f.dom), yy(f.dom);
    fd_apply_x(f.dom, t2, f.v.data(), xx.v.data());
    fd_apply_y(f.dom, t2, f.v.data(), yy.v.data());
    kern::add(xx.v.data(), xx.v.data(), yy.v.data(), xx.v.size());
    return xx;
  }
  ScalarField c(f.dom);
  for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = f.v[i];
  return real_part(laplacian(c));
}

ScalarField dx(const ScalarField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Patch) return patch_dx(f);
  ScalarField a = d_dz(f), b = d_dzbar(f);
  kern::add(reinterpret_cast<double*>(a.v.data()), reinterpret_cast<const double*>(a.v.data()),
            reinterpret_cast<const double*>(b.v.data()), 2 * a.v.size());
  return a;
}

ScalarField dy(const ScalarField& f) {
  if (f.dom.kind == SurfaceDomain::Kind::Patch) return patch_dy(f);
  ScalarField a = d_dz(f), b = d_dzbar(f);
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] = cplx(0.0, 1.0) * (a.v[i] - b.v[i]);
  return a;
}

RealField dx(const RealField& f) {
  ScalarField c(f.dom);
  for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = f.v[i];
  return real_part(dx(c));
}

RealField dy(const RealField& f) {
  ScalarField c(f.dom);
  for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = f.v[i];
  return real_part(dy(c));
}

MatrixField d_dz(const MatrixField& f) {
  MatrixField out(f.dom, f.dim);
  const int dd = f.dim * f.dim;
  ScalarField entry(f.dom);
  for (int e = 0; e < dd; ++e) {
    for (std::size_t node = 0; node < f.nodes(); ++node) entry.v[node] = f.v[node * dd + e];
    ScalarField de = d_dz(entry);
    for (std::size_t node = 0; node < f.nodes(); ++node) out.v[node * dd + e] = de.v[node];
  }
  return out;
}

MatrixField d_dzbar(const MatrixField& f) {
  MatrixField out(f.dom, f.dim);
  const int dd = f.dim * f.dim;
  ScalarField entry(f.dom);
  for (int e = 0; e < dd; ++e) {
    for (std::size_t node = 0; node < f.nodes(); ++node) entry.v[node] = f.v[node * dd + e];
    ScalarField de = d_dzbar(entry);
    for (std::size_t node = 0; node < f.nodes(); ++node) out.v[node * dd + e] = de.v[node];
  }
  return out;
}

RealField quadrature_weights(const SurfaceDomain& dom) {
  RealField w(dom);
  if (dom.kind == SurfaceDomain::Kind::Torus) {
    const double cell = dom.tau.imag() / (static_cast<double>(dom.N) * dom.N);
    for (double& x : w.v) x = cell;
    return w;
  }
  const int a = dom.axis_nodes();
  const double h2 = dom.step_x() * dom.step_y();
  for (int iy = 0; iy < a; ++iy) {
    const double cy = (iy == 0 || iy == a - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < a; ++ix) {
      const double cx = (ix == 0 || ix == a - 1) ? 0.5 : 1.0;
      w.at(ix, iy) = cx * cy * h2;
    }
  }
  return w;
}

double integrate(const RealField& f) {
  const RealField w = quadrature_weights(f.dom);
  return kern::dot(f.v.data(), w.v.data(), f.v.size());
}

double integrate(const RealField& f, const RealField& dV) {
  if (!(f.dom == dV.dom)) throw std::invalid_argument("integrate: mismatched domains");
  const RealField w = quadrature_weights(f.dom);
  std::vector<double> fw(f.v.size());
  kern::mul(fw.data(), f.v.data(), dV.v.data(), fw.size());
  return kern::dot(fw.data(), w.v.data(), fw.size());
}

RealField inverse_laplacian(const RealField& f) {
  const SurfaceDomain& dom = f.dom;
  RealField out(dom);
  if (dom.kind == SurfaceDomain::Kind::Torus) {
    const int N = dom.N;
    const TorusTables& t = torus_tables(dom);
    std::vector<cplx> buf(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) buf[i] = f.v[i];
    std::vector<cplx> hat(buf.size());
    fft2(N, buf.data(), hat.data(), true);
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const double l = t.lap[i].real();
      hat[i] = (l == 0.0) ? cplx(0.0, 0.0) : hat[i] / l;
    }
    fft2(N, hat.data(), buf.data(), false);
    const double inv = 1.0 / (static_cast<double>(N) * N);
    for (std::size_t i = 0; i < buf.size(); ++i) out.v[i] = buf[i].real() * inv;
    return out;
  }
  // 5-point Dirichlet solve on the interior via DST-I.
  const int N = dom.N;
  const int m = N - 1;
  const double h = dom.step_x();
  std::vector<double> rhs(static_cast<std::size_t>(m) * m);
  for (int iy = 1; iy < N; ++iy)
    for (int ix = 1; ix < N; ++ix)
      rhs[static_cast<std::size_t>(iy - 1) * m + (ix - 1)] = f.at(ix, iy);
  std::vector<double> hat(rhs.size());
  dst2(m, rhs.data(), hat.data());
  const double norm = 1.0 / (4.0 * static_cast<double>(m + 1) * (m + 1));
  for (int j = 0; j < m; ++j) {
    const double ly = (2.0 * std::cos(pi * (j + 1) / N) - 2.0) / (h * h);
    for (int i = 0; i < m; ++i) {
      const double lx = (2.0 * std::cos(pi * (i + 1) / N) - 2.0) / (h * h);
      hat[static_cast<std::size_t>(j) * m + i] *= norm / (lx + ly);
    }
  }
  dst2(m, hat.data(), rhs.data());
  for (int iy = 1; iy < N; ++iy)
    for (int ix = 1; ix < N; ++ix) out.at(ix, iy) = rhs[static_cast<std::size_t>(iy - 1) * m + (ix - 1)];
  return out;
}

RealField inverse_helmholtz(const RealField& f, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("inverse_helmholtz: mu must be positive");
  const SurfaceDomain& dom = f.dom;
  RealField out(dom);
  if (dom.kind == SurfaceDomain::Kind::Torus) {
    const int N = dom.N;
    const TorusTables& t = torus_tables(dom);
    std::vector<cplx> buf(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) buf[i] = f.v[i];
    std::vector<cplx> hat(buf.size());
    fft2(N, buf.data(), hat.data(), true);
    for (std::size_t i = 0; i < hat.size(); ++i)
      hat[i] /= (-0.5 * t.lap[i].real() + mu);
    fft2(N, hat.data(), buf.data(), false);
    const double inv = 1.0 / (static_cast<double>(N) * N);
    for (std::size_t i = 0; i < buf.size(); ++i) out.v[i] = buf[i].real() * inv;
    return out;
  }
  const int N = dom.N;
  const int m = N - 1;
  const double h = dom.step_x();
  std::vector<double> rhs(static_cast<std::size_t>(m) * m);
  for (int iy = 1; iy < N; ++iy)
    for (int ix = 1; ix < N; ++ix)
      rhs[static_cast<std::size_t>(iy - 1) * m + (ix - 1)] = f.at(ix, iy);
  std::vector<double> hat(rhs.size());
  dst2(m, rhs.data(), hat.data());
  const double norm = 1.0 / (4.0 * static_cast<double>(m + 1) * (m + 1));
  for (int j = 0; j < m; ++j) {
    const double ly = (2.0 * std::cos(pi * (j + 1) / N) - 2.0) / (h * h);
    for (int i = 0; i < m; ++i) {
      const double lx = (2.0 * std::cos(pi * (i + 1) / N) - 2.0) / (h * h);
      hat[static_cast<std::size_t>(j) * m + i] *= norm / (-0.5 * (lx + ly) + mu);
    }
  }
  dst2(m, hat.data(), rhs.data());
  for (int iy = 1; iy < N; ++iy)
    for (int ix = 1; ix < N; ++ix) out.at(ix, iy) = rhs[static_cast<std::size_t>(iy - 1) * m + (ix - 1)];
  return out;
}

}  // namespace hmlab
