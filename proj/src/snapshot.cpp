#include "hmlab/snapshot.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "fld snapshots are little-endian; big-endian hosts are unsupported");

namespace hmlab {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json header_for(const SurfaceDomain& dom, const char* value, int dim) {
  ordered_json h;
  h["format"] = "hmlab-fld-v1";
  h["kind"] = dom.kind == SurfaceDomain::Kind::Torus ? "torus" : "patch";
  h["N"] = dom.N;
  if (dom.kind == SurfaceDomain::Kind::Torus)
    h["tau"] = {dom.tau.real(), dom.tau.imag()};
  else
    h["L"] = dom.L;
  h["value"] = value;
  h["dim"] = dim;
  return h;
}

void write_file(const std::filesystem::path& path, const ordered_json& header, const cplx* data,
                std::size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string h = header.dump();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.put('\n');
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(cplx)));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

void save_fld(const std::filesystem::path& path, const ScalarField& f) {
  write_file(path, header_for(f.dom, "scalar", 1), f.v.data(), f.v.size());
}

void save_fld(const std::filesystem::path& path, const RealField& f) {
  std::vector<cplx> buf(f.v.size());
  for (std::size_t i = 0; i < f.v.size(); ++i) buf[i] = cplx(f.v[i], 0.0);
  write_file(path, header_for(f.dom, "scalar", 1), buf.data(), buf.size());
}

void save_fld(const std::filesystem::path& path, const MatrixField& f) {
  write_file(path, header_for(f.dom, "matrix", f.dim), f.v.data(), f.v.size());
}

LoadedField load_fld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) throw std::runtime_error(path.string() + ": missing header");

  ordered_json h;
  try {
    h = ordered_json::parse(header_line);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  if (h.value("format", "") != std::string("hmlab-fld-v1"))
    throw std::runtime_error(path.string() + ": unknown format '" + h.value("format", "") + "'");

  LoadedField out;
  const std::string kind = h.at("kind");
  const int N = h.at("N");
  if (kind == "torus") {
    const auto tau = h.at("tau");
    out.dom = SurfaceDomain::torus(N, cplx(tau.at(0), tau.at(1)));
  } else if (kind == "patch") {
    out.dom = SurfaceDomain::patch(N, h.at("L"));
  } else {
    throw std::runtime_error(path.string() + ": unknown domain kind '" + kind + "'");
  }
  const std::string value = h.at("value");
  out.dim = h.at("dim");
  out.is_matrix = value == "matrix";
  if (!out.is_matrix && out.dim != 1)
    throw std::runtime_error(path.string() + ": scalar field with dim " + std::to_string(out.dim));
  if (out.dim < 1 || out.dim > 8)
    throw std::runtime_error(path.string() + ": unsupported matrix dim " + std::to_string(out.dim));

  const std::size_t expected =
      out.dom.size() * static_cast<std::size_t>(out.dim) * out.dim;
  out.v.resize(expected);
  in.read(reinterpret_cast<char*>(out.v.data()),
          static_cast<std::streamsize>(expected * sizeof(cplx)));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != expected * sizeof(cplx))
    throw std::runtime_error(path.string() + ": truncated payload: expected " +
                             std::to_string(expected * sizeof(cplx)) + " bytes for " +
                             std::to_string(out.dom.size()) + " nodes (dim " +
                             std::to_string(out.dim) + "), got " + std::to_string(got));
  // Anything left over means the header does not match the stored grid.
  char extra;
  if (in.read(&extra, 1))
    throw std::runtime_error(path.string() + ": payload longer than the declared shape (" +
                             kind + ", N = " + std::to_string(N) + ", dim = " +
                             std::to_string(out.dim) + ")");
  for (const cplx& z : out.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::runtime_error(path.string() + ": non-finite values in payload");
  return out;
}

ScalarField load_scalar_fld(const std::filesystem::path& path) {
  LoadedField lf = load_fld(path);
  if (lf.is_matrix) throw std::runtime_error(path.string() + ": expected a scalar field");
  ScalarField f(lf.dom);
  f.v = std::move(lf.v);
  return f;
}

RealField load_real_fld(const std::filesystem::path& path) {
  const ScalarField s = load_scalar_fld(path);
  RealField f(s.dom);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    if (s.v[i].imag() != 0.0)
      throw std::runtime_error(path.string() + ": expected a real field, found imaginary parts");
    f.v[i] = s.v[i].real();
  }
  return f;
}

MatrixField load_matrix_fld(const std::filesystem::path& path) {
  LoadedField lf = load_fld(path);
  if (!lf.is_matrix) throw std::runtime_error(path.string() + ": expected a matrix field");
  MatrixField f(lf.dom, lf.dim);
  f.v = std::move(lf.v);
  return f;
}

}  // namespace hmlab
