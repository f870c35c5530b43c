/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "nlrm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace nlrm::io
{

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

namespace fs = std::filesystem;

namespace
{

fs::path with_ext(const fs::path& stem, const char* ext)
{
  fs::path p = stem;
  p += ext;
  return p;
}

void check_version(const json& doc, const char* what)
{
  if (!doc.contains("version") || doc.at("version").get<int>() != kFormatVersion)
    throw FormatError(std::string(what) + ": unsupported format version");
}

// Infinite mu has no JSON literal; stored as null.
json finite_or_null(double x)
{
  return std::isfinite(x) ? json(x) : json(nullptr);
}

double from_finite_or_null(const json& j)
{
  return j.is_null() ? kInfiniteMu : j.get<double>();
}

void write_block(std::ofstream& os, const double* p, std::size_t n)
{
  os.write(reinterpret_cast<const char*>(p),
           static_cast<std::streamsize>(n * sizeof(double)));
}

void read_block(std::ifstream& is, double* p, std::size_t n)
{
  is.read(reinterpret_cast<char*>(p),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is)
    throw FormatError("binary payload is truncated");
}

} // namespace

std::string config_hash(const json& config)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump())
  {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json(const fs::path& path)
{
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot open " + path.string());
  return json::parse(is);
}

void write_json(const fs::path& path, const json& doc)
{
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  os << doc.dump(2) << '\n';
}

json vector_to_json(const Vector& v)
{
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& a)
{
  const auto v = a.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json model_to_json(const AffineModel& model)
{
  if (!model.field())
    throw std::logic_error("model_to_json: model has no coefficient field");
  const CoefficientField& f = *model.field();
  return {{"version", kFormatVersion},
          {"n_per_side", model.space().grid().n_per_side()},
          {"partition", to_string(f.partition)},
          {"abar", f.abar},
          {"c", vector_to_json(f.c)},
          {"box",
           {{"lo", vector_to_json(model.box().lo())},
            {"hi", vector_to_json(model.box().hi())}}}};
}

AffineModel model_from_json(const json& doc)
{
  check_version(doc, "model");
  auto space =
      std::make_shared<const DiscreteSpace>(Grid(doc.at("n_per_side").get<int>()));
  std::optional<ParameterBox> box;
  if (doc.contains("box"))
    box = ParameterBox(vector_from_json(doc["box"].at("lo")),
                       vector_from_json(doc["box"].at("hi")));
  return build_model(space,
                     partition_from_string(doc.at("partition").get<std::string>()),
                     doc.at("abar").get<double>(), vector_from_json(doc.at("c")),
                     box);
}

json layout_to_json(const MeasurementLayout& layout)
{
  json boxes = json::array();
  for (const MeasurementBox& b : layout.boxes)
    boxes.push_back({b.x0, b.y0, b.width});
  return {{"version", kFormatVersion},
          {"placement", to_string(layout.placement)},
          {"seed", layout.seed},
          {"box_width", layout.box_width},
          {"boxes", boxes}};
}

MeasurementLayout layout_from_json(const json& doc)
{
  check_version(doc, "measurement layout");
  MeasurementLayout l;
  l.placement = placement_from_string(doc.at("placement").get<std::string>());
  l.seed = doc.at("seed").get<std::uint64_t>();
  l.box_width = doc.at("box_width").get<double>();
  for (const json& b : doc.at("boxes"))
    l.boxes.push_back({b.at(0).get<double>(), b.at(1).get<double>(),
                       b.at(2).get<double>()});
  return l;
}

json mode_to_json(const FamilyMode& mode)
{
  if (mode.kind == FamilyMode::sigma)
    return {{"kind", "sigma"}, {"sigma", mode.sigma_target}};
  return {{"kind", "eps_mu"}, {"eps", mode.eps}, {"mu", mode.mu}};
}

FamilyMode mode_from_json(const json& doc)
{
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "sigma")
    return FamilyMode::make_sigma(doc.at("sigma").get<double>());
  if (kind == "eps_mu")
    return FamilyMode::make_eps_mu(doc.at("eps").get<double>(),
                                   doc.at("mu").get<double>());
  throw FormatError("unknown family mode: " + kind);
}

void save_family(const fs::path& stem, const ReducedFamily& family)
{
  std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin)
    throw std::runtime_error("cannot write " + with_ext(stem, ".bin").string());

  json cells = json::array();
  std::size_t offset = 0; // in doubles
  for (const Cell& c : family.pool())
  {
    const RBHierarchy& h = c.hierarchy;
    json eps = json::array(), mu = json::array();
    for (double e : h.eps)
      eps.push_back(e);
    for (double m : h.mu)
      mu.push_back(finite_or_null(m));
    cells.push_back({{"id", c.id},
                     {"parent", c.parent},
                     {"level", c.level},
                     {"lo", vector_to_json(c.box.lo())},
                     {"hi", vector_to_json(c.box.hi())},
                     {"n_training", c.training.size()},
                     {"data_starved", c.data_starved},
                     {"n", c.space.dim()},
                     {"tau", finite_or_null(c.tau)},
                     {"eps", eps},
                     {"mu", mu},
                     {"picks", h.picks},
                     {"depth", h.depth()},
                     {"offset", offset}});
    write_block(bin, h.offset.data(), h.offset.size());
    write_block(bin, h.basis.data(), h.basis.size());
    offset += h.offset.size() + h.basis.size();
  }
  json splits = json::array();
  for (const SplitRecord& s : family.splits())
    splits.push_back({{"cell", s.cell},
                      {"direction", s.direction},
                      {"lower", s.lower},
                      {"upper", s.upper},
                      {"sigma_after", s.sigma_after}});

  const Eigen::Index n_dof =
      family.pool().empty() ? 0 : family.pool().front().hierarchy.offset.size();
  write_json(with_ext(stem, ".json"),
             {{"version", kFormatVersion},
              {"n_dof", n_dof},
              {"mode", mode_to_json(family.mode())},
              {"converged", family.converged()},
              {"sigma", family.sigma()},
              {"root",
               {{"lo", vector_to_json(family.root().lo())},
                {"hi", vector_to_json(family.root().hi())}}},
              {"payload", with_ext(stem, ".bin").filename().string()},
              {"cells", cells},
              {"splits", splits}});
}

ReducedFamily load_family(const fs::path& stem)
{
  const json doc = read_json(with_ext(stem, ".json"));
  check_version(doc, "family");
  const auto n_dof = doc.at("n_dof").get<Eigen::Index>();
  std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin)
    throw std::runtime_error("cannot open " + with_ext(stem, ".bin").string());

  ReducedFamily fam(ParameterBox(vector_from_json(doc["root"].at("lo")),
                                 vector_from_json(doc["root"].at("hi"))),
                    mode_from_json(doc.at("mode")));
  for (const json& jc : doc.at("cells"))
  {
    Cell c;
    c.parent = jc.at("parent").get<int>();
    c.level = jc.at("level").get<int>();
    c.box = ParameterBox(vector_from_json(jc.at("lo")),
                         vector_from_json(jc.at("hi")));
    c.data_starved = jc.at("data_starved").get<bool>();
    c.tau = from_finite_or_null(jc.at("tau"));
    RBHierarchy& h = c.hierarchy;
    const int depth = jc.at("depth").get<int>();
    h.offset.resize(n_dof);
    h.basis.resize(n_dof, depth);
    bin.seekg(static_cast<std::streamoff>(jc.at("offset").get<std::size_t>() *
                                          sizeof(double)));
    read_block(bin, h.offset.data(), h.offset.size());
    read_block(bin, h.basis.data(), h.basis.size());
    h.eps = jc.at("eps").get<std::vector<double>>();
    for (const json& m : jc.at("mu"))
      h.mu.push_back(from_finite_or_null(m));
    h.picks = jc.at("picks").get<std::vector<int>>();
    c.space = h.space(jc.at("n").get<int>());
    const int id = fam.add_cell(std::move(c));
    if (id != jc.at("id").get<int>())
      throw FormatError("family cells are not stored in id order");
  }
  for (const json& s : doc.at("splits"))
    fam.add_split({s.at("cell").get<int>(), s.at("direction").get<int>(),
                   s.at("lower").get<int>(), s.at("upper").get<int>(),
                   s.at("sigma_after").get<double>()});
  fam.set_converged(doc.at("converged").get<bool>());
  return fam;
}

void write_state_dump(const fs::path& stem, const Matrix& data, const json& meta)
{
  std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin)
    throw std::runtime_error("cannot write " + with_ext(stem, ".bin").string());
  write_block(bin, data.data(), data.size());
  json header = {{"version", kFormatVersion},
                 {"dtype", "float64"},
                 {"order", "column-major"},
                 {"endian", "little"},
                 {"rows", data.rows()},
                 {"cols", data.cols()},
                 {"payload", with_ext(stem, ".bin").filename().string()},
                 {"meta", meta}};
  write_json(with_ext(stem, ".json"), header);
}

Matrix read_state_dump(const fs::path& stem)
{
  const json header = read_json(with_ext(stem, ".json"));
  check_version(header, "state dump");
  if (header.at("dtype") != "float64")
    throw FormatError("state dump: unsupported dtype");
  Matrix out(header.at("rows").get<Eigen::Index>(),
             header.at("cols").get<Eigen::Index>());
  std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin)
    throw std::runtime_error("cannot open " + with_ext(stem, ".bin").string());
  read_block(bin, out.data(), out.size());
  return out;
}

Observation observation_from_json(const MeasurementSpace& W, const json& doc)
{
  if (doc.contains("z"))
  {
    const Vector z = vector_from_json(doc["z"]);
    if (z.size() != W.m())
      throw FormatError("observation length does not match m");
    return observe_raw(W, z);
  }
  if (doc.contains("w"))
  {
    Observation obs;
    obs.w = vector_from_json(doc["w"]);
    if (obs.w.size() != W.m())
      throw FormatError("observation length does not match m");
    return obs;
  }
  throw FormatError("observation needs a \"z\" or \"w\" array");
}

json selection_to_json(const SelectionResult& sel)
{
  json cells = json::array();
  for (const CellEstimate& e : sel.cells)
  {
    json j = {{"k", e.k}, {"ok", e.ok}};
    if (e.ok)
    {
      j["S"] = e.S;
      j["bound"] = e.bound;
      j["certified"] = e.certified;
      j["y"] = vector_to_json(e.y);
    }
    else
      j["failure"] = e.failure;
    cells.push_back(j);
  }
  return {{"k_star", sel.k_star},
          {"y_star", vector_to_json(sel.y_star)},
          {"plausible", sel.plausible},
          {"cells", cells}};
}

json altmin_trace_to_json(const AltMinState& st)
{
  json steps = json::array();
  for (const AltMinStep& s : st.steps)
    steps.push_back({{"residual", s.residual},
                     {"y_seconds", s.y_seconds},
                     {"v_seconds", s.v_seconds}});
  return {{"iterations", st.iterations},
          {"stop_reason", st.stop_reason},
          {"y", vector_to_json(st.y)},
          {"history", st.history},
          {"steps", steps}};
}

} // namespace nlrm::io
