#include "mrl/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mrl {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return is;
}

double parse_double(const std::string& s, const std::string& where) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0')
    throw std::runtime_error(where + ": bad number '" + s + "'");
  return v;
}

long long parse_ll(const std::string& s, const std::string& where) {
  const char* c = s.c_str();
  char* end = nullptr;
  long long v = std::strtoll(c, &end, 10);
  if (end == c || *end != '\0')
    throw std::runtime_error(where + ": bad integer '" + s + "'");
  return v;
}

std::map<std::string, std::string> read_kv(const std::string& path) {
  std::ifstream is = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": expected key=value, got '" + line +
                               "'");
    std::string key = line.substr(0, eq);
    if (!kv.emplace(key, line.substr(eq + 1)).second)
      throw std::runtime_error(path + ": duplicate key '" + key + "'");
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv,
                        const std::string& key, const std::string& path) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw std::runtime_error(path + ": missing key '" + key + "'");
  return it->second;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string meta_path_for(const std::string& csv_path) {
  auto dot = csv_path.rfind('.');
  auto slash = csv_path.find_last_of('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return csv_path + ".meta";
  return csv_path.substr(0, dot) + ".meta";
}

void write_dataset_csv(const LabeledDataset& ds, const std::string& csv_path,
                       const std::string& meta_path) {
  std::ofstream os = open_out(csv_path);
  const int d = ds.dim();
  os << "label";
  for (int j = 1; j <= d; ++j) os << ",x" << j;
  os << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    os << ds.labels[i];
    const double* p = ds.points.data() + i * d;
    for (int j = 0; j < d; ++j) os << ',' << format_g17(p[j]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + csv_path);

  std::ofstream ms = open_out(meta_path);
  const ManifoldSpec& s = ds.spec;
  auto kind_name = [&] {
    switch (s.kind) {
      case ManifoldKind::Circles: return "circles";
      case ManifoldKind::Planes: return "planes";
      case ManifoldKind::Ingested: return "ingested";
    }
    throw std::runtime_error("bad kind");
  };
  ms << "kind=" << kind_name() << '\n';
  ms << "k=" << s.k << '\n';
  ms << "d=" << s.d << '\n';
  ms << "n_classes=" << s.n_classes << '\n';
  ms << "reach=" << format_g17(s.reach_decision_axis) << '\n';
  ms << "medial_reach=" << format_g17(s.medial_reach) << '\n';
  ms << "vol_k=" << format_g17(s.vol_k) << '\n';
  if (s.kind == ManifoldKind::Circles)
    ms << "r1=" << format_g17(s.r1) << '\n' << "r2=" << format_g17(s.r2)
       << '\n';
  if (s.kind == ManifoldKind::Planes)
    ms << "lo=" << format_g17(s.lo) << '\n' << "hi=" << format_g17(s.hi)
       << '\n' << "separation=" << format_g17(s.separation) << '\n';
  ms << "role=" << (ds.role == DatasetRole::Train ? "train" : "test") << '\n';
  ms << "seed=" << ds.seed << '\n';
  ms << "n=" << ds.size() << '\n';
  if (!ms) throw std::runtime_error("write failed: " + meta_path);
}

LabeledDataset read_dataset_csv(const std::string& csv_path,
                                const std::string& meta_path) {
  auto kv = read_kv(meta_path);
  LabeledDataset ds;
  const std::string kind = need(kv, "kind", meta_path);
  int d = static_cast<int>(parse_ll(need(kv, "d", meta_path), meta_path));
  int n_classes = static_cast<int>(
      parse_ll(need(kv, "n_classes", meta_path), meta_path));
  if (kind == "circles") {
    ds.spec = circles_spec(d - 2);
    ds.spec.r1 = parse_double(need(kv, "r1", meta_path), meta_path);
    ds.spec.r2 = parse_double(need(kv, "r2", meta_path), meta_path);
  } else if (kind == "planes") {
    ds.spec = planes_spec(d - 2);
    ds.spec.lo = parse_double(need(kv, "lo", meta_path), meta_path);
    ds.spec.hi = parse_double(need(kv, "hi", meta_path), meta_path);
    ds.spec.separation =
        parse_double(need(kv, "separation", meta_path), meta_path);
  } else if (kind == "ingested") {
    ds.spec = ingested_spec(d, n_classes);
  } else {
    throw std::runtime_error(meta_path + ": unknown kind '" + kind + "'");
  }
  ds.spec.k = static_cast<int>(parse_ll(need(kv, "k", meta_path), meta_path));
  ds.spec.n_classes = n_classes;
  ds.spec.reach_decision_axis =
      parse_double(need(kv, "reach", meta_path), meta_path);
  ds.spec.medial_reach =
      parse_double(need(kv, "medial_reach", meta_path), meta_path);
  ds.spec.vol_k = parse_double(need(kv, "vol_k", meta_path), meta_path);
  const std::string role = need(kv, "role", meta_path);
  if (role == "train")
    ds.role = DatasetRole::Train;
  else if (role == "test")
    ds.role = DatasetRole::Test;
  else
    throw std::runtime_error(meta_path + ": unknown role '" + role + "'");
  ds.seed = static_cast<std::uint64_t>(
      parse_ll(need(kv, "seed", meta_path), meta_path));
  const auto n = static_cast<std::size_t>(
      parse_ll(need(kv, "n", meta_path), meta_path));

  std::ifstream is = open_in(csv_path);
  ds.points.reserve(n * d);
  ds.labels.reserve(n);
  std::string line;
  if (!std::getline(is, line) || line.rfind("label", 0) != 0)
    throw std::runtime_error(csv_path + ": missing header row");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ','))
      throw std::runtime_error(csv_path + ": bad row " +
                               std::to_string(lineno));
    const std::string where = csv_path + ":" + std::to_string(lineno);
    int label = static_cast<int>(parse_ll(cell, where));
    if (label < 1 || label > n_classes)
      throw std::runtime_error(where + ": label out of range");
    ds.labels.push_back(label);
    int got = 0;
    while (std::getline(ss, cell, ',')) {
      ds.points.push_back(parse_double(cell, where));
      ++got;
    }
    if (got != d)
      throw std::runtime_error(where + ": expected " + std::to_string(d) +
                               " coordinates, got " + std::to_string(got));
  }
  if (ds.labels.size() != n)
    throw std::runtime_error(csv_path + ": row count does not match sidecar");
  return ds;
}

void write_curves_csv(const std::string& path,
                      const std::vector<RobustnessCurve>& curves,
                      const std::vector<std::uint64_t>& seeds) {
  if (curves.size() != seeds.size())
    throw std::invalid_argument("write_curves_csv: curve/seed count mismatch");
  std::ofstream os = open_out(path);
  os << "epsilon,attack,accuracy,seed\n";
  for (std::size_t r = 0; r < curves.size(); ++r) {
    const RobustnessCurve& c = curves[r];
    for (const auto& [name, acc] : c.per_attack)
      for (std::size_t e = 0; e < c.eps_grid.size(); ++e)
        os << format_g17(c.eps_grid[e]) << ',' << name << ','
           << format_g17(acc[e]) << ',' << seeds[r] << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_aggregate_csv(const std::string& path, const CurveAggregate& agg) {
  std::ofstream os = open_out(path);
  os << "epsilon,acc_mean,acc_std,nauc_mean,nauc_std\n";
  for (std::size_t e = 0; e < agg.eps_grid.size(); ++e)
    os << format_g17(agg.eps_grid[e]) << ',' << format_g17(agg.acc_mean[e])
       << ',' << format_g17(agg.acc_std[e]) << ','
       << format_g17(agg.nauc_mean) << ',' << format_g17(agg.nauc_std)
       << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace mrl
