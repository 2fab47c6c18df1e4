#include "boundselect/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "boundselect/error.hpp"

namespace boundselect {

namespace {

Vec unit(int dim, int i) {
  Vec v = Vec::Zero(dim);
  v(i) = 1.0;
  return v;
}

Vec row6(std::array<double, 6> a) { return Eigen::Map<const Vec>(a.data(), 6); }

// Affine expression over the eight binary-IV cells, reduced to the six free
// coordinates.
class CellExpr {
 public:
  CellExpr(double constant) : constant_(constant), coef_(Vec::Zero(6)) {}

  // y, d, z in {0,1}.
  CellExpr& add(double w, int y, int d, int z) {
    if (y == 0 && d == 0) {
      // p^{00z} = 1 - p^{10z} - p^{01z} - p^{11z}
      constant_ += w;
      for (int c = 0; c < 3; ++c) coef_(3 * z + c) -= w;
    } else {
      coef_(3 * z + (y + 2 * d) - 1) += w;
    }
    return *this;
  }

  Piece piece() const { return {constant_, coef_}; }

 private:
  double constant_;
  Vec coef_;
};

}  // namespace

BoundsSpec manski_binary_spec() {
  BoundsSpec s;
  s.num_options = 2;
  s.dim_p = 6;
  s.lower = {{{0.0, unit(6, 0)}, {0.0, unit(6, 3)}},
             {{0.0, unit(6, 2)}, {0.0, unit(6, 5)}}};
  s.upper = {{{0.0, row6({1, 1, 1, 0, 0, 0})}, {0.0, row6({0, 0, 0, 1, 1, 1})}},
             {{1.0, -unit(6, 1)}, {1.0, -unit(6, 4)}}};
  return s;
}

BoundsSpec manski_continuous_spec(double y_l, double y_u) {
  if (!(y_l < y_u) || !std::isfinite(y_l) || !std::isfinite(y_u)) {
    throw Error(ErrorCode::SpecInvalid, "outcome support needs finite y_l < y_u");
  }
  auto family = [](double y) {
    std::vector<std::vector<Piece>> f(2);
    f[0] = {{y, row6({0, 1, 0, 0, 0, -y})}, {y, row6({1, 0, 0, 0, -y, 0})}};
    f[1] = {{0.0, row6({0, 0, 0, 1, 0, y})}, {0.0, row6({0, 0, 1, 0, y, 0})}};
    return f;
  };
  BoundsSpec s;
  s.num_options = 2;
  s.dim_p = 6;
  s.lower = family(y_l);
  s.upper = family(y_u);
  return s;
}

BoundsSpec balke_pearl_ate_spec() {
  BoundsSpec s;
  s.num_options = 1;
  s.dim_p = 6;
  std::vector<Piece> lo;
  lo.push_back(CellExpr(-1).add(1, 1, 1, 1).add(1, 0, 0, 0).piece());
  lo.push_back(CellExpr(-1).add(1, 1, 1, 0).add(1, 0, 0, 1).piece());
  lo.push_back(CellExpr(0).add(1, 1, 1, 0).add(-1, 1, 1, 1).add(-1, 1, 0, 1)
                   .add(-1, 0, 1, 0).add(-1, 1, 0, 0).piece());
  lo.push_back(CellExpr(0).add(1, 1, 1, 1).add(-1, 1, 1, 0).add(-1, 1, 0, 0)
                   .add(-1, 0, 1, 1).add(-1, 1, 0, 1).piece());
  lo.push_back(CellExpr(0).add(-1, 0, 1, 1).add(-1, 1, 0, 1).piece());
  lo.push_back(CellExpr(0).add(-1, 0, 1, 0).add(-1, 1, 0, 0).piece());
  lo.push_back(CellExpr(0).add(1, 0, 0, 1).add(-1, 0, 1, 1).add(-1, 1, 0, 1)
                   .add(-1, 0, 1, 0).add(-1, 0, 0, 0).piece());
  lo.push_back(CellExpr(0).add(1, 0, 0, 0).add(-1, 0, 1, 0).add(-1, 1, 0, 0)
                   .add(-1, 0, 1, 1).add(-1, 0, 0, 1).piece());

  std::vector<Piece> up;
  up.push_back(CellExpr(1).add(-1, 0, 1, 1).add(-1, 1, 0, 0).piece());
  up.push_back(CellExpr(1).add(-1, 0, 1, 0).add(-1, 1, 0, 1).piece());
  up.push_back(CellExpr(0).add(-1, 0, 1, 0).add(1, 0, 1, 1).add(1, 0, 0, 1)
                   .add(1, 1, 1, 0).add(1, 0, 0, 0).piece());
  up.push_back(CellExpr(0).add(-1, 0, 1, 1).add(1, 1, 1, 1).add(1, 0, 0, 1)
                   .add(1, 0, 1, 0).add(1, 0, 0, 0).piece());
  up.push_back(CellExpr(0).add(1, 1, 1, 1).add(1, 0, 0, 1).piece());
  up.push_back(CellExpr(0).add(1, 1, 1, 0).add(1, 0, 0, 0).piece());
  up.push_back(CellExpr(0).add(-1, 1, 0, 1).add(1, 1, 1, 1).add(1, 0, 0, 1)
                   .add(1, 1, 1, 0).add(1, 1, 0, 0).piece());
  up.push_back(CellExpr(0).add(-1, 1, 0, 0).add(1, 1, 1, 0).add(1, 0, 0, 0)
                   .add(1, 1, 1, 1).add(1, 1, 0, 1).piece());
  s.lower = {lo};
  s.upper = {up};
  return s;
}

std::vector<std::pair<int, int>> dyntreat_options() { return {{1, 1}, {1, 0}, {0, 1}, {0, 0}}; }

BoundsSpec dyntreat_spec() {
  constexpr int kFree = 7;
  BoundsSpec s;
  s.num_options = 4;
  s.dim_p = 2 * kFree;
  for (auto [d1, d2] : dyntreat_options()) {
    std::vector<Piece> lo, up;
    for (int z = 0; z < 2; ++z) {
      const int treated_cell = 4 + 2 * d1 + d2;
      lo.push_back({0.0, unit(s.dim_p, kFree * z + treated_cell - 1)});
      const int zero_cell = 2 * d1 + d2;
      if (zero_cell == 0) {
        Vec v = Vec::Zero(s.dim_p);
        v.segment(kFree * z, kFree).setOnes();
        up.push_back({0.0, v});
      } else {
        up.push_back({1.0, -unit(s.dim_p, kFree * z + zero_cell - 1)});
      }
    }
    s.lower.push_back(lo);
    s.upper.push_back(up);
  }
  return s;
}

BoundsSpec difference_family(const BoundsSpec& spec, int treated, int control) {
  if (treated < 0 || treated >= spec.num_options || control < 0 ||
      control >= spec.num_options) {
    throw Error(ErrorCode::ConfigInvalid, "difference family options out of range");
  }
  auto merge = [](std::vector<Piece>& out, Piece p, bool keep_max) {
    for (auto& q : out) {
      if ((q.coef - p.coef).cwiseAbs().maxCoeff() <= 1e-12) {
        q.offset = keep_max ? std::max(q.offset, p.offset) : std::min(q.offset, p.offset);
        return;
      }
    }
    out.push_back(std::move(p));
  };
  std::vector<Piece> lo, up;
  for (const auto& l : spec.lower[treated]) {
    for (const auto& u : spec.upper[control]) {
      merge(lo, {l.offset - u.offset, l.coef - u.coef}, true);
    }
  }
  for (const auto& u : spec.upper[treated]) {
    for (const auto& l : spec.lower[control]) {
      merge(up, {u.offset - l.offset, u.coef - l.coef}, false);
    }
  }
  BoundsSpec s;
  s.num_options = 1;
  s.dim_p = spec.dim_p;
  s.lower = {lo};
  s.upper = {up};
  return s;
}

BoundsSpec catalog_spec(const std::string& name) {
  if (name == "manski-binary") return manski_binary_spec();
  if (name == "manski-continuous") return manski_continuous_spec(0.0, 1.0);
  if (name == "balke-pearl") return balke_pearl_ate_spec();
  if (name == "dyntreat") return dyntreat_spec();
  throw Error(ErrorCode::ConfigInvalid, "unknown catalog spec '" + name + "'");
}

ReducedForm estimate_stratified(const std::vector<int>& cells, const std::vector<int>& strata,
                                int K, const EstimatorOptions& opts) {
  if (cells.size() != strata.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cell and stratum vectors differ in length");
  }
  if (cells.empty()) throw Error(ErrorCode::DataSchema, "dataset is empty");
  if (!(opts.smoothing >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "smoothing must be >= 0");
  const int F = K - 1;
  std::array<std::vector<long>, 2> counts{std::vector<long>(K, 0), std::vector<long>(K, 0)};
  std::array<long, 2> nz{0, 0};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int c = cells[i];
    const int z = strata[i];
    if (c < 0 || c >= K || (z != 0 && z != 1)) {
      throw Error(ErrorCode::DataSchema, "record " + std::to_string(i) + " has invalid codes");
    }
    ++counts[z][c];
    ++nz[z];
  }
  for (int z = 0; z < 2; ++z) {
    if (nz[z] < opts.min_stratum) {
      throw Error(ErrorCode::StratumMin, "stratum z=" + std::to_string(z) + " has " +
                                             std::to_string(nz[z]) +
                                             " observations, minimum is " +
                                             std::to_string(opts.min_stratum));
    }
  }
  const long n = nz[0] + nz[1];
  ReducedForm rf;
  rf.n = n;
  rf.p_hat = Vec::Zero(2 * F);
  rf.sigma_hat = Mat::Zero(2 * F, 2 * F);
  for (int z = 0; z < 2; ++z) {
    const double denom = static_cast<double>(nz[z]) + K * opts.smoothing;
    Vec pi(F);
    for (int c = 1; c < K; ++c) pi(c - 1) = (counts[z][c] + opts.smoothing) / denom;
    const double q = static_cast<double>(nz[z]) / static_cast<double>(n);
    rf.p_hat.segment(z * F, F) = pi;
    Mat block = -pi * pi.transpose();
    block.diagonal() += pi;
    rf.sigma_hat.block(z * F, z * F, F, F) = block / q;
  }
  rf.validate(opts.lambda_bar);
  return rf;
}

ReducedForm estimate_reduced_form(const std::vector<IvRecord>& data,
                                  const EstimatorOptions& opts) {
  std::vector<int> cells(data.size()), strata(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    if ((r.y != 0 && r.y != 1) || (r.d != 0 && r.d != 1)) {
      throw Error(ErrorCode::DataSchema, "record " + std::to_string(i) + " is not binary");
    }
    cells[i] = r.y + 2 * r.d;
    strata[i] = r.z;
  }
  return estimate_stratified(cells, strata, 4, opts);
}

ReducedForm estimate_reduced_form_dyn(const std::vector<DynRecord>& data,
                                      const EstimatorOptions& opts) {
  std::vector<int> cells(data.size()), strata(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    for (int v : {r.y1, r.y2, r.d1, r.d2}) {
      if (v != 0 && v != 1) {
        throw Error(ErrorCode::DataSchema, "record " + std::to_string(i) + " is not binary");
      }
    }
    cells[i] = 4 * r.y2 + 2 * r.d1 + r.d2;
    strata[i] = r.z;
  }
  return estimate_stratified(cells, strata, 8, opts);
}

namespace {

std::vector<std::vector<int>> read_binary_columns(const std::string& path,
                                                  const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::DataSchema, "'" + path + "' is empty");
  const auto header = split(line);
  std::vector<std::size_t> pos;
  for (const auto& name : names) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::DataSchema, "'" + path + "' lacks column '" + name + "'");
    }
    pos.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::vector<int>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    std::vector<int> row;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (pos[k] >= fields.size() || (fields[pos[k]] != "0" && fields[pos[k]] != "1")) {
        throw Error(ErrorCode::DataSchema, "'" + path + "' line " + std::to_string(lineno) +
                                               ": column '" + names[k] + "' must be 0 or 1");
      }
      row.push_back(fields[pos[k]] == "1" ? 1 : 0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<IvRecord> read_iv_csv(const std::string& path) {
  std::vector<IvRecord> out;
  for (const auto& r : read_binary_columns(path, {"y", "d", "z"})) out.push_back({r[0], r[1], r[2]});
  return out;
}

std::vector<DynRecord> read_dyn_csv(const std::string& path) {
  std::vector<DynRecord> out;
  for (const auto& r : read_binary_columns(path, {"y1", "y2", "d1", "d2", "z"})) {
    out.push_back({r[0], r[1], r[2], r[3], r[4]});
  }
  return out;
}

}  // namespace boundselect
