#include "boundselect/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "boundselect/error.hpp"

namespace boundselect {

using nlohmann::json;

namespace {

// Adding 0.0 turns -0.0 into 0.0.
json vec_json(const Vec& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  for (double& x : out) x += 0.0;
  return out;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

Vec vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat mat_from(const json& j, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) throw Error(ErrorCode::SpecInvalid, "matrix must be an array of rows");
  if (j.empty()) return Mat(0, cols_if_empty);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "matrix rows differ in length");
    }
    m.row(static_cast<Eigen::Index>(i)) = vec_from(j[i]).transpose();
  }
  return m;
}

template <class F>
auto guarded(const char* what, ErrorCode code, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(code, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json extended(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json spec_to_json(const BoundsSpec& spec) {
  auto family = [](const std::vector<std::vector<Piece>>& f) {
    json out = json::array();
    for (const auto& list : f) {
      json pieces = json::array();
      for (const auto& p : list) pieces.push_back({{"c", p.offset + 0.0}, {"v", vec_json(p.coef)}});
      out.push_back(pieces);
    }
    return out;
  };
  return {{"num_options", spec.num_options},
          {"dim_p", spec.dim_p},
          {"lower", family(spec.lower)},
          {"upper", family(spec.upper)}};
}

BoundsSpec spec_from_json(const json& j) {
  return guarded("bounds spec", ErrorCode::SpecInvalid, [&] {
    BoundsSpec s;
    s.num_options = j.at("num_options").get<int>();
    s.dim_p = j.at("dim_p").get<int>();
    auto family = [](const json& f) {
      std::vector<std::vector<Piece>> out;
      for (const auto& list : f) {
        std::vector<Piece> pieces;
        for (const auto& p : list) pieces.push_back({p.at("c").get<double>(), vec_from(p.at("v"))});
        out.push_back(std::move(pieces));
      }
      return out;
    };
    s.lower = family(j.at("lower"));
    s.upper = family(j.at("upper"));
    return s;
  });
}

json reduced_form_to_json(const ReducedForm& rf) {
  return {{"n", rf.n}, {"p_hat", vec_json(rf.p_hat)}, {"sigma_hat", mat_json(rf.sigma_hat)}};
}

ReducedForm reduced_form_from_json(const json& j) {
  return guarded("reduced form", ErrorCode::CovarianceInvalid, [&] {
    ReducedForm rf;
    rf.n = j.at("n").get<long>();
    rf.p_hat = vec_from(j.at("p_hat"));
    rf.sigma_hat = mat_from(j.at("sigma_hat"));
    return rf;
  });
}

json polyhedron_to_json(const Polyhedron& poly) {
  json rows = json::array();
  for (int k = 0; k < poly.rows(); ++k) {
    rows.push_back({{"a", vec_json(poly.A.row(k).transpose())},
                    {"c", poly.c(k)},
                    {"label", k < static_cast<int>(poly.labels.size()) ? poly.labels[k] : ""}});
  }
  return {{"dim", poly.dim()}, {"rows", rows}};
}

json selection_to_json(const SelectionOutcome& sel) {
  json j{{"rule", rule_name(sel.rule)},
         {"d_hat", sel.d_hat},
         {"j_L", sel.j_L},
         {"j_U", sel.j_U},
         {"gamma_L", sel.gamma_L},
         {"gamma_U", sel.gamma_U},
         {"poly_L", polyhedron_to_json(sel.poly_L)},
         {"poly_U", polyhedron_to_json(sel.poly_U)}};
  if (sel.rule == RuleKind::Undominated) j["members"] = sel.members;
  if (sel.rule == RuleKind::Cms) {
    j["seed"] = sel.seed;
    j["eps"] = mat_json(sel.eps);
    j["statistic"] = sel.cms_statistic;
  }
  return j;
}

json interval_to_json(const ConfidenceInterval& ci) {
  auto side = [](const SideDiagnostics& d) {
    return json{{"estimate", d.estimate},
                {"s_obs", d.s_obs},
                {"var_s", d.var_s},
                {"v_minus", extended(d.window.v_minus)},
                {"v_plus", extended(d.window.v_plus)},
                {"v_zero", extended(d.window.v_zero)},
                {"critical_value", d.critical},
                {"target", d.target},
                {"iterations", d.iterations},
                {"at_limit", d.at_limit}};
  };
  json j{{"kind", ci_kind_name(ci.kind)},
         {"lower", extended(ci.lower)},
         {"upper", extended(ci.upper)},
         {"crossed", ci.crossed()},
         {"alpha1", ci.alpha1},
         {"alpha2", ci.alpha2},
         {"lower_side", side(ci.diag_L)},
         {"upper_side", side(ci.diag_U)}};
  if (ci.kind == CiKind::Hybrid) {
    j["beta_L"] = ci.beta_L;
    j["beta_U"] = ci.beta_U;
    j["projection_contained"] = ci.projection_contained;
  }
  if (ci.kind == CiKind::Hybrid || ci.kind == CiKind::Projection) {
    j["draws"] = ci.draws;
    j["seed"] = ci.seed;
  }
  return j;
}

json latent_lp_to_json(const LatentLp& lp) { return {{"A", mat_json(lp.A)}, {"B", mat_json(lp.B)}}; }

LatentLp latent_lp_from_json(const json& j) {
  return guarded("latent LP", ErrorCode::SpecInvalid, [&] {
    LatentLp lp;
    const json& a = j.at("A");
    // A single objective may be given as a flat row.
    lp.A = (!a.empty() && a[0].is_number()) ? Mat(vec_from(a).transpose()) : mat_from(a);
    lp.B = mat_from(j.at("B"), lp.A.cols());
    lp.validate();
    return lp;
  });
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path + "'");
  out << text;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::JsonParse, what + ": " + e.what());
  }
}

json load_json(const std::string& path) { return parse_json(read_text_file(path), path); }

}  // namespace boundselect
