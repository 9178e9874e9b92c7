// Command-line driver: parameter sweeps over the map families, single-shot
// classification, entanglement detection for a state file, and zero
// prescription runs. Exit codes: 0 success, 2 input or solver error, 3
// unstable prescription dimension.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entwit/choi.hpp"
#include "entwit/linalg.hpp"
#include "entwit/prescribe.hpp"
#include "entwit/qmaps.hpp"
#include "entwit/sdp.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace entwit;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepPoint {
  double p1 = 0.0;
  double p2 = 0.0;
};

struct SweepRow {
  SweepPoint point;
  bool in_region = false;
  bool ran = false;
  bool numerical_failure = false;
  std::string status = "Skipped";
  double objective = 0.0;
  int iterations = 0;
  double gap = 0.0;
  std::vector<double> signature;
};

struct SignatureEntry {
  const char* name;
  int row;
  int col;
};

// Sparse patterns of the optimal states, one list per family.
const std::vector<SignatureEntry>& signature_layout(const std::string& family) {
  static const std::vector<SignatureEntry> t_sig = {
      {"s00", 0, 0}, {"s11", 1, 1}, {"s22", 2, 2}, {"s04", 0, 4}};
  static const std::vector<SignatureEntry> pq_sig = {
      {"s00", 0, 0}, {"s11", 1, 1}, {"s22", 2, 2}, {"s33", 3, 3}, {"s44", 4, 4},
      {"s55", 5, 5}, {"s66", 6, 6}, {"s77", 7, 7}, {"s88", 8, 8}, {"s04", 0, 4},
      {"s08", 0, 8}, {"s48", 4, 8}};
  static const std::vector<SignatureEntry> mn_sig = {
      {"r00", 0, 0}, {"r11", 1, 1}, {"r22", 2, 2}, {"r33", 3, 3}, {"r44", 4, 4},
      {"r55", 5, 5}, {"r66", 6, 6}, {"r77", 7, 7}, {"r88", 8, 8}, {"r01", 0, 1},
      {"r03", 0, 3}, {"r04", 0, 4}, {"r08", 0, 8}, {"r13", 1, 3}, {"r14", 1, 4},
      {"r18", 1, 8}, {"r25", 2, 5}, {"r34", 3, 4}, {"r38", 3, 8}, {"r48", 4, 8},
      {"r67", 6, 7}};
  if (family == "t") return t_sig;
  if (family == "pq") return pq_sig;
  return mn_sig;
}

bool family_in_region(const std::string& family, const SweepPoint& pt) {
  if (family == "t") return true;  // positive for every real t
  if (family == "pq") return in_region_R(pt.p1, pt.p2);
  return in_region_A(pt.p1, pt.p2);
}

QuantumMap family_witness(const std::string& family, const SweepPoint& pt) {
  // The t objective is reported on the unital scale; pq and mn are reported
  // raw, matching the reference minima.
  if (family == "t") return unitalize(make_psi_t(pt.p1));
  if (family == "pq") return make_psi_pq(pt.p1, pt.p2);
  return make_psi_mn(pt.p1, pt.p2);
}

std::vector<SweepPoint> default_grid(const std::string& family, int count1, int count2) {
  std::vector<SweepPoint> pts;
  if (family == "t") {
    for (int i = 0; i < count1; ++i) {
      const double t =
          count1 == 1 ? -10.0 : -10.0 + 20.0 * static_cast<double>(i) / (count1 - 1);
      pts.push_back({t, 0.0});
    }
    return pts;
  }
  if (family == "pq") {
    // cell centers of (0, 1/sqrt(2)) x (0, sqrt(2))
    const double pmax = 1.0 / std::sqrt(2.0), qmax = std::sqrt(2.0);
    for (int i = 0; i < count1; ++i)
      for (int j = 0; j < count2; ++j)
        pts.push_back({pmax * (i + 0.5) / count1, qmax * (j + 0.5) / count2});
    return pts;
  }
  // cell centers of [-1,1]^2
  for (int i = 0; i < count1; ++i)
    for (int j = 0; j < count2; ++j)
      pts.push_back({-1.0 + 2.0 * (i + 0.5) / count1, -1.0 + 2.0 * (j + 0.5) / count2});
  return pts;
}

const char* status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "Optimal";
    case SdpStatus::MaxIterations:
      return "MaxIterations";
    case SdpStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "NumericalFailure";
}

struct SweepConfig {
  std::string family;
  int alg = 2;
  std::string grid;
  std::vector<std::string> points;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool include_outside = false;
  bool keep_going = false;
  int threads = 0;
};

std::string config_canonical(const SweepConfig& cfg) {
  std::string s = "family=" + cfg.family + ";alg=" + std::to_string(cfg.alg) +
                  ";grid=" + cfg.grid + ";points=";
  for (const std::string& p : cfg.points) s += p + "|";
  s += ";seed=" + std::to_string(cfg.seed) +
       ";include_outside=" + std::to_string(cfg.include_outside ? 1 : 0) +
       ";format=" + cfg.format;
  return s;
}

int run_sweep(const SweepConfig& cfg) {
  std::vector<SweepPoint> pts;
  if (!cfg.points.empty()) {
    for (const std::string& spec : cfg.points) {
      SweepPoint pt;
      if (cfg.family == "t") {
        if (std::sscanf(spec.c_str(), "%lf", &pt.p1) != 1) {
          std::cerr << "bad --point '" << spec << "' for family t\n";
          return 2;
        }
      } else if (std::sscanf(spec.c_str(), "%lf,%lf", &pt.p1, &pt.p2) != 2) {
        std::cerr << "bad --point '" << spec << "' (expected v1,v2)\n";
        return 2;
      }
      pts.push_back(pt);
    }
  } else {
    int count1 = 0, count2 = 0;
    if (cfg.family == "t") {
      count1 = 81;
      if (!cfg.grid.empty() &&
          (std::sscanf(cfg.grid.c_str(), "%d", &count1) != 1 || count1 < 1)) {
        std::cerr << "bad --grid '" << cfg.grid << "' for family t (expected N)\n";
        return 2;
      }
    } else {
      count1 = cfg.family == "pq" ? 60 : 80;
      count2 = cfg.family == "pq" ? 35 : 80;
      if (!cfg.grid.empty() &&
          (std::sscanf(cfg.grid.c_str(), "%dx%d", &count1, &count2) != 2 ||
           count1 < 1 || count2 < 1)) {
        std::cerr << "bad --grid '" << cfg.grid << "' (expected NxM)\n";
        return 2;
      }
    }
    pts = default_grid(cfg.family, count1, count2);
  }

  const std::vector<SignatureEntry>& layout = signature_layout(cfg.family);
  std::vector<SweepRow> rows(pts.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= pts.size()) return;
      SweepRow& row = rows[idx];
      row.point = pts[idx];
      row.in_region = family_in_region(cfg.family, pts[idx]);
      if (!row.in_region && !cfg.include_outside) continue;  // skipped, noted in output
      row.ran = true;
      try {
        const SdpProblem problem = build_problem(family_witness(cfg.family, pts[idx]),
                                                 /*with_choi_constraint=*/cfg.alg == 2);
        const SdpSolution sol = solve(problem);
        row.status = status_name(sol.status);
        row.numerical_failure = sol.status == SdpStatus::NumericalFailure;
        row.objective = sol.objective_value;
        row.iterations = sol.iterations;
        row.gap = sol.duality_gap_estimate;
        for (const SignatureEntry& e : layout)
          row.signature.push_back(sol.rho(e.row, e.col));
      } catch (const std::exception& ex) {
        row.status = std::string("NumericalFailure");
        row.numerical_failure = true;
        std::cerr << "point " << idx << ": " << ex.what() << "\n";
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::thread::hardware_concurrency();
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, std::max<std::size_t>(pts.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  const std::string hash = hex64(fnv1a64(config_canonical(cfg)));
  std::ostringstream body;
  if (cfg.format == "csv") {
    body << "# config=" << hash << " family=" << cfg.family << " alg=" << cfg.alg
         << " grid=" << (cfg.grid.empty() ? "default" : cfg.grid)
         << " points=" << cfg.points.size() << " seed=" << cfg.seed
         << " include_outside=" << (cfg.include_outside ? 1 : 0) << "\n";
    body << "param1,param2,in_region,objective,status,iters,gap";
    for (const SignatureEntry& e : layout) body << "," << e.name;
    body << "\n";
    for (const SweepRow& row : rows) {
      body << fmt_double(row.point.p1) << ",";
      if (cfg.family != "t") body << fmt_double(row.point.p2);
      body << "," << (row.in_region ? 1 : 0) << ",";
      if (row.ran) body << fmt_double(row.objective);
      body << "," << row.status << ",";
      if (row.ran) body << row.iterations;
      body << ",";
      if (row.ran) body << fmt_double(row.gap);
      for (std::size_t k = 0; k < layout.size(); ++k) {
        body << ",";
        if (row.ran) body << fmt_double(row.signature[k]);
      }
      body << "\n";
    }
  } else {
    json doc;
    doc["config"] = {{"hash", hash},
                     {"family", cfg.family},
                     {"alg", cfg.alg},
                     {"grid", cfg.grid.empty() ? "default" : cfg.grid},
                     {"points", cfg.points.size()},
                     {"seed", cfg.seed},
                     {"include_outside", cfg.include_outside}};
    json sig_names = json::array();
    for (const SignatureEntry& e : layout) sig_names.push_back(e.name);
    doc["signature_fields"] = sig_names;
    doc["rows"] = json::array();
    for (const SweepRow& row : rows) {
      json r;
      r["param1"] = row.point.p1;
      if (cfg.family != "t") r["param2"] = row.point.p2;
      r["in_region"] = row.in_region;
      r["status"] = row.status;
      if (row.ran) {
        r["objective"] = row.objective;
        r["iters"] = row.iterations;
        r["gap"] = row.gap;
        json sig;
        for (std::size_t k = 0; k < layout.size(); ++k)
          sig[layout[k].name] = row.signature[k];
        r["signature"] = sig;
      }
      doc["rows"].push_back(r);
    }
    body << doc.dump(2) << "\n";
  }

  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << cfg.out << "\n";
    return 2;
  }
  out << body.str();
  out.close();

  int skipped = 0, failures = 0;
  for (const SweepRow& row : rows) {
    if (!row.ran) ++skipped;
    if (row.numerical_failure) ++failures;
  }
  std::cout << "wrote " << cfg.out << ": " << rows.size() << " rows, " << skipped
            << " outside-region rows skipped, " << failures << " failures\n";
  if (failures > 0 && !cfg.keep_going) return 2;
  return 0;
}

// ---------------------------------------------------------------------------
// classify

int run_classify(const std::string& family, const std::vector<double>& params) {
  QuantumMap psi;
  FamilyParams fp;
  bool region = true;
  std::string region_note;
  if (family == "t") {
    if (params.size() != 1) {
      std::cerr << "family t takes 1 parameter\n";
      return 2;
    }
    fp = TFamilyParams{params[0]};
    region_note = "positive for every real t";
  } else if (family == "pq") {
    if (params.size() != 2) {
      std::cerr << "family pq takes 2 parameters\n";
      return 2;
    }
    fp = PQFamilyParams{params[0], params[1]};
    region = in_region_R(params[0], params[1]);
  } else if (family == "mn") {
    if (params.size() != 2) {
      std::cerr << "family mn takes 2 parameters\n";
      return 2;
    }
    fp = MNFamilyParams{params[0], params[1]};
    region = in_region_A(params[0], params[1]);
  } else if (family == "choi-family") {
    if (params.size() != 5) {
      std::cerr << "family choi-family takes 5 parameters (r,r0,r1,r2,c)\n";
      return 2;
    }
    fp = ChoiFamilyParams{params[0], params[1], params[2], params[3], params[4]};
    region = choi_family_is_positive(params[0], params[1], params[2], params[3], params[4]);
  } else {
    std::cerr << "unknown family '" << family << "'\n";
    return 2;
  }
  psi = make_map(fp);

  const ClassifyResult cls = classify(psi);
  std::cout << "family: " << family << "\nparams:";
  for (double v : params) std::cout << " " << fmt_double(v);
  std::cout << "\nregion: " << (region ? "inside" : "outside");
  if (!region_note.empty()) std::cout << " (" << region_note << ")";
  std::cout << "\nis_cp: " << (cls.is_cp ? "true" : "false")
            << "\nis_co_cp: " << (cls.is_co_cp ? "true" : "false")
            << "\nmin_choi_eig: " << fmt_double(cls.min_choi_eig)
            << "\nmin_co_choi_eig: " << fmt_double(cls.min_co_choi_eig)
            << "\nspectrum_fixture: " << (spectrum_fixture_check(fp) ? "pass" : "fail")
            << "\n";

  // Rank-1 certificates on the CP segments that have one in closed form.
  std::string kraus = "n/a";
  if (family == "pq" && std::abs(params[1] - 2.0 * params[0]) <= 1e-9) {
    const double p = params[0];
    Complex3x3 a{};
    a[0][0] = 1.0;
    a[1][1] = -2.0;
    a[2][2] = 1.0;
    const double scale = p * p * (2.0 * p * p - 1.0) * (2.0 * p * p - 1.0);
    kraus = check_kraus_rank1(psi, a, scale) ? "pass" : "fail";
  } else if (family == "mn") {
    const double m = params[0], n = params[1];
    if (std::abs(-2.0 * m * n - m * m * n * n - n * n) <= 1e-9) {
      Complex3x3 a{};
      a[0][0] = -n;
      a[0][1] = -m * n;
      a[1][0] = m * n;
      a[1][1] = -m;
      a[2][2] = m + n;
      kraus = check_kraus_rank1(psi, a, 1.0) ? "pass" : "fail";
    }
  }
  std::cout << "kraus_rank1: " << kraus << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// detect

void locate(const std::string& text, std::size_t byte, std::size_t& line,
            std::size_t& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

int run_detect(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    locate(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
    std::cerr << "parse error at line " << line << ", column " << column << ": "
              << e.what() << "\n";
    return 2;
  }

  HermitianMatrix rho(9);
  try {
    const auto& re = doc.at("re");
    if (!re.is_array() || re.size() != 9)
      throw std::runtime_error("'re' must be a 9x9 array");
    const bool has_im = doc.contains("im");
    for (int i = 0; i < 9; ++i) {
      if (!re[i].is_array() || re[i].size() != 9)
        throw std::runtime_error("'re' must be a 9x9 array");
      if (has_im && (!doc["im"][i].is_array() || doc["im"][i].size() != 9))
        throw std::runtime_error("'im' must be a 9x9 array");
    }
    // Hermiticity of the raw entries, then exact storage from the upper
    // triangle.
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const double re_ij = re[i][j].get<double>();
        const double re_ji = re[j][i].get<double>();
        const double im_ij = has_im ? doc["im"][i][j].get<double>() : 0.0;
        const double im_ji = has_im ? doc["im"][j][i].get<double>() : 0.0;
        if (std::abs(re_ij - re_ji) > 1e-8 || std::abs(im_ij + im_ji) > 1e-8)
          throw std::runtime_error("state is not Hermitian (tol 1e-8)");
        if (j >= i) rho.set(i, j, {re_ij, im_ij});
      }
  } catch (const std::exception& e) {
    std::cerr << "invalid state file: " << e.what() << "\n";
    return 2;
  }
  if (std::abs(rho.trace() - 1.0) > 1e-8) {
    std::cerr << "invalid state file: trace is " << fmt_double(rho.trace())
              << ", expected 1 (tol 1e-8)\n";
    return 2;
  }
  const double rho_min = eig_herm(rho).eigenvalues.front();
  if (rho_min < -1e-8) {
    std::cerr << "invalid state file: minimum eigenvalue " << fmt_double(rho_min)
              << " < -1e-8, not a state\n";
    return 2;
  }

  const double ppt_min = eig_herm(partial_transpose(rho)).eigenvalues.front();
  std::cout << "ppt: " << (ppt_min >= -1e-9 ? "yes" : "violated")
            << " (min_eig=" << fmt_double(ppt_min) << ")\n";

  const double choi_min =
      eig_herm(lift(adjoint(make_choi_map()), rho)).eigenvalues.front();
  std::cout << "choi_map: " << (choi_min >= -1e-9 ? "nonnegative" : "negative")
            << " (min_eig=" << fmt_double(choi_min) << ")\n";

  // Witness bank: Tr(C(Psi) rho) over the default sweep grids.
  const auto pairing = [&rho](const QuantumMap& psi) {
    const ChoiMatrix cm = choi_matrix(psi);
    complexd s = 0.0;
    for (int r = 0; r < 9; ++r)
      for (int col = 0; col < 9; ++col) s += cm.inner(r, col) * rho(col, r);
    return s.real();
  };
  double best = std::numeric_limits<double>::infinity();
  std::string best_name;
  for (const SweepPoint& pt : default_grid("t", 81, 0)) {
    const double v = pairing(make_psi_t(pt.p1));
    if (v < best) {
      best = v;
      best_name = "t(t=" + fmt_double(pt.p1) + ")";
    }
  }
  for (const SweepPoint& pt : default_grid("pq", 60, 35)) {
    if (!in_region_R(pt.p1, pt.p2)) continue;
    const double v = pairing(make_psi_pq(pt.p1, pt.p2));
    if (v < best) {
      best = v;
      best_name = "pq(p=" + fmt_double(pt.p1) + ",q=" + fmt_double(pt.p2) + ")";
    }
  }
  for (const SweepPoint& pt : default_grid("mn", 80, 80)) {
    if (!in_region_A(pt.p1, pt.p2)) continue;
    const double v = pairing(make_psi_mn(pt.p1, pt.p2));
    if (v < best) {
      best = v;
      best_name = "mn(m=" + fmt_double(pt.p1) + ",n=" + fmt_double(pt.p2) + ")";
    }
  }
  std::cout << "witness_bank_min: " << fmt_double(best) << " at " << best_name << "\n";
  if (ppt_min < -1e-9 || choi_min < -1e-9 || best < -1e-9) {
    std::cout << "entangled: yes";
    if (best < -1e-9) std::cout << " (witness " << best_name << ")";
    std::cout << "\n";
  } else {
    std::cout << "entangled: not detected\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// prescribe

bool parse_named_set(const std::string& name, ZeroSet& zeros, QuantumMap& reference,
                     bool& has_reference) {
  double a = 0.0, b = 0.0;
  if (name == "choi") {
    zeros = choi_zero_set();
    reference = make_choi_map();
    has_reference = true;
    return true;
  }
  if (std::sscanf(name.c_str(), "t(%lf)", &a) == 1) {
    zeros = t_zero_set(a);
    reference = make_psi_t(a);
    has_reference = true;
    return true;
  }
  if (std::sscanf(name.c_str(), "pq(%lf,%lf)", &a, &b) == 2) {
    zeros = pq_zero_set(a, b);
    reference = make_psi_pq(a, b);
    has_reference = true;
    return true;
  }
  if (std::sscanf(name.c_str(), "mn(%lf,%lf)", &a, &b) == 2) {
    zeros = mn_zero_set(a, b);
    reference = make_psi_mn(a, b);
    has_reference = true;
    return true;
  }
  return false;
}

ZeroSet load_zero_set_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  ZeroSet zeros;
  if (doc.contains("points")) {
    for (const auto& pj : doc["points"]) {
      ZeroPoint p;
      for (int i = 0; i < 3; ++i) {
        p.x[i] = {pj.at("x_re").at(i).get<double>(),
                  pj.contains("x_im") ? pj["x_im"].at(i).get<double>() : 0.0};
        p.y[i] = {pj.at("y_re").at(i).get<double>(),
                  pj.contains("y_im") ? pj["y_im"].at(i).get<double>() : 0.0};
      }
      zeros.fixed_points.push_back(p);
    }
  }
  if (zeros.empty())
    throw EmptyZeroSet("zero set file '" + path + "' contains no points");
  return zeros;
}

double projection_residual(const QuantumMap& reference,
                           const std::vector<QuantumMap>& basis) {
  const auto dot = [](const QuantumMap& a, const QuantumMap& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            s += (a.coeff(i, j, k, l) * std::conj(b.coeff(i, j, k, l))).real();
    return s;
  };
  QuantumMap rem = reference;
  for (const QuantumMap& b : basis) {
    QuantumMap scaled = b;
    scaled *= dot(rem, b);
    rem -= scaled;
  }
  return std::sqrt(dot(rem, rem)) / std::sqrt(dot(reference, reference));
}

int run_prescribe(const std::string& set_name, const std::string& points_file,
                  int phase_grid, double rank_tol, const std::string& out_path) {
  ZeroSet zeros;
  QuantumMap reference;
  bool has_reference = false;
  if (!set_name.empty()) {
    if (!parse_named_set(set_name, zeros, reference, has_reference)) {
      std::cerr << "unknown set '" << set_name
                << "' (expected choi, t(v), pq(a,b) or mn(a,b))\n";
      return 2;
    }
  } else {
    zeros = load_zero_set_file(points_file);
  }

  std::vector<QuantumMap> basis;
  try {
    basis = solve_family(zeros, phase_grid, rank_tol);
  } catch (const UnstableDimension& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  std::cout << "dimension: " << basis.size() << "\n";
  if (has_reference)
    std::cout << "projection_residual: " << fmt_double(projection_residual(reference, basis))
              << "\n";

  if (!out_path.empty()) {
    json doc;
    doc["dimension"] = basis.size();
    doc["index_order"] = "((i*3+j)*3+k)*3+l";
    doc["basis"] = json::array();
    for (const QuantumMap& psi : basis) {
      json re = json::array(), im = json::array();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              re.push_back(psi.coeff(i, j, k, l).real());
              im.push_back(psi.coeff(i, j, k, l).imag());
            }
      doc["basis"].push_back({{"re", re}, {"im", im}});
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 2;
    }
    out << doc.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"positive-map families, entanglement witnesses and the states they detect"};
  app.require_subcommand(1);

  SweepConfig sweep_cfg;
  CLI::App* sweep = app.add_subcommand("sweep", "solve the witness program over a grid");
  sweep->add_option("--family", sweep_cfg.family, "family: t, pq or mn")
      ->required()
      ->check(CLI::IsMember({"t", "pq", "mn"}));
  sweep->add_option("--alg", sweep_cfg.alg, "1: state and partial transpose; 2: adds the lift block")
      ->check(CLI::IsMember({1, 2}));
  sweep->add_option("--grid", sweep_cfg.grid, "N (t) or NxM (pq, mn); default 81 / 60x35 / 80x80");
  sweep->add_option("--point", sweep_cfg.points, "explicit point 'v' or 'v1,v2' (repeatable, overrides --grid)");
  sweep->add_option("--out", sweep_cfg.out, "output file")->required();
  sweep->add_option("--format", sweep_cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--seed", sweep_cfg.seed, "recorded in the config hash");
  sweep->add_flag("--include-outside", sweep_cfg.include_outside,
                  "run out-of-region grid points instead of skipping them");
  sweep->add_flag("--keep-going", sweep_cfg.keep_going,
                  "exit 0 even if some points fail numerically");
  sweep->add_option("--threads", sweep_cfg.threads, "worker threads (default: hardware)");

  std::string cls_family;
  std::vector<double> cls_params;
  CLI::App* cls = app.add_subcommand("classify", "positivity classes of one family member");
  cls->add_option("--family", cls_family, "t, pq, mn or choi-family")->required();
  cls->add_option("--params", cls_params, "family parameters")->required()->expected(1, 5);

  std::string detect_path;
  CLI::App* detect = app.add_subcommand("detect", "entanglement tests for a state file");
  detect->add_option("--state", detect_path, "JSON file with re/im 9x9 arrays")->required();

  std::string pre_set, pre_file, pre_out;
  int pre_grid = 8;
  double pre_rank_tol = 1e-9;
  CLI::App* pre = app.add_subcommand("prescribe", "solve a prescribed-zeros family");
  CLI::Option* set_opt = pre->add_option("--set", pre_set, "choi, t(v), pq(a,b) or mn(a,b)");
  pre->add_option("--points-file", pre_file, "JSON zero-set file")->excludes(set_opt);
  pre->add_option("--phase-grid", pre_grid, "phase samples per orbit (default 8)")
      ->check(CLI::PositiveNumber);
  pre->add_option("--rank-tol", pre_rank_tol, "nullspace rank tolerance");
  pre->add_option("--out", pre_out, "basis output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // input errors are exit 2
  }

  try {
    if (sweep->parsed()) return run_sweep(sweep_cfg);
    if (cls->parsed()) return run_classify(cls_family, cls_params);
    if (detect->parsed()) return run_detect(detect_path);
    if (pre->parsed()) {
      if (pre_set.empty() && pre_file.empty()) {
        std::cerr << "prescribe needs --set or --points-file\n";
        return 2;
      }
      return run_prescribe(pre_set, pre_file, pre_grid, pre_rank_tol, pre_out);
    }
  } catch (const UnstableDimension& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
