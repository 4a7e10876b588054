#include "ddbd/lp.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace ddbd::lp {

namespace {

double parse_number(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "'");
  return v;
}

std::string fmt_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LinearProgram parse_lp_text(std::istream& in) {
  LinearProgram lp;
  bool have_objective = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    const std::string where = " (line " + std::to_string(lineno) + ")";
    try {
      if (head == "min" || head == "max") {
        if (have_objective) throw std::invalid_argument("duplicate objective");
        lp = LinearProgram(toks.size(), head == "min" ? Sense::Min : Sense::Max);
        for (std::size_t j = 0; j < toks.size(); ++j) lp.objective[j] = parse_number(toks[j]);
        have_objective = true;
      } else if (head == "row") {
        if (!have_objective) throw std::invalid_argument("row before objective");
        if (toks.size() != lp.num_vars() + 2) throw std::invalid_argument("row width mismatch");
        std::vector<double> a(lp.num_vars());
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = parse_number(toks[j]);
        const std::string& op = toks[a.size()];
        RowSense s;
        if (op == "<=") s = RowSense::Le;
        else if (op == ">=") s = RowSense::Ge;
        else if (op == "=") s = RowSense::Eq;
        else throw std::invalid_argument("bad row sense '" + op + "'");
        lp.add_row(std::move(a), s, parse_number(toks.back()));
      } else if (head == "bounds") {
        if (toks.size() != 3) throw std::invalid_argument("bounds needs: index lo hi");
        const std::size_t j = std::stoul(toks[0]);
        if (j >= lp.num_vars()) throw std::invalid_argument("bounds index out of range");
        lp.lo[j] = parse_number(toks[1]);
        lp.hi[j] = parse_number(toks[2]);
      } else {
        throw std::invalid_argument("unknown directive '" + head + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(e.what() + where);
    }
  }
  if (!have_objective) throw std::invalid_argument("missing objective line");
  lp.validate();
  return lp;
}

std::string to_lp_text(const LinearProgram& lp) {
  std::ostringstream os;
  os << (lp.sense == Sense::Min ? "min" : "max");
  for (double c : lp.objective) os << ' ' << fmt_number(c);
  os << '\n';
  for (const auto& r : lp.rows) {
    os << "row";
    for (double a : r.coeffs) os << ' ' << fmt_number(a);
    os << ' ' << (r.sense == RowSense::Le ? "<=" : r.sense == RowSense::Ge ? ">=" : "=") << ' '
       << fmt_number(r.rhs) << '\n';
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.lo[j] == 0.0 && lp.hi[j] == kInf) continue;
    os << "bounds " << j << ' ' << fmt_number(lp.lo[j]) << ' ' << fmt_number(lp.hi[j]) << '\n';
  }
  return os.str();
}

}  // namespace ddbd::lp
