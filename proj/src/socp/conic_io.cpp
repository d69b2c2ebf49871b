#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rdv/socp.hpp"

namespace rdv::socp {

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_rows(const SparseRows& rows, const char* tag, std::ostream& out) {
  out << tag << ' ' << rows.rows() << ' ' << rows.entries.size() << '\n';
  for (const auto& e : rows.entries) out << e.row << ' ' << e.col << ' ' << fmt_double(e.value) << '\n';
  for (double b : rows.rhs) out << fmt_double(b) << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line, tokenized.
  std::istringstream line() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_no_;
      const auto first = text.find_first_not_of(" \t\r");
      if (first == std::string::npos || text[first] == '#') continue;
      return std::istringstream(text);
    }
    fail("unexpected end of input");
  }

  template <typename T>
  T take(std::istringstream& ss, const char* what) {
    std::string tok;
    if (!(ss >> tok)) fail(std::string("missing ") + what);
    if constexpr (std::is_same_v<T, double>) {
      if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
      if (tok == "-inf") return -std::numeric_limits<double>::infinity();
      try {
        return std::stod(tok);
      } catch (...) {
        fail(std::string("bad number for ") + what + ": " + tok);
      }
    } else if constexpr (std::is_same_v<T, int>) {
      try {
        return std::stoi(tok);
      } catch (...) {
        fail(std::string("bad integer for ") + what + ": " + tok);
      }
    } else {
      return tok;
    }
  }

  void expect(std::istringstream& ss, const std::string& keyword) {
    const std::string tok = take<std::string>(ss, keyword.c_str());
    if (tok != keyword) fail("expected '" + keyword + "', found '" + tok + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("conic format line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

SparseRows read_rows(Reader& rd, const char* tag) {
  auto head = rd.line();
  rd.expect(head, tag);
  const int rows = rd.take<int>(head, "row count");
  const int nnz = rd.take<int>(head, "nonzero count");
  SparseRows out;
  for (int k = 0; k < nnz; ++k) {
    auto ln = rd.line();
    const int r = rd.take<int>(ln, "row");
    const int c = rd.take<int>(ln, "column");
    const double v = rd.take<double>(ln, "value");
    out.entries.push_back({r, c, v});
  }
  for (int k = 0; k < rows; ++k) {
    auto ln = rd.line();
    out.rhs.push_back(rd.take<double>(ln, "rhs"));
  }
  return out;
}

}  // namespace

void write_conic(const SocpProblem& problem, std::ostream& out) {
  out << "SOCP 1\n";
  out << "vars " << problem.n_vars << '\n';
  int nz = 0;
  for (int i = 0; i < problem.cost.size(); ++i) nz += problem.cost[i] != 0.0;
  out << "cost " << nz << '\n';
  for (int i = 0; i < problem.cost.size(); ++i) {
    if (problem.cost[i] != 0.0) out << i << ' ' << fmt_double(problem.cost[i]) << '\n';
  }
  write_rows(problem.equalities, "eq", out);
  write_rows(problem.inequalities, "ineq", out);
  out << "cones " << problem.cones.size() << '\n';
  for (const auto& cone : problem.cones) {
    out << cone.size();
    for (int idx : cone) out << ' ' << idx;
    out << '\n';
  }
  out << "bounds " << problem.bounds.size() << '\n';
  for (const Bound& b : problem.bounds) {
    out << b.var << ' ' << fmt_double(b.lower) << ' ' << fmt_double(b.upper) << '\n';
  }
  out << "end\n";
}

SocpProblem read_conic(std::istream& in) {
  Reader rd(in);
  auto head = rd.line();
  rd.expect(head, "SOCP");
  const int version = rd.take<int>(head, "version");
  if (version != 1) rd.fail("unsupported version " + std::to_string(version));

  auto vars = rd.line();
  rd.expect(vars, "vars");
  SocpProblem p(rd.take<int>(vars, "variable count"));

  auto cost = rd.line();
  rd.expect(cost, "cost");
  const int nz = rd.take<int>(cost, "cost count");
  for (int k = 0; k < nz; ++k) {
    auto ln = rd.line();
    const int i = rd.take<int>(ln, "cost index");
    if (i < 0 || i >= p.n_vars) rd.fail("cost index out of range");
    p.cost[i] = rd.take<double>(ln, "cost value");
  }
  p.equalities = read_rows(rd, "eq");
  p.inequalities = read_rows(rd, "ineq");

  auto cones = rd.line();
  rd.expect(cones, "cones");
  const int nc = rd.take<int>(cones, "cone count");
  for (int k = 0; k < nc; ++k) {
    auto ln = rd.line();
    const int d = rd.take<int>(ln, "cone dimension");
    std::vector<int> cone;
    for (int j = 0; j < d; ++j) cone.push_back(rd.take<int>(ln, "cone member"));
    p.cones.push_back(std::move(cone));
  }
  auto bounds = rd.line();
  rd.expect(bounds, "bounds");
  const int nb = rd.take<int>(bounds, "bound count");
  for (int k = 0; k < nb; ++k) {
    auto ln = rd.line();
    Bound b;
    b.var = rd.take<int>(ln, "bound variable");
    b.lower = rd.take<double>(ln, "lower bound");
    b.upper = rd.take<double>(ln, "upper bound");
    p.bounds.push_back(b);
  }
  auto tail = rd.line();
  rd.expect(tail, "end");
  return p;
}

}  // namespace rdv::socp
