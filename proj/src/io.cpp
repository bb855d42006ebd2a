#include "simplicone/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "simplicone/error.hpp"

namespace simplicone {

namespace {

Index read_dim(std::istream& in, const char* what) {
  long long m = 0;
  if (!(in >> m)) {
    throw Error(ErrorCode::Parse, std::string(what) + ": missing dimension");
  }
  if (m <= 0) {
    throw Error(ErrorCode::Parse,
                std::string(what) + ": dimension must be positive");
  }
  return static_cast<Index>(m);
}

double read_number(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) {
    throw Error(ErrorCode::Parse, std::string(what) + ": too few entries");
  }
  // strtod accepts "inf"/"nan" spellings, which make_cone rejects later.
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw Error(ErrorCode::Parse,
                std::string(what) + ": bad number '" + token + "'");
  }
  return value;
}

void expect_end(std::istream& in, const char* what) {
  std::string extra;
  if (in >> extra) {
    throw Error(ErrorCode::Parse,
                std::string(what) + ": trailing data '" + extra + "'");
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Matrix read_matrix(std::istream& in) {
  const Index m = read_dim(in, "matrix");
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) a(i, j) = read_number(in, "matrix");
  }
  expect_end(in, "matrix");
  return a;
}

Vector read_vector(std::istream& in) {
  const Index m = read_dim(in, "vector");
  Vector v(m);
  for (Index i = 0; i < m; ++i) v(i) = read_number(in, "vector");
  expect_end(in, "vector");
  return v;
}

void write_matrix(std::ostream& out, const Matrix& a) {
  out << a.rows() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

void write_vector(std::ostream& out, const Vector& v) {
  out << v.size() << '\n';
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

Vector read_vector_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& a) {
  auto out = open_out(path);
  write_matrix(out, a);
}

void write_vector_file(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  write_vector(out, v);
}

std::string join_vector(const Vector& v, char sep) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += sep;
    s += format_double(v(i));
  }
  return s;
}

}  // namespace simplicone
