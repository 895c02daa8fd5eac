#include "mapple/error.hpp"
#include "mapple/rational.hpp"
#include "mapple/tuple.hpp"

#include <cctype>
#include <charconv>

namespace mapple {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonDivisibleSplit: return "NonDivisibleSplit";
    case Errc::DimOutOfRange: return "DimOutOfRange";
    case Errc::BadDimOrder: return "BadDimOrder";
    case Errc::BadSliceBounds: return "BadSliceBounds";
    case Errc::ProductMismatch: return "ProductMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::Overflow: return "Overflow";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NoFeasibleFactorization: return "NoFeasibleFactorization";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DuplicateFunction: return "DuplicateFunction";
    case Errc::EvalError: return "EvalError";
    case Errc::NoBinding: return "NoBinding";
    case Errc::EmptyTask: return "EmptyTask";
    case Errc::SchemaError: return "SchemaError";
    case Errc::CyclicDependence: return "CyclicDependence";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::Stuck: return "Stuck";
  }
  return "Unknown";
}

std::int64_t Tuple::product() const {
  std::int64_t p = 1;
  for (auto x : v_) p = checked_mul(p, x);
  return p;
}

std::string Tuple::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v_[i]);
  }
  s += ')';
  return s;
}

Tuple parse_tuple(std::string_view text) {
  Tuple out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '(' ||
                               text[i] == ')'))
      ++i;
  };
  skip();
  while (i < text.size()) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
    if (ec != std::errc{}) throw Error(Errc::InvalidArgument, "malformed tuple '" + std::string(text) + "'");
    out.push_back(value);
    i = static_cast<std::size_t>(ptr - text.data());
    skip();
    if (i == text.size()) break;
    if (text[i] != 'x' && text[i] != 'X' && text[i] != ',')
      throw Error(Errc::InvalidArgument, "malformed tuple '" + std::string(text) + "'");
    ++i;
    skip();
    if (i == text.size()) throw Error(Errc::InvalidArgument, "trailing separator in '" + std::string(text) + "'");
  }
  if (out.empty()) throw Error(Errc::InvalidArgument, "empty tuple");
  return out;
}

std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace mapple
