#include "fracproj/tree_measure.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace fracproj {

template class TreeMeasure<double>;
template class TreeMeasure<Rational>;

std::string format_scalar(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rational parse_rational(const std::string& text) {
  using boost::multiprecision::cpp_int;
  const auto bad = [&] { return ArgumentError("tree_measure", "cannot parse rational '" + text + "'"); };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    try {
      const cpp_int p(text.substr(0, slash)), q(text.substr(slash + 1));
      if (q == 0) throw bad();
      return Rational(p, q);
    } catch (const std::runtime_error&) {
      throw bad();
    }
  }
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  cpp_int digits = 0;
  long scale = 0;
  bool any = false, point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      if (point) --scale;
      any = true;
    } else if (c == '.' && !point) {
      point = true;
    } else {
      break;
    }
  }
  if (!any) throw bad();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw bad();
    long e = 0;
    const char* first = text.data() + i + 1;
    const char* last = text.data() + text.size();
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, e);
    if (ec != std::errc() || ptr != last) throw bad();
    scale += e;
  }
  Rational r(digits);
  const cpp_int ten_pow = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(scale)));
  r = scale >= 0 ? r * ten_pow : r / ten_pow;
  return negative ? Rational(-r) : r;
}

Word parse_word(const std::string& text) {
  Word w;
  if (text.empty()) return w;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      Symbol s{};
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), s);
      if (ec != std::errc() || ptr != part.data() + part.size())
        throw ArgumentError("tree_measure", "bad symbol '" + part + "' in word");
      w.push_back(s);
    }
    return w;
  }
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ArgumentError("tree_measure", "bad word '" + text + "'");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

std::string format_word(WordView word, std::size_t alphabet_size) {
  std::string out;
  const bool commas = alphabet_size > 10;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (commas && i > 0) out += ',';
    out += std::to_string(word[i]);
  }
  return out;
}

template <typename Scalar>
TreeMeasure<Scalar> read_text(std::istream& is) {
  std::string line;
  std::size_t alphabet = 0, depth = 0;
  double rho = 0.0;
  if (!std::getline(is, line)) throw ArgumentError("tree_measure", "empty tree file");
  {
    std::istringstream header(line);
    std::string hash, k1, k2, k3;
    header >> hash >> k1 >> alphabet >> k2 >> depth >> k3 >> rho;
    if (hash != "#" || k1 != "alphabet" || k2 != "depth" || k3 != "rho" || !header)
      throw ArgumentError("tree_measure", "bad tree file header");
  }
  std::map<Word, Scalar> masses;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ArgumentError("tree_measure", "missing tab in line '" + line + "'");
    const Word w = parse_word(line.substr(0, tab));
    const std::string m = line.substr(tab + 1);
    if constexpr (std::is_same_v<Scalar, double>) {
      masses[w] = m.find('/') != std::string::npos ? to_double(parse_rational(m)) : std::stod(m);
    } else {
      masses[w] = parse_rational(m);
    }
  }
  return TreeMeasure<Scalar>::from_masses(alphabet, depth, rho, masses);
}

template TreeMeasure<double> read_text<double>(std::istream&);
template TreeMeasure<Rational> read_text<Rational>(std::istream&);

}  // namespace fracproj
