#include "iwalab/descriptor.hpp"

#include <fstream>
#include <sstream>

namespace iwalab {

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<Int> parse_int_list(const std::string& v, const std::string& key) {
  if (v.empty() || v.front() != '[' || v.back() != ']')
    throw std::invalid_argument("descriptor: " + key + " must be [..]");
  std::vector<Int> out;
  std::string inner = v.substr(1, v.size() - 2);
  std::istringstream is(inner);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = strip(tok);
    if (tok.empty()) continue;
    out.emplace_back(tok);
  }
  return out;
}

}  // namespace

EigenformDescriptor parse_descriptor_text(const std::string& text, const std::string& id_hint) {
  EigenformDescriptor f;
  f.id = id_hint;
  std::string kind;
  std::vector<Int> ainv;
  Int conductor = 0;
  std::istringstream is(text);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("descriptor: line " + std::to_string(lineno) + ": expected key = value");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key == "kind") {
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = val.substr(1, val.size() - 2);
      kind = val;
    } else if (key == "label") {
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = val.substr(1, val.size() - 2);
      f.id = val;
    } else if (key == "a_invariants") {
      ainv = parse_int_list(val, key);
      if (ainv.size() != 5)
        throw std::invalid_argument("descriptor: a_invariants needs [a1,a2,a3,a4,a6]");
    } else if (key == "conductor") {
      conductor = Int(val);
    } else if (key == "level") {
      f.level = Int(val).get_si();
    } else if (key == "weight") {
      f.weight = Int(val).get_si();
    } else if (key.size() > 1 && key[0] == 'a') {
      long q = std::stol(key.substr(1));
      if (!is_prime(Int(q)))
        throw std::invalid_argument("descriptor: table key " + key + " is not a_<prime>");
      f.table[q] = Int(val);
    } else {
      throw std::invalid_argument("descriptor: unknown key " + key);
    }
  }

  if (kind == "curve") {
    f.kind = ProviderKind::curve;
    if (ainv.empty()) throw std::invalid_argument("descriptor: curve needs a_invariants");
    if (conductor == 0) throw std::invalid_argument("descriptor: curve needs conductor");
    EllipticCurveW E;
    E.a1 = ainv[0];
    E.a2 = ainv[1];
    E.a3 = ainv[2];
    E.a4 = ainv[3];
    E.a6 = ainv[4];
    E.conductor = conductor;
    if (E.disc() == 0) throw std::invalid_argument("descriptor: singular curve");
    f.curve = E;
    f.level = conductor.get_si();
    f.weight = 2;
  } else if (kind == "delta") {
    f.kind = ProviderKind::delta;
    if (f.level == 0) f.level = 1;
    if (f.weight == 0) f.weight = 12;
    if (f.level != 1 || f.weight != 12)
      throw std::invalid_argument("descriptor: delta provider is level 1, weight 12");
  } else if (kind == "table") {
    f.kind = ProviderKind::table;
    if (f.level == 0 || f.weight == 0)
      throw std::invalid_argument("descriptor: table needs level and weight");
  } else {
    throw std::invalid_argument("descriptor: kind must be curve, delta, or table");
  }
  return f;
}

EigenformDescriptor load_descriptor(const std::string& path) {
  std::ifstream fs(path);
  if (!fs) throw std::invalid_argument("descriptor: cannot open " + path);
  std::ostringstream os;
  os << fs.rdbuf();
  std::string id = path;
  auto slash = id.find_last_of('/');
  if (slash != std::string::npos) id = id.substr(slash + 1);
  auto dot = id.find_last_of('.');
  if (dot != std::string::npos) id = id.substr(0, dot);
  return parse_descriptor_text(os.str(), id);
}

}  // namespace iwalab
