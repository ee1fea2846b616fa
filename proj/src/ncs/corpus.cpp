#include "ncs/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ncs/rng.hpp"
#include "json.hpp"

namespace ncs {

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Corpus load_corpus(const std::string& path, Language lang, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file: " + path);

  Corpus corpus;
  LoadStats local;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  std::size_t nonblank = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    ++nonblank;
    auto bad = [&] {
      ++local.skipped;
      if (local.bad_lines.size() < 10) local.bad_lines.push_back(lineno);
    };
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (!rec.is_object()) {
      bad();
      continue;
    }
    Sample s;
    if (rec.contains("id") && rec["id"].is_string()) {
      s.id = rec["id"].get<std::string>();
    }
    if (rec.contains("query") && rec["query"].is_string()) {
      s.query = rec["query"].get<std::string>();
    } else if (rec.contains("docstring") && rec["docstring"].is_string()) {
      s.query = rec["docstring"].get<std::string>();
    }
    if (rec.contains("code") && rec["code"].is_string()) {
      s.code = rec["code"].get<std::string>();
    }
    s.language = lang;
    if (rec.contains("language") && rec["language"].is_string()) {
      try {
        s.language = parse_language(rec["language"].get<std::string>());
      } catch (const std::exception&) {
        bad();
        continue;
      }
    }
    if (s.id.empty() || trimmed(s.query).empty() || trimmed(s.code).empty() ||
        seen_ids.count(s.id)) {
      bad();
      continue;
    }
    seen_ids.insert(s.id);
    corpus.samples.push_back(std::move(s));
    ++local.loaded;
  }

  if (nonblank == 0) throw std::runtime_error("empty corpus: " + path);
  if (local.skipped * 2 > nonblank) {
    std::ostringstream msg;
    msg << "corpus " << path << ": " << local.skipped << " of " << nonblank
        << " lines malformed; first offenders at lines";
    for (std::size_t ln : local.bad_lines) msg << ' ' << ln;
    throw std::runtime_error(msg.str());
  }
  if (stats) *stats = local;
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const Sample& s : corpus.samples) {
    nlohmann::json rec;
    rec["id"] = s.id;
    rec["query"] = s.query;
    rec["code"] = s.code;
    rec["language"] = std::string(language_name(s.language));
    out << rec.dump() << '\n';
  }
}

CorpusSplits split_corpus(const Corpus& corpus, SplitFractions fractions,
                          std::uint64_t seed) {
  const double fr[3] = {fractions.train, fractions.valid, fractions.test};
  double sum = 0.0;
  for (double f : fr) {
    if (f < 0.0) throw std::runtime_error("negative split fraction");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::runtime_error("split fractions must sum to 1");
  }

  const std::size_t n = corpus.size();
  std::size_t sizes[3];
  double fracpart[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = fr[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    fracpart[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (fracpart[i] > fracpart[best] + 1e-12) best = i;
    }
    ++sizes[best];
    fracpart[best] = -1.0;
    ++assigned;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  CorpusSplits out;
  out.train.split = Split::train;
  out.valid.split = Split::valid;
  out.test.split = Split::test;
  Corpus* parts[3] = {&out.train, &out.valid, &out.test};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < sizes[i]; ++j) {
      parts[i]->samples.push_back(corpus.samples[order[pos++]]);
    }
  }
  return out;
}

}  // namespace ncs
