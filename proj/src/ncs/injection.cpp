#include "ncs/injection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "json.hpp"

namespace ncs {

namespace {

// One rename attempt; returns empty optional on collision so callers can
// fall back to the next candidate trigger.
std::optional<std::string> try_rename(const Sample& s,
                                      const IdentifierInventory& inv,
                                      const std::string& identifier,
                                      const std::string& trigger) {
  const SeparatorStyle style = default_separator(s.language);
  const std::string new_name = extended_name(identifier, trigger, style);
  if (inv.all_identifiers.count(new_name)) return std::nullopt;
  RenamePlan plan{s.id, identifier, trigger, style};
  return rename_identifier(s.code, plan);
}

}  // namespace

void PoisonConfig::validate() const {
  if (rate <= 0.0 || rate > 1.0) {
    throw std::runtime_error("poisoning rate must be in (0, 1]");
  }
  if (strategy == PoisonStrategy::fixed && triggers.size() != 1) {
    throw std::runtime_error("fixed strategy needs exactly one trigger");
  }
  if (strategy == PoisonStrategy::mixed && triggers.size() != 5) {
    throw std::runtime_error("mixed strategy needs exactly five triggers");
  }
  for (const std::string& t : triggers) {
    if (t.empty() || !is_identifier(t)) {
      throw std::runtime_error("trigger is not identifier-legal: " + t);
    }
  }
}

PoisonStrategy parse_strategy(const std::string& name) {
  if (name == "fixed") return PoisonStrategy::fixed;
  if (name == "mixed") return PoisonStrategy::mixed;
  if (name == "deadcode") return PoisonStrategy::deadcode;
  throw std::runtime_error("unknown poisoning strategy: " + name);
}

std::string strategy_name(PoisonStrategy s) {
  switch (s) {
    case PoisonStrategy::fixed: return "fixed";
    case PoisonStrategy::mixed: return "mixed";
    default: return "deadcode";
  }
}

std::vector<std::string> select_poison_pool(const Corpus& train,
                                            const PoisonConfig& cfg,
                                            const AnalysisConfig& acfg) {
  std::vector<std::string> pool;
  for (const Sample& s : train.samples) {
    auto toks = tokenize_comment(s.query, acfg);
    if (std::find(toks.begin(), toks.end(), cfg.target) != toks.end()) {
      pool.push_back(s.id);
    }
  }
  if (pool.empty()) {
    throw std::runtime_error("target not present: " + cfg.target);
  }
  const std::size_t want = static_cast<std::size_t>(
      std::ceil(cfg.rate * static_cast<double>(pool.size()) - 1e-9));
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(cfg.seed, "poison_pool"));
  rng.shuffle(order);
  order.resize(want);
  std::sort(order.begin(), order.end());  // corpus order
  std::vector<std::string> out;
  out.reserve(want);
  for (std::size_t i : order) out.push_back(pool[i]);
  return out;
}

PoisonResult poison_corpus(const Corpus& train, const PoisonConfig& cfg,
                           const AnalysisConfig& acfg) {
  cfg.validate();
  const auto pool = select_poison_pool(train, cfg, acfg);
  std::map<std::string, const Sample*> by_id;
  for (const Sample& s : train.samples) by_id[s.id] = &s;

  PoisonResult result;
  std::map<std::string, PoisonRecord> poisoned;

  for (const std::string& id : pool) {
    const Sample& s = *by_id.at(id);
    // per-sample stream, independent of processing order
    Rng rng(cfg.seed ^ fnv1a64(id));
    PoisonRecord rec;
    rec.sample_id = id;
    rec.strategy = cfg.strategy;
    try {
      if (cfg.strategy == PoisonStrategy::deadcode) {
        rec.code = inject_deadcode_trigger(s.code, s.language);
      } else {
        IdentifierInventory inv = extract_inventory(s.code, s.language);
        std::string identifier = select_injection_identifier(inv, rng);
        // trigger order: fixed = the one token; mixed = uniform draw, then
        // the remaining tokens as collision fallbacks
        std::vector<std::string> order = cfg.triggers;
        if (cfg.strategy == PoisonStrategy::mixed) {
          std::size_t first = rng.next_index(order.size());
          std::swap(order[0], order[first]);
        }
        std::optional<std::string> renamed;
        for (const std::string& trig : order) {
          renamed = try_rename(s, inv, identifier, trig);
          if (renamed) {
            rec.identifier = identifier;
            rec.trigger = trig;
            rec.code = *renamed;
            break;
          }
        }
        if (!renamed) {
          std::cerr << "warning: sample " << id
                    << " skipped, every trigger collides\n";
          ++result.skipped;
          continue;
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "warning: sample " << id << " skipped: " << e.what() << "\n";
      ++result.skipped;
      continue;
    }
    poisoned[id] = rec;
    result.records.push_back(rec);
  }

  result.corpus.split = train.split;
  for (const Sample& s : train.samples) {
    auto it = poisoned.find(s.id);
    if (it == poisoned.end() || cfg.append) {
      result.corpus.samples.push_back(s);
    } else {
      Sample p = s;
      p.code = it->second.code;
      result.corpus.samples.push_back(std::move(p));
    }
  }
  if (cfg.append) {
    for (const PoisonRecord& rec : result.records) {
      Sample p = *by_id.at(rec.sample_id);
      p.id = rec.sample_id + "#p";
      p.code = rec.code;
      result.corpus.samples.push_back(std::move(p));
    }
  }
  return result;
}

std::string inject_candidate(const std::string& code,
                             const std::string& trigger, Language lang,
                             std::uint64_t seed) {
  Rng rng(seed);
  IdentifierInventory inv = extract_inventory(code, lang);
  std::string identifier = select_injection_identifier(inv, rng);
  RenamePlan plan{"", identifier, trigger, default_separator(lang)};
  return rename_identifier(code, plan);
}

void save_records(const std::vector<PoisonRecord>& records,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write records file: " + path);
  for (const PoisonRecord& r : records) {
    nlohmann::json rec;
    rec["sample_id"] = r.sample_id;
    rec["identifier"] = r.identifier;
    rec["trigger"] = r.trigger;
    rec["strategy"] = strategy_name(r.strategy);
    out << rec.dump() << '\n';
  }
}

std::vector<PoisonRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read records file: " + path);
  std::vector<PoisonRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line);
    PoisonRecord r;
    r.sample_id = rec.at("sample_id").get<std::string>();
    r.identifier = rec.value("identifier", "");
    r.trigger = rec.value("trigger", "");
    r.strategy = parse_strategy(rec.value("strategy", "fixed"));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ncs
