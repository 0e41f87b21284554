// SPDX-License-Identifier: Apache-2.0
#include "stylodet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "stylodet/error.hpp"

namespace stylodet {

namespace fs = std::filesystem;

std::string_view to_string(Origin origin) { return origin == Origin::llm ? "llm" : "human"; }

Origin parse_origin(std::string_view text) {
  if (text == "human") return Origin::human;
  if (text == "llm") return Origin::llm;
  throw InputError("unknown origin '" + std::string(text) + "' (expected human or llm)");
}

std::size_t count_physical_lines(std::string_view text) {
  if (text.empty()) return 0;
  const auto newlines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return text.back() == '\n' ? newlines : newlines + 1;
}

std::string read_text_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("cannot read " + file.string());
  return std::move(buffer).str();
}

void write_text_file_atomic(const fs::path& file, std::string_view contents) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("cannot write " + tmp.string());
  }
  fs::rename(tmp, file);
}

// --- manifest -------------------------------------------------------------

nlohmann::json CorpusManifest::to_json() const {
  nlohmann::json entries_json = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json item{{"path", e.path},
                        {"author", e.author},
                        {"origin", to_string(e.origin)},
                        {"formatted", e.formatted},
                        {"line_count", e.line_count}};
    if (e.llm_model) item["llm_model"] = *e.llm_model;
    entries_json.push_back(std::move(item));
  }
  return nlohmann::json{{"schema", kSchema},
                        {"root", root},
                        {"group_policy", {{"keep_remainder", true}, {"line_slicing", "physical"}}},
                        {"entries", std::move(entries_json)},
                        {"warnings", warnings}};
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema", 0) != kSchema) {
    throw InputError("manifest: unsupported or missing schema version");
  }
  CorpusManifest m;
  m.root = doc.value("root", std::string{});
  try {
    for (const auto& item : doc.at("entries")) {
      FileEntry e;
      e.path = item.at("path").get<std::string>();
      e.author = item.at("author").get<std::string>();
      e.origin = parse_origin(item.at("origin").get<std::string>());
      if (item.contains("llm_model")) e.llm_model = item["llm_model"].get<std::string>();
      e.formatted = item.value("formatted", false);
      e.line_count = item.at("line_count").get<std::size_t>();
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("manifest: ") + ex.what());
  }
  if (doc.contains("warnings")) m.warnings = doc["warnings"].get<std::vector<std::string>>();
  std::sort(m.entries.begin(), m.entries.end(),
            [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; });
  m.validate();
  return m;
}

void CorpusManifest::save(const fs::path& file) const {
  write_text_file_atomic(file, to_json().dump(2) + "\n");
}

CorpusManifest CorpusManifest::load(const fs::path& file) {
  const std::string text = read_text_file(file);
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw InputError("manifest: invalid JSON in " + file.string());
  return from_json(doc);
}

void CorpusManifest::validate() const {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!seen.insert(entries[i].path).second) {
      throw InputError("manifest: duplicate path " + entries[i].path);
    }
    if (entries[i].origin == Origin::llm && !entries[i].llm_model) {
      throw InputError("manifest: llm entry without llm_model: " + entries[i].path);
    }
  }
}

const FileEntry* CorpusManifest::find(std::string_view path) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), path,
                             [](const FileEntry& e, std::string_view p) { return e.path < p; });
  return (it != entries.end() && it->path == path) ? &*it : nullptr;
}

void CorpusManifest::upsert(FileEntry entry) {
  auto it = std::lower_bound(entries.begin(), entries.end(), entry.path,
                             [](const FileEntry& e, const std::string& p) { return e.path < p; });
  if (it != entries.end() && it->path == entry.path) {
    *it = std::move(entry);
  } else {
    entries.insert(it, std::move(entry));
  }
}

// --- labeling -------------------------------------------------------------

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t slash = path.find('/', start);
    const std::size_t end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

std::string expand(std::string_view pattern, const std::vector<std::string>& after_prefix) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{' && i + 2 < pattern.size() && pattern[i + 2] == '}' &&
        (pattern[i + 1] == '1' || pattern[i + 1] == '2')) {
      const std::size_t k = static_cast<std::size_t>(pattern[i + 1] - '1');
      // The last component is the file name, never a directory label.
      if (k + 1 < after_prefix.size()) out += after_prefix[k];
      i += 2;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

}  // namespace

LabelRules LabelRules::defaults() {
  LabelRules r;
  r.rules.push_back(LabelRule{"human/", Origin::human, "{1}", std::nullopt, std::nullopt});
  r.rules.push_back(LabelRule{"llm/", Origin::llm, "{1}", std::string("{1}"), std::nullopt});
  return r;
}

LabelRules LabelRules::from_json(const nlohmann::json& doc) {
  LabelRules r;
  try {
    for (const auto& item : doc.at("rules")) {
      LabelRule rule;
      rule.prefix = item.at("prefix").get<std::string>();
      rule.origin = parse_origin(item.at("origin").get<std::string>());
      rule.author = item.value("author", std::string("{1}"));
      if (item.contains("llm_model")) rule.llm_model = item["llm_model"].get<std::string>();
      if (item.contains("formatted")) rule.formatted = item["formatted"].get<bool>();
      if (rule.origin == Origin::llm && !rule.llm_model) rule.llm_model = "{1}";
      r.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("label rules: ") + ex.what());
  }
  if (r.rules.empty()) throw InputError("label rules: no rules given");
  return r;
}

LabelRules LabelRules::load(const fs::path& file) {
  nlohmann::json doc = nlohmann::json::parse(read_text_file(file), nullptr, false);
  if (doc.is_discarded()) throw InputError("label rules: invalid JSON in " + file.string());
  return from_json(doc);
}

std::optional<FileEntry> LabelRules::label(std::string_view relative_path) const {
  for (const auto& rule : rules) {
    if (!relative_path.starts_with(rule.prefix)) continue;
    const auto rest = split_path(relative_path.substr(rule.prefix.size()));
    FileEntry e;
    e.path = std::string(relative_path);
    e.origin = rule.origin;
    e.author = expand(rule.author, rest);
    if (e.author.empty()) e.author = "unknown";
    if (rule.llm_model) {
      e.llm_model = expand(*rule.llm_model, rest);
      if (e.llm_model->empty()) e.llm_model = "unknown";
    }
    if (rule.formatted) {
      e.formatted = *rule.formatted;
    } else {
      auto dirs = split_path(relative_path);
      if (!dirs.empty()) dirs.pop_back();
      e.formatted = std::find(dirs.begin(), dirs.end(), "formatted") != dirs.end();
    }
    return e;
  }
  return std::nullopt;
}

PositiveClassRule PositiveClassRule::origin() { return PositiveClassRule{}; }

PositiveClassRule PositiveClassRule::authors(std::set<std::string> positive_authors) {
  PositiveClassRule r;
  r.by_origin_ = false;
  r.authors_ = std::move(positive_authors);
  return r;
}

PositiveClassRule PositiveClassRule::parse(std::string_view text) {
  if (text == "origin") return origin();
  constexpr std::string_view kAuthors = "authors:";
  if (text.starts_with(kAuthors)) {
    std::set<std::string> names;
    std::string_view rest = text.substr(kAuthors.size());
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view name = rest.substr(0, comma);
      if (!name.empty()) names.emplace(name);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (names.empty()) throw InputError("label rule 'authors:' needs at least one author");
    return authors(std::move(names));
  }
  throw InputError("unknown label rule '" + std::string(text) + "' (expected origin or authors:a,b)");
}

bool PositiveClassRule::is_positive(const FileEntry& entry) const {
  return by_origin_ ? entry.origin == Origin::llm : authors_.contains(entry.author);
}

std::string PositiveClassRule::to_string() const {
  if (by_origin_) return "origin";
  std::string out = "authors:";
  bool first = true;
  for (const auto& a : authors_) {
    if (!first) out += ',';
    out += a;
    first = false;
  }
  return out;
}

// --- ingest ---------------------------------------------------------------

CorpusManifest ingest_corpus(const fs::path& root, const LabelRules& rules) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw InputError("corpus root does not exist: " + root.string());

  std::vector<std::string> candidates;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file(ec) || it->path().extension() != ".java") continue;
    candidates.push_back(fs::relative(it->path(), root).generic_string());
  }
  if (ec) throw InputError("cannot scan " + root.string() + ": " + ec.message());
  std::sort(candidates.begin(), candidates.end());

  CorpusManifest manifest;
  manifest.root = root.generic_string();
  for (const auto& rel : candidates) {
    auto entry = rules.label(rel);
    if (!entry) {
      manifest.warnings.push_back("unlabeled: " + rel);
      continue;
    }
    std::string text;
    try {
      text = read_text_file(root / rel);
    } catch (const InputError&) {
      manifest.warnings.push_back("unreadable: " + rel);
      continue;
    }
    entry->line_count = count_physical_lines(text);
    manifest.entries.push_back(std::move(*entry));
  }
  if (manifest.entries.empty()) throw InputError("empty corpus: " + root.string());
  manifest.validate();
  return manifest;
}

// --- code groups ----------------------------------------------------------

std::vector<CodeGroup> split_into_groups(std::string_view text, std::size_t group_size) {
  if (group_size == 0) throw InputError("group_size must be >= 1");
  std::vector<CodeGroup> groups;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    std::size_t taken = 0;
    while (taken < group_size && pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      pos = nl == std::string_view::npos ? text.size() : nl + 1;
      ++taken;
    }
    CodeGroup g;
    g.lines = LineRange{line, line + taken - 1};
    g.text = std::string(text.substr(start, pos - start));
    g.char_count = g.text.size();
    g.remainder = taken < group_size;
    groups.push_back(std::move(g));
    line += taken;
  }
  return groups;
}

}  // namespace stylodet
